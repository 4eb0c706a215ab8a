//! Quantum measurement statistics on a 1-D grid.
//!
//! A measurement is modelled as a pair of linear integral transforms acting on
//! the probability density and the probability current of the measured state.
//! The crate computes the observable parameters of both the intrinsic and the
//! recorded readings, the error and entropy indicators between them, and checks
//! every numerical path against closed-form Gaussian and oscillator results.

pub mod analytic;
pub mod error;
pub mod estimators;
pub mod grid;
pub mod indicators;
pub mod report;
pub mod sampling;
pub mod scenario;
pub mod state;
pub mod transform;

pub use analytic::{analytic_oscillator_report, analytic_scenario_report, AnalyticReport};
pub use error::{Error, Result};
pub use estimators::{
    check_uncertainty_relations, correlation_xp, mean_momentum, mean_position,
    momentum_second_moment, operator_mean_and_variance, parameter_set, position_moment,
    OperatorSpec, ParameterSet, UncertaintyReport,
};
pub use grid::{Grid, Quadrature, RealField, UnitSystem};
pub use indicators::{
    entropy_deltas, error_indicators, motional_entropy, positional_entropy, EntropyPair,
    IndicatorReport,
};
pub use report::MeasurementReport;
pub use sampling::{empirical_parameters, sample_positions, EmpiricalParameters, SampleSet};
pub use state::{
    gaussian_packet, oscillator_ground_state, reading_of, reconstruct_wavefunction,
    GaussianPacketParams, Label, Reading, WaveFunction,
};
pub use transform::{
    apply_current_transform, apply_density_transform, check_normalization, gaussian_kernel,
    identity_kernel, DeviceParams, Kernel, KernelKind, NormalizationReport,
};
