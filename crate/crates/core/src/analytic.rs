//! Closed-form results for a Gaussian packet seen through Gaussian kernels, and
//! for the oscillator ground state seen through a Gaussian density kernel.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::ParameterSet;
use crate::grid::UnitSystem;
use crate::indicators::{epsilon, error_indicators, EntropyPair};
use crate::report::MeasurementReport;
use crate::state::{oscillator_width, GaussianPacketParams, Label};
use crate::transform::DeviceParams;

/// `amplitude · N(center, variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianShape {
    pub center: f64,
    pub variance: f64,
    pub amplitude: f64,
}

impl GaussianShape {
    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.amplitude * (-0.5 * d * d / self.variance).exp() / (2.0 * PI * self.variance).sqrt()
    }

    /// -∫ f ln f dx for f = |amplitude|·N(center, variance).
    pub fn entropy(&self) -> f64 {
        let c = self.amplitude.abs();
        if c == 0.0 {
            return 0.0;
        }
        -c * c.ln() + c * 0.5 * (2.0 * PI * E * self.variance).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordedShape {
    pub density: GaussianShape,
    pub current: GaussianShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub recorded_shape: RecordedShape,
    #[serde(flatten)]
    pub report: MeasurementReport,
}

/// α⁴ - λ⁴ + 2σ²(α² + λ²); the recorded momentum spread exists only when positive.
pub fn validity_radicand(alpha: f64, device: DeviceParams) -> f64 {
    let (a2, s2, l2) = (alpha * alpha, device.sigma * device.sigma, device.lambda * device.lambda);
    a2 * a2 - l2 * l2 + 2.0 * s2 * (a2 + l2)
}

fn assemble(
    units: UnitSystem,
    intrinsic: ParameterSet,
    recorded: ParameterSet,
    shape_i: RecordedShape,
    shape_r: RecordedShape,
) -> Result<AnalyticReport> {
    let e_i = EntropyPair {
        h: shape_i.density.entropy(),
        tau: shape_i.current.entropy(),
        label: Label::I,
    };
    let e_r = EntropyPair {
        h: shape_r.density.entropy(),
        tau: shape_r.current.entropy(),
        label: Label::R,
    };
    let indicators = error_indicators(&intrinsic, &recorded)?.with_entropy(e_r.h - e_i.h, e_r.tau - e_i.tau);
    Ok(AnalyticReport {
        recorded_shape: shape_r,
        report: MeasurementReport {
            intrinsic,
            recorded,
            indicators,
            entropy_intrinsic: e_i,
            entropy_recorded: e_r,
            epsilon: epsilon(&indicators, units.hbar),
        },
    })
}

pub fn analytic_scenario_report(
    packet: GaussianPacketParams,
    device: DeviceParams,
    units: UnitSystem,
) -> Result<AnalyticReport> {
    packet.validate()?;
    device.validate()?;
    units.validate()?;
    let radicand = validity_radicand(packet.alpha, device);
    if radicand <= 0.0 {
        return Err(Error::Validity { radicand });
    }
    let GaussianPacketParams { x0, alpha, k } = packet;
    let h = units.hbar;
    let flux = h * k / units.mass;
    let a2 = alpha * alpha;
    let s2 = a2 + device.sigma * device.sigma;
    let l2 = a2 + device.lambda * device.lambda;
    let corr = Complex64::new(0.0, 0.5 * h);
    let intrinsic = ParameterSet {
        label: Label::I,
        mean_x: x0,
        mean_p: h * k,
        var_x: a2,
        var_p: h * h / (4.0 * a2),
        corr_xp: corr,
        mean_h: None,
        var_h: None,
    };
    let var_p_r = h * h * (k * k * s2 / radicand.sqrt() - k * k + 1.0 / (4.0 * s2));
    let recorded = ParameterSet {
        label: Label::R,
        var_x: s2,
        var_p: var_p_r,
        ..intrinsic
    };
    let shape = |var_rho: f64, var_j: f64| RecordedShape {
        density: GaussianShape {
            center: x0,
            variance: var_rho,
            amplitude: 1.0,
        },
        current: GaussianShape {
            center: x0,
            variance: var_j,
            amplitude: flux,
        },
    };
    assemble(units, intrinsic, recorded, shape(a2, a2), shape(s2, l2))
}

/// Ground state of ω, recorded through a density kernel of width σ; the
/// recorded wavefunction is the real root of the recorded density.
pub fn analytic_oscillator_report(omega: f64, sigma: f64, units: UnitSystem) -> Result<AnalyticReport> {
    let alpha = oscillator_width(omega, units)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    let (h, m) = (units.hbar, units.mass);
    let a2 = alpha * alpha;
    let s2 = a2 + sigma * sigma;
    let b = h + 2.0 * m * omega * sigma * sigma;
    let mean_h_r = omega * (h * h + b * b) / (4.0 * b);
    let std_h_r =
        2.0 * m * omega * omega * sigma * sigma * (h + m * omega * sigma * sigma) / (2f64.sqrt() * b);
    let base = |label, var_x: f64, mean_h, var_h| ParameterSet {
        label,
        mean_x: 0.0,
        mean_p: 0.0,
        var_x,
        var_p: h * h / (4.0 * var_x),
        corr_xp: Complex64::new(0.0, 0.5 * h),
        mean_h: Some(mean_h),
        var_h: Some(var_h),
    };
    let intrinsic = base(Label::I, a2, 0.5 * h * omega, 0.0);
    let recorded = base(Label::R, s2, mean_h_r, std_h_r * std_h_r);
    let still = |var| RecordedShape {
        density: GaussianShape {
            center: 0.0,
            variance: var,
            amplitude: 1.0,
        },
        current: GaussianShape {
            center: 0.0,
            variance: var,
            amplitude: 0.0,
        },
    };
    assemble(units, intrinsic, recorded, still(a2), still(s2))
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // reference values are quoted to seven digits
mod tests {
    use super::*;

    fn s1(sigma: f64, lambda: f64) -> Result<AnalyticReport> {
        analytic_scenario_report(
            GaussianPacketParams::new(0.0, 1.0, 1.0).unwrap(),
            DeviceParams::new(sigma, lambda).unwrap(),
            UnitSystem::default(),
        )
    }

    /// Var H for a real Gaussian of variance s², from ⟨p⁴⟩, ⟨x⁴⟩ and ⟨x²p² + p²x²⟩.
    fn oscillator_oracle(omega: f64, s2: f64) -> (f64, f64) {
        let mean = 1.0 / (8.0 * s2) + omega * omega * s2 / 2.0;
        let var = 1.0 / (32.0 * s2 * s2) + omega.powi(4) * s2 * s2 / 2.0 - omega * omega / 4.0;
        (mean, var)
    }

    #[test]
    fn s1_closed_forms() {
        let r = s1(1.0, 0.0).unwrap().report;
        assert!((r.recorded.std_x() - 1.414_213_6).abs() < 1e-7);
        assert!((r.recorded.std_p() - 0.528_867_2).abs() < 1e-7);
        assert!((r.indicators.d_std_x - 0.414_213_6).abs() < 1e-7);
        assert!((r.indicators.d_std_p - 0.028_867_2).abs() < 1e-7);
        assert!((r.indicators.d_h.unwrap() - 0.346_573_6).abs() < 1e-7);
        assert_eq!(r.indicators.d_tau.unwrap(), 0.0);
        assert!((r.epsilon - 0.011_957_2).abs() < 1e-7);
        assert_eq!(r.indicators.d_mean_x, 0.0);
        assert_eq!(r.indicators.d_corr, 0.0);
    }

    #[test]
    fn recorded_momentum_matches_gaussian_integral() {
        // ⟨p²⟩ = ħ²/(4s²) + m²∫J²/ρ with ∫N_J²/N_ρ = s_ρ²/(s_J √(2s_ρ² - s_J²)).
        for (sigma, lambda) in [(0.3, 0.7), (1.0, 1.0), (0.5, 0.0), (0.8, 1.2)] {
            let r = s1(sigma, lambda).unwrap().report;
            let sr2: f64 = 1.0 + sigma * sigma;
            let sj2: f64 = 1.0 + lambda * lambda;
            let p2 = 1.0 / (4.0 * sr2) + sr2 / (sj2.sqrt() * (2.0 * sr2 - sj2).sqrt());
            assert!((r.recorded.var_p - (p2 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn matched_widths_saturate_the_bound() {
        let r = s1(1.0, 1.0).unwrap().report;
        assert!((r.recorded.std_p() - 0.353_553_4).abs() < 1e-7);
        assert!((r.recorded.std_x() * r.recorded.std_p() - 0.5).abs() < 1e-12);
        assert!((r.indicators.d_tau.unwrap() - 0.346_573_6).abs() < 1e-7);
    }

    #[test]
    fn ideal_device_has_no_error() {
        let r = s1(0.0, 0.0).unwrap().report;
        assert!(r.indicators.fields().iter().all(|(_, v)| *v == 0.0));
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn zero_radicand_is_invalid() {
        assert!(matches!(s1(0.0, 1.0), Err(Error::Validity { .. })));
        assert!(matches!(s1(0.0, 1.5), Err(Error::Validity { .. })));
    }

    #[test]
    fn oscillator_closed_forms() {
        let r = analytic_oscillator_report(1.0, 1.0, UnitSystem::default()).unwrap().report;
        assert_eq!(r.intrinsic.mean_h, Some(0.5));
        assert_eq!(r.intrinsic.var_h, Some(0.0));
        assert!((r.recorded.mean_h.unwrap() - 5.0 / 6.0).abs() < 1e-12);
        assert!((r.recorded.std_h().unwrap() - 0.942_809_0).abs() < 1e-7);
        assert!((r.indicators.d_mean_h.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.indicators.d_std_h.unwrap() - 0.942_809_0).abs() < 1e-7);
    }

    #[test]
    fn oscillator_matches_moment_oracle() {
        for (omega, sigma) in [(1.0, 1.0), (2.0, 0.3), (0.5, 1.7)] {
            let r = analytic_oscillator_report(omega, sigma, UnitSystem::default()).unwrap().report;
            let (mean, var) = oscillator_oracle(omega, 0.5 / omega + sigma * sigma);
            assert!((r.recorded.mean_h.unwrap() - mean).abs() < 1e-12);
            assert!((r.recorded.var_h.unwrap() - var).abs() < 1e-12);
        }
    }

    #[test]
    fn oscillator_edge_cases() {
        let r = analytic_oscillator_report(1.0, 0.0, UnitSystem::default()).unwrap().report;
        assert_eq!(r.intrinsic.mean_h, r.recorded.mean_h);
        assert_eq!(r.indicators.d_std_h, Some(0.0));
        assert!(analytic_oscillator_report(0.0, 1.0, UnitSystem::default()).is_err());
        // m ω σ²/ħ = 50: the thermal-like limit m ω² σ²/2 is approached.
        let sigma = 50f64.sqrt();
        let r = analytic_oscillator_report(1.0, sigma, UnitSystem::default()).unwrap().report;
        let asym = 0.5 * sigma * sigma;
        assert!(((r.recorded.mean_h.unwrap() - asym) / asym).abs() < 0.02);
    }

    #[test]
    fn epsilon_decreases_along_the_diagonal() {
        let eps: Vec<f64> = [1.0, 0.5, 0.25, 0.1, 0.01, 1e-4]
            .iter()
            .map(|t| s1(*t, *t).unwrap().report.epsilon)
            .collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]), "{eps:?}");
        assert!(*eps.last().unwrap() < 1e-7);
    }

    #[test]
    fn indicators_equal_parameter_differences() {
        let r = s1(0.6, 0.4).unwrap().report;
        assert_eq!(r.indicators.d_std_x, (r.recorded.std_x() - r.intrinsic.std_x()).abs());
        assert_eq!(r.indicators.d_std_p, (r.recorded.std_p() - r.intrinsic.std_p()).abs());
        assert_eq!(
            r.indicators.d_h.unwrap(),
            r.entropy_recorded.h - r.entropy_intrinsic.h
        );
    }

    #[test]
    fn entropy_deltas_are_log_ratios() {
        let r = s1(0.7, 0.9).unwrap().report;
        assert!((r.indicators.d_h.unwrap() - 0.5 * (1.0f64 + 0.49).ln()).abs() < 1e-12);
        assert!((r.indicators.d_tau.unwrap() - 0.5 * (1.0f64 + 0.81).ln()).abs() < 1e-12);
    }
}
