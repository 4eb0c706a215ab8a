//! Wavefunctions, probability density/current readings, and the inversion
//! from a reading back to a wavefunction.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, RealField, UnitSystem};

/// Relative density floor below which the phase gradient is treated as zero.
pub const TAIL_THRESHOLD: f64 = 1e-12;

/// Largest phase increment per cell accepted during reconstruction (radians).
pub const DEFAULT_MAX_PHASE_STEP: f64 = 1.0;

const NORM_TOLERANCE: f64 = 1e-6;

/// Which side of the measuring chain a quantity describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    /// Intrinsic: the state itself.
    I,
    /// Recorded: after the measuring device.
    R,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::I => "I",
            Label::R => "R",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    /// Wraps samples that must be finite and normalised to within 1e-6.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(
                "psi",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite {
                what: "wavefunction",
                index,
            });
        }
        let psi = Self { grid, values };
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::DomainCoverage(format!(
                "wavefunction norm on grid is {norm:.9}, expected 1"
            )));
        }
        Ok(psi)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// ∫|Ψ|² dx.
    pub fn norm(&self) -> f64 {
        self.grid
            .integrate(&self.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub(crate) fn real_parts(&self) -> (Vec<f64>, Vec<f64>) {
        self.values.iter().map(|v| (v.re, v.im)).unzip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacketParams {
    pub x0: f64,
    pub alpha: f64,
    pub k: f64,
}

impl GaussianPacketParams {
    pub fn new(x0: f64, alpha: f64, k: f64) -> Result<Self> {
        let p = Self { x0, alpha, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.x0.is_finite() {
            return Err(Error::param("x0", "must be finite"));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::param("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !self.k.is_finite() {
            return Err(Error::param("k", "must be finite"));
        }
        Ok(())
    }
}

/// Ψ(x) = (α√(2π))^(-1/2) exp(-(x-x₀)²/(4α²)) exp(ikx).
pub fn gaussian_packet(
    params: GaussianPacketParams,
    grid: Grid,
    units: UnitSystem,
) -> Result<WaveFunction> {
    params.validate()?;
    units.validate()?;
    let GaussianPacketParams { x0, alpha, k } = params;
    if x0 - 6.0 * alpha < grid.x_min() || x0 + 6.0 * alpha > grid.x_max() {
        return Err(Error::DomainCoverage(format!(
            "grid [{}, {}] does not cover x0 +/- 6 alpha = [{}, {}]",
            grid.x_min(),
            grid.x_max(),
            x0 - 6.0 * alpha,
            x0 + 6.0 * alpha
        )));
    }
    let amp = (alpha * (2.0 * PI).sqrt()).powf(-0.5);
    let values = grid
        .points()
        .into_iter()
        .map(|x| {
            let d = x - x0;
            Complex64::from_polar(amp * (-d * d / (4.0 * alpha * alpha)).exp(), k * x)
        })
        .collect();
    WaveFunction::new(grid, values)
}

/// Width of the oscillator ground state, √(ħ/(2mω)).
pub fn oscillator_width(omega: f64, units: UnitSystem) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::param("omega", format!("must be positive, got {omega}")));
    }
    units.validate()?;
    Ok((units.hbar / (2.0 * units.mass * omega)).sqrt())
}

pub fn oscillator_ground_state(omega: f64, grid: Grid, units: UnitSystem) -> Result<WaveFunction> {
    let alpha = oscillator_width(omega, units)?;
    gaussian_packet(GaussianPacketParams::new(0.0, alpha, 0.0)?, grid, units)
}

/// Probability density and current on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Reading {
    rho: RealField,
    current: RealField,
    label: Label,
}

impl Reading {
    pub fn new(rho: RealField, current: RealField, label: Label) -> Result<Self> {
        if !rho.grid().same_nodes(current.grid()) {
            return Err(Error::GridMismatch("density", "current"));
        }
        if let Some(i) = rho.values().iter().position(|v| *v < 0.0) {
            return Err(Error::InvalidReading(format!(
                "negative density {} at x = {}",
                rho.values()[i],
                rho.grid().point(i)
            )));
        }
        let mass = rho.integrate();
        if (mass - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidReading(format!(
                "density integrates to {mass:.9}, expected 1"
            )));
        }
        Ok(Self {
            rho,
            current,
            label,
        })
    }

    pub fn from_values(grid: Grid, rho: Vec<f64>, current: Vec<f64>, label: Label) -> Result<Self> {
        Self::new(RealField::new(grid, rho)?, RealField::new(grid, current)?, label)
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    pub fn rho(&self) -> &RealField {
        &self.rho
    }

    pub fn current(&self) -> &RealField {
        &self.current
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    /// Three-column CSV `x, rho, J` with a unit-annotated header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x [length]", "rho [1/length]", "J [1/time]"])?;
        for (i, (r, j)) in self.rho.values().iter().zip(self.current.values()).enumerate() {
            w.write_record(&[
                self.grid().point(i).to_string(),
                r.to_string(),
                j.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// ρ = |Ψ|² and J = (ħ/m) Im(Ψ* ∂Ψ), labelled intrinsic.
pub fn reading_of(psi: &WaveFunction, units: UnitSystem) -> Result<Reading> {
    units.validate()?;
    let grid = *psi.grid();
    let (re, im) = psi.real_parts();
    // The five-point stencil keeps the linear-phase current exact to ~1e-10.
    let d_re = grid.derivative4(&re);
    let d_im = grid.derivative4(&im);
    let scale = units.hbar / units.mass;
    let current = (0..grid.len())
        .map(|i| scale * (re[i] * d_im[i] - im[i] * d_re[i]))
        .collect();
    Reading::from_values(grid, psi.density(), current, Label::I)
}

pub fn reconstruct_wavefunction(reading: &Reading, units: UnitSystem) -> Result<WaveFunction> {
    reconstruct_wavefunction_with_limit(reading, units, DEFAULT_MAX_PHASE_STEP)
}

/// Ψ = √ρ exp(iΦ) with ∂Φ = mJ/(ħρ) and Φ(x_min) = 0.
///
/// Below the tail threshold the phase gradient is set to zero. Elsewhere a phase
/// step per cell above `max_phase_step` cannot be resolved and is reported.
pub fn reconstruct_wavefunction_with_limit(
    reading: &Reading,
    units: UnitSystem,
    max_phase_step: f64,
) -> Result<WaveFunction> {
    units.validate()?;
    let grid = *reading.grid();
    let rho = reading.rho().values();
    let current = reading.current().values();
    let floor = TAIL_THRESHOLD * reading.rho().max();
    let scale = units.mass / units.hbar;
    let n = grid.len();
    let mut gradient = vec![0.0; n];
    let kept: Vec<bool> = rho.iter().map(|r| *r > floor).collect();
    for i in 0..n {
        if kept[i] {
            let u = scale * current[i] / rho[i];
            let step = u.abs() * grid.dx();
            if step > max_phase_step {
                return Err(Error::DivergentPhase {
                    x: grid.point(i),
                    step,
                    limit: max_phase_step,
                });
            }
            gradient[i] = u;
        }
    }
    // Fourth-order panels only where all four stencil points are kept, so the
    // switch to a flat tail phase does not leak into the bulk.
    let mut phase = Vec::with_capacity(n);
    let mut acc = 0.0;
    phase.push(0.0);
    for i in 0..n - 1 {
        let lo = i.saturating_sub(1);
        let hi = (i + 2).min(n - 1);
        acc += if kept[lo..=hi].iter().all(|k| *k) {
            grid.cell_integral4(&gradient, i)
        } else {
            0.5 * grid.dx() * (gradient[i] + gradient[i + 1])
        };
        phase.push(acc);
    }
    let values = rho
        .iter()
        .zip(&phase)
        .map(|(r, p)| Complex64::from_polar(r.sqrt(), *p))
        .collect();
    WaveFunction::new(grid, values)
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // reference values are quoted to seven digits
mod tests {
    use super::*;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    fn default_grid(alpha: f64) -> Grid {
        Grid::centered(0.0, 8.0 * alpha, 4096).unwrap()
    }

    fn packet(x0: f64, alpha: f64, k: f64, grid: Grid) -> WaveFunction {
        gaussian_packet(GaussianPacketParams::new(x0, alpha, k).unwrap(), grid, UnitSystem::default())
            .unwrap()
    }

    #[test]
    fn packet_peak_density() {
        let g = Grid::new(-8.0, 8.0, 4001).unwrap();
        let psi = packet(0.0, 1.0, 1.0, g);
        assert!((psi.values()[2000].norm_sqr() - 0.398_942_3).abs() < 1e-7);
    }

    #[test]
    fn zero_wavenumber_is_real() {
        let psi = packet(0.3, 0.7, 0.0, default_grid(1.0));
        assert!(psi.values().iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn packets_are_normalised() {
        for (x0, alpha, k) in [(0.0, 1.0, 1.0), (0.5, 0.6, -2.0), (-1.0, 2.0, 3.0)] {
            let g = Grid::centered(x0, 8.0 * alpha, 4096).unwrap();
            assert!((packet(x0, alpha, k, g).norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = Grid::new(-3.0, 3.0, 512).unwrap();
        let err = gaussian_packet(GaussianPacketParams::new(0.0, 1.0, 0.0).unwrap(), g, UnitSystem::default());
        assert!(matches!(err, Err(Error::DomainCoverage(_))));
    }

    #[test]
    fn oscillator_width_matches_closed_form() {
        let a = oscillator_width(1.0, UnitSystem::default()).unwrap();
        assert!((a - 0.707_106_8).abs() < 1e-7);
        assert!(oscillator_width(0.0, UnitSystem::default()).is_err());
        let g = Grid::centered(0.0, 6.0, 1024).unwrap();
        assert!(oscillator_ground_state(-1.0, g, UnitSystem::default()).is_err());
    }

    #[test]
    fn current_at_peak() {
        let g = default_grid(1.0);
        let r = reading_of(&packet(0.0, 1.0, 1.0, g), UnitSystem::default()).unwrap();
        // x = 0 is not a node of a 4096-point symmetric grid; compare against ρ there.
        let i = 2048;
        let x = g.point(i);
        let expected = INV_SQRT_2PI * (-0.5 * x * x).exp();
        assert!((r.current().values()[i] - expected).abs() < 1e-9);
        let g = Grid::new(-8.0, 8.0, 4001).unwrap();
        let r = reading_of(&packet(0.0, 1.0, 1.0, g), UnitSystem::default()).unwrap();
        assert!((r.current().values()[2000] - 0.398_942_3).abs() < 1e-7);
    }

    #[test]
    fn real_wavefunction_carries_no_current() {
        let r = reading_of(&packet(0.0, 1.3, 0.0, default_grid(1.3)), UnitSystem::default()).unwrap();
        assert!(r.current().values().iter().all(|j| *j == 0.0));
    }

    #[test]
    fn linear_phase_current_is_proportional_to_density() {
        let r = reading_of(&packet(0.0, 1.0, 2.0, default_grid(1.0)), UnitSystem::default()).unwrap();
        for (rho, j) in r.rho().values().iter().zip(r.current().values()) {
            assert!((j - 2.0 * rho).abs() < 1e-8);
        }
    }

    #[test]
    fn current_scales_with_hbar_over_mass() {
        let units = UnitSystem::new(2.0, 0.5).unwrap();
        let g = default_grid(1.0);
        let psi = gaussian_packet(GaussianPacketParams::new(0.0, 1.0, 1.5).unwrap(), g, units).unwrap();
        let r = reading_of(&psi, units).unwrap();
        for (rho, j) in r.rho().values().iter().zip(r.current().values()) {
            assert!((j - 6.0 * rho).abs() < 1e-8);
        }
    }

    #[test]
    fn reconstructed_phase_gradient_is_the_wavenumber() {
        let g = default_grid(1.0);
        let units = UnitSystem::default();
        let r = reading_of(&packet(0.0, 1.0, 1.0, g), units).unwrap();
        let psi = reconstruct_wavefunction(&r, units).unwrap();
        let floor = TAIL_THRESHOLD * r.rho().max();
        let phase: Vec<f64> = psi.values().iter().map(|v| v.arg()).collect();
        for i in 1..g.len() {
            if r.rho().values()[i] > floor && r.rho().values()[i - 1] > floor {
                let mut step = phase[i] - phase[i - 1];
                step -= (step / (2.0 * PI)).round() * 2.0 * PI;
                assert!((step / g.dx() - 1.0).abs() < 1e-6, "i = {i}");
            }
        }
    }

    #[test]
    fn zero_current_reconstructs_real_root_density() {
        let g = default_grid(1.0);
        let r = reading_of(&packet(0.0, 1.0, 0.0, g), UnitSystem::default()).unwrap();
        let psi = reconstruct_wavefunction(&r, UnitSystem::default()).unwrap();
        for (v, rho) in psi.values().iter().zip(r.rho().values()) {
            assert_eq!(v.im, 0.0);
            assert_eq!(v.re, rho.sqrt());
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let units = UnitSystem::default();
        for (x0, alpha, k) in [(0.0, 1.0, 1.0), (0.4, 0.8, -1.5), (0.0, 1.5, 0.3)] {
            let g = Grid::centered(x0, 8.0 * alpha, 4096).unwrap();
            let r = reading_of(&packet(x0, alpha, k, g), units).unwrap();
            let back = reading_of(&reconstruct_wavefunction(&r, units).unwrap(), units).unwrap();
            let floor = TAIL_THRESHOLD * r.rho().max();
            for i in 0..g.len() {
                if r.rho().values()[i] > floor {
                    assert!((r.rho().values()[i] - back.rho().values()[i]).abs() < 1e-8);
                    assert!((r.current().values()[i] - back.current().values()[i]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn unresolvable_phase_is_reported() {
        let g = default_grid(1.0);
        let units = UnitSystem::default();
        let r = reading_of(&packet(0.0, 1.0, 1.0, g), units).unwrap();
        let err = reconstruct_wavefunction_with_limit(&r, units, 1e-3).unwrap_err();
        assert!(matches!(err, Error::DivergentPhase { .. }));
    }

    #[test]
    fn readings_validate_their_density() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let neg = Reading::from_values(g, vec![-0.1; 11], vec![0.0; 11], Label::I);
        assert!(matches!(neg, Err(Error::InvalidReading(_))));
        let unnormalised = Reading::from_values(g, vec![2.0; 11], vec![0.0; 11], Label::I);
        assert!(matches!(unnormalised, Err(Error::InvalidReading(_))));
        assert!(Reading::from_values(g, vec![1.0; 11], vec![0.0; 11], Label::R).is_ok());
        let other = Grid::new(0.0, 2.0, 11).unwrap();
        let mismatch = Reading::new(
            RealField::new(g, vec![1.0; 11]).unwrap(),
            RealField::zeros(other),
            Label::I,
        );
        assert!(matches!(mismatch, Err(Error::GridMismatch(..))));
    }

    #[test]
    fn reading_csv_has_unit_header() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let r = Reading::from_values(g, vec![1.0; 5], vec![0.0; 5], Label::I).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x [length],rho [1/length],J [1/time]\n"));
        assert_eq!(text.lines().count(), 6);
    }
}
