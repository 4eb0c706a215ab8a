//! Observable statistical parameters of a reading and uncertainty-relation checks.

use num_complex::Complex64;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::UnitSystem;
use crate::state::{reconstruct_wavefunction, Label, Reading, WaveFunction};

/// Density floor for integrands that divide by ρ.
const RHO_FLOOR: f64 = 1e-300;

/// Fraction of points on each side inspected by the decay check.
const EDGE_FRACTION: f64 = 0.1;

/// Largest edge/peak ratio of J²/ρ accepted as "decayed".
const DECAY_RATIO: f64 = 1e-6;

pub const UNCERTAINTY_TOLERANCE: f64 = 1e-9;

/// Means, variances and the x-p correlation of one reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet {
    pub label: Label,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub corr_xp: Complex64,
    pub mean_h: Option<f64>,
    pub var_h: Option<f64>,
}

impl ParameterSet {
    pub fn std_x(&self) -> f64 {
        self.var_x.sqrt()
    }

    pub fn std_p(&self) -> f64 {
        self.var_p.sqrt()
    }

    pub fn std_h(&self) -> Option<f64> {
        self.var_h.map(f64::sqrt)
    }
}

impl Serialize for ParameterSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("label", &self.label)?;
        let mut entry = |key: &str, value: f64, unit: &str| -> std::result::Result<(), S::Error> {
            m.serialize_entry(key, &value)?;
            m.serialize_entry(&format!("{key}_unit"), unit)
        };
        entry("mean_x", self.mean_x, "length")?;
        entry("mean_p", self.mean_p, "momentum")?;
        entry("var_x", self.var_x, "length^2")?;
        entry("var_p", self.var_p, "momentum^2")?;
        entry("std_x", self.std_x(), "length")?;
        entry("std_p", self.std_p(), "momentum")?;
        entry("corr_xp_re", self.corr_xp.re, "action")?;
        entry("corr_xp_im", self.corr_xp.im, "action")?;
        if let (Some(mean), Some(var)) = (self.mean_h, self.var_h) {
            entry("mean_H", mean, "energy")?;
            entry("var_H", var, "energy^2")?;
            entry("std_H", var.sqrt(), "energy")?;
        }
        m.end()
    }
}

/// ⟨x⟩ = ∫ x ρ dx.
pub fn mean_position(reading: &Reading) -> f64 {
    // Order 1 is always in range.
    position_moment(reading, 1).unwrap_or(f64::NAN)
}

/// Raw moment ∫ xⁿ ρ dx for n in 1..=4.
pub fn position_moment(reading: &Reading, order: u32) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::param("order", format!("must be in 1..=4, got {order}")));
    }
    let g = reading.grid();
    let f: Vec<f64> = reading
        .rho()
        .values()
        .iter()
        .enumerate()
        .map(|(i, r)| g.point(i).powi(order as i32) * r)
        .collect();
    Ok(g.integrate(&f))
}

fn position_variance(reading: &Reading, mean: f64) -> f64 {
    let g = reading.grid();
    let f: Vec<f64> = reading
        .rho()
        .values()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d = g.point(i) - mean;
            d * d * r
        })
        .collect();
    g.integrate(&f)
}

/// ⟨p⟩ = m ∫ J dx.
pub fn mean_momentum(reading: &Reading, units: UnitSystem) -> f64 {
    units.mass * reading.current().integrate()
}

/// Fisher information ∫ (∂ρ)²/ρ dx, summed over cell faces.
///
/// The face density in the denominator is a 3:1 blend of the geometric and
/// arithmetic means of the neighbours. The geometric face form alone has a
/// positive O(dx²) bias of dx²/(8s⁴) on a Gaussian of width s; the arithmetic
/// one has a negative bias twice as large. The blend keeps the bias positive,
/// so discretised minimum-uncertainty states stay on the allowed side of
/// ΔxΔp ≥ ħ/2, at a quarter of the geometric size.
fn fisher_information(reading: &Reading) -> f64 {
    let dx = reading.grid().dx();
    reading
        .rho()
        .values()
        .windows(2)
        .filter_map(|w| {
            let prod = w[0] * w[1];
            (prod > RHO_FLOOR).then(|| {
                let g = (w[1] - w[0]) / dx;
                let inv_face = 0.75 / prod.sqrt() + 0.5 / (w[0] + w[1]);
                dx * g * g * inv_face
            })
        })
        .sum()
}

/// Fails when J²/ρ has not decayed toward the grid edges, i.e. when the
/// recorded momentum spread is not finite.
fn check_current_decay(reading: &Reading) -> Result<()> {
    let q: Vec<f64> = reading
        .rho()
        .values()
        .iter()
        .zip(reading.current().values())
        .map(|(r, j)| if *r > RHO_FLOOR { j * j / r } else { 0.0 })
        .collect();
    let peak = q.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let n = q.len();
    let edge = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let outer = q[..edge]
        .iter()
        .chain(&q[n - edge..])
        .copied()
        .fold(0.0, f64::max);
    let ratio = outer / peak;
    if ratio > DECAY_RATIO {
        return Err(Error::Divergence { ratio });
    }
    Ok(())
}

/// m² ∫ (J - ρ p̄/m)²/ρ dx, the convective part of the momentum variance
/// about `mean_p`.
fn convective_variance(reading: &Reading, units: UnitSystem, mean_p: f64) -> f64 {
    let g = reading.grid();
    let m = units.mass;
    let f: Vec<f64> = reading
        .rho()
        .values()
        .iter()
        .zip(reading.current().values())
        .map(|(r, j)| {
            if *r > RHO_FLOOR {
                let d = m * j - mean_p * r;
                d * d / r
            } else {
                0.0
            }
        })
        .collect();
    g.integrate(&f)
}

/// ⟨p²⟩ = ħ²/4 ∫(∂ρ)²/ρ dx + m² ∫ J²/ρ dx.
pub fn momentum_second_moment(reading: &Reading, units: UnitSystem) -> Result<f64> {
    check_current_decay(reading)?;
    let h = units.hbar;
    Ok(0.25 * h * h * fisher_information(reading) + convective_variance(reading, units, 0.0))
}

/// Δp² computed about the mean without subtracting large moments.
pub fn momentum_variance(reading: &Reading, units: UnitSystem) -> Result<f64> {
    check_current_decay(reading)?;
    let h = units.hbar;
    let mean_p = mean_momentum(reading, units);
    Ok(0.25 * h * h * fisher_information(reading) + convective_variance(reading, units, mean_p))
}

/// C(x, p) = ⟨(x - ⟨x⟩)Ψ | (p̂ - ⟨p⟩)Ψ⟩.
///
/// The real part is ∫(x - ⟨x⟩)(mJ - ⟨p⟩ρ) dx. The imaginary part is
/// -ħ/2 ∫(x - ⟨x⟩) ∂ρ dx, evaluated on cell faces so that summation by parts
/// reproduces ħ/2 ∫ρ dx.
pub fn correlation_xp(reading: &Reading, units: UnitSystem) -> Complex64 {
    let g = reading.grid();
    let mean_x = mean_position(reading);
    let mean_p = mean_momentum(reading, units);
    let rho = reading.rho().values();
    let re_integrand: Vec<f64> = rho
        .iter()
        .zip(reading.current().values())
        .enumerate()
        .map(|(i, (r, j))| (g.point(i) - mean_x) * (units.mass * j - mean_p * r))
        .collect();
    let face_sum: f64 = rho
        .windows(2)
        .enumerate()
        .map(|(i, w)| (g.point(i) + 0.5 * g.dx() - mean_x) * (w[1] - w[0]))
        .sum();
    Complex64::new(g.integrate(&re_integrand), -0.5 * units.hbar * face_sum)
}

/// Operator made of an optional kinetic term -(ħ²/2m)∂² and a polynomial
/// potential Σ c_k x^k of degree at most four.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub kinetic: bool,
    pub potential: Vec<f64>,
}

impl OperatorSpec {
    pub fn new(kinetic: bool, potential: Vec<f64>) -> Result<Self> {
        if potential.len() > 5 {
            return Err(Error::param(
                "potential",
                format!("degree {} exceeds 4", potential.len() - 1),
            ));
        }
        if potential.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("potential", "coefficients must be finite"));
        }
        Ok(Self { kinetic, potential })
    }

    /// H = p²/2m + mω²x²/2.
    pub fn oscillator(omega: f64, units: UnitSystem) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::param("omega", format!("must be positive, got {omega}")));
        }
        Self::new(true, vec![0.0, 0.0, 0.5 * units.mass * omega * omega])
    }

    fn potential_at(&self, x: f64) -> f64 {
        self.potential.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// ⟨Â⟩ and ⟨(Â - ⟨Â⟩)Ψ | (Â - ⟨Â⟩)Ψ⟩, with Â applied by fourth-order stencils.
///
/// The variance is accumulated from the centred residual, which is a sum of
/// squares and stays at round-off level on eigenstates.
pub fn operator_mean_and_variance(
    psi: &WaveFunction,
    op: &OperatorSpec,
    units: UnitSystem,
) -> Result<(f64, f64)> {
    units.validate()?;
    let g = psi.grid();
    let (re, im) = psi.real_parts();
    let (d2_re, d2_im) = if op.kinetic {
        (g.second_derivative4(&re), g.second_derivative4(&im))
    } else {
        (vec![0.0; g.len()], vec![0.0; g.len()])
    };
    let k = -0.5 * units.hbar * units.hbar / units.mass;
    let applied: Vec<Complex64> = (0..g.len())
        .map(|i| {
            let v = op.potential_at(g.point(i));
            Complex64::new(k * d2_re[i] + v * re[i], k * d2_im[i] + v * im[i])
        })
        .collect();
    let psi_v = psi.values();
    let expect: Vec<f64> = psi_v
        .iter()
        .zip(&applied)
        .map(|(p, a)| (p.conj() * a).re)
        .collect();
    let mean = g.integrate(&expect);
    let resid: Vec<f64> = psi_v
        .iter()
        .zip(&applied)
        .map(|(p, a)| (a - mean * p).norm_sqr())
        .collect();
    let variance = g.integrate(&resid);
    if !(mean.is_finite() && variance.is_finite()) {
        return Err(Error::NonFinite {
            what: "operator moments",
            index: 0,
        });
    }
    Ok((mean, variance))
}

/// All parameters of a reading; the oscillator energy is included when `omega`
/// is given and is evaluated on the wavefunction reconstructed from the reading.
pub fn parameter_set(reading: &Reading, units: UnitSystem, omega: Option<f64>) -> Result<ParameterSet> {
    units.validate()?;
    let mean_x = mean_position(reading);
    let mean_p = mean_momentum(reading, units);
    let var_x = position_variance(reading, mean_x);
    let var_p = momentum_variance(reading, units)?;
    let corr_xp = correlation_xp(reading, units);
    let (mean_h, var_h) = match omega {
        Some(w) => {
            let op = OperatorSpec::oscillator(w, units)?;
            let psi = reconstruct_wavefunction(reading, units)?;
            let (m, v) = operator_mean_and_variance(&psi, &op, units)?;
            (Some(m), Some(v))
        }
        None => (None, None),
    };
    Ok(ParameterSet {
        label: reading.label(),
        mean_x,
        mean_p,
        var_x,
        var_p,
        corr_xp,
        mean_h,
        var_h,
    })
}

/// Margins of Δx·Δp ≥ |C(x, p)| ≥ ħ/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub product: f64,
    pub corr_modulus: f64,
    pub half_hbar: f64,
    /// Δx·Δp - |C|.
    pub upper_margin: f64,
    /// |C| - ħ/2.
    pub lower_margin: f64,
    pub passed: bool,
}

pub fn check_uncertainty_relations(p: &ParameterSet, units: UnitSystem) -> UncertaintyReport {
    let product = p.std_x() * p.std_p();
    let corr_modulus = p.corr_xp.norm();
    let half_hbar = 0.5 * units.hbar;
    let upper_margin = product - corr_modulus;
    let lower_margin = corr_modulus - half_hbar;
    UncertaintyReport {
        product,
        corr_modulus,
        half_hbar,
        upper_margin,
        lower_margin,
        passed: upper_margin >= -UNCERTAINTY_TOLERANCE && lower_margin >= -UNCERTAINTY_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::state::{gaussian_packet, oscillator_ground_state, reading_of, GaussianPacketParams};
    use crate::transform::{gaussian_kernel, measure, KernelKind};
    use proptest::prelude::*;

    fn units() -> UnitSystem {
        UnitSystem::default()
    }

    fn packet_reading(x0: f64, alpha: f64, k: f64, half: f64) -> Reading {
        let g = Grid::centered(x0, half, 4096).unwrap();
        let psi = gaussian_packet(GaussianPacketParams::new(x0, alpha, k).unwrap(), g, units()).unwrap();
        reading_of(&psi, units()).unwrap()
    }

    fn recorded(r: &Reading, sigma: f64, lambda: f64) -> Reading {
        let g = *r.grid();
        let gk = gaussian_kernel(g, sigma, KernelKind::Density).unwrap();
        let lk = gaussian_kernel(g, lambda, KernelKind::Current).unwrap();
        measure(r, &gk, &lk).unwrap()
    }

    #[test]
    fn means_of_s1() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let rr = recorded(&r, 1.0, 0.0);
        assert!(mean_position(&r).abs() < 1e-10);
        assert!(mean_position(&rr).abs() < 1e-10);
        assert!((mean_momentum(&r, units()) - 1.0).abs() < 1e-8);
        assert!((mean_momentum(&rr, units()) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn shifted_packet_mean() {
        let r = packet_reading(2.0, 1.0, 1.0, 8.0);
        assert!((mean_position(&r) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn uniform_density_mean_is_midpoint() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        let r = Reading::from_values(g, vec![1.0; 101], vec![0.0; 101], Label::I).unwrap();
        assert!((mean_position(&r) - 0.5).abs() < 1e-14);
        assert_eq!(mean_momentum(&r, units()), 0.0);
        assert!((position_moment(&r, 2).unwrap() - 1.0 / 3.0).abs() < 1e-4);
        assert!(position_moment(&r, 5).is_err());
        assert!(position_moment(&r, 0).is_err());
    }

    #[test]
    fn intrinsic_momentum_moments() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let p2 = momentum_second_moment(&r, units()).unwrap();
        assert!((p2 - 1.25).abs() < 1e-5, "p2 = {p2}");
        let var = momentum_variance(&r, units()).unwrap();
        assert!((var.sqrt() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn recorded_momentum_spread_of_s1() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let rr = recorded(&r, 1.0, 0.0);
        let dp = momentum_variance(&rr, units()).unwrap().sqrt();
        assert!((dp - 0.528_867_2).abs() < 5e-5, "dp = {dp}");
    }

    #[test]
    fn zero_radicand_diverges() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let rr = recorded(&r, 0.0, 1.0);
        assert!(matches!(
            momentum_second_moment(&rr, units()),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn correlation_is_half_hbar_imaginary() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let c = correlation_xp(&r, units());
        assert!(c.re.abs() < 1e-6 && (c.im - 0.5).abs() < 1e-6, "{c}");
        let c = correlation_xp(&recorded(&r, 1.0, 0.0), units());
        assert!(c.re.abs() < 1e-6 && (c.im - 0.5).abs() < 1e-6, "{c}");
    }

    #[test]
    fn real_wavefunction_correlation_oracle() {
        // For real Ψ: Re C = 0 and Im C = ħ/2 ∫ρ = ħ/2.
        let g = Grid::new(-10.0, 10.0, 2001).unwrap();
        let raw: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.5 * x * x))
            .collect();
        let mass = g.integrate(&raw);
        let rho: Vec<f64> = raw.iter().map(|v| v / mass).collect();
        let r = Reading::from_values(g, rho, vec![0.0; 2001], Label::I).unwrap();
        let u = UnitSystem::new(2.0, 1.0).unwrap();
        let c = correlation_xp(&r, u);
        assert_eq!(c.re, 0.0);
        assert!((c.im - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oscillator_ground_state_is_an_eigenstate() {
        let a = 0.5f64.sqrt();
        let g = Grid::centered(0.0, 8.0 * a, 4096).unwrap();
        let psi = oscillator_ground_state(1.0, g, units()).unwrap();
        let op = OperatorSpec::oscillator(1.0, units()).unwrap();
        let (mean, var) = operator_mean_and_variance(&psi, &op, units()).unwrap();
        assert!((mean - 0.5).abs() < 1e-8);
        assert!(var <= 1e-8, "var = {var}");
    }

    #[test]
    fn recorded_oscillator_energy() {
        let a = 0.5f64.sqrt();
        let g = Grid::centered(0.0, 8.0 * (a * a + 1.0f64).sqrt(), 4096).unwrap();
        let psi = oscillator_ground_state(1.0, g, units()).unwrap();
        let r = reading_of(&psi, units()).unwrap();
        let rr = recorded(&r, 1.0, 0.0);
        let p = parameter_set(&rr, units(), Some(1.0)).unwrap();
        assert!((p.mean_h.unwrap() - 5.0 / 6.0).abs() < 1e-5);
        assert!((p.std_h().unwrap() - 0.942_809_0).abs() < 1e-5);
    }

    #[test]
    fn position_operator_matches_density_moments() {
        let g = Grid::centered(0.0, 8.0, 2048).unwrap();
        let psi = gaussian_packet(GaussianPacketParams::new(0.5, 1.0, 2.0).unwrap(), g, units()).unwrap();
        let op = OperatorSpec::new(false, vec![0.0, 1.0]).unwrap();
        let (mean, var) = operator_mean_and_variance(&psi, &op, units()).unwrap();
        assert!((mean - 0.5).abs() < 1e-10);
        assert!((var - 1.0).abs() < 1e-9);
        assert!(OperatorSpec::new(true, vec![0.0; 6]).is_err());
        assert!(OperatorSpec::oscillator(0.0, units()).is_err());
    }

    #[test]
    fn s1_parameter_sets() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let p = parameter_set(&r, units(), None).unwrap();
        assert_eq!(p.label, Label::I);
        assert!(p.mean_x.abs() < 1e-10);
        assert!((p.mean_p - 1.0).abs() < 1e-8);
        assert!((p.var_x - 1.0).abs() < 1e-8);
        assert!((p.var_p - 0.25).abs() < 1e-5);
        assert!((p.corr_xp.im - 0.5).abs() < 1e-6);
        assert!(p.mean_h.is_none());
        let pr = parameter_set(&recorded(&r, 1.0, 0.0), units(), None).unwrap();
        assert_eq!(pr.label, Label::R);
        assert!((pr.var_x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn ideal_device_reproduces_intrinsic_set() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0);
        let p = parameter_set(&r, units(), None).unwrap();
        let q = parameter_set(&recorded(&r, 0.0, 0.0), units(), None).unwrap();
        assert!((p.mean_x - q.mean_x).abs() < 1e-8);
        assert!((p.mean_p - q.mean_p).abs() < 1e-8);
        assert!((p.var_x - q.var_x).abs() < 1e-8);
        assert!((p.var_p - q.var_p).abs() < 1e-8);
        assert!((p.corr_xp - q.corr_xp).norm() < 1e-8);
    }

    #[test]
    fn uncertainty_margins() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0 * 2f64.sqrt());
        let p = parameter_set(&r, units(), None).unwrap();
        let u = check_uncertainty_relations(&p, units());
        assert!(u.passed);
        assert!((u.product - 0.5).abs() < 1e-5);
        let pr = parameter_set(&recorded(&r, 1.0, 0.0), units(), None).unwrap();
        let u = check_uncertainty_relations(&pr, units());
        assert!(u.passed);
        assert!((u.product - 0.747_93).abs() < 1e-4);
    }

    #[test]
    fn violated_bound_fails_check() {
        let p = ParameterSet {
            label: Label::I,
            mean_x: 0.0,
            mean_p: 0.0,
            var_x: 0.01,
            var_p: 0.01,
            corr_xp: Complex64::new(0.0, 0.5),
            mean_h: None,
            var_h: None,
        };
        let u = check_uncertainty_relations(&p, units());
        assert!(!u.passed);
        assert!(u.upper_margin < 0.0);
    }

    #[test]
    fn parameter_set_json_is_flat_with_units() {
        let r = packet_reading(0.0, 1.0, 1.0, 8.0);
        let v = serde_json::to_value(parameter_set(&r, units(), None).unwrap()).unwrap();
        assert_eq!(v["label"], "I");
        assert_eq!(v["mean_p_unit"], "momentum");
        assert!(v["corr_xp_im"].as_f64().unwrap() > 0.49);
        assert!(v.get("mean_H").is_none());
    }

    fn random_kernel_reading(alpha: f64, lambda_width: f64) -> (Reading, Reading) {
        let r = packet_reading(0.0, alpha, 1.3, 8.0 * (alpha * alpha + lambda_width * lambda_width).sqrt());
        let g = *r.grid();
        let lk = gaussian_kernel(g, lambda_width, KernelKind::Current).unwrap();
        let j = crate::transform::apply_current_transform(&lk, &r).unwrap();
        let rr = Reading::new(r.rho().clone(), j, Label::R).unwrap();
        (r, rr)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn current_kernels_conserve_mean_momentum(alpha in 0.5f64..2.0, width in 0.05f64..1.0) {
            let (r, rr) = random_kernel_reading(alpha, width);
            prop_assert!((mean_momentum(&r, units()) - mean_momentum(&rr, units())).abs() < 1e-8);
        }

        #[test]
        fn robertson_chain_holds(alpha in 0.5f64..2.0, s in 0.0f64..1.0, l in 0.0f64..1.0) {
            let (sigma, lambda) = (s * alpha, l * alpha);
            prop_assume!(lambda * lambda < alpha * alpha + 2.0 * sigma * sigma - 0.05);
            let sr = (alpha * alpha + sigma * sigma).sqrt();
            let sj2 = alpha * alpha + lambda * lambda;
            let sq = (sj2 * sr * sr / (alpha * alpha + 2.0 * sigma * sigma - lambda * lambda)).sqrt();
            let half = 8.0 * sr.max(sq).max(sj2.sqrt()).min(4.0 * sr.max(sj2.sqrt()));
            let g = Grid::centered(0.0, half, 4096).unwrap();
            prop_assume!(sigma == 0.0 || sigma >= 2.0 * g.dx());
            prop_assume!(lambda == 0.0 || lambda >= 2.0 * g.dx());
            let psi = gaussian_packet(GaussianPacketParams::new(0.0, alpha, 1.0).unwrap(), g, units()).unwrap();
            let r = reading_of(&psi, units()).unwrap();
            let rr = recorded(&r, sigma, lambda);
            for p in [parameter_set(&r, units(), None).unwrap(), parameter_set(&rr, units(), None).unwrap()] {
                let u = check_uncertainty_relations(&p, units());
                prop_assert!(u.passed, "{:?}", u);
            }
        }
    }
}
