//! Error indicators between intrinsic and recorded parameters, and the
//! positional/motional entropies of a reading.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::ParameterSet;
use crate::grid::RealField;
use crate::state::{Label, Reading};

/// Integrand points below this magnitude contribute nothing (0·ln 0 = 0).
const ENTROPY_FLOOR: f64 = 1e-300;

/// Absolute R - I differences of the observable parameters, plus the signed
/// entropy deltas when they have been computed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct IndicatorReport {
    pub d_mean_x: f64,
    pub d_mean_p: f64,
    pub d_corr: f64,
    pub d_std_x: f64,
    pub d_std_p: f64,
    #[serde(rename = "d_mean_H", skip_serializing_if = "Option::is_none")]
    pub d_mean_h: Option<f64>,
    #[serde(rename = "d_std_H", skip_serializing_if = "Option::is_none")]
    pub d_std_h: Option<f64>,
    #[serde(rename = "dH", skip_serializing_if = "Option::is_none")]
    pub d_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_tau: Option<f64>,
}

impl IndicatorReport {
    pub fn with_entropy(mut self, d_h: f64, d_tau: f64) -> Self {
        self.d_h = Some(d_h);
        self.d_tau = Some(d_tau);
        self
    }

    /// Named values of every populated field, in a fixed order.
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("d_mean_x", self.d_mean_x),
            ("d_mean_p", self.d_mean_p),
            ("d_corr", self.d_corr),
            ("d_std_x", self.d_std_x),
            ("d_std_p", self.d_std_p),
        ];
        let optional = [
            ("d_mean_H", self.d_mean_h),
            ("d_std_H", self.d_std_h),
            ("dH", self.d_h),
            ("d_tau", self.d_tau),
        ];
        out.extend(optional.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
        out
    }
}

/// Componentwise |R - I|; the correlation difference is the complex modulus.
pub fn error_indicators(p_i: &ParameterSet, p_r: &ParameterSet) -> Result<IndicatorReport> {
    if p_i.label != Label::I || p_r.label != Label::R {
        return Err(Error::LabelMismatch);
    }
    let d_mean_h = p_i.mean_h.zip(p_r.mean_h).map(|(a, b)| (b - a).abs());
    let d_std_h = p_i.std_h().zip(p_r.std_h()).map(|(a, b)| (b - a).abs());
    Ok(IndicatorReport {
        d_mean_x: (p_r.mean_x - p_i.mean_x).abs(),
        d_mean_p: (p_r.mean_p - p_i.mean_p).abs(),
        d_corr: (p_r.corr_xp - p_i.corr_xp).norm(),
        d_std_x: (p_r.std_x() - p_i.std_x()).abs(),
        d_std_p: (p_r.std_p() - p_i.std_p()).abs(),
        d_mean_h,
        d_std_h,
        d_h: None,
        d_tau: None,
    })
}

fn neg_x_ln_x_integral(field: &RealField) -> f64 {
    let f: Vec<f64> = field
        .values()
        .iter()
        .map(|v| {
            let a = v.abs();
            if a > ENTROPY_FLOOR {
                -a * a.ln()
            } else {
                0.0
            }
        })
        .collect();
    field.grid().integrate(&f)
}

/// H = -∫ ρ ln ρ dx.
pub fn positional_entropy(rho: &RealField) -> f64 {
    neg_x_ln_x_integral(rho)
}

/// τ = -∫ |J| ln |J| dx.
pub fn motional_entropy(current: &RealField) -> f64 {
    neg_x_ln_x_integral(current)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPair {
    #[serde(rename = "H")]
    pub h: f64,
    pub tau: f64,
    pub label: Label,
}

pub fn entropy_pair(reading: &Reading) -> EntropyPair {
    EntropyPair {
        h: positional_entropy(reading.rho()),
        tau: motional_entropy(reading.current()),
        label: reading.label(),
    }
}

/// Signed (H_R - H_I, τ_R - τ_I).
pub fn entropy_deltas(reading_i: &Reading, reading_r: &Reading) -> Result<(f64, f64)> {
    if reading_i.label() != Label::I || reading_r.label() != Label::R {
        return Err(Error::LabelMismatch);
    }
    let a = entropy_pair(reading_i);
    let b = entropy_pair(reading_r);
    Ok((b.h - a.h, b.tau - a.tau))
}

/// ε = δ(Δx)·δ(Δp)/ħ.
pub fn epsilon(report: &IndicatorReport, hbar: f64) -> f64 {
    report.d_std_x * report.d_std_p / hbar
}
