//! Report schema shared by the numerical pipeline and the closed-form oracle.

use serde::Serialize;

use crate::estimators::ParameterSet;
use crate::indicators::{EntropyPair, IndicatorReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementReport {
    pub intrinsic: ParameterSet,
    pub recorded: ParameterSet,
    pub indicators: IndicatorReport,
    pub entropy_intrinsic: EntropyPair,
    pub entropy_recorded: EntropyPair,
    /// δ(Δx)·δ(Δp)/ħ.
    pub epsilon: f64,
}

impl MeasurementReport {
    /// Every scalar of the report under a stable dotted name, for field-by-field diffs.
    pub fn fields(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (prefix, p) in [("I", &self.intrinsic), ("R", &self.recorded)] {
            let mut push = |k: &str, v: f64| out.push((format!("{prefix}.{k}"), v));
            push("mean_x", p.mean_x);
            push("mean_p", p.mean_p);
            push("std_x", p.std_x());
            push("std_p", p.std_p());
            push("corr_xp_re", p.corr_xp.re);
            push("corr_xp_im", p.corr_xp.im);
            if let (Some(m), Some(s)) = (p.mean_h, p.std_h()) {
                push("mean_H", m);
                push("std_H", s);
            }
        }
        for (prefix, e) in [("I", &self.entropy_intrinsic), ("R", &self.entropy_recorded)] {
            out.push((format!("{prefix}.H"), e.h));
            out.push((format!("{prefix}.tau"), e.tau));
        }
        out.extend(
            self.indicators
                .fields()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v)),
        );
        out.push(("epsilon".into(), self.epsilon));
        out
    }
}
