//! Position draws from a reading's density by inverse-transform sampling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{Label, Reading};

/// Name of the generator recorded alongside every sample set.
pub const RNG_NAME: &str = "ChaCha8";

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub draws: Vec<f64>,
    pub seed: u64,
    pub source_label: Label,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Single-column CSV preceded by `#`-prefixed metadata lines.
    pub fn write_csv<W: Write>(&self, mut out: W, scenario: &str) -> Result<()> {
        writeln!(out, "# seed={}", self.seed)?;
        writeln!(out, "# count={}", self.draws.len())?;
        writeln!(out, "# scenario={scenario}")?;
        writeln!(out, "# source={}", self.source_label)?;
        writeln!(out, "# rng={RNG_NAME}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x [length]"])?;
        for x in &self.draws {
            w.write_record([x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Inverse transform on the trapezoid cumulative of ρ, linear inside each cell.
pub fn sample_positions(reading: &Reading, count: usize, seed: u64) -> Result<SampleSet> {
    if count < 1 {
        return Err(Error::param("count", "must be at least 1"));
    }
    let grid = reading.grid();
    let cdf = grid.cumulative_trapezoid(reading.rho().values());
    let total = *cdf.last().unwrap_or(&0.0);
    // Written so that a NaN total is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(total > 0.0) {
        return Err(Error::InvalidReading("density has no mass to sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last_cell = grid.len() - 2;
    let draws = (0..count)
        .map(|_| {
            let target = rng.random::<f64>() * total;
            // First node whose cumulative exceeds the target closes the cell.
            let upper = cdf.partition_point(|c| *c <= target).clamp(1, last_cell + 1);
            let i = upper - 1;
            let width = cdf[upper] - cdf[i];
            let frac = if width > 0.0 { (target - cdf[i]) / width } else { 0.5 };
            (grid.point(i) + frac.clamp(0.0, 1.0) * grid.dx()).clamp(grid.x_min(), grid.x_max())
        })
        .collect();
    Ok(SampleSet {
        draws,
        seed,
        source_label: reading.label(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalParameters {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (N - 1) sample standard deviation.
    pub std: f64,
    pub std_error: f64,
}

pub fn empirical_parameters(s: &SampleSet) -> Result<EmpiricalParameters> {
    let n = s.draws.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mean = s.draws.iter().sum::<f64>() / n as f64;
    let ss: f64 = s.draws.iter().map(|x| (x - mean) * (x - mean)).sum();
    let std = (ss / (n - 1) as f64).sqrt();
    Ok(EmpiricalParameters {
        count: n,
        mean,
        std,
        std_error: std / (n as f64).sqrt(),
    })
}
