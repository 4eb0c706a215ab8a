//! Measurement kernels and the linear transforms from intrinsic to recorded readings.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, RealField};
use crate::state::{Label, Reading};

pub const ROW_TOLERANCE: f64 = 1e-12;
pub const COLUMN_TOLERANCE: f64 = 1e-6;

/// Columns closer than this many kernel widths to an edge are not expected
/// to sum to one.
const INTERIOR_MARGIN: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Acts on the probability density.
    Density,
    /// Acts on the probability current.
    Current,
}

impl KernelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelKind::Density => "density",
            KernelKind::Current => "current",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "density" => Ok(KernelKind::Density),
            "current" => Ok(KernelKind::Current),
            other => Err(Error::Parse(format!("unknown kernel kind `{other}`"))),
        }
    }
}

/// Device widths for the density and current channels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeviceParams {
    pub sigma: f64,
    pub lambda: f64,
}

impl DeviceParams {
    pub fn new(sigma: f64, lambda: f64) -> Result<Self> {
        let d = Self { sigma, lambda };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::param("sigma", format!("must be >= 0, got {}", self.sigma)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::param("lambda", format!("must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.sigma == 0.0 && self.lambda == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Weights {
    Identity,
    /// Entry (i, j) = profile[|i - j|] * row_scale[i]; zero past the profile.
    Stationary { profile: Vec<f64>, row_scale: Vec<f64> },
    /// Row-major n×n matrix.
    Dense(Vec<f64>),
}

/// Discretised integral kernel; entry (i, j) approximates K(x_i, x_j)·dx.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    grid: Grid,
    kind: KernelKind,
    width: f64,
    weights: Weights,
}

pub fn identity_kernel(grid: Grid, kind: KernelKind) -> Kernel {
    Kernel {
        grid,
        kind,
        width: 0.0,
        weights: Weights::Identity,
    }
}

/// Gaussian kernel exp(-(x-x')²/(2w²)), each row renormalised to sum to one.
pub fn gaussian_kernel(grid: Grid, width: f64, kind: KernelKind) -> Result<Kernel> {
    if !(width.is_finite() && width >= 0.0) {
        return Err(Error::param("width", format!("must be >= 0, got {width}")));
    }
    if width == 0.0 {
        return Ok(identity_kernel(grid, kind));
    }
    let dx = grid.dx();
    if width < 2.0 * dx {
        return Err(Error::Resolution { width, dx });
    }
    let n = grid.len();
    let norm = dx / (width * (2.0 * PI).sqrt());
    let mut profile = Vec::new();
    for d in 0..n {
        let s = d as f64 * dx / width;
        let v = norm * (-0.5 * s * s).exp();
        if v == 0.0 {
            break;
        }
        profile.push(v);
    }
    let len = profile.len();
    let mut prefix = vec![0.0; len + 1];
    for d in 0..len {
        prefix[d + 1] = prefix[d] + profile[d];
    }
    let row_scale = (0..n)
        .map(|i| {
            let left = i.min(len - 1);
            let right = (n - 1 - i).min(len - 1);
            1.0 / (prefix[left + 1] + prefix[right + 1] - profile[0])
        })
        .collect();
    Ok(Kernel {
        grid,
        kind,
        width,
        weights: Weights::Stationary { profile, row_scale },
    })
}

impl Kernel {
    /// Arbitrary nonnegative matrix; must pass [`check_normalization`].
    pub fn from_dense(grid: Grid, kind: KernelKind, width: f64, matrix: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if matrix.len() != n * n {
            return Err(Error::KernelRejected(format!(
                "expected {} entries, got {}",
                n * n,
                matrix.len()
            )));
        }
        if let Some(index) = matrix.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "kernel",
                index,
            });
        }
        if let Some(i) = matrix.iter().position(|v| *v < 0.0) {
            return Err(Error::KernelRejected(format!(
                "negative entry at ({}, {})",
                i / n,
                i % n
            )));
        }
        if !(width.is_finite() && width >= 0.0) {
            return Err(Error::KernelRejected(format!("invalid width {width}")));
        }
        let width = if width > 0.0 {
            width
        } else {
            estimate_width(&grid, &matrix)
        };
        let kernel = Kernel {
            grid,
            kind,
            width,
            weights: Weights::Dense(matrix),
        };
        let report = check_normalization(&kernel);
        if !report.passed {
            return Err(Error::KernelRejected(format!(
                "row deviation {:.3e}, interior column deviation {:.3e}",
                report.max_row_deviation, report.max_interior_column_deviation
            )));
        }
        Ok(kernel)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.weights, Weights::Identity)
    }

    /// Entry (i, j).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.weights {
            Weights::Identity => f64::from(u8::from(i == j)),
            Weights::Stationary { profile, row_scale } => {
                profile.get(i.abs_diff(j)).map_or(0.0, |p| p * row_scale[i])
            }
            Weights::Dense(m) => m[i * self.grid.len() + j],
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.grid.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.entry(i, j);
            }
        }
        m
    }

    /// Matrix-vector product `K·f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        debug_assert_eq!(f.len(), n);
        match &self.weights {
            Weights::Identity => f.to_vec(),
            Weights::Stationary { profile, row_scale } => {
                let len = profile.len();
                (0..n)
                    .map(|i| {
                        let lo = i.saturating_sub(len - 1);
                        let hi = (i + len - 1).min(n - 1);
                        let acc: f64 = (lo..=hi).map(|j| profile[i.abs_diff(j)] * f[j]).sum();
                        acc * row_scale[i]
                    })
                    .collect()
            }
            Weights::Dense(m) => m
                .chunks_exact(n)
                .map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum())
                .collect(),
        }
    }

    fn row_sums(&self) -> Vec<f64> {
        let n = self.grid.len();
        match &self.weights {
            Weights::Identity => vec![1.0; n],
            Weights::Stationary { profile, row_scale } => {
                let len = profile.len();
                (0..n)
                    .map(|i| {
                        let lo = i.saturating_sub(len - 1);
                        let hi = (i + len - 1).min(n - 1);
                        let s: f64 = (lo..=hi).map(|j| profile[i.abs_diff(j)]).sum();
                        s * row_scale[i]
                    })
                    .collect()
            }
            Weights::Dense(m) => m.chunks_exact(n).map(|row| row.iter().sum()).collect(),
        }
    }

    fn column_sum(&self, j: usize) -> f64 {
        let n = self.grid.len();
        match &self.weights {
            Weights::Stationary { profile, row_scale } => {
                let len = profile.len();
                let lo = j.saturating_sub(len - 1);
                let hi = (j + len - 1).min(n - 1);
                (lo..=hi).map(|i| profile[i.abs_diff(j)] * row_scale[i]).sum()
            }
            _ => (0..n).map(|i| self.entry(i, j)).sum(),
        }
    }

    /// Kernel as CSV: one header record `n, dx, kind, width`, then n rows of n entries.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.grid.len();
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record([
            n.to_string(),
            self.grid.dx().to_string(),
            self.kind.to_string(),
            self.width.to_string(),
        ])?;
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            row.clear();
            row.extend((0..n).map(|j| self.entry(i, j).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a kernel written by [`Kernel::write_csv`] for the given grid.
    pub fn read_csv<R: BufRead>(input: R, grid: Grid) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = reader.records();
        let header = records
            .next()
            .ok_or_else(|| Error::Parse("empty kernel file".into()))??;
        if header.len() != 4 {
            return Err(Error::Parse("kernel header must be `n, dx, kind, width`".into()));
        }
        let n: usize = parse_field(&header[0], "n")?;
        let dx: f64 = parse_field(&header[1], "dx")?;
        let kind: KernelKind = header[2].parse()?;
        let width: f64 = parse_field(&header[3], "width")?;
        if n != grid.len() || (dx - grid.dx()).abs() > 1e-9 * grid.dx() {
            return Err(Error::GridMismatch("kernel file", "target grid"));
        }
        let mut matrix = Vec::with_capacity(n * n);
        for (i, record) in records.enumerate() {
            let record = record?;
            if record.len() != n {
                return Err(Error::Parse(format!(
                    "kernel row {i} has {} entries, expected {n}",
                    record.len()
                )));
            }
            for field in record.iter() {
                matrix.push(parse_field(field, "kernel entry")?);
            }
        }
        if matrix.len() != n * n {
            return Err(Error::Parse(format!(
                "kernel has {} rows, expected {n}",
                matrix.len() / n
            )));
        }
        Kernel::from_dense(grid, kind, width, matrix)
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse {what} from `{s}`")))
}

/// Standard deviation of the central row, used when a loaded kernel has no width.
fn estimate_width(grid: &Grid, matrix: &[f64]) -> f64 {
    let n = grid.len();
    let c = n / 2;
    let row = &matrix[c * n..(c + 1) * n];
    let total: f64 = row.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let var: f64 = row
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let d = (j as f64 - c as f64) * grid.dx();
            w * d * d
        })
        .sum::<f64>()
        / total;
    var.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationReport {
    pub max_row_deviation: f64,
    pub max_interior_column_deviation: f64,
    pub interior_columns: usize,
    pub passed: bool,
}

/// Deviations of row sums (all rows) and column sums (interior columns) from one.
pub fn check_normalization(kernel: &Kernel) -> NormalizationReport {
    let n = kernel.grid.len();
    let max_row_deviation = kernel
        .row_sums()
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max);
    let margin = INTERIOR_MARGIN * kernel.width;
    let g = &kernel.grid;
    let mut columns: Vec<usize> = (0..n)
        .filter(|&j| g.point(j) - g.x_min() >= margin && g.x_max() - g.point(j) >= margin)
        .collect();
    if columns.is_empty() {
        columns.push(n / 2);
    }
    let max_interior_column_deviation = match &kernel.weights {
        Weights::Identity => 0.0,
        _ => columns
            .iter()
            .map(|&j| (kernel.column_sum(j) - 1.0).abs())
            .fold(0.0, f64::max),
    };
    NormalizationReport {
        max_row_deviation,
        max_interior_column_deviation,
        interior_columns: columns.len(),
        passed: max_row_deviation <= ROW_TOLERANCE
            && max_interior_column_deviation <= COLUMN_TOLERANCE,
    }
}

fn transform(kernel: &Kernel, expected: KernelKind, field: &RealField) -> Result<RealField> {
    if kernel.kind != expected {
        return Err(Error::KernelKind {
            expected: expected.as_str(),
            found: kernel.kind.as_str(),
        });
    }
    if !kernel.grid.same_nodes(field.grid()) {
        return Err(Error::GridMismatch("kernel", "reading"));
    }
    RealField::new(*field.grid(), kernel.apply(field.values()))
}

/// ρ_R = G·ρ_I.
pub fn apply_density_transform(g: &Kernel, reading: &Reading) -> Result<RealField> {
    transform(g, KernelKind::Density, reading.rho())
}

/// J_R = Λ·J_I.
pub fn apply_current_transform(l: &Kernel, reading: &Reading) -> Result<RealField> {
    transform(l, KernelKind::Current, reading.current())
}

/// Recorded reading produced by the density kernel `g` and current kernel `l`.
pub fn measure(reading: &Reading, g: &Kernel, l: &Kernel) -> Result<Reading> {
    Reading::new(
        apply_density_transform(g, reading)?,
        apply_current_transform(l, reading)?,
        Label::R,
    )
}
