//! Uniform 1-D grids, quadrature and finite-difference stencils.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants the model depends on. Natural units (ħ = m = 1) by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        let units = Self { hbar, mass };
        units.validate()?;
        Ok(units)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::param("hbar", format!("must be positive, got {}", self.hbar)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::param("mass", format!("must be positive, got {}", self.mass)));
        }
        Ok(())
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// Quadrature rule used for every integral over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    Simpson,
}

/// Uniform grid `x_i = x_min + i * dx`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
    #[serde(default)]
    quadrature: Quadrature,
}

pub const MIN_POINTS: usize = 5;

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min || n < MIN_POINTS {
            return Err(Error::DegenerateDomain { x_min, x_max, n });
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            dx: (x_max - x_min) / (n - 1) as f64,
            quadrature: Quadrature::Trapezoid,
        })
    }

    /// Grid symmetric about `center` with the given half-width.
    pub fn centered(center: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, n)
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn quadrature(&self) -> Quadrature {
        self.quadrature
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Two grids are interchangeable when they share node count and spacing
    /// and start at the same point to within a tiny fraction of a cell.
    pub fn same_nodes(&self, other: &Grid) -> bool {
        self.n == other.n
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
            && (self.x_min - other.x_min).abs() <= 1e-9 * self.dx
    }

    /// Quadrature weights; `integrate(f) == Σ w_i f_i`.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.n;
        let h = self.dx;
        let mut w = vec![0.0; n];
        match self.quadrature {
            Quadrature::Trapezoid => {
                w.iter_mut().for_each(|v| *v = h);
                w[0] = 0.5 * h;
                w[n - 1] = 0.5 * h;
            }
            Quadrature::Simpson => {
                // Composite 1/3 rule; an even point count closes with a 3/8 panel.
                let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
                for i in (0..simpson_end).step_by(2) {
                    w[i] += h / 3.0;
                    w[i + 1] += 4.0 * h / 3.0;
                    w[i + 2] += h / 3.0;
                }
                if n.is_multiple_of(2) {
                    let s = n - 4;
                    for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                        w[s + k] += 3.0 * h / 8.0 * c;
                    }
                }
            }
        }
        w
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        match self.quadrature {
            Quadrature::Trapezoid => {
                let inner: f64 = values[1..self.n - 1].iter().sum();
                self.dx * (inner + 0.5 * (values[0] + values[self.n - 1]))
            }
            Quadrature::Simpson => self
                .weights()
                .iter()
                .zip(values)
                .map(|(w, v)| w * v)
                .sum(),
        }
    }

    /// Second-order first derivative: central in the interior, one-sided at the ends.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let h2 = 2.0 * self.dx;
        let mut d = vec![0.0; n];
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / h2;
        for i in 1..n - 1 {
            d[i] = (f[i + 1] - f[i - 1]) / h2;
        }
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / h2;
        d
    }

    /// Second-order second derivative: central in the interior, one-sided at the ends.
    pub fn second_derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let hh = self.dx * self.dx;
        let mut d = vec![0.0; n];
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / hh;
        for i in 1..n - 1 {
            d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / hh;
        }
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / hh;
        d
    }

    /// Fourth-order first derivative in the interior (five-point stencil);
    /// the two outermost points on each side fall back to the second-order stencils.
    pub fn derivative4(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Only the two edge entries on each side of the low-order result survive.
        let mut d = self.derivative(f);
        let h12 = 12.0 * self.dx;
        for i in 2..n - 2 {
            d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / h12;
        }
        d
    }

    /// Fourth-order second derivative in the interior; second-order at the edges.
    pub fn second_derivative4(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut d = self.second_derivative(f);
        let hh12 = 12.0 * self.dx * self.dx;
        for i in 2..n - 2 {
            d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / hh12;
        }
        d
    }

    /// Running integral `C_i = ∫_{x_min}^{x_i} f dx` by the trapezoid rule.
    pub fn cumulative_trapezoid(&self, f: &[f64]) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.n);
        let mut acc = 0.0;
        c.push(0.0);
        for i in 0..self.n - 1 {
            acc += 0.5 * self.dx * (f[i] + f[i + 1]);
            c.push(acc);
        }
        c
    }

    /// Running integral with fourth-order cell panels
    /// `∫_{x_i}^{x_{i+1}} f ≈ dx/24 (-f_{i-1} + 13 f_i + 13 f_{i+1} - f_{i+2})`;
    /// the first and last cells use one-sided panels of the same order.
    pub fn cumulative_integral4(&self, f: &[f64]) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.n);
        let mut acc = 0.0;
        c.push(0.0);
        for i in 0..self.n - 1 {
            acc += self.cell_integral4(f, i);
            c.push(acc);
        }
        c
    }

    /// Fourth-order estimate of `∫_{x_i}^{x_{i+1}} f dx`.
    pub(crate) fn cell_integral4(&self, f: &[f64], i: usize) -> f64 {
        let n = self.n;
        let h = self.dx / 24.0;
        if i == 0 {
            h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i + 2 == n {
            h * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1])
        } else {
            h * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        }
    }
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(
                "values",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "field",
                index,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn derivative(&self) -> RealField {
        Self {
            grid: self.grid,
            values: self.grid.derivative(&self.values),
        }
    }

    pub fn second_derivative(&self) -> RealField {
        Self {
            grid: self.grid,
            values: self.grid.second_derivative(&self.values),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `a*self + b*other` on a shared grid.
    pub fn combine(&self, a: f64, other: &RealField, b: f64) -> Result<RealField> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch("left field", "right field"));
        }
        RealField::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }
}
