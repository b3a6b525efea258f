//! Sampled functions on a one-dimensional grid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Which variable a grid is laid out in.
///
/// `U` is the polar angle, `T` the real horocyclic parameter, `V` the
/// hyperbolic polar distance, `W` the imaginary horocyclic parameter and
/// `X` stands for `cosh w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordKind {
    U,
    T,
    V,
    W,
    X,
}

impl CoordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoordKind::U => "u",
            CoordKind::T => "t",
            CoordKind::V => "v",
            CoordKind::W => "w",
            CoordKind::X => "x",
        }
    }
}

impl fmt::Display for CoordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CoordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(CoordKind::U),
            "t" => Ok(CoordKind::T),
            "v" => Ok(CoordKind::V),
            "w" => Ok(CoordKind::W),
            "x" => Ok(CoordKind::X),
            other => Err(Error::InvalidInput(format!(
                "unknown coordinate kind `{other}` (expected one of u, t, v, w, x)"
            ))),
        }
    }
}

/// Complex values on a strictly increasing grid, interpolated by a clamped
/// cubic spline.
#[derive(Debug, Clone)]
pub struct GridFunction {
    kind: CoordKind,
    grid: Vec<f64>,
    values: Vec<C64>,
    curvature: Vec<C64>,
}

impl GridFunction {
    pub fn new(kind: CoordKind, grid: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidInput("a grid needs at least two points".into()));
        }
        if let Some(i) = grid.windows(2).position(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidInput(format!(
                "grid is not strictly increasing at index {}",
                i + 1
            )));
        }
        if grid.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid or values contain non-finite numbers".into()));
        }
        let curvature = spline_curvature(&grid, &values);
        Ok(Self {
            kind,
            grid,
            values,
            curvature,
        })
    }

    pub fn from_real(kind: CoordKind, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(kind, grid, values.into_iter().map(|v| C64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(kind: CoordKind, grid: Vec<f64>, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(kind, grid, values)
    }

    pub fn kind(&self) -> CoordKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * (self.end() - self.start());
        x >= self.start() - slack && x <= self.end() + slack
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Spline value at `x`; errors outside the grid.
    pub fn eval(&self, x: f64) -> Result<C64> {
        if !self.contains(x) {
            return Err(Error::domain(
                "grid interpolation",
                format!(
                    "{}={x} outside the sampled range [{}, {}]",
                    self.kind,
                    self.start(),
                    self.end()
                ),
            ));
        }
        Ok(self.eval_clamped(x))
    }

    /// Spline value with `x` clamped into the grid range.
    pub fn eval_clamped(&self, x: f64) -> C64 {
        let x = x.clamp(self.start(), self.end());
        let g = &self.grid;
        let k = match g.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i.clamp(1, g.len() - 1) - 1,
        };
        let h = g[k + 1] - g[k];
        let a = (g[k + 1] - x) / h;
        let b = (x - g[k]) / h;
        self.values[k] * a
            + self.values[k + 1] * b
            + (self.curvature[k] * (a * a * a - a) + self.curvature[k + 1] * (b * b * b - b))
                * (h * h / 6.0)
    }

    /// Rough spline error: the spline through every other node, compared
    /// with the dropped nodes, scaled down by the fourth-order rate.
    pub fn interpolation_error_estimate(&self) -> f64 {
        if self.grid.len() < 7 {
            return 0.0;
        }
        let grid: Vec<f64> = self.grid.iter().step_by(2).copied().collect();
        let values: Vec<C64> = self.values.iter().step_by(2).copied().collect();
        let Ok(coarse) = GridFunction::new(self.kind, grid, values) else {
            return 0.0;
        };
        // Skip the two outermost intervals where the end slopes dominate.
        let n = self.grid.len();
        (3..n.saturating_sub(3))
            .step_by(2)
            .map(|i| (coarse.eval_clamped(self.grid[i]) - self.values[i]).norm())
            .fold(0.0, f64::max)
            / 16.0
    }

    /// Same grid, values transformed pointwise.
    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Result<Self> {
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Self::new(self.kind, self.grid.clone(), values)
    }
}

fn spline_curvature(x: &[f64], y: &[C64]) -> Vec<C64> {
    let n = x.len();
    let mut m = vec![C64::new(0.0, 0.0); n];
    if n < 3 {
        return m;
    }
    // Clamped ends when four points are available, slopes taken from the
    // interpolating cubic; natural ends otherwise.
    let clamped = n >= 4;
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        lower[i] = h0 / 6.0;
        diag[i] = (h0 + h1) / 3.0;
        upper[i] = h1 / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    if clamped {
        let h0 = x[1] - x[0];
        let d0 = end_slope(&x[..4], &y[..4], 0);
        diag[0] = h0 / 3.0;
        upper[0] = h0 / 6.0;
        rhs[0] = (y[1] - y[0]) / h0 - d0;
        let h = x[n - 1] - x[n - 2];
        let dn = end_slope(&x[n - 4..], &y[n - 4..], 3);
        lower[n - 1] = h / 6.0;
        diag[n - 1] = h / 3.0;
        rhs[n - 1] = dn - (y[n - 1] - y[n - 2]) / h;
    }
    // Thomas algorithm.
    for i in 1..n {
        let factor = lower[i] / diag[i - 1];
        diag[i] -= factor * upper[i - 1];
        rhs[i] = rhs[i] - rhs[i - 1] * factor;
    }
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - m[i + 1] * upper[i]) / diag[i];
    }
    m
}

/// Derivative at `x[at]` of the polynomial through the given points.
fn end_slope(x: &[f64], y: &[C64], at: usize) -> C64 {
    let x0 = x[at];
    let mut d = C64::new(0.0, 0.0);
    for k in 0..x.len() {
        let weight = if k == at {
            (0..x.len()).filter(|&j| j != at).map(|j| 1.0 / (x0 - x[j])).sum()
        } else {
            let num: f64 = (0..x.len()).filter(|&j| j != at && j != k).map(|j| x0 - x[j]).product();
            let den: f64 = (0..x.len()).filter(|&j| j != k).map(|j| x[k] - x[j]).product();
            num / den
        };
        d += y[k] * weight;
    }
    d
}

/// Piecewise-linear interpolation of real samples, clamped at the ends.
pub fn linear_interp(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    if at <= x[0] {
        return y[0];
    }
    if at >= x[n - 1] {
        return y[n - 1];
    }
    let k = x.partition_point(|&p| p <= at) - 1;
    let t = (at - x[k]) / (x[k + 1] - x[k]);
    y[k] + t * (y[k + 1] - y[k])
}

/// Uniform grid from `start` to `stop` (inclusive when it lands on a step).
pub fn uniform(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop > start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidInput(format!(
            "grid {start}:{stop}:{step} must satisfy start < stop and step > 0"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 50_000_000 {
        return Err(Error::InvalidInput(format!("grid {start}:{stop}:{step} is too large")));
    }
    let mut g: Vec<f64> = (0..=n).map(|i| start + step * i as f64).collect();
    // land exactly on `stop` when the last step reaches it up to rounding
    if (g[n] - stop).abs() <= 1e-9 * step {
        g[n] = stop;
    }
    Ok(g)
}

/// `n + 1` equally spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spline_reproduces_nodes_and_smooth_functions() {
        let grid = linspace(0.0, 3.0, 60);
        let f = GridFunction::from_fn(CoordKind::V, grid, |x| C64::new(x.sin(), x.cos())).unwrap();
        for &x in &[0.0, 0.05, 1.234, 2.999, 3.0] {
            let v = f.eval(x).unwrap();
            assert_abs_diff_eq!(v.re, x.sin(), epsilon = 2e-5);
            assert_abs_diff_eq!(v.im, x.cos(), epsilon = 2e-5);
        }
        assert!(f.eval(3.1).is_err());
        let est = f.interpolation_error_estimate();
        assert!(est > 0.0 && est < 1e-5);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::from_real(CoordKind::U, vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(GridFunction::from_real(CoordKind::U, vec![0.0], vec![1.0]).is_err());
        assert!(GridFunction::from_real(CoordKind::U, vec![0.0, 1.0], vec![1.0]).is_err());
        assert!("q".parse::<CoordKind>().is_err());
    }

    #[test]
    fn uniform_grid_includes_endpoint() {
        let g = uniform(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_abs_diff_eq!(linear_interp(&[0.0, 1.0], &[2.0, 4.0], 0.25), 2.5);
    }
}
