//! Quadrature and differentiation kernels shared by every transform.
//!
//! Everything here is generic over [`Scalar`] so the same rule integrates
//! real and complex integrands. Summation order is always ascending node
//! index, which keeps results bit-reproducible.

use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Field element accepted by the integrators: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Sum
    + std::fmt::Debug
    + 'static
{
    fn modulus(self) -> f64;

    fn to_complex(self) -> Complex64;

    fn is_finite_value(self) -> bool {
        self.modulus().is_finite()
    }
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }

    fn to_complex(self) -> Complex64 {
        self
    }
}

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T: Scalar>(&self, a: f64, b: f64, f: impl Fn(f64) -> T) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }

    /// Integrates over consecutive panels delimited by `breaks`.
    pub fn integrate_breaks<T: Scalar>(&self, breaks: &[f64], f: impl Fn(f64) -> T) -> T {
        let mut acc = T::zero();
        for pair in breaks.windows(2) {
            acc = acc + self.integrate(pair[0], pair[1], &f);
        }
        acc
    }

    /// Integrates over `[a, b]` split into `panels` equal panels.
    pub fn integrate_composite<T: Scalar>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        f: impl Fn(f64) -> T,
    ) -> T {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = T::zero();
        for k in 0..panels {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { lo + h };
            acc = acc + self.integrate(lo, hi, &f);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

macro_rules! cached_rule {
    ($name:ident, $n:expr) => {
        pub fn $name() -> &'static GaussLegendre {
            static RULE: OnceLock<GaussLegendre> = OnceLock::new();
            RULE.get_or_init(|| GaussLegendre::new($n))
        }
    };
}

cached_rule!(gl16, 16);
cached_rule!(gl32, 32);
cached_rule!(gl64, 64);

/// Breakpoints on `[a, b]` refined geometrically towards `a`: the first
/// panel has width `first`, each next one is `ratio` times wider.
pub fn graded_breaks(a: f64, b: f64, first: f64, ratio: f64) -> Vec<f64> {
    let mut breaks = vec![a];
    let mut width = first.min(b - a);
    let mut x = a;
    while x + width < b {
        x += width;
        breaks.push(x);
        width *= ratio;
    }
    breaks.push(b);
    breaks
}

/// Breakpoints graded geometrically (ratio 2) away from `a`, starting at
/// width `first`, with panel widths capped at `max_width`.
pub fn capped_breaks(a: f64, b: f64, first: f64, max_width: f64) -> Vec<f64> {
    let mut breaks = vec![a];
    let mut width = first.min(max_width).max(f64::MIN_POSITIVE);
    let mut x = a;
    while x + width < b - 0.25 * width {
        x += width;
        breaks.push(x);
        width = (2.0 * width).min(max_width);
    }
    breaks.push(b);
    breaks
}

/// Breakpoints graded geometrically towards both ends of `[a, b]`.
pub fn two_sided_breaks(a: f64, b: f64, first: f64, ratio: f64) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let mut left = graded_breaks(a, mid, first, ratio);
    let right = graded_breaks(a, mid, first, ratio);
    left.extend(right.iter().rev().skip(1).map(|x| a + b - x));
    left
}

/// Composite Simpson rule on uniformly spaced samples (odd length).
pub fn simpson<T: Scalar>(values: &[T], h: f64) -> Result<T> {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "Simpson rule needs an odd number (>= 3) of samples, got {n}"
        )));
    }
    let mut odd = T::zero();
    let mut even = T::zero();
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd = odd + *v;
        } else {
            even = even + *v;
        }
    }
    Ok((values[0] + values[n - 1] + odd * 4.0 + even * 2.0) * (h / 3.0))
}

/// Simpson value together with the difference to the rule on every other
/// sample, used as a Richardson-type error estimate.
pub fn simpson_with_estimate<T: Scalar>(values: &[T], h: f64) -> Result<Estimate<T>> {
    let fine = simpson(values, h)?;
    let n = values.len();
    let error = if (n - 1) % 4 == 0 && n >= 5 {
        let coarse: Vec<T> = values.iter().step_by(2).copied().collect();
        (fine - simpson(&coarse, 2.0 * h)?).modulus() / 15.0
    } else {
        let trap = trapezoid(values, h);
        (fine - trap).modulus()
    };
    Ok(Estimate { value: fine, error })
}

pub fn trapezoid<T: Scalar>(values: &[T], h: f64) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let inner: T = values[1..values.len() - 1].iter().copied().sum();
    (inner + (values[0] + values[values.len() - 1]) * 0.5) * h
}

/// Smooth spectral window applied to integrands on a truncated frequency
/// line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Taper {
    /// Plain truncation at the end of the grid.
    None,
    /// Weight 1 for `|x| <= flat`, C-infinity roll-off to 0 at `|x| = 1`.
    FlatTop { flat: f64 },
}

impl Default for Taper {
    fn default() -> Self {
        Taper::FlatTop { flat: 0.5 }
    }
}

impl Taper {
    /// Weight at the normalized position `x = nu / nu_max`.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            Taper::None => {
                if x.abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Taper::FlatTop { flat } => {
                let ax = x.abs();
                if ax <= flat {
                    1.0
                } else if ax >= 1.0 {
                    0.0
                } else {
                    let t = (ax - flat) / (1.0 - flat);
                    let up = bump(1.0 - t);
                    up / (up + bump(t))
                }
            }
        }
    }
}

fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Central-difference derivative with one Richardson level.
#[derive(Debug, Clone, Copy)]
pub struct Derivative<T> {
    pub value: T,
    /// `|D(h) - D(h/2)|`, the size of the Richardson correction.
    pub error: f64,
}

/// Base step: `1e-3` scaled by the argument magnitude.
pub fn default_step(x: f64) -> f64 {
    1e-3 * x.abs().max(1.0)
}

pub fn richardson_derivative<T: Scalar>(f: impl Fn(f64) -> T, x: f64, h: f64) -> Derivative<T> {
    let coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    let fine = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    let value = fine + (fine - coarse) / 3.0;
    Derivative {
        value,
        error: (fine - coarse).modulus(),
    }
}

/// Relative threshold above which a Richardson correction is read as a
/// failure of differentiability.
pub const C1_THRESHOLD: f64 = 1e-3;

pub fn looks_non_smooth<T: Scalar>(d: &Derivative<T>) -> bool {
    !d.value.is_finite_value() || d.error > C1_THRESHOLD * (1.0 + d.value.modulus())
}
