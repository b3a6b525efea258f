//! Coefficient sequences, the Hausdorff-type moment condition, and the
//! Laplace-transform interpolant of the moments.

use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result, Warning, WarningCode};
use crate::quad::{capped_breaks, gl32, gl64, two_sided_breaks};
use crate::specfun::ComplexDegree;
use crate::C64;

/// Largest index the Hausdorff check accepts.
pub const HAUSDORFF_MAX_N: usize = 300;

/// Finite prefix `a_0 … a_N` of the Legendre coefficients together with
/// the decay exponent `p` and the integrability margin `ε`.
///
/// When the coefficients are known exactly (rational input), the exact
/// values are kept alongside the floating-point ones so that high-order
/// differences can be formed without cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    a: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    p: u32,
    epsilon: f64,
}

impl CoefficientSequence {
    pub fn new(a: Vec<f64>, p: u32, epsilon: f64) -> Result<Self> {
        Self::validate(a.len(), epsilon)?;
        if let Some(i) = a.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("coefficient a_{i} is not finite")));
        }
        Ok(Self {
            a,
            exact: None,
            p,
            epsilon,
        })
    }

    pub fn from_rationals(exact: Vec<BigRational>, p: u32, epsilon: f64) -> Result<Self> {
        Self::validate(exact.len(), epsilon)?;
        let a = exact.iter().map(rational_value).collect();
        Ok(Self {
            a,
            exact: Some(exact),
            p,
            epsilon,
        })
    }

    fn validate(len: usize, epsilon: f64) -> Result<()> {
        if len < 3 {
            return Err(Error::InvalidInput(format!(
                "a coefficient sequence needs at least 3 terms (a_0, a_1, a_2), got {len}"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(())
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Largest index `N`.
    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn with_p(mut self, p: u32) -> Self {
        self.p = p;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        Self::validate(self.len(), epsilon)?;
        self.epsilon = epsilon;
        Ok(self)
    }

    /// Multiplies every coefficient by `k`. Exact values are dropped unless
    /// `k` is an integer.
    pub fn scaled(&self, k: f64) -> Self {
        let exact = match (&self.exact, k.fract() == 0.0 && k.abs() < 1e15) {
            (Some(ex), true) => {
                let kk = BigRational::from_integer(BigInt::from(k as i64));
                Some(ex.iter().map(|r| r * &kk).collect())
            }
            _ => None,
        };
        Self {
            a: self.a.iter().map(|x| x * k).collect(),
            exact,
            p: self.p,
            epsilon: self.epsilon,
        }
    }

    /// Termwise sum, truncated to the shorter sequence.
    pub fn sum(&self, other: &Self) -> Self {
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            _ => None,
        };
        Self {
            a,
            exact,
            p: self.p,
            epsilon: self.epsilon,
        }
    }

    /// `f_n = n^p a_n` in floating point (`0^0 = 1`).
    pub fn f_sequence(&self) -> Vec<f64> {
        self.a
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64).powi(self.p as i32) * a)
            .collect()
    }

    fn f_exact(&self) -> Option<Vec<BigRational>> {
        self.exact.as_ref().map(|ex| {
            ex.iter()
                .enumerate()
                .map(|(n, a)| a * BigRational::from_integer(BigInt::from(n).pow(self.p)))
                .collect()
        })
    }

    /// A [`WarningCode::Hypothesis`] warning when `p` is below what `op`
    /// needs.
    pub fn require_p(&self, op: &str, min: u32) -> Option<Warning> {
        (self.p < min).then(|| {
            Warning::new(
                WarningCode::Hypothesis,
                format!(
                    "{op} assumes decay exponent p >= {min} but the sequence declares p = {}; \
                     the result is outside the proven regime",
                    self.p
                ),
            )
        })
    }
}

/// Nearest double to an exact rational, also when numerator and
/// denominator are beyond the double range.
pub fn rational_value(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let ln = ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom());
        ln.exp().copysign(if r.is_negative() { -1.0 } else { 1.0 })
    })
}

fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * LN_2
}

fn ln_abs_rational(r: &BigRational) -> f64 {
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

/// `Δ^k f_n = Σ_m (-1)^m C(k,m) f_{n+k-m}`, formed by repeated differencing.
pub fn finite_difference(f: &[f64], k: usize, n: usize) -> Result<f64> {
    if n + k >= f.len() {
        return Err(Error::Index {
            op: "finite_difference",
            detail: format!(
                "Δ^{k} f_{n} needs f_{} but only {} terms are available",
                n + k,
                f.len()
            ),
        });
    }
    let mut row: Vec<f64> = f[n..=n + k].to_vec();
    for _ in 0..k {
        for j in 0..row.len() - 1 {
            row[j] = row[j + 1] - row[j];
        }
        row.pop();
    }
    Ok(row[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Per-`n` left-hand side of the moment condition and the verdict against
/// the bound `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausdorffReport {
    pub lhs: Vec<f64>,
    pub sup: f64,
    pub bound: f64,
    pub verdict: Verdict,
    /// Whether differences were formed in exact rational arithmetic.
    pub exact: bool,
}

impl HausdorffReport {
    /// First index whose term reaches the bound.
    pub fn first_violation(&self) -> Option<usize> {
        self.lhs.iter().position(|&x| x >= self.bound)
    }
}

/// Evaluates `(n+1)^{1+ε} Σ_i C(n,i)^{2+ε} |Δ^i f_{n-i}|^{2+ε}` for every
/// `n ≤ N` with `f_n = n^p a_n`, and compares the supremum with `bound`.
pub fn hausdorff_check(seq: &CoefficientSequence, bound: f64) -> Result<HausdorffReport> {
    let n_max = seq.n_max();
    if n_max > HAUSDORFF_MAX_N {
        return Err(Error::OverflowGuard {
            op: "hausdorff_check",
            detail: format!(
                "N = {n_max} exceeds {HAUSDORFF_MAX_N}; binomial weights and differences \
                 leave the double-precision range"
            ),
        });
    }
    if !(bound > 0.0) {
        return Err(Error::InvalidInput(format!("bound M must be positive, got {bound}")));
    }
    // ln|Δ^i f_j| for i + j ≤ N, stored row by row (row i has N+1-i entries).
    let ln_diff: Vec<Vec<f64>> = match seq.f_exact() {
        Some(f) => {
            let mut rows = Vec::with_capacity(n_max + 1);
            let mut row = f;
            loop {
                rows.push(row.iter().map(|r| if r.is_zero() { f64::NEG_INFINITY } else { ln_abs_rational(r) }).collect());
                if row.len() == 1 {
                    break;
                }
                row = row.windows(2).map(|p| &p[1] - &p[0]).collect();
            }
            rows
        }
        None => {
            let mut rows = Vec::with_capacity(n_max + 1);
            let mut row = seq.f_sequence();
            loop {
                rows.push(row.iter().map(|x| x.abs().ln()).collect());
                if row.len() == 1 {
                    break;
                }
                row = row.windows(2).map(|p| p[1] - p[0]).collect();
            }
            rows
        }
    };
    let power = 2.0 + seq.epsilon();
    let lhs: Vec<f64> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = 0.0;
            for (i, row) in ln_diff.iter().enumerate().take(n + 1) {
                let ld = row[n - i];
                if ld == f64::NEG_INFINITY {
                    continue;
                }
                acc += (power * (ln_binomial(n as u64, i as u64) + ld)).exp();
            }
            ((n + 1) as f64).powf(1.0 + seq.epsilon()) * acc
        })
        .collect();
    if let Some(n) = lhs.iter().position(|x| !x.is_finite()) {
        return Err(Error::OverflowGuard {
            op: "hausdorff_check",
            detail: format!("term n = {n} overflowed"),
        });
    }
    let sup = lhs.iter().copied().fold(0.0, f64::max);
    Ok(HausdorffReport {
        verdict: if sup < bound { Verdict::Pass } else { Verdict::Fail },
        lhs,
        sup,
        bound,
        exact: seq.exact().is_some(),
    })
}

/// A density `u` on `[0, 1]`, either a closed form or linearly
/// interpolated samples.
#[derive(Clone)]
pub enum MomentDensity {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Sampled { x: Vec<f64>, u: Vec<f64> },
}

impl fmt::Debug for MomentDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentDensity::Closure(_) => f.write_str("MomentDensity::Closure"),
            MomentDensity::Sampled { x, .. } => write!(f, "MomentDensity::Sampled({} points)", x.len()),
        }
    }
}

impl MomentDensity {
    pub fn closure(u: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MomentDensity::Closure(Arc::new(u))
    }

    /// Samples must cover `[0, 1]` on a strictly increasing grid.
    pub fn sampled(x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.len() != u.len() || x.len() < 2 {
            return Err(Error::InvalidInput(
                "density samples need matching x and u columns with at least two rows".into(),
            ));
        }
        if x.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidInput("density grid must be strictly increasing".into()));
        }
        if x[0] > 0.0 || x[x.len() - 1] < 1.0 {
            return Err(Error::InvalidInput(format!(
                "density grid [{}, {}] must cover [0, 1]",
                x[0],
                x[x.len() - 1]
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("density samples must be finite".into()));
        }
        Ok(MomentDensity::Sampled { x, u })
    }

    pub fn eval(&self, at: f64) -> f64 {
        match self {
            MomentDensity::Closure(f) => f(at),
            MomentDensity::Sampled { x, u } => crate::grid::linear_interp(x, u, at),
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            MomentDensity::Closure(_) => two_sided_breaks(0.0, 1.0, 1e-12, 2.0),
            MomentDensity::Sampled { x, .. } => {
                let mut b: Vec<f64> = x.iter().copied().filter(|&t| t > 0.0 && t < 1.0).collect();
                b.insert(0, 0.0);
                b.push(1.0);
                b
            }
        }
    }

    /// `∫_0^1 |u|^{2+ε}`; errors if it is not finite.
    pub fn integrability_norm(&self, epsilon: f64) -> Result<f64> {
        let breaks = self.breaks();
        let v = gl32().integrate_breaks(&breaks, |x| self.eval(x).abs().powf(2.0 + epsilon));
        if !v.is_finite() {
            return Err(Error::Divergence {
                op: "moment density",
                detail: format!("∫|u|^(2+{epsilon}) is not finite"),
            });
        }
        Ok(v)
    }
}

/// `f_n = ∫_0^1 x^n u(x) dx` for `n ≤ n_max`.
pub fn moments_from_density(u: &MomentDensity, n_max: usize) -> Result<Vec<f64>> {
    let breaks = u.breaks();
    let nodes: Vec<(f64, f64)> = nodes_on(&breaks, gl64().nodes(), gl64().weights())
        .into_iter()
        .map(|(x, w)| (x, w * u.eval(x)))
        .collect();
    let check: Vec<(f64, f64)> = nodes_on(&breaks, gl32().nodes(), gl32().weights())
        .into_iter()
        .map(|(x, w)| (x, w * u.eval(x)))
        .collect();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let fine: f64 = nodes.iter().map(|(x, w)| w * x.powi(n as i32)).sum();
        let coarse: f64 = check.iter().map(|(x, w)| w * x.powi(n as i32)).sum();
        let residual = (fine - coarse).abs();
        if !fine.is_finite() || residual > 1e-8 * (1.0 + fine.abs()) {
            return Err(Error::NonConvergence {
                op: "moments_from_density",
                residual,
            });
        }
        out.push(fine);
    }
    Ok(out)
}

fn nodes_on(breaks: &[f64], x: &[f64], w: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity((breaks.len() - 1) * x.len());
    for p in breaks.windows(2) {
        let half = 0.5 * (p[1] - p[0]);
        let mid = 0.5 * (p[1] + p[0]);
        for (xi, wi) in x.iter().zip(w) {
            out.push((mid + half * xi, wi * half));
        }
    }
    out
}

/// `F̃(λ) = ∫_0^∞ e^{-(λ+1)t} u(e^{-t}) dt`, i.e. `∫_0^1 x^λ u(x) dx`.
pub fn interpolant(u: &MomentDensity, lambda: ComplexDegree) -> Result<C64> {
    if lambda.sigma < -0.5 {
        return Err(Error::domain(
            "interpolant",
            format!("Re λ = {} is below -1/2", lambda.sigma),
        ));
    }
    let decay = lambda.sigma + 1.0;
    let t_max = 60.0 / decay;
    let width = (2.0f64).min(std::f64::consts::PI / lambda.nu.abs().max(1e-300));
    let breaks = capped_breaks(0.0, t_max, width.min(0.25), width);
    let a = C64::new(decay, lambda.nu);
    let v: C64 = gl32().integrate_breaks(&breaks, |t| (-a * t).exp() * u.eval((-t).exp()));
    Ok(v)
}

/// `ã(λ) = F̃(λ)/λ^p`; undefined at `λ = 0` for `p ≥ 1`.
pub fn atilde_from_interpolant(
    ftilde: impl Fn(ComplexDegree) -> Result<C64>,
    p: u32,
    lambda: ComplexDegree,
) -> Result<C64> {
    let l = lambda.lambda();
    if p >= 1 && l.norm() == 0.0 {
        return Err(Error::DivisionAtZero {
            op: "atilde_from_interpolant",
            detail: format!("λ = 0 with p = {p}: F̃(0) = 0·a_0 carries no information on a_0"),
        });
    }
    Ok(ftilde(lambda)? / l.powu(p))
}

/// One-sided limit of `ã` at `λ = 0` from steps `δ = 1e-3` and `2δ`,
/// combined by linear extrapolation. Always flagged.
pub fn atilde_limit_at_zero(
    ftilde: impl Fn(ComplexDegree) -> Result<C64>,
    p: u32,
) -> Result<(C64, Warning)> {
    let delta = 1e-3;
    let a1 = atilde_from_interpolant(&ftilde, p, ComplexDegree::real(delta))?;
    let a2 = atilde_from_interpolant(&ftilde, p, ComplexDegree::real(2.0 * delta))?;
    let value = a1 * 2.0 - a2;
    Ok((
        value,
        Warning::new(
            WarningCode::LimitAtZero,
            format!(
                "ã(0) with p = {p} evaluated as a one-sided limit (step {delta}); \
                 extrapolation spread {:.3e}",
                (a1 - a2).norm()
            ),
        ),
    ))
}
