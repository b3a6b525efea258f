//! Reconstruction of the discontinuity from the Legendre coefficients:
//! Pollaczek coefficients `c_ℓ`, the `Φ_ℓ` expansion of `F̂(w)e^{w/2}`, the
//! base jump through the inverse Abel transform, and the weak-limit pairing
//! against Gaussian test functions.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::abel::{self, InverseValue};
use crate::error::{Error, Result, Warning, WarningCode};
use crate::grid::{CoordKind, GridFunction};
use crate::moments::CoefficientSequence;
use crate::quad::{gl32, GaussLegendre};
use crate::specfun;
use crate::C64;

/// Terms `|a_n| max_ℓ |𝒫_ℓ(-i(n+½))| / n!` below this end the `n` sum.
pub const TERM_CUTOFF: f64 = 1e-12;

/// Half-width and spacing of the `w` grid used for L² norms.
pub const L2_HALF_WIDTH: f64 = 30.0;
pub const L2_STEP: f64 = 0.01;

/// Extra terms assumed (with `|a_n| <= |a_{n_max}|`) when estimating the
/// tail of a sequence that ends before the cutoff is reached.
const TAIL_EXTENSION: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollaczekExpansion {
    pub c: Vec<C64>,
    pub n_trunc: usize,
    /// Per `ℓ`: `Σ_{n>n_trunc} |a_n| |𝒫_ℓ(-i(n+½))| / n!`.
    pub tail_estimate: Vec<f64>,
    /// Degrees whose terms overflowed and were set to zero.
    pub overflowed: Vec<usize>,
    pub warnings: Vec<Warning>,
}

impl PollaczekExpansion {
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn max_tail(&self) -> f64 {
        self.tail_estimate.iter().copied().fold(0.0, f64::max)
    }

    /// Leading `ell + 1` coefficients.
    pub fn truncated(&self, ell: usize) -> Self {
        let k = (ell + 1).min(self.c.len());
        Self {
            c: self.c[..k].to_vec(),
            n_trunc: self.n_trunc,
            tail_estimate: self.tail_estimate[..k].to_vec(),
            overflowed: self.overflowed.iter().copied().filter(|&l| l < k).collect(),
            warnings: self.warnings.clone(),
        }
    }

    /// `Σ_ℓ c_ℓ Φ_ℓ(w)`.
    pub fn eval(&self, w: f64) -> Result<C64> {
        let phi = specfun::phi_basis_all(self.degree(), w)?;
        Ok(self.c.iter().zip(&phi).map(|(c, p)| c * p).sum())
    }
}

/// `𝒫_0(x) … 𝒫_L(x)` as `(mantissa, ln scale)` pairs, rescaled so large
/// arguments never overflow.
fn pollaczek_scaled(ell: usize, x: C64) -> Vec<(C64, f64)> {
    let mut out = Vec::with_capacity(ell + 1);
    let mut scale = 0.0;
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    out.push((cur, scale));
    for k in 0..ell {
        let kf = k as f64;
        let next = (x * cur * 2.0 - prev * kf) / (kf + 1.0);
        prev = cur;
        cur = next;
        let m = cur.norm();
        if m > 1e100 {
            cur /= m;
            prev /= m;
            scale += m.ln();
        }
        out.push((cur, scale));
    }
    out
}

/// `ln(|a_n| |𝒫_ℓ(-i(n+½))| / n!)` for every `ℓ <= L`; `-∞` for `a_n = 0`.
fn log_terms(a: f64, n: usize, ell: usize) -> Vec<(C64, f64)> {
    let x = C64::new(0.0, -(n as f64 + 0.5));
    let lf = ln_gamma(n as f64 + 1.0);
    pollaczek_scaled(ell, x)
        .into_iter()
        .map(|(m, s)| {
            if a == 0.0 || m.norm() == 0.0 {
                (C64::new(0.0, 0.0), f64::NEG_INFINITY)
            } else {
                (m / m.norm(), s + m.norm().ln() + a.abs().ln() - lf)
            }
        })
        .collect()
}

/// Smallest `n` after which every available term is below [`TERM_CUTOFF`].
pub fn choose_n_trunc(seq: &CoefficientSequence, ell: usize) -> usize {
    let cut = TERM_CUTOFF.ln();
    let mut last_big = 0;
    for (n, &a) in seq.a().iter().enumerate() {
        let biggest = log_terms(a, n, ell).iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        if biggest >= cut {
            last_big = n;
        }
    }
    (last_big + 1).min(seq.n_max())
}

/// `c_ℓ = √2 Σ_{n<=n_trunc} ((-1)^n / n!) a_n 𝒫_ℓ(-i(n+½))`, `ℓ = 0 … L`.
pub fn pollaczek_coefficients(
    seq: &CoefficientSequence,
    ell: usize,
    n_trunc: Option<usize>,
) -> Result<PollaczekExpansion> {
    const OP: &str = "pollaczek_coefficients";
    if ell > specfun::MAX_DEGREE {
        return Err(Error::domain(OP, format!("L={ell} exceeds {}", specfun::MAX_DEGREE)));
    }
    let n_trunc = match n_trunc {
        Some(n) if n > seq.n_max() => {
            return Err(Error::Index {
                op: OP,
                detail: format!("n_trunc={n} but coefficients stop at n={}", seq.n_max()),
            })
        }
        Some(n) => n,
        None => choose_n_trunc(seq, ell),
    };
    let a = seq.a();
    let rows: Vec<Vec<(C64, f64)>> = (0..=n_trunc)
        .into_par_iter()
        .map(|n| log_terms(a[n], n, ell))
        .collect();
    let mut c = vec![C64::new(0.0, 0.0); ell + 1];
    let mut overflowed = Vec::new();
    for (l, cl) in c.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (n, row) in rows.iter().enumerate() {
            let (phase, ln_mag) = row[l];
            if ln_mag == f64::NEG_INFINITY {
                continue;
            }
            if ln_mag > 700.0 {
                overflowed.push(l);
                acc = C64::new(0.0, 0.0);
                break;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += phase * (sign * a[n].signum() * ln_mag.exp());
        }
        *cl = acc * SQRT_2;
    }
    // Tail: the remaining available terms, then a flat extension of |a_n|.
    let last = a[seq.n_max()].abs();
    let tail_estimate: Vec<f64> = (0..=ell)
        .map(|l| {
            ((n_trunc + 1)..=(seq.n_max() + TAIL_EXTENSION))
                .map(|n| {
                    let an = if n <= seq.n_max() { a[n] } else { last };
                    log_terms(an, n, l)[l].1.exp()
                })
                .sum()
        })
        .collect();
    let mut warnings = Vec::new();
    if !overflowed.is_empty() {
        warnings.push(Warning::new(
            WarningCode::PollaczekOverflow,
            format!("Pollaczek terms overflow for ℓ in {overflowed:?}; those c_ℓ were zeroed"),
        ));
    }
    let worst = tail_estimate.iter().copied().fold(0.0, f64::max);
    if worst > 1e-8 {
        warnings.push(Warning::new(
            WarningCode::TailTruncation,
            format!("c_ℓ tail after n={n_trunc} may reach {worst:.3e}; supply more coefficients"),
        ));
    }
    Ok(PollaczekExpansion {
        c,
        n_trunc,
        tail_estimate,
        overflowed,
        warnings,
    })
}

/// `Σ_{ℓ<=L} c_ℓ Φ_ℓ(w)` on a `w` grid, the L² approximant of `F̂(w)e^{w/2}`.
pub fn expand_jump(exp: &PollaczekExpansion, w_grid: Vec<f64>) -> Result<GridFunction> {
    let values = w_grid.par_iter().map(|&w| exp.eval(w)).collect::<Result<Vec<_>>>()?;
    GridFunction::new(CoordKind::W, w_grid, values)
}

/// Simpson nodes on `[-30, 0]` and `[0, 30]` separately so a jump of the
/// target at `w = 0` does not spoil the rule.
fn l2_nodes() -> Vec<(f64, f64)> {
    let n = (L2_HALF_WIDTH / L2_STEP).round() as usize;
    let n = n + n % 2;
    let h = L2_HALF_WIDTH / n as f64;
    let mut out = Vec::with_capacity(2 * n + 2);
    for side in [-1.0, 1.0] {
        for k in 0..=n {
            let wt = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            // the side-limit at 0 is evaluated at ±0
            let w = if k == 0 { side * 0.0 } else { side * h * k as f64 };
            out.push((w, wt * h / 3.0));
        }
    }
    out
}

/// One point of an L² convergence curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L2Point {
    pub degree: usize,
    /// `‖Σ_{ℓ<=L} c_ℓΦ_ℓ - target‖_{L²(ℝ)}`.
    pub residual: f64,
    /// `‖Im Σ_{ℓ<=L} c_ℓΦ_ℓ‖_{L²(ℝ)}`.
    pub imag_norm: f64,
}

/// L² residuals of the partial sums against `target` (which receives `-0.0`
/// for the left limit at the origin) for every degree in `degrees`.
pub fn l2_residual_curve(
    exp: &PollaczekExpansion,
    target: impl Fn(f64) -> C64 + Sync,
    degrees: &[usize],
) -> Result<Vec<L2Point>> {
    let top = degrees.iter().copied().max().unwrap_or(0);
    if top > exp.degree() {
        return Err(Error::Index {
            op: "l2_residual",
            detail: format!("degree {top} requested but expansion stops at {}", exp.degree()),
        });
    }
    let nodes = l2_nodes();
    let per_node: Vec<(Vec<f64>, Vec<f64>)> = nodes
        .par_iter()
        .map(|&(w, wt)| {
            let phi = specfun::phi_basis_all(top, w)?;
            let g = target(w);
            let mut partial = C64::new(0.0, 0.0);
            let mut k = 0;
            let mut sorted: Vec<(usize, usize)> = degrees.iter().copied().enumerate().map(|(i, d)| (d, i)).collect();
            sorted.sort();
            let mut out_res = vec![0.0; degrees.len()];
            let mut out_im = vec![0.0; degrees.len()];
            for (d, i) in sorted {
                while k <= d {
                    partial += exp.c[k] * phi[k];
                    k += 1;
                }
                out_res[i] = wt * (partial - g).norm_sqr();
                out_im[i] = wt * partial.im * partial.im;
            }
            Ok((out_res, out_im))
        })
        .collect::<Result<_>>()?;
    Ok(degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| L2Point {
            degree: d,
            residual: per_node.iter().map(|(r, _)| r[i]).sum::<f64>().sqrt(),
            imag_norm: per_node.iter().map(|(_, m)| m[i]).sum::<f64>().sqrt(),
        })
        .collect())
}

/// `∫_ℝ g(w) conj Φ_ℓ(w) dw` for `ℓ = 0 … L`, `g` given on `[a, b]`
/// (zero outside), gl32 on unit panels with a break at 0.
pub fn dual_coefficients(g: impl Fn(f64) -> C64 + Sync, ell: usize, a: f64, b: f64) -> Result<Vec<C64>> {
    let mut breaks: Vec<f64> = Vec::new();
    let mut x = a;
    breaks.push(a);
    while x + 0.5 < b {
        x += 0.5;
        if a < 0.0 && x > 0.0 && breaks.last().is_some_and(|&p| p < 0.0) {
            breaks.push(0.0);
        }
        breaks.push(x);
    }
    if breaks.last() != Some(&b) {
        breaks.push(b);
    }
    dual_on_breaks(&g, ell, &breaks, gl32())
}

fn dual_on_breaks(
    g: &(impl Fn(f64) -> C64 + Sync),
    ell: usize,
    breaks: &[f64],
    rule: &GaussLegendre,
) -> Result<Vec<C64>> {
    let parts: Vec<Vec<C64>> = breaks
        .par_windows(2)
        .map(|p| {
            let half = 0.5 * (p[1] - p[0]);
            let mid = 0.5 * (p[0] + p[1]);
            let mut acc = vec![C64::new(0.0, 0.0); ell + 1];
            for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
                let w = mid + half * x;
                let gv = g(w) * (wt * half);
                if gv == C64::new(0.0, 0.0) {
                    continue;
                }
                for (a, phi) in acc.iter_mut().zip(specfun::phi_basis_all(ell, w)?) {
                    *a += gv * phi.conj();
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out = vec![C64::new(0.0, 0.0); ell + 1];
    for part in parts {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCheck {
    pub max_discrepancy: f64,
    pub series: Vec<C64>,
    pub integral: Vec<C64>,
}

/// Compares `c_ℓ` from the coefficient sum with `∫ F̂(w)e^{w/2} conj Φ_ℓ dw`,
/// `F̂` sampled on a `w` grid and taken as zero outside it.
pub fn dual_coefficient_check(seq: &CoefficientSequence, fhat_ref: &GridFunction, ell: usize) -> Result<DualCheck> {
    if fhat_ref.kind() != CoordKind::W {
        return Err(Error::InvalidInput(format!(
            "dual_coefficient_check expects a w grid, got {}",
            fhat_ref.kind()
        )));
    }
    let g = |w: f64| fhat_ref.eval_clamped(w) * (0.5 * w).exp();
    let integral = dual_on_breaks(&g, ell, fhat_ref.grid(), &GaussLegendre::new(4))?;
    finish_dual(seq, ell, integral)
}

/// [`dual_coefficient_check`] against a closed-form `F̂(w)e^{w/2}` on `[a, b]`.
pub fn dual_coefficient_check_fn(
    seq: &CoefficientSequence,
    g: impl Fn(f64) -> C64 + Sync,
    ell: usize,
    a: f64,
    b: f64,
) -> Result<DualCheck> {
    let integral = dual_coefficients(g, ell, a, b)?;
    finish_dual(seq, ell, integral)
}

fn finish_dual(seq: &CoefficientSequence, ell: usize, integral: Vec<C64>) -> Result<DualCheck> {
    let series = pollaczek_coefficients(seq, ell, None)?.c;
    let max_discrepancy = series
        .iter()
        .zip(&integral)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(DualCheck {
        max_discrepancy,
        series,
        integral,
    })
}

/// Base jump `ψ_L(cosh v)` on a `v` grid with per-point diagnostics.
#[derive(Debug, Clone)]
pub struct BaseReconstruction {
    pub base: GridFunction,
    pub points: Vec<InverseValue>,
    pub expansion: PollaczekExpansion,
    pub max_imag: f64,
    pub warnings: Vec<Warning>,
}

/// `ψ_L = (1/(π√2)) d/dy [(Σ_{ℓ<=L} c_ℓΦ_ℓ) * χ_1]` at `y = cosh v`, i.e.
/// the hyperbolic inverse Abel transform of the truncated expansion.
pub fn reconstruct_base_jump(
    seq: &CoefficientSequence,
    v_grid: Vec<f64>,
    ell: usize,
    n_trunc: Option<usize>,
) -> Result<BaseReconstruction> {
    let exp = pollaczek_coefficients(seq, ell, n_trunc)?;
    reconstruct_from_expansion(seq, exp, v_grid)
}

pub fn reconstruct_from_expansion(
    seq: &CoefficientSequence,
    exp: PollaczekExpansion,
    v_grid: Vec<f64>,
) -> Result<BaseReconstruction> {
    let mut warnings: Vec<Warning> = seq.require_p("reconstruct_base_jump", 2).into_iter().collect();
    warnings.extend(exp.warnings.iter().cloned());
    let s = |w: f64| exp.eval(w).unwrap_or_else(|_| C64::new(f64::NAN, 0.0));
    let points: Vec<InverseValue> = v_grid
        .par_iter()
        .map(|&v| abel::abel_inverse_from_transform(s, v, None))
        .collect::<Result<_>>()?;
    if let Some((v, p)) = v_grid.iter().zip(&points).find(|(_, p)| p.c1_violation) {
        warnings.extend(p.warning(*v));
    }
    let max_imag = points.iter().map(|p| p.value.im.abs()).fold(0.0, f64::max);
    let scale = points.iter().map(|p| p.value.norm()).fold(0.0, f64::max);
    if max_imag > 1e-6 * (1.0 + scale) {
        warnings.push(Warning::new(
            WarningCode::ImaginaryResidual,
            format!("reconstructed base jump carries imaginary part up to {max_imag:.3e}"),
        ));
    }
    let base = GridFunction::new(CoordKind::V, v_grid, points.iter().map(|p| p.value).collect())?;
    Ok(BaseReconstruction {
        base,
        points,
        expansion: exp,
        max_imag,
        warnings,
    })
}

/// Gaussian test function `amplitude · e^{-((y - center)/width)²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct TestFunction {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Default for TestFunction {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            center: 2.0,
            width: 1.0,
        }
    }
}

impl TestFunction {
    pub fn eval(&self, y: f64) -> f64 {
        let z = (y - self.center) / self.width;
        self.amplitude * (-z * z).exp()
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let z = (y - self.center) / self.width;
        -2.0 * z / self.width * self.amplitude * (-z * z).exp()
    }

    /// Beyond this the function and its derivative are below `e^{-81}`.
    fn reach(&self) -> f64 {
        self.center + 9.0 * self.width
    }

    /// `(φ' * χ^∞)(x) = ∫_x^∞ φ'(y)/√(y-x) dy = 2∫_0^∞ φ'(x+s²) ds`.
    pub fn derivative_convolution(&self, x: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let smax = ((self.reach() - x).max(0.0) + self.width).sqrt();
        2.0 * gl32().integrate_composite(0.0, smax, 8, |s| self.derivative(x + s * s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakPairing {
    pub m: usize,
    /// `⟨F - ψ_m, φ⟩` through `-(1/(π√2)) ⟨𝒜F - S_m, φ' * χ^∞⟩`.
    pub pairing: C64,
    pub residual_norm: f64,
    pub test_norm: f64,
    /// `(1/(π√2)) ‖𝒜F - S_m‖ ‖φ' * χ^∞‖`, norms over `x ∈ [1, X]`.
    pub schwarz_bound: f64,
}

/// Nodes in `x = cosh w ∈ [1, X]` through `x = 1 + t²`, which smooths the
/// square-root behaviour of `w(x)` at 1.
fn pairing_nodes(reach: f64) -> Vec<(f64, f64)> {
    let tmax = (reach - 1.0).max(1.0).sqrt();
    let panels = 16 + (4.0 * tmax).ceil() as usize;
    let rule = gl32();
    let h = tmax / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.order());
    for k in 0..panels {
        let mid = h * (k as f64 + 0.5);
        for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
            let t = mid + 0.5 * h * x;
            out.push((1.0 + t * t, wt * 0.5 * h * 2.0 * t));
        }
    }
    out
}

/// `⟨F_ref - ψ_m, φ⟩` for each `m`, with `F_ref` given through its Abel
/// transform `𝒜F_ref(w)`.
pub fn weak_convergence_test(
    abel_ref: impl Fn(f64) -> C64 + Sync,
    seq: &CoefficientSequence,
    phi: TestFunction,
    m_list: &[usize],
) -> Result<Vec<WeakPairing>> {
    let top = m_list.iter().copied().max().unwrap_or(0);
    let exp = pollaczek_coefficients(seq, top, None)?;
    let nodes = pairing_nodes(phi.reach());
    let pre: Vec<(f64, f64, C64, Vec<C64>)> = nodes
        .par_iter()
        .map(|&(x, wt)| {
            let w = x.acosh();
            Ok((wt, phi.derivative_convolution(x), abel_ref(w), specfun::phi_basis_all(top, w)?))
        })
        .collect::<Result<_>>()?;
    let test_norm = pre.iter().map(|(wt, k, _, _)| wt * k * k).sum::<f64>().sqrt();
    let scale = 1.0 / (PI * SQRT_2);
    Ok(m_list
        .iter()
        .map(|&m| {
            let mut pairing = C64::new(0.0, 0.0);
            let mut norm2 = 0.0;
            for (wt, k, a, phis) in &pre {
                let s: C64 = exp.c[..=m].iter().zip(phis).map(|(c, p)| c * p).sum();
                let d = a - s;
                pairing += d.conj() * (wt * k);
                norm2 += wt * d.norm_sqr();
            }
            let residual_norm = norm2.sqrt();
            WeakPairing {
                m,
                pairing: -pairing * scale,
                residual_norm,
                test_norm,
                schwarz_bound: scale * residual_norm * test_norm,
            }
        })
        .collect())
}

/// `⟨F - G, φ⟩ = ∫_1^∞ conj(F - G)(y) φ(y) dy` computed directly in `y`,
/// with both functions given in `v = arccosh y`.
pub fn direct_pairing(
    diff_of_v: impl Fn(f64) -> C64 + Sync,
    phi: TestFunction,
) -> C64 {
    pairing_nodes(phi.reach())
        .par_iter()
        .map(|&(y, wt)| diff_of_v(y.acosh()).conj() * (wt * phi.eval(y)))
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

/// Strictly decreasing in absolute value.
pub fn strictly_decreasing(p: &[WeakPairing]) -> bool {
    p.windows(2).all(|w| w[1].pairing.norm() < w[0].pairing.norm())
}

/// Inner-product check on the basis itself: `⟨Φ_j, Φ_k⟩` by the same
/// Simpson rule as the residual curves.
pub fn gram_matrix(ell: usize) -> Result<Vec<Vec<C64>>> {
    let nodes = l2_nodes();
    let rows: Vec<Vec<C64>> = nodes
        .par_iter()
        .map(|&(w, _)| specfun::phi_basis_all(ell, w))
        .collect::<Result<_>>()?;
    let mut g = vec![vec![C64::new(0.0, 0.0); ell + 1]; ell + 1];
    for ((_, wt), phi) in nodes.iter().zip(&rows) {
        for j in 0..=ell {
            for k in 0..=ell {
                g[j][k] += phi[j] * phi[k].conj() * *wt;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn seq_of(f: impl Fn(usize) -> f64, n: usize, p: u32) -> CoefficientSequence {
        CoefficientSequence::new((0..=n).map(f).collect(), p, 0.5).unwrap()
    }

    #[test]
    fn delta_coefficients() {
        let delta = seq_of(|n| if n == 0 { 1.0 } else { 0.0 }, 10, 0);
        let e = pollaczek_coefficients(&delta, 3, None).unwrap();
        assert!((e.c[0] - C64::new(SQRT_2, 0.0)).norm() < 1e-15);
        assert!((e.c[1] - C64::new(0.0, -SQRT_2)).norm() < 1e-15);
        let zero = seq_of(|_| 0.0, 10, 0);
        assert!(pollaczek_coefficients(&zero, 5, None).unwrap().c.iter().all(|c| c.norm() == 0.0));
        let one = PollaczekExpansion {
            c: vec![C64::new(SQRT_2, 0.0)],
            ..e.truncated(0)
        };
        let v = expand_jump(&one, vec![0.0, 1.0]).unwrap();
        assert!((v.values()[0].re - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn scaled_recurrence_matches_plain() {
        let x = C64::new(0.0, -7.5);
        let plain = specfun::pollaczek_all(30, x).unwrap();
        for (p, (m, s)) in plain.iter().zip(pollaczek_scaled(30, x)) {
            assert!((p - m * s.exp()).norm() <= 1e-13 * p.norm());
        }
    }

    #[test]
    fn coefficients_agree_with_inner_products() {
        // a_n = 1/(n+1) is the sampled Laplace transform of F̂ = e^{-w}.
        let seq = seq_of(|n| 1.0 / (n as f64 + 1.0), 200, 0);
        let check = dual_coefficient_check_fn(&seq, |w| C64::new((-0.5 * w).exp(), 0.0), 10, 0.0, 80.0).unwrap();
        assert!(check.max_discrepancy < 1e-4, "{check:?}");
        // independent inner products by tanh-sinh in x = 2e^{-w}
        for l in [0usize, 3, 7] {
            let want = oracle::tanh_sinh(0.0, 2.0, |x| {
                let w = -(0.5 * x).ln();
                let phi = specfun::phi_basis(l, w).unwrap();
                (-0.5 * w).exp() * phi.conj() / x
            });
            assert!((want - check.series[l]).norm() < 1e-8, "ℓ={l}: {want} vs {}", check.series[l]);
        }
        let grid = crate::grid::uniform(0.0, 40.0, 0.01).unwrap();
        let fhat = GridFunction::from_fn(CoordKind::W, grid, |w| C64::new((-w).exp(), 0.0)).unwrap();
        assert!(dual_coefficient_check(&seq, &fhat, 10).unwrap().max_discrepancy < 1e-4);
    }

    #[test]
    fn single_mode_projection() {
        let c = dual_coefficients(|w| specfun::phi_basis(0, w).unwrap(), 4, -30.0, 30.0).unwrap();
        assert!((c[0] - 1.0).norm() < 1e-8, "{c:?}");
        assert!(c[1..].iter().all(|x| x.norm() < 1e-8), "{c:?}");
    }

    #[test]
    fn residual_is_monotone() {
        let seq = seq_of(|n| 1.0 / (n as f64 + 1.0), 200, 0);
        let exp = pollaczek_coefficients(&seq, 64, None).unwrap();
        let degrees: Vec<usize> = (0..=64).collect();
        let target = |w: f64| {
            if w.is_sign_negative() {
                C64::new(0.0, 0.0)
            } else {
                C64::new((-0.5 * w).exp(), 0.0)
            }
        };
        let curve = l2_residual_curve(&exp, target, &degrees).unwrap();
        for p in curve.windows(2) {
            assert!(p[1].residual <= p[0].residual + 1e-12, "{p:?}");
        }
        // Bessel: ‖g‖² - Σ|c|² = residual²
        let sum: f64 = exp.c.iter().map(|c| c.norm_sqr()).sum();
        let last = curve.last().unwrap().residual;
        assert!((1.0 - sum - last * last).abs() < 1e-5, "{sum} {last}");
    }

    #[test]
    fn basis_is_orthonormal() {
        let g = gram_matrix(20).unwrap();
        for (j, row) in g.iter().enumerate() {
            for (k, x) in row.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((x - want).norm() < 1e-6, "({j},{k}) {x}");
            }
        }
    }

    #[test]
    fn pairing_rearrangement_matches_direct_form() {
        let seq = seq_of(|n| (n as f64 + 1.0).powi(-3), 200, 2);
        let phi = TestFunction::default();
        let abel_ref = |w: f64| C64::new(0.5 * w * w * (-0.5 * w).exp(), 0.0);
        let m = 8;
        let pairs = weak_convergence_test(abel_ref, &seq, phi, &[m]).unwrap();
        let exp = pollaczek_coefficients(&seq, m, None).unwrap();
        let s = |w: f64| exp.eval(w).unwrap();
        let diff = |v: f64| {
            if v <= 1e-9 {
                return C64::new(0.0, 0.0);
            }
            let f = abel::abel_inverse_from_transform(abel_ref, v, None).unwrap().value;
            let p = abel::abel_inverse_from_transform(s, v, None).unwrap().value;
            f - p
        };
        let direct = direct_pairing(diff, phi);
        assert!((direct - pairs[0].pairing).norm() < 1e-5 * (1.0 + direct.norm()), "{direct} vs {:?}", pairs[0]);
        assert!(pairs[0].pairing.norm() <= pairs[0].schwarz_bound);
    }

    #[test]
    fn self_pairing_vanishes() {
        let seq = seq_of(|n| (n as f64 + 1.0).powi(-3), 120, 2);
        let exp = pollaczek_coefficients(&seq, 16, None).unwrap();
        let p = weak_convergence_test(|w| exp.eval(w).unwrap(), &seq, TestFunction::default(), &[16]).unwrap();
        assert!(p[0].pairing.norm() < 1e-13, "{p:?}");
        let zero_phi = TestFunction {
            amplitude: 0.0,
            ..TestFunction::default()
        };
        let p = weak_convergence_test(|_| C64::new(1.0, 0.0), &seq, zero_phi, &[4]).unwrap();
        assert_eq!(p[0].pairing, C64::new(0.0, 0.0));
    }

    #[test]
    fn zero_and_doubled_sequences() {
        let v = vec![0.5, 1.0, 1.5];
        let zero = seq_of(|_| 0.0, 60, 2);
        let r = reconstruct_base_jump(&zero, v.clone(), 16, None).unwrap();
        assert!(r.base.values().iter().all(|x| x.norm() == 0.0));
        let seq = seq_of(|n| (n as f64 + 1.0).powi(-3), 120, 2);
        let a = reconstruct_base_jump(&seq, v.clone(), 16, None).unwrap();
        let b = reconstruct_base_jump(&seq.scaled(2.0), v, 16, None).unwrap();
        for (x, y) in a.base.values().iter().zip(b.base.values()) {
            assert!((y - x * 2.0).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn coefficients_are_linear(k in -2.0f64..2.0, shift in 1.0f64..4.0) {
            let s1 = seq_of(|n| 1.0 / (n as f64 + 1.0), 120, 0);
            let s2 = seq_of(|n| (n as f64 + shift).powi(-2), 120, 0);
            let sum = s1.sum(&s2.scaled(k));
            let (c1, c2, cs) = (
                pollaczek_coefficients(&s1, 24, Some(110)).unwrap().c,
                pollaczek_coefficients(&s2, 24, Some(110)).unwrap().c,
                pollaczek_coefficients(&sum, 24, Some(110)).unwrap().c,
            );
            for l in 0..=24 {
                let want = c1[l] + c2[l] * k;
                prop_assert!((cs[l] - want).norm() <= 1e-10 * (1.0 + want.norm()));
            }
        }
    }
}
