//! Legendre series on `[-1, 1]` and their trigonometric (Fourier) duals.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning, WarningCode};
use crate::grid::{CoordKind, GridFunction};
use crate::moments::CoefficientSequence;
use crate::quad::{capped_breaks, gl32, gl64, two_sided_breaks, Estimate, GaussLegendre};
use crate::specfun::{legendre_p_all, psi_n};
use crate::C64;

/// Partial sum with the majorant of the neglected supplied terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// `(1/4π) Σ_{N<n} (2n+1)|a_n|` over the supplied coefficients beyond
    /// the truncation.
    pub tail_bound: f64,
}

fn truncation(seq: &CoefficientSequence, n_trunc: Option<usize>) -> Result<usize> {
    let n = n_trunc.unwrap_or(seq.n_max());
    if n > seq.n_max() {
        return Err(Error::Index {
            op: "series truncation",
            detail: format!("N = {n} but only a_0 … a_{} are available", seq.n_max()),
        });
    }
    Ok(n)
}

/// `(1/4π) Σ_{n≤N} (2n+1) a_n P_n(x)`.
pub fn eval_legendre_series(
    seq: &CoefficientSequence,
    x: f64,
    n_trunc: Option<usize>,
) -> Result<SeriesValue> {
    let n = truncation(seq, n_trunc)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain("eval_legendre_series", format!("x={x} outside [-1, 1]")));
    }
    let p = legendre_p_all(n, x)?;
    let a = seq.a();
    let value = (0..=n).map(|k| (2 * k + 1) as f64 * a[k] * p[k]).sum::<f64>() / (4.0 * PI);
    let tail_bound = (n + 1..a.len())
        .map(|k| (2 * k + 1) as f64 * a[k].abs())
        .sum::<f64>()
        / (4.0 * PI);
    Ok(SeriesValue { value, tail_bound })
}

/// The same sum written with `ψ_n`: `(1/π) Σ (-1)^n a_n ψ_n(cos u)`.
pub fn eval_psi_series(seq: &CoefficientSequence, u: f64, n_trunc: Option<usize>) -> Result<f64> {
    let n = truncation(seq, n_trunc)?;
    let mut acc = 0.0;
    for (k, a) in seq.a().iter().enumerate().take(n + 1) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * a * psi_n(k, u)?;
    }
    Ok(acc / PI)
}

/// [`WarningCode::NotSummable`] when the supplied coefficients do not
/// decay faster than `n^{-power}` over their second half.
pub fn summability_warning(seq: &CoefficientSequence, power: f64) -> Option<Warning> {
    let a = seq.a();
    let n = a.len();
    let (lo, hi) = (n / 2, n - 1);
    if lo < 2 || hi <= lo {
        return None;
    }
    let envelope = |k: usize| a[k..(k + 3).min(n)].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (e_lo, e_hi) = (envelope(lo), envelope(hi));
    if e_hi == 0.0 {
        return None;
    }
    let slope = (e_hi.ln() - e_lo.ln()) / ((hi as f64).ln() - (lo as f64).ln());
    (e_lo == 0.0 || slope > -power).then(|| {
        Warning::new(
            WarningCode::NotSummable,
            format!(
                "coefficients decay like n^{slope:.2} over n in [{lo}, {hi}]; \
                 absolute summability (rate below -{power}) is not observed"
            ),
        )
    })
}

/// Synthesizes `f(u) = (1/4π) Σ (2n+1) a_n P_n(cos u)` as a closure.
pub fn synthesize(seq: &CoefficientSequence, n_trunc: Option<usize>) -> Result<impl Fn(f64) -> f64 + Sync + '_> {
    let n = truncation(seq, n_trunc)?;
    Ok(move |u: f64| {
        let p = legendre_p_all(n, u.cos()).expect("degree checked");
        seq.a().iter().zip(&p).enumerate().map(|(k, (a, pk))| (2 * k + 1) as f64 * a * pk).sum::<f64>()
            / (4.0 * PI)
    })
}

/// `a_n = 2π ∫_0^π f(u) P_n(cos u) sin u du` for `n ≤ n_max`, from a
/// closed-form `f`, evaluated as `2π ∫_{-1}^{1} f(arccos x) P_n(x) dx`.
pub fn coefficients_from_fn(f: impl Fn(f64) -> f64, n_max: usize) -> Result<Estimate<Vec<f64>>> {
    // f(arccos x) is typically not smooth at x = ±1, so grade both ends
    let cap = 1.0 / (1 + n_max / 16) as f64;
    let mut breaks = capped_breaks(-1.0, 0.0, 1e-10, cap);
    breaks.extend(breaks.clone().iter().rev().skip(1).map(|x| -x));
    let run = |rule: &GaussLegendre| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; n_max + 1];
        for pair in breaks.windows(2) {
            let (mid, half) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                let xx = mid + half * x;
                let fx = f(xx.clamp(-1.0, 1.0).acos()) * w * half;
                for (a, p) in acc.iter_mut().zip(legendre_p_all(n_max, xx)?) {
                    *a += fx * p;
                }
            }
        }
        Ok(acc.into_iter().map(|a| 2.0 * PI * a).collect())
    };
    let fine = run(gl64())?;
    let coarse = run(gl32())?;
    let error = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Estimate { value: fine, error })
}

fn require_kind(op: &'static str, f: &GridFunction, kind: CoordKind) -> Result<()> {
    if f.kind() != kind {
        return Err(Error::InvalidInput(format!(
            "{op} expects a grid in {kind}, got {}",
            f.kind()
        )));
    }
    Ok(())
}

fn require_cover(op: &'static str, f: &GridFunction, a: f64, b: f64) -> Result<()> {
    if !(f.contains(a) && f.contains(b)) {
        return Err(Error::domain(
            op,
            format!("grid [{}, {}] must cover [{a}, {b}]", f.start(), f.end()),
        ));
    }
    Ok(())
}

/// [`coefficients_from_fn`] for a sampled `f(u)` on `[0, π]`; spline error
/// is folded into the residual.
pub fn coefficients_from_f(f: &GridFunction, n_max: usize) -> Result<Estimate<Vec<f64>>> {
    require_kind("coefficients_from_f", f, CoordKind::U)?;
    require_cover("coefficients_from_f", f, 0.0, PI)?;
    let mut est = coefficients_from_fn(|u| f.eval_clamped(u).re, n_max)?;
    // |a_n| ≤ 4π sup|δf| since |P_n| ≤ 1
    est.error += 4.0 * PI * f.interpolation_error_estimate();
    Ok(est)
}

/// `∫_0^|t| f(u) [2(cos u - cos t)]^{-1/2} sin u du` via
/// `cos u = cos t + s²`, i.e. `√2 ∫_0^{√(1-cos t)} f(arccos(cos t + s²)) ds`.
/// Sampled inputs are not exactly even about `u = 0`, so their panels are
/// graded towards both ends.
fn fhat_integral(f: &impl Fn(f64) -> f64, t: f64, graded: bool) -> f64 {
    let c = t.cos();
    let smax = (1.0 - c).sqrt();
    let breaks = if graded {
        two_sided_breaks(0.0, smax, 1e-4 * smax, 2.0)
    } else {
        crate::grid::linspace(0.0, smax, 4)
    };
    SQRT_2 * gl32().integrate_breaks(&breaks, |s| f((c + s * s).min(1.0).acos()))
}

fn fhat_impl(f: impl Fn(f64) -> f64, t: f64, graded: bool) -> Result<C64> {
    if !(t.abs() <= PI) {
        return Err(Error::domain("fhat_from_f", format!("t={t} outside [-π, π]")));
    }
    if t == 0.0 {
        return Err(Error::domain("fhat_from_f", "t = 0: the integral is empty (limit 0)"));
    }
    let i = fhat_integral(&f, t.abs(), graded);
    Ok(C64::new(0.0, -2.0 * t.signum()) * C64::from_polar(1.0, 0.5 * t) * i)
}

/// `f̂(t) = -2iε(t) e^{it/2} ∫_0^t f(u) [2(cos u - cos t)]^{-1/2} sin u du`
/// from a closed-form `f(u)`.
pub fn fhat_from_fn(f: impl Fn(f64) -> f64, t: f64) -> Result<C64> {
    fhat_impl(f, t, false)
}

/// [`fhat_from_fn`] for a sampled `f(u)`.
pub fn fhat_from_f(f: &GridFunction, t: f64) -> Result<C64> {
    require_kind("fhat_from_f", f, CoordKind::U)?;
    require_cover("fhat_from_f", f, 0.0, t.abs().min(PI))?;
    fhat_impl(|u| f.eval_clamped(u).re, t, true)
}

/// Samples `f̂` on `t_grid`; `t = 0` gets its limit 0 and a
/// [`WarningCode::AtOrigin`] note.
pub fn fhat_on_grid(f: &GridFunction, t_grid: Vec<f64>) -> Result<(GridFunction, Vec<Warning>)> {
    let mut warnings = Vec::new();
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in &t_grid {
        if t == 0.0 {
            warnings.push(Warning::new(
                WarningCode::AtOrigin,
                "f̂(0) replaced by its limit 0 (empty integral)",
            ));
            values.push(C64::new(0.0, 0.0));
        } else {
            values.push(fhat_from_f(f, t)?);
        }
    }
    Ok((GridFunction::new(CoordKind::T, t_grid, values)?, warnings))
}

/// `a_n = ∫_{-π}^{π} f̂(t) e^{int} dt` for any integer `n`.
pub fn coefficients_from_fhat_fn(fhat: impl Fn(f64) -> C64, n: i64) -> Estimate<C64> {
    let panels = 4 + n.unsigned_abs() as usize / 8;
    let run = |rule: &GaussLegendre| -> C64 {
        let g = |t: f64| fhat(t) * C64::from_polar(1.0, n as f64 * t);
        rule.integrate_composite(-PI, 0.0, panels, &g) + rule.integrate_composite(0.0, PI, panels, &g)
    };
    let value = run(gl64());
    let error = (value - run(gl32())).norm();
    Estimate { value, error }
}

/// [`coefficients_from_fhat_fn`] for a sampled `f̂(t)` covering `[-π, π]`.
pub fn coefficients_from_fhat(fhat: &GridFunction, n: i64) -> Result<Estimate<C64>> {
    require_kind("coefficients_from_fhat", fhat, CoordKind::T)?;
    require_cover("coefficients_from_fhat", fhat, -PI, PI)?;
    let mut est = coefficients_from_fhat_fn(|t| fhat.eval_clamped(t), n);
    est.error += 2.0 * PI * fhat.interpolation_error_estimate();
    Ok(est)
}

/// Which trigonometric sum [`eval_trig`] forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrigMode {
    /// `(1/2π) Σ a_n (e^{-inτ} - e^{iτ} e^{inτ})`, real `τ` only.
    Full,
    /// `(1/2π) Σ a_n e^{-inτ}`, `Im τ ≤ 0`.
    OneSided,
}

pub fn eval_trig(
    seq: &CoefficientSequence,
    tau: C64,
    n_trunc: Option<usize>,
    mode: TrigMode,
) -> Result<C64> {
    let n = truncation(seq, n_trunc)?;
    let a = &seq.a()[..=n];
    let i = C64::new(0.0, 1.0);
    match mode {
        TrigMode::Full => {
            if tau.im != 0.0 {
                return Err(Error::domain(
                    "eval_trig",
                    format!("the full series converges on the real axis only (Im τ = {})", tau.im),
                ));
            }
            let t = tau.re;
            let e = C64::from_polar(1.0, t);
            let s: C64 = a
                .iter()
                .enumerate()
                .map(|(k, ak)| {
                    let z = C64::from_polar(1.0, k as f64 * t);
                    (z.conj() - e * z) * *ak
                })
                .sum();
            Ok(s / (2.0 * PI))
        }
        TrigMode::OneSided => {
            if tau.im > 0.0 {
                return Err(Error::Divergence {
                    op: "eval_trig",
                    detail: format!("one-sided series diverges for Im τ = {} > 0", tau.im),
                });
            }
            let s: C64 = a
                .iter()
                .enumerate()
                .map(|(k, ak)| (-i * tau * k as f64).exp() * *ak)
                .sum();
            Ok(s / (2.0 * PI))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;
    use crate::oracle;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn delta(k: usize, len: usize) -> CoefficientSequence {
        let mut a = vec![0.0; len];
        a[k] = 1.0;
        CoefficientSequence::new(a, 0, 0.5).unwrap()
    }

    fn inv_cubed(n: usize) -> CoefficientSequence {
        CoefficientSequence::new((0..=n).map(|k| 1.0 / ((k + 1) as f64).powi(3)).collect(), 0, 0.5).unwrap()
    }

    #[test]
    fn legendre_series_values() {
        let v = eval_legendre_series(&delta(0, 3), 0.3, None).unwrap();
        assert_abs_diff_eq!(v.value, 1.0 / (4.0 * PI), epsilon = 1e-16);
        let v = eval_legendre_series(&delta(1, 3), 0.5, None).unwrap();
        assert_abs_diff_eq!(v.value, 0.1193662, epsilon = 1e-7);
        let zero = CoefficientSequence::new(vec![0.0; 4], 0, 0.5).unwrap();
        assert_eq!(eval_legendre_series(&zero, 0.1, None).unwrap().value, 0.0);
        let t = eval_legendre_series(&delta(2, 4), 0.1, Some(1)).unwrap();
        assert_abs_diff_eq!(t.tail_bound, 5.0 / (4.0 * PI), epsilon = 1e-15);
        assert!(eval_legendre_series(&delta(2, 4), 0.1, Some(9)).is_err());
    }

    #[test]
    fn psi_form_of_the_series() {
        let seqs = [delta(0, 11), delta(3, 11), inv_cubed(10)];
        for s in &seqs {
            for u in [0.2, 1.0, 2.5] {
                let a = eval_psi_series(s, u, None).unwrap();
                let b = eval_legendre_series(s, u.cos(), None).unwrap().value;
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn coefficients_by_orthogonality() {
        let c = coefficients_from_fn(|_| 1.0 / (4.0 * PI), 5).unwrap();
        assert_abs_diff_eq!(c.value[0], 1.0, epsilon = 1e-13);
        assert!(c.value[1..].iter().all(|x| x.abs() < 1e-13));
        let c = coefficients_from_fn(|u| 3.0 / (4.0 * PI) * u.cos(), 5).unwrap();
        assert_abs_diff_eq!(c.value[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.value[0], 0.0, epsilon = 1e-13);
        let grid = linspace(0.0, PI, 400);
        let g = GridFunction::from_fn(CoordKind::U, grid, |u| C64::new(3.0 / (4.0 * PI) * u.cos(), 0.0)).unwrap();
        let c = coefficients_from_f(&g, 3).unwrap();
        assert_abs_diff_eq!(c.value[1], 1.0, epsilon = 1e-7);
        assert!(c.error < 1e-5);
    }

    #[test]
    fn fhat_closed_form_for_constant() {
        let f = |_: f64| 1.0 / (4.0 * PI);
        let v = fhat_from_fn(f, PI).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        let t = PI / 2.0;
        let expect = C64::new(0.0, -1.0 / PI) * C64::from_polar(1.0, PI / 4.0) * (PI / 4.0).sin();
        assert!((fhat_from_fn(f, t).unwrap() - expect).norm() < 1e-12);
        assert!(fhat_from_fn(f, 0.0).is_err());
        assert_eq!(fhat_from_fn(|_| 0.0, 1.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn fhat_against_direct_singular_quadrature() {
        let seq = inv_cubed(12);
        let f = synthesize(&seq, None).unwrap();
        for t in [0.4, 1.7, 3.0] {
            let direct = oracle::tanh_sinh_dist(0.0, t, |u, _, d| {
                C64::new(f(u) * u.sin() / (4.0 * (0.5 * (t + u)).sin() * (0.5 * d).sin()).sqrt(), 0.0)
            })
            .re;
            let expect = C64::new(0.0, -2.0) * C64::from_polar(1.0, 0.5 * t) * direct;
            let got = fhat_from_fn(&f, t).unwrap();
            assert!((got - expect).norm() < 1e-10, "t={t}: {got} vs {expect}");
        }
    }

    #[test]
    fn fhat_symmetries() {
        let seq = inv_cubed(20);
        let f = synthesize(&seq, None).unwrap();
        for k in 1..30 {
            let t = -PI + 2.0 * PI * k as f64 / 30.0 + 0.01;
            let a = fhat_from_fn(&f, t).unwrap();
            let b = fhat_from_fn(&f, -t).unwrap();
            assert!((a + C64::from_polar(1.0, t) * b).norm() < 1e-10);
            let g = |t: f64, v: C64| C64::from_polar(1.0, -0.5 * t) * v / (0.5 * t).sin();
            assert!((g(t, a) - g(-t, b)).norm() < 1e-10);
        }
    }

    #[test]
    fn duality_roundtrip() {
        for seq in [delta(0, 41), delta(1, 41), inv_cubed(40)] {
            let f = synthesize(&seq, None).unwrap();
            for n in 0..=12i64 {
                let est = coefficients_from_fhat_fn(|t| if t == 0.0 { C64::new(0.0, 0.0) } else { fhat_from_fn(&f, t).unwrap() }, n);
                let a = seq.a()[n as usize];
                assert!((est.value - a).norm() < 1e-6, "n={n}: {} vs {a}", est.value);
                let m = coefficients_from_fhat_fn(|t| if t == 0.0 { C64::new(0.0, 0.0) } else { fhat_from_fn(&f, t).unwrap() }, -n - 1);
                assert!((m.value + est.value).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn grid_roundtrip_with_origin_flag() {
        let f = GridFunction::from_fn(CoordKind::U, linspace(0.0, PI, 200), |_| C64::new(1.0 / (4.0 * PI), 0.0)).unwrap();
        let (fh, w) = fhat_on_grid(&f, linspace(-PI, PI, 400)).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].code, WarningCode::AtOrigin);
        let a0 = coefficients_from_fhat(&fh, 0).unwrap();
        assert!((a0.value.re - 1.0).abs() < 1e-5);
        let a1 = coefficients_from_fhat(&fh, 1).unwrap();
        assert!(a1.value.norm() < 1e-5);
        let am = coefficients_from_fhat(&fh, -1).unwrap();
        assert!((am.value.re + 1.0).abs() < 1e-5);
    }

    #[test]
    fn trigonometric_sums() {
        let d = delta(0, 3);
        let v = eval_trig(&d, C64::new(PI, 0.0), None, TrigMode::Full).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_trig(&d, C64::new(0.0, 0.0), None, TrigMode::Full).unwrap().norm(), 0.0);
        assert!(eval_trig(&d, C64::new(0.0, -1.0), None, TrigMode::Full).is_err());
        assert!(matches!(
            eval_trig(&d, C64::new(0.0, 1.0), None, TrigMode::OneSided),
            Err(Error::Divergence { .. })
        ));
        let inv = CoefficientSequence::new((0..200).map(|n| 1.0 / (n as f64 + 1.0)).collect(), 0, 0.5).unwrap();
        let g = eval_trig(&inv, C64::new(0.0, -2.0), None, TrigMode::OneSided).unwrap();
        let q = (-2.0f64).exp();
        let closed = -(1.0 - q).ln() / q / (2.0 * PI);
        assert_abs_diff_eq!(g.re, closed, epsilon = 1e-14);
        assert_abs_diff_eq!(g.re, 0.1710069, epsilon = 1e-7);
        // full combination equals the dual function f̂ for the δ sequence
        let fh = fhat_from_fn(|_| 1.0 / (4.0 * PI), 1.3).unwrap();
        let tr = eval_trig(&d, C64::new(1.3, 0.0), None, TrigMode::Full).unwrap();
        assert!((fh - tr).norm() < 1e-12);
    }

    #[test]
    fn summability_flag() {
        let slow = CoefficientSequence::new((0..64).map(|n| 1.0 / (n as f64 + 1.0)).collect(), 0, 0.5).unwrap();
        assert!(summability_warning(&slow, 1.0).is_some());
        assert!(summability_warning(&inv_cubed(63), 1.0).is_none());
    }

    proptest! {
        #[test]
        fn legendre_series_is_linear(a in proptest::collection::vec(-1.0f64..1.0, 3..12), x in -1.0f64..1.0, k in -3.0f64..3.0) {
            let s = CoefficientSequence::new(a, 0, 0.5).unwrap();
            let v = eval_legendre_series(&s, x, None).unwrap().value;
            let w = eval_legendre_series(&s.scaled(k), x, None).unwrap().value;
            prop_assert!((w - k * v).abs() < 1e-12);
        }
    }
}
