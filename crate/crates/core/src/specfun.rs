//! Legendre, Laguerre and Pollaczek families with the normalizations used
//! throughout the crate, plus the `Φ_ℓ` basis on the real line.
//!
//! Polynomials are evaluated by upward three-term recurrences. Legendre
//! functions of complex degree come from integral representations whose
//! square-root endpoint singularity is removed by a quadratic substitution,
//! after which composite Gauss-Legendre is spectrally accurate.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, capped_breaks, gl32, gl64};
use crate::C64;

/// Recurrences refuse degrees beyond this.
pub const MAX_DEGREE: usize = 10_000;

/// Complex degree `λ = σ + iν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDegree {
    pub sigma: f64,
    pub nu: f64,
}

impl ComplexDegree {
    pub const fn new(sigma: f64, nu: f64) -> Self {
        Self { sigma, nu }
    }

    pub const fn real(sigma: f64) -> Self {
        Self { sigma, nu: 0.0 }
    }

    pub fn lambda(self) -> C64 {
        C64::new(self.sigma, self.nu)
    }

    /// `h(λ) = 2λ + 1`.
    pub fn h(self) -> C64 {
        C64::new(2.0 * self.sigma + 1.0, 2.0 * self.nu)
    }
}

impl From<C64> for ComplexDegree {
    fn from(z: C64) -> Self {
        Self::new(z.re, z.im)
    }
}

fn check_degree(op: &'static str, n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::domain(
            op,
            format!("degree {n} exceeds the supported maximum {MAX_DEGREE}"),
        ));
    }
    Ok(())
}

/// `P_n(x)` for real `x`.
pub fn legendre_p(n: usize, x: f64) -> Result<f64> {
    check_degree("legendre_p", n)?;
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return Ok(1.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// `P_n(z)` for complex `z`.
pub fn legendre_p_complex(n: usize, z: C64) -> Result<C64> {
    check_degree("legendre_p", n)?;
    let (mut p0, mut p1) = (C64::new(1.0, 0.0), z);
    if n == 0 {
        return Ok(p0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = (z * p1 * (2.0 * kf + 1.0) - p0 * kf) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// `P_0(x) … P_n(x)`.
pub fn legendre_p_all(n: usize, x: f64) -> Result<Vec<f64>> {
    check_degree("legendre_p", n)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        out.push(((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0));
    }
    Ok(out)
}

/// `P_n(cos u)` from the Laplace-type integral
/// `(1/π) ∫_0^π (cos u + i sin u cos η)^n dη`.
pub fn legendre_p_laplace_integral(n: usize, u: f64) -> Result<f64> {
    check_degree("legendre_p_laplace_integral", n)?;
    let (s, c) = u.sin_cos();
    let panels = 1 + n / 24;
    let v: C64 = gl64().integrate_composite(0.0, PI, panels, |eta| {
        C64::new(c, s * eta.cos()).powu(n as u32)
    });
    Ok(v.re / PI)
}

/// `P_n(cos u)` from the Dirichlet-Murphy representation, folded about
/// `t = π` and with the endpoint singularity at `t = 2π - u` removed.
///
/// `P_n(cos u) = (2(-1)^n/π) ∫_0^{π-u} cos((n+½)x) / √(2(cos u + cos x)) dx`.
pub fn legendre_p_dirichlet_murphy(n: usize, u: f64) -> Result<f64> {
    check_degree("legendre_p_dirichlet_murphy", n)?;
    if !(u > 0.0 && u < PI) {
        return Err(Error::domain("legendre_p_dirichlet_murphy", format!("u={u} not in (0, π)")));
    }
    let b = PI - u;
    let k = n as f64 + 0.5;
    let smax = b.sqrt();
    // x = b - s²; cos u + cos x = 2 sin(u + s²/2) sin(s²/2)
    let integrand = |s: f64| {
        if s == 0.0 {
            return (k * b).cos() * SQRT_2 / u.sin().sqrt();
        }
        let s2 = s * s;
        let den = (4.0 * (u + 0.5 * s2).sin() * (0.5 * s2).sin()).sqrt();
        (k * (b - s2)).cos() * 2.0 * s / den
    };
    let breaks = capped_breaks(0.0, smax, 0.25 * smax.min(u.sqrt()), smax / (2.0 + n as f64));
    let v = gl32().integrate_breaks(&breaks, integrand);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(2.0 * sign * v / PI)
}

fn q_integrand_breaks(v: f64, smax: f64, nu: f64) -> Vec<f64> {
    let first = 0.25 * v.sqrt().min(1.0);
    let max_width = (1.0f64).min(PI / (nu.abs() * smax).max(1e-300));
    capped_breaks(0.0, smax, first, max_width)
}

/// Length of the `s` range beyond which `e^{-(Re λ + 1) s²}` is negligible.
fn q_cutoff(decay: f64) -> f64 {
    (46.0 / decay).sqrt().min(80.0)
}

/// Second-kind function `Q_λ(cosh v)` from
/// `∫_v^∞ e^{-(λ+½)w} / √(2(cosh w - cosh v)) dw`, `Re λ > -1`.
pub fn legendre_q(lambda: ComplexDegree, v: f64) -> Result<C64> {
    if !(v > 0.0) {
        return Err(Error::domain("legendre_q", format!("v={v} must be positive")));
    }
    if !(lambda.sigma > -1.0) {
        return Err(Error::domain(
            "legendre_q",
            format!("Re λ={} must exceed -1", lambda.sigma),
        ));
    }
    let a = lambda.lambda() + 0.5;
    let smax = q_cutoff(lambda.sigma + 1.0);
    let breaks = q_integrand_breaks(v, smax, lambda.nu);
    let value: C64 = gl32().integrate_breaks(&breaks, |s| {
        let w = v + s * s;
        (-a * w).exp() * q_jacobian(v, s)
    });
    Ok(value)
}

/// `2s / √(2(cosh(v+s²) - cosh v))`, written to avoid cancellation.
fn q_jacobian(v: f64, s: f64) -> f64 {
    if s == 0.0 {
        return SQRT_2 / v.sinh().sqrt();
    }
    let s2 = s * s;
    2.0 * s / (4.0 * (v + 0.5 * s2).sinh() * (0.5 * s2).sinh()).sqrt()
}

/// The two halves of `Q_{-½+iν}(cosh v)`: the cosine integral and `-i`
/// times the sine integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSplit {
    pub even: f64,
    pub odd: C64,
}

impl QSplit {
    pub fn sum(&self) -> C64 {
        self.odd + self.even
    }
}

pub fn legendre_q_split(nu: f64, v: f64) -> Result<QSplit> {
    if !(v > 0.0) {
        return Err(Error::domain("legendre_q_split", format!("v={v} must be positive")));
    }
    let smax = q_cutoff(0.5);
    let breaks = q_integrand_breaks(v, smax, nu);
    let rule = gl32();
    let even = rule.integrate_breaks(&breaks, |s| (nu * (v + s * s)).cos() * q_jacobian(v, s));
    let odd = rule.integrate_breaks(&breaks, |s| (nu * (v + s * s)).sin() * q_jacobian(v, s));
    Ok(QSplit {
        even,
        odd: C64::new(0.0, -odd),
    })
}

/// `sinh(z)/z` with the removable point handled.
fn sinhc(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        C64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Nodes and weights in `w` for `∫_0^v g(w) sinh w / √(2(cosh v - cosh w)) dw`
/// after `w = v - s²`; the weights absorb the Jacobian and the kernel.
fn first_kind_nodes(v: f64, nu_max: f64) -> Vec<(f64, f64)> {
    let smax = v.sqrt();
    let panels = 2 + (nu_max.abs() * v / 2.5).ceil() as usize;
    let rule = gl32();
    let mut out = Vec::with_capacity(panels * rule.order());
    let h = smax / panels as f64;
    for k in 0..panels {
        let lo = h * k as f64;
        let half = 0.5 * h;
        let mid = lo + half;
        for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
            let s = mid + half * x;
            let s2 = s * s;
            let w = v - s2;
            let den = (4.0 * (v - 0.5 * s2).sinh() * (0.5 * s2).sinh()).sqrt();
            let jac = if s2 == 0.0 {
                SQRT_2 / v.sinh().sqrt()
            } else {
                2.0 * s / den
            };
            out.push((w, wt * half * jac * w.sinh()));
        }
    }
    out
}

fn first_kind_inner(lambda: ComplexDegree, v: f64) -> C64 {
    let a = lambda.lambda() + 0.5;
    first_kind_nodes(v, lambda.nu)
        .into_iter()
        .map(|(w, weight)| sinhc(a * w) * (w * weight))
        .sum()
}

fn derivative_step(v: f64) -> f64 {
    quad::default_step(v).min(0.25 * v)
}

/// `P_λ(cosh v)` from
/// `(2/(π sinh v)) d/dv ∫_0^v sinh((λ+½)w)/(λ+½) · sinh w / √(2(cosh v - cosh w)) dw`.
pub fn legendre_p_deg(lambda: ComplexDegree, v: f64) -> Result<C64> {
    Ok(legendre_p_deg_estimate(lambda, v)?.value)
}

/// As [`legendre_p_deg`], with the Richardson correction size attached.
pub fn legendre_p_deg_estimate(
    lambda: ComplexDegree,
    v: f64,
) -> Result<quad::Derivative<C64>> {
    if !(v > 0.0) {
        return Err(Error::domain("legendre_p_deg", format!("v={v} must be positive")));
    }
    let d = quad::richardson_derivative(|x| first_kind_inner(lambda, x), v, derivative_step(v));
    let scale = 2.0 / (PI * v.sinh());
    Ok(quad::Derivative {
        value: d.value * scale,
        error: d.error * scale,
    })
}

/// `P_{σ+iν}(cosh v)` for every `ν` of a uniform grid `nu0 + k·dnu`,
/// `k < count`. Shares quadrature nodes across the line and advances the
/// exponentials multiplicatively, which makes whole-line evaluation cheap.
pub fn legendre_p_deg_line(
    sigma: f64,
    nu0: f64,
    dnu: f64,
    count: usize,
    v: f64,
) -> Result<Vec<C64>> {
    if !(v > 0.0) {
        return Err(Error::domain("legendre_p_deg", format!("v={v} must be positive")));
    }
    let nu_max = nu0.abs().max((nu0 + dnu * count as f64).abs());
    let inner = |x: f64| -> Vec<C64> {
        // Σ_j W_j sinh((λ+½) w_j), divided by (λ+½) afterwards.
        let nodes = first_kind_nodes(x, nu_max);
        let mut acc = vec![C64::new(0.0, 0.0); count];
        let b = sigma + 0.5;
        for &(w, weight) in &nodes {
            let mut up = C64::from_polar((b * w).exp(), nu0 * w);
            let mut down = C64::from_polar((-b * w).exp(), -nu0 * w);
            let step_up = C64::from_polar(1.0, dnu * w);
            let step_down = step_up.conj();
            for a in acc.iter_mut() {
                *a += (up - down) * (0.5 * weight);
                up *= step_up;
                down *= step_down;
            }
        }
        acc.iter()
            .enumerate()
            .map(|(k, s)| {
                let a = C64::new(b, nu0 + dnu * k as f64);
                if a.norm() < 1e-8 {
                    nodes.iter().map(|&(w, weight)| sinhc(a * w) * (w * weight)).sum()
                } else {
                    s / a
                }
            })
            .collect()
    };
    let h = derivative_step(v);
    let [pp, pm, hp, hm] = [v + h, v - h, v + 0.5 * h, v - 0.5 * h].map(inner);
    let scale = 2.0 / (PI * v.sinh());
    Ok((0..count)
        .map(|k| {
            let coarse = (pp[k] - pm[k]) / (2.0 * h);
            let fine = (hp[k] - hm[k]) / h;
            (fine + (fine - coarse) / 3.0) * scale
        })
        .collect())
}

/// `ψ_n(cos u) = (-1)^n (2n+1) P_n(cos u) / 4`.
pub fn psi_n(n: usize, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 2.0 * PI) {
        return Err(Error::domain("psi_n", format!("u={u} not in (0, 2π)")));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (2 * n + 1) as f64 * legendre_p(n, u.cos())? / 4.0)
}

/// `ψ_n(cos u)` directly from its defining derivative-of-integral,
/// `(1/(π sin u)) d/du ∫_0^u cos((n+½)(t-π)) sin t / √(2(cos t - cos u)) dt`.
pub fn psi_n_quadrature(n: usize, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 2.0 * PI) || (u - PI).abs() < 1e-6 {
        return Err(Error::domain("psi_n_quadrature", format!("u={u} not in (0, π) ∪ (π, 2π)")));
    }
    check_degree("psi_n_quadrature", n)?;
    let u = if u > PI { 2.0 * PI - u } else { u };
    let k = n as f64 + 0.5;
    let panels = 2 + n / 4;
    let inner = |x: f64| -> f64 {
        let smax = x.sqrt();
        // t = x - s²; cos t - cos x = 2 sin(x - s²/2) sin(s²/2)
        gl64().integrate_composite(0.0, smax, panels, |s| {
            let s2 = s * s;
            let t = x - s2;
            let jac = if s == 0.0 {
                SQRT_2 / x.sin().sqrt()
            } else {
                2.0 * s / (4.0 * (x - 0.5 * s2).sin() * (0.5 * s2).sin()).sqrt()
            };
            (k * (t - PI)).cos() * t.sin() * jac
        })
    };
    let h = quad::default_step(u).min(0.25 * u).min(0.25 * (PI - u));
    let d = quad::richardson_derivative(inner, u, h);
    Ok(d.value / (PI * u.sin()))
}

/// Laguerre `L_ℓ(x)`.
pub fn laguerre(ell: usize, x: f64) -> Result<f64> {
    Ok(*laguerre_all(ell, x)?.last().unwrap())
}

/// `L_0(x) … L_ℓ(x)`.
pub fn laguerre_all(ell: usize, x: f64) -> Result<Vec<f64>> {
    check_degree("laguerre", ell)?;
    let mut out = Vec::with_capacity(ell + 1);
    out.push(1.0);
    if ell >= 1 {
        out.push(1.0 - x);
    }
    for k in 1..ell {
        let kf = k as f64;
        out.push(((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0));
    }
    Ok(out)
}

/// Pollaczek `𝒫_ℓ(x)`: `(ℓ+1)𝒫_{ℓ+1} = 2x𝒫_ℓ - ℓ𝒫_{ℓ-1}`, `𝒫_0 = 1`.
pub fn pollaczek(ell: usize, x: C64) -> Result<C64> {
    Ok(*pollaczek_all(ell, x)?.last().unwrap())
}

pub fn pollaczek_all(ell: usize, x: C64) -> Result<Vec<C64>> {
    check_degree("pollaczek", ell)?;
    let mut out = Vec::with_capacity(ell + 1);
    out.push(C64::new(1.0, 0.0));
    let mut prev = C64::new(0.0, 0.0);
    for k in 0..ell {
        let kf = k as f64;
        let next = (x * out[k] * 2.0 - prev * kf) / (kf + 1.0);
        prev = out[k];
        out.push(next);
    }
    Ok(out)
}

fn i_power(ell: usize) -> C64 {
    match ell % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `e^{-w/2} e^{-e^{-w}}` times `√2`, zero once the double exponential
/// underflows.
fn phi_envelope(w: f64) -> Option<(f64, f64)> {
    let e = (-w).exp();
    if e > 740.0 {
        return None;
    }
    Some((2.0 * e, SQRT_2 * (-0.5 * w - e).exp()))
}

/// `Φ_ℓ(w) = i^ℓ √2 e^{-w/2} L_ℓ(2e^{-w}) e^{-e^{-w}}`.
pub fn phi_basis(ell: usize, w: f64) -> Result<C64> {
    check_degree("phi_basis", ell)?;
    let Some((x, env)) = phi_envelope(w) else {
        return Ok(C64::new(0.0, 0.0));
    };
    Ok(i_power(ell) * (laguerre(ell, x)? * env))
}

/// `Φ_0(w) … Φ_ℓ(w)`.
pub fn phi_basis_all(ell: usize, w: f64) -> Result<Vec<C64>> {
    check_degree("phi_basis", ell)?;
    let Some((x, env)) = phi_envelope(w) else {
        return Ok(vec![C64::new(0.0, 0.0); ell + 1]);
    };
    Ok(laguerre_all(ell, x)?
        .into_iter()
        .enumerate()
        .map(|(k, l)| i_power(k) * (l * env))
        .collect())
}

/// `Q_0(z) = ½ ln((z+1)/(z-1))` for `z > 1`.
pub fn legendre_q0_closed(z: f64) -> f64 {
    0.5 * ((z + 1.0) / (z - 1.0)).ln()
}

/// `Q_1(z) = (z/2) ln((z+1)/(z-1)) - 1` for `z > 1`.
pub fn legendre_q1_closed(z: f64) -> f64 {
    z * legendre_q0_closed(z) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn legendre_polynomial_values() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(legendre_p(2, 0.5).unwrap(), -0.125, epsilon = 1e-15);
        let c = 1f64.cosh();
        assert_abs_diff_eq!(legendre_p(2, c).unwrap(), (3.0 * c * c - 1.0) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(legendre_p(2, c).unwrap(), 3.071646, epsilon = 1e-6);
        assert!(legendre_p(MAX_DEGREE + 1, 0.1).is_err());
        let z = C64::new(0.3, -0.7);
        let p3 = (z * z * z * 5.0 - z * 3.0) / 2.0;
        assert_abs_diff_eq!((legendre_p_complex(3, z).unwrap() - p3).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn legendre_integral_representations_match_recurrence() {
        for n in 0..=20 {
            for k in 0..=14 {
                let u = 0.1 + (PI - 0.2) * k as f64 / 14.0;
                let rec = legendre_p(n, u.cos()).unwrap();
                let lap = legendre_p_laplace_integral(n, u).unwrap();
                let dm = legendre_p_dirichlet_murphy(n, u).unwrap();
                assert!((rec - lap).abs() < 1e-8, "laplace n={n} u={u}");
                assert!((rec - dm).abs() < 1e-6, "dirichlet-murphy n={n} u={u}: {rec} {dm}");
            }
        }
    }

    #[test]
    fn second_kind_against_closed_forms() {
        for v in [1.0, 2.0, 0.3] {
            let z = f64::cosh(v);
            let q0 = legendre_q(ComplexDegree::real(0.0), v).unwrap();
            assert_abs_diff_eq!(q0.re, legendre_q0_closed(z), epsilon = 1e-10);
            assert_abs_diff_eq!(q0.im, 0.0, epsilon = 1e-14);
            let q1 = legendre_q(ComplexDegree::real(1.0), v).unwrap();
            assert_abs_diff_eq!(q1.re, legendre_q1_closed(z), epsilon = 1e-10);
        }
        assert!(legendre_q(ComplexDegree::real(0.0), 0.0).is_err());
        assert!(legendre_q(ComplexDegree::real(-1.0), 1.0).is_err());
    }

    #[test]
    fn second_kind_against_direct_quadrature() {
        let lam = ComplexDegree::new(0.5, 2.0);
        let v = 0.7;
        let direct = oracle::exp_sinh(|d| {
            (-(lam.lambda() + 0.5) * (v + d)).exp() / (4.0 * (v + 0.5 * d).sinh() * (0.5 * d).sinh()).sqrt()
        });
        let q = legendre_q(lam, v).unwrap();
        assert!((q - direct).norm() < 1e-9, "{q} vs {direct}");
    }

    #[test]
    fn split_halves_sum_to_q() {
        let s0 = legendre_q_split(0.0, 1.0).unwrap();
        assert_eq!(s0.odd, C64::new(0.0, 0.0));
        let s = legendre_q_split(1.0, 1.0).unwrap();
        let q = legendre_q(ComplexDegree::new(-0.5, 1.0), 1.0).unwrap();
        assert!((s.sum() - q).norm() < 1e-12);
        let even = oracle::exp_sinh(|d| {
            C64::new((1.0 + d).cos() / (4.0 * (1.0 + 0.5 * d).sinh() * (0.5 * d).sinh()).sqrt(), 0.0)
        });
        assert_abs_diff_eq!(s.even, even.re, epsilon = 1e-8);
    }

    #[test]
    fn first_kind_of_integer_degree_is_the_polynomial() {
        assert_abs_diff_eq!(legendre_p_deg(ComplexDegree::real(0.0), 1.0).unwrap().re, 1.0, epsilon = 1e-9);
        let p2 = legendre_p_deg(ComplexDegree::real(2.0), 1.0).unwrap();
        assert_abs_diff_eq!(p2.re, legendre_p(2, 1f64.cosh()).unwrap(), epsilon = 1e-8);
        assert_abs_diff_eq!(p2.im, 0.0, epsilon = 1e-12);
        assert!(legendre_p_deg(ComplexDegree::real(0.0), 0.0).is_err());
    }

    #[test]
    fn first_kind_conical_evenness() {
        for nu in [0.5, 1.0, 2.0] {
            for v in [0.5, 1.0] {
                let a = legendre_p_deg(ComplexDegree::new(-0.5, nu), v).unwrap();
                let b = legendre_p_deg(ComplexDegree::new(-0.5, -nu), v).unwrap();
                assert!((a - b).norm() < 1e-10, "nu={nu} v={v}");
            }
        }
    }

    #[test]
    fn first_kind_from_second_kind_difference() {
        // P_λ = (tan πλ / π)(Q_λ - Q_{-λ-1}), both Q inside Re > -1.
        let lam = -0.25;
        let v = 1.0;
        let p = legendre_p_deg(ComplexDegree::real(lam), v).unwrap();
        let qa = legendre_q(ComplexDegree::real(lam), v).unwrap();
        let qb = legendre_q(ComplexDegree::real(-lam - 1.0), v).unwrap();
        let rhs = (qa - qb) * ((PI * lam).tan() / PI);
        assert!((p - rhs).norm() < 1e-4, "{p} vs {rhs}");
        // conical case: P_{-½+iν} = (2/π) tan(π(-½+iν)) Q^odd
        let nu = 1.0;
        let l = C64::new(-0.5, nu);
        let split = legendre_q_split(nu, v).unwrap();
        let rhs = (l * PI).tan() * split.odd * (2.0 / PI);
        let p = legendre_p_deg(ComplexDegree::new(-0.5, nu), v).unwrap();
        assert!((p - rhs).norm() < 1e-6, "{p} vs {rhs}");
    }

    #[test]
    fn line_evaluation_matches_pointwise() {
        let (sigma, nu0, dnu, count, v) = (0.0, -3.0, 0.25, 25, 1.3);
        let line = legendre_p_deg_line(sigma, nu0, dnu, count, v).unwrap();
        for k in [0, 7, 12, 24] {
            let p = legendre_p_deg(ComplexDegree::new(sigma, nu0 + dnu * k as f64), v).unwrap();
            assert!((line[k] - p).norm() < 1e-9, "k={k}");
        }
        let line = legendre_p_deg_line(-0.5, -1.0, 0.5, 5, 0.8).unwrap();
        let p = legendre_p_deg(ComplexDegree::new(-0.5, 0.0), 0.8).unwrap();
        assert!((line[2] - p).norm() < 1e-9);
    }

    #[test]
    fn psi_identity_and_quadrature() {
        assert_abs_diff_eq!(psi_n(0, 1.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(psi_n(1, PI / 3.0).unwrap(), -0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(psi_n(2, PI / 2.0).unwrap(), -0.625, epsilon = 1e-15);
        assert!(psi_n(1, 0.0).is_err());
        assert!(psi_n(1, 2.0 * PI).is_err());
        for n in 0..=8 {
            for u in [0.3, 1.0, 2.0, 2.8, 4.0] {
                let q = psi_n_quadrature(n, u).unwrap();
                let c = psi_n(n, u).unwrap();
                assert!((q - c).abs() < 1e-5, "n={n} u={u}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn laguerre_and_pollaczek_values() {
        assert_eq!(laguerre(0, 3.0).unwrap(), 1.0);
        assert_abs_diff_eq!(laguerre(1, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(laguerre(2, 2.0).unwrap(), -1.0, epsilon = 1e-15);
        let x = C64::new(0.0, -0.5);
        assert_eq!(pollaczek(0, x).unwrap(), C64::new(1.0, 0.0));
        assert!((pollaczek(1, x).unwrap() - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((pollaczek(2, x).unwrap() - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_basis_values() {
        let e = SQRT_2 * (-1f64).exp();
        assert_abs_diff_eq!(phi_basis(0, 0.0).unwrap().re, e, epsilon = 1e-15);
        let p1 = phi_basis(1, 0.0).unwrap();
        assert_abs_diff_eq!(p1.im, -e, epsilon = 1e-15);
        assert!(phi_basis(0, 80.0).unwrap().norm() < 1e-17);
        assert_eq!(phi_basis(5, -20.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn phi_basis_is_orthonormal() {
        let all: Vec<(f64, Vec<C64>)> = oracle::trapezoid_nodes(-30.0, 30.0, 0.01)
            .into_iter()
            .map(|(w, wt)| (wt, phi_basis_all(20, w).unwrap()))
            .collect();
        for l in 0..=20 {
            for m in 0..=20 {
                let g: C64 = all.iter().map(|(wt, p)| p[l] * p[m].conj() * *wt).sum();
                let target = if l == m { 1.0 } else { 0.0 };
                assert!((g - target).norm() < 1e-6, "({l},{m}) {g}");
            }
        }
    }

    proptest! {
        #[test]
        fn legendre_bounded_on_interval(n in 0usize..200, x in -1.0f64..1.0) {
            prop_assert!(legendre_p(n, x).unwrap().abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn legendre_parity(n in 0usize..60, x in -1.0f64..1.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let a = legendre_p(n, -x).unwrap();
            let b = sign * legendre_p(n, x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn pollaczek_conjugation(ell in 0usize..40, y in 0.0f64..10.0) {
            // real coefficients: 𝒫(conj z) = conj 𝒫(z)
            let a = pollaczek(ell, C64::new(0.3, -y)).unwrap();
            let b = pollaczek(ell, C64::new(0.3, y)).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}
