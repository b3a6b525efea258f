//! Horocyclic Radon integrals, the Abel-type transform they reduce to,
//! Riemann-Liouville fractional integrals, and the inverse Abel transform
//! in trigonometric (`u`, `t`) and hyperbolic (`v`, `w`) coordinates.
//!
//! Every `[2(c - c')]^{-1/2}` endpoint singularity is removed by writing the
//! outer variable minus the inner one as `s²`. The difference of cosines is
//! then evaluated as a product of sines so the integrand stays accurate as
//! `s → 0`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result, Warning, WarningCode};
use crate::grid::{CoordKind, GridFunction};
use crate::quad::{self, gl32, two_sided_breaks, Derivative};
use crate::C64;

/// Point of the hyperboloid `x0² - x1² - x2² = -1` in horocyclic
/// coordinates `(w, ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorocyclePoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub w: f64,
    pub zeta: f64,
}

impl HorocyclePoint {
    /// `x0² - x1² - x2²`, which should be `-1`.
    pub fn quadric(&self) -> f64 {
        (self.x0 - self.x2) * (self.x0 + self.x2) - self.x1 * self.x1
    }
}

/// `(sinh w + ζ²e^w/2, ζe^w, cosh w - ζ²e^w/2)`.
pub fn horocycle_point(w: f64, zeta: f64) -> HorocyclePoint {
    let ew = w.exp();
    let q = 0.5 * zeta * zeta * ew;
    HorocyclePoint {
        x0: w.sinh() + q,
        x1: zeta * ew,
        x2: w.cosh() - q,
        w,
        zeta,
    }
}

fn require_positive(op: &'static str, name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(op, format!("{name}={x} must be positive")));
    }
    Ok(())
}

/// `∫ F(x2) dζ` over the horocycle `h_w`, between the two points where
/// `x2 = 1`. `f_of_v` gives `F` as a function of `v = arccosh x2`.
pub fn horocycle_radon(f_of_v: impl Fn(f64) -> f64, w: f64) -> Result<f64> {
    require_positive("horocycle_radon", "w", w)?;
    let zmax = (2.0 * (-w).exp() * (w.cosh() - 1.0)).sqrt();
    let ew = w.exp();
    let panels = 2 + (2.0 * w.sqrt()).ceil() as usize;
    // ζ = ζ_max sin θ: x2 - 1 = c cos²θ, so arccosh x2 is smooth in θ
    let c = 0.5 * zmax * zmax * ew;
    Ok(gl32().integrate_composite(-FRAC_PI_2, FRAC_PI_2, panels, |t| {
        let cos = t.cos();
        f_of_v((1.0 + c * cos * cos).acosh()) * zmax * cos
    }))
}

/// Nodes `(v, weight)` for `2∫_0^w g(v) sinh v [2(cosh w - cosh v)]^{-1/2} dv`
/// after `v = w - s²`; the weights absorb the kernel and the factor 2.
fn forward_nodes(w: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> {
    let smax = w.sqrt();
    let h = smax / panels as f64;
    let rule = gl32();
    (0..panels).flat_map(move |k| {
        let mid = h * (k as f64 + 0.5);
        rule.nodes().iter().zip(rule.weights()).map(move |(x, wt)| {
            let s = mid + 0.5 * h * x;
            let s2 = s * s;
            let v = w - s2;
            let jac = 2.0 * s / (4.0 * (w - 0.5 * s2).sinh() * (0.5 * s2).sinh()).sqrt();
            (v, 2.0 * wt * 0.5 * h * jac * v.sinh())
        })
    })
}

fn forward_panels(w: f64) -> usize {
    2 + (2.0 * w.sqrt()).ceil() as usize
}

/// `(𝒜F)(w) = 2∫_0^w F(cosh v) sinh v [2(cosh w - cosh v)]^{-1/2} dv`,
/// with `F` given as a function of `v`.
pub fn abel_forward(f_of_v: impl Fn(f64) -> f64, w: f64) -> Result<f64> {
    require_positive("abel_forward", "w", w)?;
    Ok(forward_nodes(w, forward_panels(w)).map(|(v, wt)| wt * f_of_v(v)).sum())
}

/// [`abel_forward`] for `F` sampled on a `v` grid covering `[0, w]`.
pub fn abel_forward_grid(f: &GridFunction, w: f64) -> Result<f64> {
    require_grid("abel_forward", f, &[CoordKind::V], 0.0, w)?;
    abel_forward(|v| f.eval_clamped(v).re, w)
}

/// [`horocycle_radon`] for `F` sampled on a `v` or `x = cosh v` grid.
pub fn horocycle_radon_grid(f: &GridFunction, w: f64) -> Result<f64> {
    match f.kind() {
        CoordKind::X => {
            require_grid("horocycle_radon", f, &[CoordKind::X], 1.0, w.cosh())?;
            horocycle_radon(|v| f.eval_clamped(v.cosh()).re, w)
        }
        _ => {
            require_grid("horocycle_radon", f, &[CoordKind::V], 0.0, w)?;
            horocycle_radon(|v| f.eval_clamped(v).re, w)
        }
    }
}

fn require_grid(op: &'static str, f: &GridFunction, kinds: &[CoordKind], a: f64, b: f64) -> Result<()> {
    if !kinds.contains(&f.kind()) {
        return Err(Error::InvalidInput(format!(
            "{op} expects a grid in {}, got {}",
            kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(" or "),
            f.kind()
        )));
    }
    if !(f.contains(a) && f.contains(b)) {
        return Err(Error::domain(
            op,
            format!("grid [{}, {}] must cover [{a}, {b}]", f.start(), f.end()),
        ));
    }
    Ok(())
}

/// `(I_α φ)(ρ) = (1/Γ(α)) ∫_0^ρ φ(ρ') (ρ - ρ')^{α-1} dρ'`, written as
/// `ρ^α/Γ(α+1) ∫_0^1 φ(ρ(1 - s^{1/α})) ds`.
pub fn riemann_liouville(phi: impl Fn(f64) -> f64, alpha: f64, rho: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain("riemann_liouville", format!("α={alpha} must be positive")));
    }
    if !(rho >= 0.0) {
        return Err(Error::domain("riemann_liouville", format!("ρ={rho} must be non-negative")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let breaks = two_sided_breaks(0.0, 1.0, 1e-7, 2.0);
    let inv = 1.0 / alpha;
    let v = gl32().integrate_breaks(&breaks, |s: f64| phi(rho * (1.0 - s.powf(inv))));
    Ok(rho.powf(alpha) / gamma(alpha + 1.0) * v)
}

/// [`riemann_liouville`] for `φ` sampled on a grid covering `[0, ρ]`.
pub fn riemann_liouville_grid(phi: &GridFunction, alpha: f64, rho: f64) -> Result<f64> {
    if !(phi.contains(0.0) && phi.contains(rho)) {
        return Err(Error::domain(
            "riemann_liouville",
            format!("grid [{}, {}] must cover [0, {rho}]", phi.start(), phi.end()),
        ));
    }
    riemann_liouville(|x| phi.eval_clamped(x).re, alpha, rho)
}

/// Inverse-transform value with the outer differentiation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseValue {
    pub value: C64,
    /// Size of the Richardson correction in the outer derivative.
    pub derivative_error: f64,
    /// Set when the difference quotients do not settle, i.e. the data is
    /// not continuously differentiable at the point.
    pub c1_violation: bool,
}

impl InverseValue {
    fn from_derivative(d: Derivative<C64>, scale: f64) -> Self {
        Self {
            value: d.value * scale,
            derivative_error: d.error * scale.abs(),
            c1_violation: quad::looks_non_smooth(&d),
        }
    }

    pub fn warning(&self, at: f64) -> Option<Warning> {
        self.c1_violation.then(|| {
            Warning::new(
                WarningCode::C1Violation,
                format!(
                    "inverse Abel derivative at {at} did not settle (Richardson correction {:.3e}); \
                     input is not C¹ there",
                    self.derivative_error
                ),
            )
        })
    }
}

fn outer_step(x: f64, upper: f64) -> f64 {
    quad::default_step(x).min(0.25 * x).min(0.25 * (upper - x).abs().max(1e-300))
}

/// Inner integral `∫_0^v g(w) sinh w [2(cosh v - cosh w)]^{-1/2} dw`.
fn hyperbolic_inner(g: &impl Fn(f64) -> C64, v: f64, panels: usize) -> C64 {
    // forward_nodes carries a factor 2 that the inverse does not use
    forward_nodes(v, panels).map(|(w, wt)| g(w) * (0.5 * wt)).sum()
}

/// Default number of Gauss panels for the inner integrals at `x`.
pub fn inverse_panels(x: f64) -> usize {
    4 + (4.0 * x.sqrt()).ceil() as usize
}

/// `F(v) = (1/(π sinh v)) d/dv ∫_0^v (𝒜F)(w) sinh w [2(cosh v - cosh w)]^{-1/2} dw`,
/// from the Abel transform `𝒜F(w) = e^{w/2} F̂(w)` itself.
pub fn abel_inverse_from_transform(g: impl Fn(f64) -> C64, v: f64, panels: Option<usize>) -> Result<InverseValue> {
    require_positive("abel_inverse", "v", v)?;
    let panels = panels.unwrap_or_else(|| inverse_panels(v));
    let h = quad::default_step(v).min(0.25 * v);
    let d = quad::richardson_derivative(|x| hyperbolic_inner(&g, x, panels), v, h);
    Ok(InverseValue::from_derivative(d, 1.0 / (PI * v.sinh())))
}

/// Hyperbolic inversion from the horocyclic jump:
/// `F(v) = (1/(π sinh v)) d/dv ∫_0^v e^{w/2} F̂(w) sinh w [2(cosh v - cosh w)]^{-1/2} dw`.
pub fn abel_inverse_hyperbolic(fhat: impl Fn(f64) -> C64, v: f64) -> Result<InverseValue> {
    abel_inverse_from_transform(|w| fhat(w) * (0.5 * w).exp(), v, None)
}

/// Trigonometric inversion,
/// `f(u) = (π sin u)^{-1} d/du ∫_0^u e^{-it/2} f̂(t) [2(cos u - cos t)]^{-1/2} sin t dt`,
/// for `u ∈ (0, π)`. The radicand is negative on the whole range; its
/// inverse square root is taken as `i |·|^{-1/2}`.
pub fn abel_inverse_trig(fhat: impl Fn(f64) -> C64, u: f64) -> Result<InverseValue> {
    if !(u > 0.0 && u < PI) {
        return Err(Error::domain("abel_inverse", format!("u={u} not in (0, π)")));
    }
    let panels = inverse_panels(u);
    let inner = |x: f64| -> C64 {
        let smax = x.sqrt();
        let rule = gl32();
        rule.integrate_composite(0.0, smax, panels, |s| {
            let s2 = s * s;
            let t = x - s2;
            let jac = if s == 0.0 {
                SQRT_2 / x.sin().sqrt()
            } else {
                2.0 * s / (4.0 * (x - 0.5 * s2).sin() * (0.5 * s2).sin()).sqrt()
            };
            C64::from_polar(1.0, -0.5 * t) * fhat(t) * (t.sin() * jac)
        })
    };
    let h = outer_step(u, PI);
    let d = quad::richardson_derivative(inner, u, h);
    let mut out = InverseValue::from_derivative(d, 1.0 / (PI * u.sin()));
    out.value *= C64::new(0.0, 1.0);
    Ok(out)
}

/// [`abel_inverse_hyperbolic`] / [`abel_inverse_trig`] on sampled input:
/// a `w` grid gives the hyperbolic form, a `t` grid the trigonometric one.
pub fn abel_inverse(fhat: &GridFunction, point: f64) -> Result<InverseValue> {
    match fhat.kind() {
        CoordKind::W => {
            let h = quad::default_step(point).min(0.25 * point);
            require_grid("abel_inverse", fhat, &[CoordKind::W], 0.0, point + h)?;
            abel_inverse_hyperbolic(|w| fhat.eval_clamped(w), point)
        }
        CoordKind::T => {
            let h = outer_step(point, PI);
            require_grid("abel_inverse", fhat, &[CoordKind::T], 0.0, (point + h).min(PI))?;
            abel_inverse_trig(|t| fhat.eval_clamped(t), point)
        }
        other => Err(Error::InvalidInput(format!(
            "abel_inverse expects a w or t grid, got {other}"
        ))),
    }
}

/// Straight ray from `cos θ = 1` to `cos θ = cos τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayParametrization {
    pub tau: C64,
    pub lambda_grid: Vec<f64>,
    pub cos_theta_values: Vec<C64>,
}

/// `cos θ(λ) = 1 + λ(cos τ - 1)`.
pub fn ray_parametrize(tau: C64, lambda_grid: Vec<f64>) -> RayParametrization {
    let c = tau.cos() - 1.0;
    let cos_theta_values = lambda_grid.iter().map(|&l| c * l + 1.0).collect();
    RayParametrization {
        tau,
        lambda_grid,
        cos_theta_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;
    use crate::oracle;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn horocycle_points() {
        let p = horocycle_point(0.0, 0.0);
        assert_eq!((p.x0, p.x1, p.x2), (0.0, 0.0, 1.0));
        let p = horocycle_point(1.0, 0.0);
        assert_abs_diff_eq!(p.x0, 1.175201, epsilon = 1e-6);
        assert_abs_diff_eq!(p.x2, 1.543081, epsilon = 1e-6);
        let p = horocycle_point(1.0, 0.5);
        assert_abs_diff_eq!(p.x0, 1.514986, epsilon = 1e-6);
        assert_abs_diff_eq!(p.x1, 1.359141, epsilon = 1e-6);
        assert_abs_diff_eq!(p.x2, 1.203296, epsilon = 1e-6);
        assert_abs_diff_eq!(p.x0 + p.x2, 1f64.exp(), epsilon = 1e-15);
        for i in 0..20 {
            for j in 0..20 {
                let q = horocycle_point(0.1 * i as f64, -1.0 + 0.1 * j as f64);
                assert!((q.quadric() + 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radon_and_abel_forward_closed_forms() {
        let r = horocycle_radon(|_| 1.0, 1.0).unwrap();
        let zmax = (2.0 * (-1f64).exp() * (1f64.cosh() - 1.0)).sqrt();
        assert_abs_diff_eq!(r, 2.0 * zmax, epsilon = 1e-13);
        // 2ζ_max = 2(1 - e^{-w})
        assert_abs_diff_eq!(r, 2.0 * (1.0 - (-1f64).exp()), epsilon = 1e-13);
        assert!((r - (-0.5f64).exp() * abel_forward(|_| 1.0, 1.0).unwrap()).abs() < 1e-4);
        assert_eq!(horocycle_radon(|_| 0.0, 1.0).unwrap(), 0.0);
        assert!(horocycle_radon(|_| 1.0, 0.0).is_err());
        assert_abs_diff_eq!(abel_forward(|_| 1.0, 1.0).unwrap(), 4.0 * 0.5f64.sinh(), epsilon = 1e-13);
        let c = 1f64.cosh();
        let closed = SQRT_2 * (2.0 * c * (c - 1.0).sqrt() - 2.0 / 3.0 * (c - 1.0).powf(1.5));
        assert_abs_diff_eq!(abel_forward(f64::cosh, 1.0).unwrap(), closed, epsilon = 1e-13);
        assert_abs_diff_eq!(abel_forward(f64::cosh, 1.0).unwrap(), 2.8390393, epsilon = 1e-7);
        assert!(abel_forward(|_| 1.0, -1.0).is_err());
    }

    #[test]
    fn abel_forward_against_singular_oracle() {
        let w = 1.7;
        let direct = oracle::tanh_sinh_dist(0.0, w, |v, _, d| {
            C64::new(2.0 * (-v).exp() * v.sinh() / (4.0 * (w - 0.5 * d).sinh() * (0.5 * d).sinh()).sqrt(), 0.0)
        });
        assert_abs_diff_eq!(abel_forward(|v| (-v).exp(), w).unwrap(), direct.re, epsilon = 1e-11);
    }

    #[test]
    fn radon_equals_scaled_abel_transform() {
        let fs: [fn(f64) -> f64; 3] = [|_| 1.0, |v| v.cosh(), |v| (-v * v).exp()];
        for f in fs {
            for k in 0..=14 {
                let w = 0.2 + 0.2 * k as f64;
                let r = horocycle_radon(f, w).unwrap();
                let a = (-0.5 * w).exp() * abel_forward(f, w).unwrap();
                assert!((r - a).abs() < 1e-6, "w={w}");
            }
        }
    }

    #[test]
    fn riemann_liouville_values_and_semigroup() {
        assert_abs_diff_eq!(riemann_liouville(|_| 1.0, 1.0, 2.5).unwrap(), 2.5, epsilon = 1e-13);
        assert_abs_diff_eq!(riemann_liouville(|_| 1.0, 0.5, 1.0).unwrap(), 2.0 / PI.sqrt(), epsilon = 1e-12);
        assert!(riemann_liouville(|_| 1.0, 0.0, 1.0).is_err());
        let half = |x: f64| riemann_liouville(|_| 1.0, 0.5, x).unwrap();
        assert_abs_diff_eq!(riemann_liouville(half, 0.5, 1.0).unwrap(), 1.0, epsilon = 1e-6);
        let phi = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x;
        for (a, b) in [(0.5, 0.5), (0.5, 1.0)] {
            for rho in [0.3, 1.0, 2.0] {
                let inner = |x: f64| riemann_liouville(phi, b, x).unwrap();
                let nested = riemann_liouville(inner, a, rho).unwrap();
                let direct = riemann_liouville(phi, a + b, rho).unwrap();
                assert!((nested - direct).abs() < 1e-6, "({a},{b}) rho={rho}");
            }
        }
    }

    #[test]
    fn hyperbolic_inverse_roundtrips() {
        let fs: [(fn(f64) -> f64, &str); 3] = [(|_| 1.0, "1"), (f64::cosh, "cosh"), (|v| (-v).exp(), "exp")];
        for (f, name) in fs {
            for k in 0..=29 {
                let v = 0.1 + 0.1 * k as f64;
                let inv = abel_inverse_from_transform(|w| C64::new(abel_forward(f, w).unwrap_or(0.0), 0.0), v, None).unwrap();
                assert!((inv.value.re - f(v)).abs() < 1e-4, "{name} v={v}: {}", inv.value);
                assert!(!inv.c1_violation);
            }
        }
        let one = abel_inverse_hyperbolic(|w| C64::new(4.0 * (-0.5 * w).exp() * (0.5 * w).sinh(), 0.0), 1.3).unwrap();
        assert_abs_diff_eq!(one.value.re, 1.0, epsilon = 1e-9);
        assert_eq!(abel_inverse_hyperbolic(|_| C64::new(0.0, 0.0), 1.0).unwrap().value, C64::new(0.0, 0.0));
    }

    #[test]
    fn trigonometric_inverse_of_constant() {
        let fhat = |t: f64| C64::new(0.0, -1.0 / PI) * C64::from_polar(1.0, 0.5 * t) * (0.5 * t).sin();
        for u in [0.3, 1.0, 2.0, 2.9] {
            let f = abel_inverse_trig(fhat, u).unwrap();
            assert_abs_diff_eq!(f.value.re, 1.0 / (4.0 * PI), epsilon = 1e-9);
            assert_abs_diff_eq!(f.value.im, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn grid_inverse_and_kink_detection() {
        let grid = linspace(0.0, 4.0, 800);
        let g = GridFunction::from_fn(CoordKind::W, grid.clone(), |w| {
            C64::new(4.0 * (-0.5 * w).exp() * (0.5 * w).sinh(), 0.0)
        })
        .unwrap();
        let r = abel_inverse(&g, 1.0).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-5);
        // 𝒜F with a jump in F at v = 1 has a kink in its inverse input
        let kinked = |w: f64| C64::new(if w < 1.0 { 0.0 } else { (w - 1.0).sqrt() }, 0.0);
        let r = abel_inverse_from_transform(kinked, 1.0, None).unwrap();
        assert!(r.c1_violation);
        assert!(r.warning(1.0).is_some());
        let bad = GridFunction::from_fn(CoordKind::V, grid, |_| C64::new(1.0, 0.0)).unwrap();
        assert!(abel_inverse(&bad, 1.0).is_err());
    }

    #[test]
    fn ray_endpoints() {
        let tau = C64::new(0.0, 1.0);
        let r = ray_parametrize(tau, vec![0.0, 0.5, 1.0]);
        assert_eq!(r.cos_theta_values[0], C64::new(1.0, 0.0));
        assert!((r.cos_theta_values[2] - tau.cos()).norm() < 1e-15);
        assert_abs_diff_eq!(r.cos_theta_values[1].re, 1.271540, epsilon = 1e-6);
    }

    proptest! {
        #[test]
        fn quadric_holds(w in 0.0f64..5.0, zeta in -3.0f64..3.0) {
            let p = horocycle_point(w, zeta);
            prop_assert!((p.quadric() + 1.0).abs() < 1e-9 * (1.0 + p.x0 * p.x0));
        }

        #[test]
        fn abel_forward_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, w in 0.1f64..4.0) {
            let lhs = abel_forward(|v| a + b * v.cosh(), w).unwrap();
            let rhs = a * abel_forward(|_| 1.0, w).unwrap() + b * abel_forward(f64::cosh, w).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }
}
