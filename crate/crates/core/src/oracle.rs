//! Independent reference integrators for the test suites.
//!
//! Double-exponential rules share no code with the Gauss-Legendre machinery
//! in [`crate::quad`], and they tolerate integrable endpoint singularities
//! without substitutions, so agreement between the two is meaningful.

use std::f64::consts::FRAC_PI_2;

use crate::C64;

fn refine(mut level: impl FnMut(f64) -> C64) -> C64 {
    let mut h = 0.5;
    let mut prev = level(h);
    for _ in 0..9 {
        h *= 0.5;
        let next = level(h);
        if (next - prev).norm() <= 1e-14 * (1.0 + next.norm()) {
            return next;
        }
        prev = next;
    }
    prev
}

/// `∫_a^b f`, tanh-sinh; `f` may blow up integrably at either end.
pub fn tanh_sinh(a: f64, b: f64, f: impl Fn(f64) -> C64) -> C64 {
    tanh_sinh_dist(a, b, |x, _, _| f(x))
}

/// Tanh-sinh where `f(x, x - a, b - x)` also receives the distances to
/// both ends, exact even where `x` itself rounds onto an endpoint.
pub fn tanh_sinh_dist(a: f64, b: f64, f: impl Fn(f64, f64, f64) -> C64) -> C64 {
    let half = 0.5 * (b - a);
    refine(|h| {
        let mut acc = C64::new(0.0, 0.0);
        let n = (4.5 / h) as i64;
        for k in -n..=n {
            let t = h * k as f64;
            let u = FRAC_PI_2 * t.sinh();
            let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
            let da = 2.0 * half / (1.0 + (-2.0 * u).exp());
            let db = 2.0 * half / (1.0 + (2.0 * u).exp());
            if da == 0.0 || db == 0.0 || w == 0.0 {
                continue;
            }
            let p = if u < 0.0 { a + da } else { b - db };
            let v = f(p, da, db);
            if v.is_finite() {
                acc += v * (w * half);
            }
        }
        acc * h
    })
}

/// `∫_0^∞ f`, exp-sinh; `f` may blow up integrably at 0.
pub fn exp_sinh(f: impl Fn(f64) -> C64) -> C64 {
    refine(|h| {
        let mut acc = C64::new(0.0, 0.0);
        let n = (5.0 / h) as i64;
        for k in -n..=n {
            let t = h * k as f64;
            let x = (FRAC_PI_2 * t.sinh()).exp();
            let w = FRAC_PI_2 * t.cosh() * x;
            if x == 0.0 || !x.is_finite() || !w.is_finite() {
                continue;
            }
            let v = f(x);
            if v.is_finite() {
                acc += v * w;
            }
        }
        acc * h
    })
}

/// Real-valued convenience wrapper over [`tanh_sinh`].
pub fn tanh_sinh_real(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    tanh_sinh(a, b, |x| C64::new(f(x), 0.0)).re
}

/// Trapezoid nodes of spacing about `h` on `[a, b]`; spectrally accurate
/// for integrands that decay to zero at both ends.
pub fn trapezoid_nodes(a: f64, b: f64, h: f64) -> Vec<(f64, f64)> {
    let n = ((b - a) / h).ceil() as usize;
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            (a + h * i as f64, w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_exponential_rules_handle_singular_ends() {
        let v = tanh_sinh_real(0.0, 1.0, |x| 1.0 / x.sqrt());
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let v = exp_sinh(|x| C64::new((-x).exp() / x.sqrt(), 0.0));
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-12, "{v}");
        let nodes = trapezoid_nodes(-20.0, 20.0, 0.05);
        let g: f64 = nodes.iter().map(|(x, w)| w * (-x * x).exp()).sum();
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }
}
