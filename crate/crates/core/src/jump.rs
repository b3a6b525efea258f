//! The spherical-Laplace pair: jump function to its Laplace∘Radon transform
//! `ã(λ)` and back along vertical lines `Re λ = σ`, with Plancherel and
//! L¹-bound diagnostics and the Mehler specialization at `σ = -1/2`.
//!
//! The ν-integrals run on a uniform symmetric grid with Simpson's rule and a
//! smooth flat-top window. Each result carries the Simpson correction and
//! the change caused by widening the window's flat part, summed as an error
//! estimate.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::abel;
use crate::error::{Error, Result, Warning, WarningCode};
use crate::grid::{CoordKind, GridFunction};
use crate::quad::{self, gl16, graded_breaks, GaussLegendre, Taper};
use crate::specfun::{self, ComplexDegree};
use crate::C64;

/// Default ν spacing and half-width of the sampling line.
pub const DEFAULT_DNU: f64 = 0.05;
pub const DEFAULT_NU_MAX: f64 = 200.0;

/// Fitted decay exponents at or below this are read as "not integrable".
const L1_EXPONENT_FLOOR: f64 = 1.05;

/// Samples of `ã(σ + iν)` on a uniform grid symmetric about `ν = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineSamples {
    sigma: f64,
    nu: Vec<f64>,
    values: Vec<C64>,
}

impl LineSamples {
    pub fn new(sigma: f64, nu: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if !(sigma >= -0.5) || !sigma.is_finite() {
            return Err(Error::domain("line_samples", format!("σ={sigma} must be at least -1/2")));
        }
        let n = nu.len();
        if n != values.len() {
            return Err(Error::InvalidInput(format!(
                "{n} ν nodes but {} values",
                values.len()
            )));
        }
        if n < 5 || n % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "a sampling line needs an odd number (>= 5) of nodes, got {n}"
            )));
        }
        let h = (nu[n - 1] - nu[0]) / (n - 1) as f64;
        if !(h > 0.0) {
            return Err(Error::InvalidInput("ν grid must be increasing".into()));
        }
        for k in 0..n {
            let expected = nu[0] + h * k as f64;
            if (nu[k] - expected).abs() > 1e-6 * h {
                return Err(Error::InvalidInput(format!("ν grid is not uniform at index {k}")));
            }
            if (nu[k] + nu[n - 1 - k]).abs() > 1e-6 * h {
                return Err(Error::InvalidInput(format!(
                    "ν grid is not symmetric about 0 at index {k}"
                )));
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(pole_error(sigma, nu[k]));
        }
        Ok(Self { sigma, nu, values })
    }

    /// Samples `atilde(λ)` at `λ = σ + ikΔν`, `|kΔν| <= ν_max`.
    pub fn from_fn(sigma: f64, nu_max: f64, dnu: f64, atilde: impl Fn(C64) -> C64) -> Result<Self> {
        if !(dnu > 0.0 && nu_max > 0.0) || !nu_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need ν_max > 0 and Δν > 0, got {nu_max} and {dnu}"
            )));
        }
        let half = (nu_max / dnu).round() as i64;
        let nu: Vec<f64> = (-half..=half).map(|k| k as f64 * dnu).collect();
        let values = nu.iter().map(|&v| atilde(C64::new(sigma, v))).collect();
        Self::new(sigma, nu, values)
    }

    /// [`LineSamples::from_fn`] with the default grid.
    pub fn default_line(sigma: f64, atilde: impl Fn(C64) -> C64) -> Result<Self> {
        Self::from_fn(sigma, DEFAULT_NU_MAX, DEFAULT_DNU, atilde)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.nu[self.len() - 1] - self.nu[0]) / (self.len() - 1) as f64
    }

    pub fn nu_max(&self) -> f64 {
        self.nu[self.len() - 1]
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            sigma: self.sigma,
            nu: self.nu.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// `max |ã(σ-iν) - conj ã(σ+iν)|`; zero for real jump data.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| (self.values[n - 1 - k] - self.values[k].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Power-law fit `|ã| ≈ C|ν|^{-α}` between `ν_max/2` and `ν_max`,
    /// averaging both sides of the line.
    pub fn tail_fit(&self) -> Option<TailFit> {
        let n = self.len();
        let mid = (n - 1) / 2;
        let i_far = n - 1;
        let i_half = mid + (n - 1 - mid) / 2;
        let mag = |i: usize| 0.5 * (self.values[i].norm() + self.values[n - 1 - i].norm());
        let (m_far, m_half) = (mag(i_far), mag(i_half));
        let (nu_far, nu_half) = (self.nu[i_far], self.nu[i_half]);
        if m_far == 0.0 && m_half == 0.0 {
            return Some(TailFit {
                coefficient: 0.0,
                exponent: f64::INFINITY,
            });
        }
        if m_far == 0.0 || m_half == 0.0 || nu_half <= 0.0 {
            return None;
        }
        let exponent = (m_half / m_far).ln() / (nu_far / nu_half).ln();
        Some(TailFit {
            coefficient: m_far * nu_far.powf(exponent),
            exponent,
        })
    }
}

fn pole_error(sigma: f64, nu: f64) -> Error {
    Error::domain(
        "line_samples",
        format!(
            "ã is not finite at λ = {sigma} + {nu}i: a singularity on the sampling line, \
             so ã is not of Hardy class there; move the line to the right"
        ),
    )
}

/// `|ã(σ+iν)| ≈ coefficient · |ν|^{-exponent}` in the far tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub coefficient: f64,
    pub exponent: f64,
}

impl TailFit {
    /// `∫_{|ν|>ν_max} (C|ν|^{-α})^power dν`, infinite unless `α·power > 1`.
    pub fn tail_integral(&self, nu_max: f64, power: f64) -> f64 {
        if self.coefficient == 0.0 {
            return 0.0;
        }
        let a = self.exponent * power;
        if a <= 1.0 {
            return f64::INFINITY;
        }
        2.0 * self.coefficient.powf(power) * nu_max.powf(1.0 - a) / (a - 1.0)
    }
}

/// Which representation of `F̂` the inversion uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
pub enum JumpMode {
    /// `(1/2π) ∫ ã(λ) e^{λw} dν`. Flag value `eq60`.
    #[default]
    #[serde(rename = "eq60")]
    Exponential,
    /// `(i/π) e^{-w/2} ∫ ã(λ) sin([ν - i(σ+½)]w) dν`. Flag value `eq61`.
    #[serde(rename = "eq61")]
    Sine,
}

impl JumpMode {
    pub fn as_str(self) -> &'static str {
        match self {
            JumpMode::Exponential => "eq60",
            JumpMode::Sine => "eq61",
        }
    }
}

impl std::str::FromStr for JumpMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq60" | "exponential" => Ok(JumpMode::Exponential),
            "eq61" | "sine" => Ok(JumpMode::Sine),
            other => Err(Error::InvalidInput(format!(
                "unknown mode `{other}` (expected eq60 or eq61)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOptions {
    pub mode: JumpMode,
    pub taper: Taper,
    /// Error estimates above this raise a tail-truncation warning.
    pub tolerance: f64,
}

impl Default for JumpOptions {
    fn default() -> Self {
        Self {
            mode: JumpMode::Exponential,
            taper: Taper::default(),
            tolerance: 1e-6,
        }
    }
}

impl JumpOptions {
    pub fn with_mode(mut self, mode: JumpMode) -> Self {
        self.mode = mode;
        self
    }
}

/// A ν-integral with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpValue {
    /// Real part of the integral.
    pub value: f64,
    /// Imaginary part, which vanishes for real jump data.
    pub imag: f64,
    /// Simpson correction plus window sensitivity.
    pub error: f64,
    /// Window sensitivity alone, or for an untapered line the power-law
    /// estimate of the discarded tails.
    pub tail_bound: f64,
    pub warnings: Vec<Warning>,
}

/// Taper weights for the line and for a wider flat part, used to measure
/// how much the answer depends on the roll-off.
fn window_pair(samples: &LineSamples, taper: Taper) -> (Vec<f64>, Option<Vec<f64>>) {
    let nu_max = samples.nu_max();
    let main = samples.nu.iter().map(|&v| taper.weight(v / nu_max)).collect();
    let alt = match taper {
        Taper::None => None,
        Taper::FlatTop { flat } => {
            let wider = Taper::FlatTop {
                flat: (flat + 0.2).min(0.5 * (1.0 + flat)),
            };
            Some(samples.nu.iter().map(|&v| wider.weight(v / nu_max)).collect())
        }
    };
    (main, alt)
}

/// `scale · ∫ integrand dν` on the line, windowed, with diagnostics.
/// `envelope_tail` is the untapered tail estimate to report when no taper
/// is used.
fn line_integral(
    samples: &LineSamples,
    integrand: &[C64],
    scale: f64,
    taper: Taper,
    tolerance: f64,
    envelope_tail: f64,
    what: &str,
) -> Result<JumpValue> {
    let h = samples.step();
    let (main, alt) = window_pair(samples, taper);
    let tapered: Vec<C64> = integrand.iter().zip(&main).map(|(f, w)| f * *w).collect();
    let est = quad::simpson_with_estimate(&tapered, h)?;
    let tail_bound = match alt {
        Some(alt) => {
            let wider: Vec<C64> = integrand.iter().zip(&alt).map(|(f, w)| f * *w).collect();
            (quad::simpson(&wider, h)? - est.value).norm() * scale.abs()
        }
        None => envelope_tail * scale.abs(),
    };
    let value = est.value * scale;
    let error = est.error * scale.abs() + tail_bound;
    let mut warnings = Vec::new();
    if !(error <= tolerance) {
        warnings.push(Warning::new(
            WarningCode::TailTruncation,
            format!(
                "{what}: estimated error {error:.3e} (tail {tail_bound:.3e}) exceeds tolerance \
                 {tolerance:.1e}; widen the ν grid"
            ),
        ));
    }
    Ok(JumpValue {
        value: value.re,
        imag: value.im,
        error,
        tail_bound,
        warnings,
    })
}

/// `e^{i ν_k w}` for every node, by multiplicative stepping re-anchored
/// every 256 nodes.
fn phases(nu: &[f64], w: f64) -> Vec<C64> {
    let h = if nu.len() > 1 { nu[1] - nu[0] } else { 0.0 };
    let step = C64::from_polar(1.0, h * w);
    let mut out = Vec::with_capacity(nu.len());
    let mut cur = C64::new(1.0, 0.0);
    for (k, &v) in nu.iter().enumerate() {
        if k % 256 == 0 {
            cur = C64::from_polar(1.0, v * w);
        }
        out.push(cur);
        cur *= step;
    }
    out
}

/// `F̂(w)` from samples of `ã` on the line, by the exponential
/// Bromwich form or its sine form.
pub fn jump_hat_from_atilde(samples: &LineSamples, w: f64, opts: JumpOptions) -> Result<JumpValue> {
    if !w.is_finite() {
        return Err(Error::domain("jump_hat_from_atilde", format!("w={w} must be finite")));
    }
    let sigma = samples.sigma;
    let ph = phases(&samples.nu, w);
    let envelope = samples
        .tail_fit()
        .map_or(f64::INFINITY, |t| t.tail_integral(samples.nu_max(), 1.0));
    let (integrand, scale, envelope): (Vec<C64>, f64, f64) = match opts.mode {
        JumpMode::Exponential => (
            samples.values.iter().zip(&ph).map(|(a, p)| a * p).collect(),
            (sigma * w).exp() / (2.0 * PI),
            envelope,
        ),
        JumpMode::Sine => {
            // sin(zw) with z = ν - i b, b = σ + ½.
            let b = sigma + 0.5;
            let (grow, shrink) = ((b * w).exp(), (-b * w).exp());
            let integrand = samples
                .values
                .iter()
                .zip(&ph)
                .map(|(a, p)| {
                    let s = (p * grow - p.conj() * shrink) / C64::new(0.0, 2.0);
                    a * s * C64::new(0.0, 1.0)
                })
                .collect();
            (integrand, (-0.5 * w).exp() / PI, envelope * grow.max(shrink) / 2.0)
        }
    };
    line_integral(samples, &integrand, scale, opts.taper, opts.tolerance, envelope, "jump_hat_from_atilde")
}

/// [`jump_hat_from_atilde`] on every point of `w_grid`; warnings are
/// collected once per grid.
pub fn jump_hat_grid(
    samples: &LineSamples,
    w_grid: Vec<f64>,
    opts: JumpOptions,
) -> Result<(GridFunction, Vec<JumpValue>)> {
    let vals: Vec<JumpValue> = w_grid
        .par_iter()
        .map(|&w| jump_hat_from_atilde(samples, w, opts))
        .collect::<Result<_>>()?;
    let g = GridFunction::from_real(CoordKind::W, w_grid, vals.iter().map(|v| v.value).collect())?;
    Ok((g, vals))
}

/// `F(v)` from samples of `ã` by the first-kind Legendre representation
/// `(1/4π) ∫ ã(λ) (2λ+1) P_λ(cosh v) dν`.
pub fn jump_base_from_atilde(samples: &LineSamples, v: f64, opts: JumpOptions) -> Result<JumpValue> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain("jump_base_from_atilde", format!("v={v} must be positive")));
    }
    let n = samples.len();
    let mid = (n - 1) / 2;
    let h = samples.step();
    // P_{σ-iν} = conj P_{σ+iν} for real v, so only ν >= 0 is computed.
    let half = specfun::legendre_p_deg_line(samples.sigma, 0.0, h, n - mid, v)?;
    let p_at = |k: usize| if k >= mid { half[k - mid] } else { half[mid - k].conj() };
    let integrand: Vec<C64> = (0..n)
        .map(|k| {
            let lam = C64::new(samples.sigma, samples.nu[k]);
            samples.values[k] * (lam * 2.0 + 1.0) * p_at(k)
        })
        .collect();
    // |P_λ(cosh v)| grows at most like e^{(σ+½)v}; h adds one power of ν.
    let envelope = samples.tail_fit().map_or(f64::INFINITY, |t| {
        TailFit {
            coefficient: 2.0 * t.coefficient,
            exponent: t.exponent - 1.0,
        }
        .tail_integral(samples.nu_max(), 1.0)
            * ((samples.sigma + 0.5) * v).exp()
    });
    line_integral(
        samples,
        &integrand,
        1.0 / (4.0 * PI),
        opts.taper,
        opts.tolerance,
        envelope,
        "jump_base_from_atilde",
    )
}

pub fn jump_base_grid(
    samples: &LineSamples,
    v_grid: Vec<f64>,
    opts: JumpOptions,
) -> Result<(GridFunction, Vec<JumpValue>)> {
    let vals: Vec<JumpValue> = v_grid
        .par_iter()
        .map(|&v| jump_base_from_atilde(samples, v, opts))
        .collect::<Result<_>>()?;
    let g = GridFunction::from_real(CoordKind::V, v_grid, vals.iter().map(|v| v.value).collect())?;
    Ok((g, vals))
}

/// Horocyclic jump `F̂` on `w >= 0` together with the base jump `F`.
#[derive(Debug, Clone)]
pub struct JumpFunction {
    pub hat: GridFunction,
    pub base: GridFunction,
}

impl JumpFunction {
    pub fn from_atilde(
        samples: &LineSamples,
        w_grid: Vec<f64>,
        v_grid: Vec<f64>,
        opts: JumpOptions,
    ) -> Result<(Self, Vec<Warning>)> {
        let (hat, hv) = jump_hat_grid(samples, w_grid, opts)?;
        let (base, bv) = jump_base_grid(samples, v_grid, opts)?;
        let warnings = collapse_warnings(hv.iter().chain(&bv));
        Ok((Self { hat, base }, warnings))
    }
}

/// One warning per code, carrying the worst error seen.
pub fn collapse_warnings<'a>(vals: impl Iterator<Item = &'a JumpValue>) -> Vec<Warning> {
    let mut worst: Option<(f64, Warning)> = None;
    for v in vals {
        for w in &v.warnings {
            if worst.as_ref().is_none_or(|(e, _)| v.error > *e) {
                worst = Some((v.error, w.clone()));
            }
        }
    }
    worst.map(|(_, w)| w).into_iter().collect()
}

/// Upper integration limit where `|g|` has decayed below `1e-16` of its
/// running maximum, checking in steps of 4 up to 400.
fn decay_limit(op: &'static str, g: impl Fn(f64) -> f64) -> Result<f64> {
    let mut peak: f64 = 0.0;
    let mut x = 0.0;
    while x < 400.0 {
        x += 4.0;
        let m = g(x);
        if !m.is_finite() {
            return Err(Error::Divergence {
                op,
                detail: format!("integrand is not finite at {x}"),
            });
        }
        peak = peak.max(m);
        let next = g(x + 4.0);
        if (m * x <= 1e-16 * peak || peak == 0.0) && next <= m {
            return Ok(x);
        }
    }
    Err(Error::Divergence {
        op,
        detail: "integrand has not decayed by 400; Re λ is too small for this input".into(),
    })
}

fn require_half_plane(op: &'static str, lambda: ComplexDegree) -> Result<()> {
    if !(lambda.sigma > -0.5) {
        return Err(Error::domain(op, format!("Re λ={} must exceed -1/2", lambda.sigma)));
    }
    Ok(())
}

/// Tail check on sampled integrands: the magnitude at the last node times
/// the observed decay length.
fn sampled_tail(op: &'static str, grid: &[f64], g: impl Fn(f64) -> f64, total: f64) -> Result<f64> {
    let n = grid.len();
    let (x1, x0) = (grid[n - 1], grid[n.saturating_sub(11).min(n - 2)]);
    let (g1, g0) = (g(x1), g(x0));
    if g1 == 0.0 {
        return Ok(0.0);
    }
    let rate = (g0 / g1).ln() / (x1 - x0);
    let tail = if rate > 0.0 { g1 / rate } else { f64::INFINITY };
    if !(tail <= 1e-8 * (1.0 + total.abs())) {
        return Err(Error::Divergence {
            op,
            detail: format!(
                "integrand at the grid end {x1} is {g1:.3e}; estimated tail {tail:.3e} is not negligible"
            ),
        });
    }
    Ok(tail)
}

fn four_point() -> GaussLegendre {
    GaussLegendre::new(4)
}

/// `ã(λ) = ∫_0^∞ F̂(w) e^{-λw} dw` from a sampled horocyclic jump.
pub fn atilde_from_jump(fhat: &GridFunction, lambda: ComplexDegree) -> Result<C64> {
    const OP: &str = "atilde_from_jump";
    require_half_plane(OP, lambda)?;
    if fhat.kind() != CoordKind::W {
        return Err(Error::InvalidInput(format!("{OP} expects a w grid, got {}", fhat.kind())));
    }
    if !fhat.contains(0.0) {
        return Err(Error::domain(OP, format!("grid must start at or before w=0, got {}", fhat.start())));
    }
    let lam = lambda.lambda();
    let mut nodes = vec![0.0];
    nodes.extend(fhat.grid().iter().copied().filter(|&w| w > 0.0));
    // split grid intervals so each spans about a third of a period of e^{iνw}
    let mut breaks = vec![0.0];
    for p in nodes.windows(2) {
        let k = ((lambda.nu.abs() * (p[1] - p[0])) / 2.0).ceil().max(1.0) as usize;
        breaks.extend((1..=k).map(|j| p[0] + (p[1] - p[0]) * j as f64 / k as f64));
    }
    let value: C64 = four_point().integrate_breaks(&breaks, |w| fhat.eval_clamped(w) * (-lam * w).exp());
    sampled_tail(OP, &breaks, |w| (fhat.eval_clamped(w) * (-lam * w).exp()).norm(), value.norm())?;
    Ok(value)
}

/// `ã(λ) = ∫_0^∞ F̂(w) e^{-λw} dw` for a closed-form `F̂`.
pub fn atilde_from_jump_fn(fhat: impl Fn(f64) -> f64, lambda: ComplexDegree) -> Result<C64> {
    const OP: &str = "atilde_from_jump";
    require_half_plane(OP, lambda)?;
    let lam = lambda.lambda();
    let upper = decay_limit(OP, |w| (fhat(w) * (-lambda.sigma * w).exp()).abs())?;
    let panels = graded_breaks(0.0, upper, panel_width(0.5, lambda), 1.0);
    Ok(gl16().integrate_breaks(&panels, |w| (-lam * w).exp() * fhat(w)))
}

/// `ã(λ) = ∫_0^∞ e^{-(λ+½)w} (𝒜F)(w) dw` with the Abel transform of the
/// base jump computed by [`abel::abel_forward`].
pub fn atilde_from_base_jump_fn(f_of_v: impl Fn(f64) -> f64 + Sync, lambda: ComplexDegree) -> Result<C64> {
    const OP: &str = "atilde_from_jump";
    require_half_plane(OP, lambda)?;
    let lam = lambda.lambda() + 0.5;
    let af = |w: f64| if w > 0.0 { abel::abel_forward(&f_of_v, w) } else { Ok(0.0) };
    let upper = decay_limit(OP, |w| {
        af(w).map_or(f64::INFINITY, |a| (a * (-(lambda.sigma + 0.5) * w).exp()).abs())
    })?;
    integrate_on_unit_panels(upper, lambda, |w| Ok(af(w)? * (-lam * w).exp()))
}

/// Grid form of [`atilde_from_base_jump_fn`]; the base jump must be real
/// and the grid long enough for the tail to be negligible.
pub fn atilde_from_base_jump(f: &GridFunction, lambda: ComplexDegree) -> Result<C64> {
    const OP: &str = "atilde_from_jump";
    require_half_plane(OP, lambda)?;
    let end = require_real_base(OP, f)?;
    let lam = lambda.lambda() + 0.5;
    let af = |w: f64| if w > 0.0 { abel::abel_forward_grid(f, w) } else { Ok(0.0) };
    let value = integrate_on_unit_panels(end, lambda, |w| Ok(af(w)? * (-lam * w).exp()))?;
    let grid = crate::grid::linspace(0.0, end, 40);
    sampled_tail(
        OP,
        &grid,
        |w| af(w).map_or(f64::INFINITY, |a| (a * (-(lambda.sigma + 0.5) * w).exp()).abs()),
        value.norm(),
    )?;
    Ok(value)
}

fn require_real_base(op: &'static str, f: &GridFunction) -> Result<f64> {
    if f.kind() != CoordKind::V {
        return Err(Error::InvalidInput(format!("{op} expects a v grid, got {}", f.kind())));
    }
    if !f.contains(0.0) {
        return Err(Error::domain(op, format!("grid must start at v=0, got {}", f.start())));
    }
    let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if f.max_imag() > 1e-12 * (1.0 + scale) {
        return Err(Error::InvalidInput(format!("{op} expects a real base jump")));
    }
    Ok(f.end())
}

/// Panel width `base`, shrunk so a panel spans at most about one period of
/// `e^{iνw}`.
fn panel_width(base: f64, lambda: ComplexDegree) -> f64 {
    base.min(6.0 / lambda.nu.abs())
}

fn integrate_on_unit_panels(
    upper: f64,
    lambda: ComplexDegree,
    g: impl Fn(f64) -> Result<C64> + Sync,
) -> Result<C64> {
    let breaks = graded_breaks(0.0, upper, panel_width(0.25, lambda), 1.0);
    let rule = gl16();
    let parts: Vec<C64> = breaks
        .par_windows(2)
        .map(|p| {
            let (a, b) = (p[0], p[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            rule.nodes()
                .iter()
                .zip(rule.weights())
                .map(|(x, wt)| Ok(g(mid + half * x)? * (wt * half)))
                .sum::<Result<C64>>()
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().sum())
}

/// `ã(λ) = 2 ∫_0^∞ F(v) Q_λ(cosh v) sinh v dv`.
pub fn atilde_via_q_fn(f_of_v: impl Fn(f64) -> f64 + Sync, lambda: ComplexDegree) -> Result<C64> {
    const OP: &str = "atilde_via_q";
    require_half_plane(OP, lambda)?;
    let f0 = f_of_v(0.0);
    if !f0.is_finite() {
        return Err(Error::domain(OP, "F is not regular at v=0; the log endpoint is not integrable"));
    }
    let upper = decay_limit(OP, |v| {
        (f_of_v(v) * (-(lambda.sigma) * v).exp() * (1.0 + v)).abs()
    })?;
    via_q_on(&f_of_v, lambda, upper)
}

/// Grid form of [`atilde_via_q_fn`].
pub fn atilde_via_q(f: &GridFunction, lambda: ComplexDegree) -> Result<C64> {
    const OP: &str = "atilde_via_q";
    require_half_plane(OP, lambda)?;
    let end = require_real_base(OP, f)?;
    let g = |v: f64| f.eval_clamped(v).re;
    let value = via_q_on(&g, lambda, end)?;
    let grid = crate::grid::linspace(0.0, end, 40);
    sampled_tail(
        OP,
        &grid[1..],
        |v| {
            specfun::legendre_q(lambda, v).map_or(f64::INFINITY, |q| (2.0 * g(v) * v.sinh() * q).norm())
        },
        value.norm(),
    )?;
    Ok(value)
}

fn via_q_on(f: &(impl Fn(f64) -> f64 + Sync), lambda: ComplexDegree, upper: f64) -> Result<C64> {
    const OP: &str = "atilde_via_q";
    // v log v at the origin: geometric grading towards 0, gl16 vs gl32.
    let mut breaks = quad::capped_breaks(0.0, upper.min(1.0), 1e-6, panel_width(0.5, lambda));
    if upper > 1.0 {
        breaks.pop();
        breaks.extend(graded_breaks(1.0, upper, panel_width(0.5, lambda), 1.0));
    }
    let integrand = |v: f64| -> Result<C64> {
        if v == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(specfun::legendre_q(lambda, v)? * (2.0 * f(v) * v.sinh()))
    };
    let run = |rule: &GaussLegendre| -> Result<C64> {
        let parts: Vec<C64> = breaks
            .par_windows(2)
            .map(|p| {
                let half = 0.5 * (p[1] - p[0]);
                let mid = 0.5 * (p[0] + p[1]);
                rule.nodes()
                    .iter()
                    .zip(rule.weights())
                    .map(|(x, wt)| Ok(integrand(mid + half * x)? * (wt * half)))
                    .sum::<Result<C64>>()
            })
            .collect::<Result<_>>()?;
        Ok(parts.into_iter().sum())
    };
    let fine = run(quad::gl32())?;
    let coarse = run(gl16())?;
    let residual = (fine - coarse).norm();
    if residual > 1e-7 * (1.0 + fine.norm()) {
        return Err(Error::NonConvergence { op: OP, residual });
    }
    Ok(fine)
}

/// Both sides of the Plancherel identity on the line `Re λ = σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlancherelReport {
    pub sigma: f64,
    /// `∫ |ã(σ+iν)|² dν`, including the fitted tails.
    pub lhs: f64,
    /// `2π ∫_0^∞ |F̂(w) e^{-σw}|² dw`.
    pub rhs: f64,
    pub lhs_tail: f64,
    pub residual: f64,
}

pub fn plancherel_residual(samples: &LineSamples, fhat: &GridFunction, sigma: f64) -> Result<PlancherelReport> {
    const OP: &str = "plancherel_residual";
    if (sigma - samples.sigma).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "{OP}: σ={sigma} differs from the sampling line σ={}",
            samples.sigma
        )));
    }
    if fhat.kind() != CoordKind::W {
        return Err(Error::InvalidInput(format!("{OP} expects a w grid, got {}", fhat.kind())));
    }
    let sq: Vec<f64> = samples.values.iter().map(|v| v.norm_sqr()).collect();
    let lhs_tail = samples
        .tail_fit()
        .map_or(f64::INFINITY, |t| t.tail_integral(samples.nu_max(), 2.0));
    let lhs = quad::simpson(&sq, samples.step())? + lhs_tail;
    let w0 = fhat.start().max(0.0);
    let mut breaks = vec![w0];
    breaks.extend(fhat.grid().iter().copied().filter(|&w| w > w0));
    let rhs = if breaks.len() < 2 {
        0.0
    } else {
        let g = |w: f64| (fhat.eval_clamped(w) * (-sigma * w).exp()).norm_sqr();
        let r: f64 = four_point().integrate_breaks(&breaks, g);
        sampled_tail(OP, &breaks, g, r)?;
        2.0 * PI * r
    };
    Ok(PlancherelReport {
        sigma,
        lhs,
        rhs,
        lhs_tail,
        residual: (lhs - rhs).abs(),
    })
}

/// The L¹ norm `(1/2π) ∫ |ã(σ+iν)| dν`, or `None` when the tails are not
/// integrable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Norm {
    pub value: Option<f64>,
    pub tail: f64,
    pub decay_exponent: f64,
}

pub fn l1_norm(samples: &LineSamples) -> Result<L1Norm> {
    let mags: Vec<f64> = samples.values.iter().map(|v| v.norm()).collect();
    let fit = samples.tail_fit();
    let exponent = fit.map_or(0.0, |t| t.exponent);
    let body = quad::simpson(&mags, samples.step())?;
    let (value, tail) = match fit {
        Some(t) if t.coefficient == 0.0 => (Some(body / (2.0 * PI)), 0.0),
        Some(t) if t.exponent > L1_EXPONENT_FLOOR => {
            let tail = t.tail_integral(samples.nu_max(), 1.0);
            (Some((body + tail) / (2.0 * PI)), tail / (2.0 * PI))
        }
        _ => (None, f64::INFINITY),
    };
    Ok(L1Norm {
        value,
        tail,
        decay_exponent: exponent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MehlerReport {
    pub v: f64,
    /// Base-jump integral restricted to the even part of `ã(-½+iν)`.
    pub even_contribution: f64,
    pub odd_contribution: f64,
    /// `max |P_{-½+iν}(cosh v) - (2/π) tan(π(-½+iν)) Q^{odd}|` over the
    /// probe points.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub sigma: f64,
    pub l1: L1Norm,
    pub applicable: bool,
    /// Largest `|F̂(w)| e^{-σw} / ‖ã_σ‖₁` over the grid (w >= 0).
    pub max_ratio: f64,
    pub holds: bool,
    pub violations: Vec<f64>,
    pub mehler: Option<MehlerReport>,
    pub warnings: Vec<Warning>,
}

/// Checks `|F̂(w)| <= ‖ã_σ‖₁ e^{σw}` on the grid of `fhat`, and at
/// `σ = -1/2` that only the odd part of `ã` feeds the base-jump integral.
pub fn bound_and_mehler_check(samples: &LineSamples, fhat: &GridFunction) -> Result<BoundReport> {
    let sigma = samples.sigma;
    let l1 = l1_norm(samples)?;
    let mut warnings = Vec::new();
    let mut violations = Vec::new();
    let mut max_ratio: f64 = 0.0;
    let all_zero = fhat.values().iter().all(|v| v.norm() == 0.0);
    let applicable = l1.value.is_some();
    match l1.value {
        _ if all_zero => {}
        None => warnings.push(Warning::new(
            WarningCode::BoundNotApplicable,
            format!(
                "ã is not integrable on Re λ = {sigma} (fitted decay |ν|^-{:.3}); the L¹ bound does not apply",
                l1.decay_exponent
            ),
        )),
        Some(norm) => {
            for (&w, v) in fhat.grid().iter().zip(fhat.values()) {
                if w < 0.0 {
                    continue;
                }
                let bound = norm * (sigma * w).exp();
                let ratio = if bound > 0.0 { v.norm() / bound } else { f64::INFINITY };
                max_ratio = max_ratio.max(ratio);
                if v.norm() > bound * (1.0 + 1e-9) + 1e-300 {
                    violations.push(w);
                }
            }
        }
    }
    let holds = all_zero || (applicable && violations.is_empty());
    let mehler = if (sigma + 0.5).abs() < 1e-12 {
        Some(mehler_check(samples, 1.0)?)
    } else {
        None
    };
    Ok(BoundReport {
        sigma,
        l1,
        applicable,
        max_ratio,
        holds,
        violations,
        mehler,
        warnings,
    })
}

fn mehler_check(samples: &LineSamples, v: f64) -> Result<MehlerReport> {
    let n = samples.len();
    let even: Vec<C64> = (0..n)
        .map(|k| (samples.values[k] + samples.values[n - 1 - k]) * 0.5)
        .collect();
    let odd: Vec<C64> = (0..n)
        .map(|k| (samples.values[k] - samples.values[n - 1 - k]) * 0.5)
        .collect();
    let opts = JumpOptions::default();
    let part = |vals: Vec<C64>| -> Result<f64> {
        let s = LineSamples {
            sigma: samples.sigma,
            nu: samples.nu.clone(),
            values: vals,
        };
        Ok(jump_base_from_atilde(&s, v, opts)?.value)
    };
    let even_contribution = part(even)?;
    let odd_contribution = part(odd)?;
    let mut identity_residual: f64 = 0.0;
    for &nu in &[0.5, 1.0, 2.0] {
        for &vv in &[0.5, 1.0, 2.0] {
            let p = specfun::legendre_p_deg(ComplexDegree::new(-0.5, nu), vv)?;
            let q = specfun::legendre_q_split(nu, vv)?;
            let t = (C64::new(-0.5, nu) * PI).tan();
            identity_residual = identity_residual.max((p - t * q.odd * (2.0 / PI)).norm());
        }
    }
    Ok(MehlerReport {
        v,
        even_contribution,
        odd_contribution,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn inv1(l: C64) -> C64 {
        C64::new(1.0, 0.0) / (l + 1.0)
    }

    fn inv3(l: C64) -> C64 {
        let d = l + 1.0;
        C64::new(1.0, 0.0) / (d * d * d)
    }

    #[test]
    fn line_validation() {
        assert!(LineSamples::new(0.0, vec![-1.0, 0.0, 1.0], vec![C64::new(1.0, 0.0); 3]).is_err());
        let nu = vec![-2.0, -1.0, 0.0, 1.0, 2.5];
        assert!(LineSamples::new(0.0, nu, vec![C64::new(1.0, 0.0); 5]).is_err());
        assert!(LineSamples::from_fn(-0.6, 10.0, 0.5, inv1).is_err());
        // F ≡ 1 has ã = 2/(λ(λ+1)), singular at λ = 0 on the σ = 0 line.
        let pole = LineSamples::from_fn(0.0, 10.0, 0.5, |l| C64::new(2.0, 0.0) / (l * (l + 1.0)));
        assert!(matches!(pole, Err(Error::Domain { .. })));
        let s = LineSamples::from_fn(0.0, 10.0, 0.5, inv3).unwrap();
        assert!(s.conjugate_asymmetry() < 1e-15);
        assert_eq!(s.len(), 41);
    }

    #[test]
    fn inverse_of_simple_pole() {
        let s = LineSamples::default_line(0.0, inv1).unwrap();
        let v = jump_hat_from_atilde(&s, 1.0, JumpOptions::default()).unwrap();
        assert!((v.value - (-1.0f64).exp()).abs() < 1e-4, "{v:?}");
    }

    #[test]
    fn inverse_of_triple_pole() {
        let s0 = LineSamples::default_line(0.0, inv3).unwrap();
        let s1 = LineSamples::default_line(1.0, inv3).unwrap();
        for w in [0.1f64, 0.5, 1.0, 2.0, 4.0, 6.0] {
            let exact: f64 = 0.5 * w * w * (-w as f64).exp();
            for s in [&s0, &s1] {
                let a = jump_hat_from_atilde(s, w, JumpOptions::default()).unwrap();
                let b = jump_hat_from_atilde(s, w, JumpOptions::default().with_mode(JumpMode::Sine)).unwrap();
                assert!((a.value - exact).abs() < 1e-5, "w={w} σ={} {a:?}", s.sigma);
                assert!((a.value - b.value).abs() < 1e-6, "w={w}");
                assert!(a.imag.abs() < 1e-10);
            }
        }
        let c = jump_hat_from_atilde(&s0, -1.0, JumpOptions::default()).unwrap();
        assert!(c.value.abs() < 1e-4, "{c:?}");
        let zero = LineSamples::default_line(0.0, |_| C64::new(0.0, 0.0)).unwrap();
        assert_eq!(jump_hat_from_atilde(&zero, 2.0, JumpOptions::default()).unwrap().value, 0.0);
    }

    #[test]
    fn laplace_of_sampled_jump() {
        let grid = crate::grid::uniform(0.0, 40.0, 0.01).unwrap();
        let f = GridFunction::from_fn(CoordKind::W, grid.clone(), |w| C64::new((-w).exp(), 0.0)).unwrap();
        let a0 = atilde_from_jump(&f, ComplexDegree::real(0.0)).unwrap();
        let a1 = atilde_from_jump(&f, ComplexDegree::real(1.0)).unwrap();
        assert!((a0 - 1.0).norm() < 1e-9, "{a0}");
        assert!((a1 - 0.5).norm() < 1e-9, "{a1}");
        let short = GridFunction::from_fn(CoordKind::W, crate::grid::uniform(0.0, 5.0, 0.01).unwrap(), |w| {
            C64::new((-w).exp(), 0.0)
        })
        .unwrap();
        assert!(matches!(
            atilde_from_jump(&short, ComplexDegree::real(0.0)),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn transform_pair_roundtrip() {
        let s = LineSamples::default_line(0.0, inv3).unwrap();
        let grid = crate::grid::uniform(0.0, 45.0, 0.01).unwrap();
        let (fhat, _) = jump_hat_grid(&s, grid, JumpOptions::default()).unwrap();
        for nu in [0.0, 0.5, 2.0, -3.0] {
            let lam = ComplexDegree::new(0.5, nu);
            let got = atilde_from_jump(&fhat, lam).unwrap();
            assert!((got - inv3(lam.lambda())).norm() < 1e-4, "ν={nu}: {got}");
        }
    }

    #[test]
    fn spherical_laplace_paths_agree() {
        for lam in [
            ComplexDegree::real(1.0),
            ComplexDegree::real(2.0),
            ComplexDegree::new(0.5, 2.0),
        ] {
            let l = lam.lambda();
            let closed = C64::new(2.0, 0.0) / (l * (l + 1.0));
            let a = atilde_from_base_jump_fn(|_| 1.0, lam).unwrap();
            let b = atilde_via_q_fn(|_| 1.0, lam).unwrap();
            assert!((a - closed).norm() < 1e-5, "{lam:?}: {a} vs {closed}");
            assert!((b - closed).norm() < 1e-5, "{lam:?}: {b} vs {closed}");
            let g = |v: f64| (-v * v).exp();
            let a = atilde_from_base_jump_fn(g, lam).unwrap();
            let b = atilde_via_q_fn(g, lam).unwrap();
            assert!((a - b).norm() < 1e-5, "{lam:?}: {a} vs {b}");
        }
    }

    #[test]
    fn laplace_paths_hold_at_high_frequency() {
        let lam = ComplexDegree::new(0.5, 20.0);
        let l = lam.lambda();
        let closed = C64::new(2.0, 0.0) / (l * (l + 1.0));
        let a = atilde_from_base_jump_fn(|_| 1.0, lam).unwrap();
        let b = atilde_via_q_fn(|_| 1.0, lam).unwrap();
        assert!((a - closed).norm() < 1e-9, "{a} vs {closed}");
        assert!((b - closed).norm() < 1e-9, "{b} vs {closed}");
        for nu in [150.0, -200.0] {
            let l = C64::new(0.5, nu);
            let c = atilde_from_jump_fn(|w| (-w).exp(), l.into()).unwrap();
            assert!((c - 1.0 / (l + 1.0)).norm() < 1e-9, "ν={nu}: {c}");
        }
    }

    #[test]
    fn gaussian_laplace_against_oracle() {
        // ã = 2 ∫ F(v) sinh v ∫_v^∞ e^{-(λ+½)w}/√(2(cosh w - cosh v)) dw dv
        // with the order swapped: ∫_0^∞ e^{-(λ+½)w} 𝒜F(w) dw, 𝒜F by tanh-sinh.
        let lam = ComplexDegree::real(1.0);
        let af = |w: f64| {
            oracle::tanh_sinh_dist(0.0, w, |v, _, d| {
                let den = (4.0 * (0.5 * (w + v)).sinh() * (0.5 * d).sinh()).sqrt();
                C64::new(2.0 * (-v * v).exp() * v.sinh() / den, 0.0)
            })
        };
        let want = oracle::exp_sinh(|w| af(w) * (-1.5 * w).exp());
        let got = atilde_via_q_fn(|v| (-v * v).exp(), lam).unwrap();
        assert!((got - want).norm() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn sampled_base_jump_paths() {
        let grid = crate::grid::uniform(0.0, 4.0, 0.01).unwrap();
        let f = GridFunction::from_real(CoordKind::V, grid.clone(), vec![1.0; grid.len()]).unwrap();
        assert!(matches!(
            atilde_via_q(&f, ComplexDegree::real(1.0)),
            Err(Error::Divergence { .. })
        ));
        let grid = crate::grid::uniform(0.0, 8.0, 0.01).unwrap();
        let g = GridFunction::from_fn(CoordKind::V, grid, |v| C64::new((-v * v).exp(), 0.0)).unwrap();
        let lam = ComplexDegree::real(2.0);
        let a = atilde_via_q(&g, lam).unwrap();
        let b = atilde_from_base_jump(&g, lam).unwrap();
        let c = atilde_via_q_fn(|v| (-v * v).exp(), lam).unwrap();
        assert!((a - c).norm() < 1e-7 && (b - c).norm() < 1e-6, "{a} {b} {c}");
        let zero = GridFunction::from_real(CoordKind::V, vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        assert_eq!(atilde_via_q(&zero, lam).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn plancherel_on_two_lines() {
        let grid = crate::grid::uniform(0.0, 40.0, 0.01).unwrap();
        let f = GridFunction::from_fn(CoordKind::W, grid, |w| C64::new((-w).exp(), 0.0)).unwrap();
        for sigma in [0.0, 1.0] {
            let s = LineSamples::default_line(sigma, inv1).unwrap();
            let r = plancherel_residual(&s, &f, sigma).unwrap();
            let exact = PI / (1.0 + sigma);
            assert!(r.residual < 1e-4, "{r:?}");
            assert!((r.lhs - exact).abs() < 1e-4 && (r.rhs - exact).abs() < 1e-4, "{r:?}");
        }
        let zs = LineSamples::default_line(0.0, |_| C64::new(0.0, 0.0)).unwrap();
        let zf = GridFunction::from_real(CoordKind::W, vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        assert_eq!(plancherel_residual(&zs, &zf, 0.0).unwrap().residual, 0.0);
    }

    #[test]
    fn l1_bound_report() {
        let grid = crate::grid::uniform(0.0, 5.0, 0.05).unwrap();
        let s1 = LineSamples::default_line(0.0, inv1).unwrap();
        let f1 = GridFunction::from_fn(CoordKind::W, grid.clone(), |w| C64::new((-w).exp(), 0.0)).unwrap();
        let r = bound_and_mehler_check(&s1, &f1).unwrap();
        assert!(!r.applicable && !r.holds);
        assert_eq!(r.warnings[0].code, WarningCode::BoundNotApplicable);

        let s3 = LineSamples::default_line(0.0, inv3).unwrap();
        let f3 = GridFunction::from_fn(CoordKind::W, grid.clone(), |w| C64::new(0.5 * w * w * (-w).exp(), 0.0)).unwrap();
        let r = bound_and_mehler_check(&s3, &f3).unwrap();
        assert!(r.applicable && r.holds, "{r:?}");
        // (1/2π) ∫ (1+ν²)^{-3/2} dν = 1/π
        assert!((r.l1.value.unwrap() - 1.0 / PI).abs() < 1e-6);

        let zero = GridFunction::from_real(CoordKind::W, grid.clone(), vec![0.0; grid.len()]).unwrap();
        assert!(bound_and_mehler_check(&s1, &zero).unwrap().holds);
    }

    #[test]
    fn mehler_line_uses_only_odd_part() {
        let s = LineSamples::from_fn(-0.5, 60.0, 0.05, |l| inv3(l + 0.5)).unwrap();
        let grid = crate::grid::uniform(0.0, 5.0, 0.05).unwrap();
        let f = GridFunction::from_fn(CoordKind::W, grid, |w| C64::new(0.5 * w * w * (-w).exp(), 0.0)).unwrap();
        let r = bound_and_mehler_check(&s, &f).unwrap();
        let m = r.mehler.unwrap();
        assert!(m.even_contribution.abs() < 1e-12 * (1.0 + m.odd_contribution.abs()), "{m:?}");
        assert!(m.identity_residual < 1e-6, "{m:?}");
    }

    #[test]
    fn base_jump_matches_inverse_abel_of_hat() {
        let s = LineSamples::default_line(0.0, inv3).unwrap();
        let grid = crate::grid::uniform(0.0, 3.0, 0.005).unwrap();
        let (fhat, _) = jump_hat_grid(&s, grid, JumpOptions::default()).unwrap();
        let v = 1.0;
        let path47 = abel::abel_inverse(&fhat, v).unwrap().value.re;
        let path59 = jump_base_from_atilde(&s, v, JumpOptions::default()).unwrap();
        assert!((path47 - path59.value).abs() < 1e-4, "{path47} vs {path59:?}");
        // closed-form F̂ through the same inverse
        let exact = abel::abel_inverse_hyperbolic(|w| C64::new(0.5 * w * w * (-w).exp(), 0.0), v)
            .unwrap()
            .value
            .re;
        assert!((exact - path59.value).abs() < 1e-4, "{exact} vs {path59:?}");
        let doubled = jump_base_from_atilde(&s.scaled(2.0), v, JumpOptions::default()).unwrap();
        assert!((doubled.value - 2.0 * path59.value).abs() < 1e-14);
        assert!(jump_base_from_atilde(&s, 0.0, JumpOptions::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn inverse_is_linear(k in -3.0f64..3.0, w in 0.2f64..5.0) {
            let s = LineSamples::from_fn(0.0, 100.0, 0.05, inv3).unwrap();
            let a = jump_hat_from_atilde(&s, w, JumpOptions::default()).unwrap().value;
            let b = jump_hat_from_atilde(&s.scaled(k), w, JumpOptions::default()).unwrap().value;
            prop_assert!((b - k * a).abs() < 1e-14 * (1.0 + a.abs() * k.abs()));
        }

        #[test]
        fn real_data_gives_conjugate_symmetric_lines(sigma in 0.0f64..2.0) {
            let s = LineSamples::from_fn(sigma, 20.0, 0.1, inv3).unwrap();
            prop_assert!(s.conjugate_asymmetry() < 1e-15);
        }
    }
}
