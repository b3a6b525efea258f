use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::grid::{CoordKind, GridFunction};
use crate::jump::{self, JumpOptions, LineSamples};
use crate::moments::{self, HausdorffReport};
use crate::reconstruct;
use crate::specfun::{self, ComplexDegree};
use crate::{abel, io, series, verify, C64};

use super::config::{GridSpec, RunConfig};
use super::report::{Recorder, ReportedError, RunReport};
use super::{fixtures, AbelOp, Command, EvalFunction, JumpOp, SeriesOp, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};

pub(super) fn run(
    cmd: &Command,
    cfg: &RunConfig,
    echo: Vec<String>,
    warnings: Vec<Warning>,
    start: Instant,
) -> RunReport {
    let mut rec = Recorder::new(cfg.out.clone());
    rec.warn(warnings);
    let outcome = dispatch(cmd, cfg, &mut rec);
    let (error, exit_code) = match outcome {
        Ok(()) => (None, if rec.failed { EXIT_NUMERIC } else { EXIT_OK }),
        Err(e) => {
            let code = if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERIC };
            (
                Some(ReportedError {
                    code: e.code(),
                    message: e.to_string(),
                }),
                code,
            )
        }
    };
    RunReport {
        command: echo,
        config: cfg.resolved.clone(),
        config_hash: cfg.hash(),
        residuals: rec.residuals,
        warnings: rec.warnings,
        error,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs: rec.outputs,
        exit_code,
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    match cmd {
        Command::CheckHausdorff => check_hausdorff(cfg, rec),
        Command::Series { op } => match op {
            SeriesOp::Synth => series_synth(cfg, rec),
            SeriesOp::Analyze => series_analyze(cfg, rec),
            SeriesOp::Dualize => series_dualize(cfg, rec),
        },
        Command::Abel { op } => match op {
            AbelOp::Forward => abel_forward(cfg, rec, false),
            AbelOp::Radon => abel_forward(cfg, rec, true),
            AbelOp::Inverse => abel_inverse(cfg, rec),
        },
        Command::Jump { op } => match op {
            JumpOp::Forward => jump_forward(cfg, rec),
            JumpOp::Inverse => jump_inverse(cfg, rec),
            JumpOp::Plancherel => jump_plancherel(cfg, rec),
            JumpOp::Check => jump_check(cfg, rec),
        },
        Command::Reconstruct => reconstruct(cfg, rec),
        Command::Eval { function } => eval(*function, cfg, rec),
        Command::Verify { criterion } => run_verify(*criterion, rec),
        Command::Fixture { name } => fixtures::emit(name, cfg.sigma, cfg.nu_max, cfg.dnu, rec),
    }
}

fn coefficients(cfg: &RunConfig) -> Result<moments::CoefficientSequence> {
    io::read_coefficients(cfg.coeffs()?, cfg.p, cfg.epsilon)
}

fn input_grid(cfg: &RunConfig) -> Result<GridFunction> {
    io::read_grid(cfg.input()?, cfg.kind)
}

fn expect_kind(f: &GridFunction, kinds: &[CoordKind], what: &str) -> Result<()> {
    if kinds.contains(&f.kind()) {
        return Ok(());
    }
    Err(Error::InvalidInput(format!(
        "{what} expects an input grid in {}, got {}",
        kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(" or "),
        f.kind()
    )))
}

fn real_grid(kind: CoordKind, x: Vec<f64>, y: Vec<f64>) -> Result<GridFunction> {
    GridFunction::from_real(kind, x, y)
}

#[derive(Serialize)]
struct HausdorffOut<'a> {
    #[serde(flatten)]
    report: &'a HausdorffReport,
    n_max: usize,
    first_violation: Option<usize>,
}

fn check_hausdorff(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let seq = coefficients(cfg)?;
    let r = moments::hausdorff_check(&seq, cfg.bound)?;
    rec.residual("sup", r.sup);
    rec.json(
        "hausdorff.json",
        &HausdorffOut {
            report: &r,
            n_max: seq.n_max(),
            first_violation: r.first_violation(),
        },
    )
}

fn series_synth(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let seq = coefficients(cfg)?;
    rec.warn(series::summability_warning(&seq, 2.0));
    let us = cfg.grid_or(GridSpec::new(0.0, PI, PI / 314.0))?;
    let mut values = Vec::with_capacity(us.len());
    let mut tail: f64 = 0.0;
    for &u in &us {
        let s = series::eval_legendre_series(&seq, u.cos(), cfg.n_trunc)?;
        tail = tail.max(s.tail_bound);
        values.push(s.value);
    }
    rec.residual("tail_bound", tail);
    rec.text("synth.csv", &io::grid_csv(&real_grid(CoordKind::U, us, values)?))
}

fn series_analyze(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let f = input_grid(cfg)?;
    expect_kind(&f, &[CoordKind::U], "series analyze")?;
    let est = series::coefficients_from_f(&f, cfg.ell)?;
    rec.residual("quadrature_error", est.error);
    let path = rec.path("coefficients.csv");
    io::write_coefficients(&path, &est.value)?;
    rec.track(&path)
}

fn series_dualize(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let seq = coefficients(cfg)?;
    rec.warn(series::summability_warning(&seq, 2.0));
    let f = series::synthesize(&seq, cfg.n_trunc)?;
    let ts = cfg.grid_or(GridSpec::new(-3.1, 3.1, 0.02))?;
    let mut grid = Vec::with_capacity(ts.len());
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        // grid arithmetic can miss 0 by a rounding error
        if t.abs() < 1e-12 {
            rec.warn([Warning::new(
                crate::WarningCode::AtOrigin,
                "f̂(0) replaced by its limit 0 (empty integral)",
            )]);
            grid.push(0.0);
            values.push(C64::new(0.0, 0.0));
        } else {
            grid.push(t);
            values.push(series::fhat_from_fn(&f, t)?);
        }
    }
    rec.text("dual.csv", &io::grid_csv(&GridFunction::new(CoordKind::T, grid, values)?))
}

fn abel_forward(cfg: &RunConfig, rec: &mut Recorder, radon: bool) -> Result<()> {
    let f = input_grid(cfg)?;
    let kinds: &[CoordKind] = if radon { &[CoordKind::V, CoordKind::X] } else { &[CoordKind::V] };
    expect_kind(&f, kinds, if radon { "abel radon" } else { "abel forward" })?;
    let end = if f.kind() == CoordKind::X { f.end().acosh() } else { f.end() };
    let ws = cfg.grid_or(GridSpec::new(0.05, end, 0.05))?;
    let values = ws
        .iter()
        .map(|&w| {
            if radon {
                abel::horocycle_radon_grid(&f, w)
            } else {
                abel::abel_forward_grid(&f, w)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    rec.residual("interpolation_error", f.interpolation_error_estimate());
    let name = if radon { "radon.csv" } else { "abel.csv" };
    rec.text(name, &io::grid_csv(&real_grid(CoordKind::W, ws, values)?))
}

fn abel_inverse(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let fhat = input_grid(cfg)?;
    expect_kind(&fhat, &[CoordKind::W, CoordKind::T], "abel inverse")?;
    let (out_kind, default) = match fhat.kind() {
        CoordKind::W => (CoordKind::V, GridSpec::new(0.1, (fhat.end() - 0.2).min(2.0), 0.1)),
        _ => (CoordKind::U, GridSpec::new(0.1, (fhat.end() - 0.1).min(3.0), 0.1)),
    };
    let xs = cfg.grid_or(default)?;
    let points = xs
        .iter()
        .map(|&x| abel::abel_inverse(&fhat, x))
        .collect::<Result<Vec<_>>>()?;
    rec.warn(xs.iter().zip(&points).find_map(|(&x, p)| p.warning(x)));
    rec.residual(
        "derivative_error",
        points.iter().map(|p| p.derivative_error).fold(0.0, f64::max),
    );
    let values = points.iter().map(|p| p.value).collect();
    rec.text("inverse.csv", &io::grid_csv(&GridFunction::new(out_kind, xs, values)?))
}

fn jump_options(cfg: &RunConfig) -> JumpOptions {
    JumpOptions {
        mode: cfg.mode,
        tolerance: cfg.tolerance,
        ..JumpOptions::default()
    }
}

fn nu_grid(nu_max: f64, dnu: f64) -> Vec<f64> {
    let half = (nu_max / dnu).round() as i64;
    (-half..=half).map(|k| k as f64 * dnu).collect()
}

fn jump_forward(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let g = input_grid(cfg)?;
    expect_kind(&g, &[CoordKind::W, CoordKind::V], "jump forward")?;
    // a base jump is taken to F̂ = e^{-w/2} 𝒜F on a fine w grid first
    let fhat = if g.kind() == CoordKind::V {
        let ws = crate::grid::uniform(0.0, g.end(), 0.005)?;
        let vals = ws
            .par_iter()
            .map(|&w| {
                if w == 0.0 {
                    Ok(0.0)
                } else {
                    Ok((-0.5 * w).exp() * abel::abel_forward_grid(&g, w)?)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        real_grid(CoordKind::W, ws, vals)?
    } else {
        g
    };
    let nus = nu_grid(cfg.nu_max, cfg.dnu);
    let values = nus
        .par_iter()
        .map(|&nu| jump::atilde_from_jump(&fhat, ComplexDegree::new(cfg.sigma, nu)))
        .collect::<Result<Vec<C64>>>()?;
    let line = LineSamples::new(cfg.sigma, nus, values)?;
    rec.residual("conjugate_asymmetry", line.conjugate_asymmetry());
    rec.residual("interpolation_error", fhat.interpolation_error_estimate());
    for p in io::write_line(&rec.path("line.csv"), &line)? {
        rec.track(&p)?;
    }
    Ok(())
}

fn jump_inverse(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let line = io::read_line(cfg.line()?)?;
    let opts = jump_options(cfg);
    let ws = cfg.grid_or(GridSpec::new(0.0, 6.0, 0.05))?;
    let (hat, vals) = jump::jump_hat_grid(&line, ws, opts)?;
    let mut all = vals;
    rec.text("hat.csv", &io::grid_csv(&hat))?;
    if let Some(bg) = cfg.base_grid {
        let (base, bv) = jump::jump_base_grid(&line, bg.points()?, opts)?;
        rec.text("base.csv", &io::grid_csv(&base))?;
        all.extend(bv);
    }
    rec.residual("max_error", all.iter().map(|v| v.error).fold(0.0, f64::max));
    rec.residual("max_imag", all.iter().map(|v| v.imag.abs()).fold(0.0, f64::max));
    rec.warn(jump::collapse_warnings(all.iter()));
    Ok(())
}

fn jump_plancherel(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let line = io::read_line(cfg.line()?)?;
    let fhat = input_grid(cfg)?;
    let r = jump::plancherel_residual(&line, &fhat, line.sigma())?;
    rec.residual("plancherel", r.residual);
    rec.json("plancherel.json", &r)
}

fn jump_check(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let line = io::read_line(cfg.line()?)?;
    let fhat = input_grid(cfg)?;
    let r = jump::bound_and_mehler_check(&line, &fhat)?;
    rec.warn(r.warnings.iter().cloned());
    rec.residual("max_ratio", r.max_ratio);
    if let Some(m) = &r.mehler {
        rec.residual("mehler_identity", m.identity_residual);
    }
    if r.applicable && !r.holds {
        rec.failed = true;
    }
    rec.json("check.json", &r)
}

#[derive(Serialize)]
struct ReconstructOut {
    #[serde(rename = "L")]
    ell: usize,
    n_trunc: usize,
    max_tail: f64,
    tail_estimate: Vec<f64>,
    overflowed: Vec<usize>,
    max_imag: f64,
    dual_check_max_discrepancy: Option<f64>,
    hat_reference_discrepancy: Option<f64>,
}

fn reconstruct(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let seq = coefficients(cfg)?;
    let exp = reconstruct::pollaczek_coefficients(&seq, cfg.ell, cfg.n_trunc)?;
    let rows = exp
        .c
        .iter()
        .zip(&exp.tail_estimate)
        .enumerate()
        .map(|(l, (c, t))| vec![l as f64, c.re, c.im, *t]);
    rec.text("pollaczek.csv", &io::table_csv(&["ell", "c_re", "c_im", "tail_estimate"], rows))?;
    let ws = cfg.w_grid.unwrap_or(GridSpec::new(0.0, 10.0, 0.05)).points()?;
    let expansion = reconstruct::expand_jump(&exp, ws)?;
    rec.text("expansion.csv", &io::grid_csv(&expansion))?;
    let hat = expansion.map(|w, v| v * (-0.5 * w).exp())?;
    rec.text("hat.csv", &io::grid_csv(&hat))?;

    let (mut dual, mut hat_diff) = (None, None);
    if cfg.input.is_some() {
        let reference = input_grid(cfg)?;
        expect_kind(&reference, &[CoordKind::W], "reconstruct oracle")?;
        let d = reconstruct::dual_coefficient_check(&seq, &reference, cfg.ell.min(10))?;
        rec.residual("dual_check", d.max_discrepancy);
        dual = Some(d.max_discrepancy);
        let diff = hat
            .grid()
            .iter()
            .zip(hat.values())
            .filter(|(w, _)| reference.contains(**w))
            .map(|(&w, v)| (v.re - reference.eval_clamped(w).re).abs())
            .fold(0.0, f64::max);
        rec.residual("hat_reference", diff);
        hat_diff = Some(diff);
    }

    let vs = cfg.grid_or(GridSpec::new(0.1, 3.0, 0.1))?;
    let base = reconstruct::reconstruct_from_expansion(&seq, exp.clone(), vs)?;
    rec.text("base.csv", &io::grid_csv(&base.base))?;
    rec.warn(base.warnings.iter().cloned());
    rec.residual("max_tail", exp.max_tail());
    rec.residual("max_imag", base.max_imag);
    rec.json(
        "reconstruct.json",
        &ReconstructOut {
            ell: cfg.ell,
            n_trunc: exp.n_trunc,
            max_tail: exp.max_tail(),
            tail_estimate: exp.tail_estimate.clone(),
            overflowed: exp.overflowed.clone(),
            max_imag: base.max_imag,
            dual_check_max_discrepancy: dual,
            hat_reference_discrepancy: hat_diff,
        },
    )
}

fn eval(function: EvalFunction, cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let lambda = ComplexDegree::new(cfg.sigma, cfg.nu);
    let n = cfg.n;
    let default = match function {
        EvalFunction::LegendreP => GridSpec::new(-1.0, 1.0, 0.01),
        EvalFunction::LegendrePDeg | EvalFunction::LegendreQ => GridSpec::new(0.1, 3.0, 0.1),
        EvalFunction::Psi => GridSpec::new(0.05, 3.1, 0.05),
        EvalFunction::Laguerre | EvalFunction::Phi => GridSpec::new(0.0, 10.0, 0.1),
        EvalFunction::Pollaczek => GridSpec::new(-5.0, 5.0, 0.1),
    };
    let xs = cfg.grid_or(default)?;
    let real = |r: Result<f64>| r.map(|x| C64::new(x, 0.0));
    let values = xs
        .iter()
        .map(|&x| match function {
            EvalFunction::LegendreP => real(specfun::legendre_p(n, x)),
            EvalFunction::LegendrePDeg => specfun::legendre_p_deg(lambda, x),
            EvalFunction::LegendreQ => specfun::legendre_q(lambda, x),
            EvalFunction::Psi => real(specfun::psi_n(n, x)),
            EvalFunction::Laguerre => real(specfun::laguerre(n, x)),
            EvalFunction::Pollaczek => specfun::pollaczek(n, C64::new(x, cfg.nu)),
            EvalFunction::Phi => specfun::phi_basis(n, x),
        })
        .collect::<Result<Vec<C64>>>()?;
    let rows = xs.iter().zip(&values).map(|(x, v)| vec![*x, v.re, v.im]);
    rec.text("eval.csv", &io::table_csv(&["x", "re", "im"], rows))
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    criteria: &'a [verify::CriterionResult],
    identifiers: &'a [verify::IdentifierCoverage],
}

fn run_verify(criterion: Option<u32>, rec: &mut Recorder) -> Result<()> {
    let results = match criterion {
        Some(id) if verify::CRITERIA.contains(&id) => vec![verify::run_criterion(id)],
        Some(id) => return Err(Error::InvalidInput(format!("no criterion {id}; choose 1 to 10"))),
        None => verify::run_all(),
    };
    let identifiers = verify::exercise_identifiers();
    for r in &results {
        println!("{}", r.line());
        rec.residual(
            &format!("criterion_{:02}_failed_checks", r.id),
            r.checks.iter().filter(|c| !c.passed).count() as f64,
        );
    }
    let missing = identifiers.iter().filter(|c| !c.raised).count();
    println!(
        "{} identifier coverage: {}/{} raised",
        if missing == 0 { "PASS" } else { "FAIL" },
        identifiers.len() - missing,
        identifiers.len()
    );
    rec.failed = missing > 0 || results.iter().any(|r| !r.passed);
    rec.json(
        "verify.json",
        &VerifyOut {
            criteria: &results,
            identifiers: &identifiers,
        },
    )
}
