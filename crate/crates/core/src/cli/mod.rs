//! The `cutplane` command line: argument parsing, config merging, dispatch
//! and the run report.

pub mod config;
pub mod fixtures;
pub mod report;
mod run;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::grid::CoordKind;
use crate::jump::JumpMode;

pub use config::{GridSpec, RunConfig};
pub use report::RunReport;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cutplane", version, about = "Fourier-Legendre coefficients to cut-plane jump functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Flags shared by every command. Each one may also come from `--config`.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON file of flat keys (same names as the flags, `_` for `-`)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Coefficient CSV `n,a_n`
    #[arg(long, global = true)]
    pub coeffs: Option<PathBuf>,
    /// Grid CSV `<coord>,value_re,value_im`
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Line-sample CSV `nu,re,im` with its `{sigma}` JSON sidecar
    #[arg(long, global = true)]
    pub line: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Decay order: a_n = O(n^-p)
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Exponent margin in the moment condition
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Re λ of the sampling line
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Pollaczek truncation degree
    #[arg(long = "L", global = true)]
    pub ell: Option<usize>,
    /// Last coefficient index used in the Pollaczek sums
    #[arg(long, global = true)]
    pub n_trunc: Option<usize>,
    /// Degree for `eval`
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Imaginary part of the degree for `eval`
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// START:STOP:STEP
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Extra base-jump grid for `jump inverse`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub base_grid: Option<GridSpec>,
    /// Horocyclic grid for `reconstruct`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub w_grid: Option<GridSpec>,
    /// eq60 (exponential form) or eq61 (sine form)
    #[arg(long, global = true)]
    pub mode: Option<JumpMode>,
    /// Coordinate of an input grid whose header says `coord`
    #[arg(long, global = true)]
    pub kind: Option<CoordKind>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Hausdorff bound M
    #[arg(long, global = true)]
    pub bound: Option<f64>,
    #[arg(long, global = true)]
    pub nu_max: Option<f64>,
    #[arg(long, global = true)]
    pub dnu: Option<f64>,
}

impl Flags {
    /// Flags that were given, keyed like the config file.
    pub fn to_map(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| Value::from(p.display().to_string()));
        let float = |x: Option<f64>| x.map(Value::from);
        put("coeffs", path(&self.coeffs));
        put("input", path(&self.input));
        put("line", path(&self.line));
        put("out", path(&self.out));
        put("p", self.p.map(Value::from));
        put("epsilon", float(self.epsilon));
        put("sigma", float(self.sigma));
        put("L", self.ell.map(Value::from));
        put("n_trunc", self.n_trunc.map(Value::from));
        put("n", self.n.map(Value::from));
        put("nu", float(self.nu));
        put("grid", self.grid.map(|g| Value::from(g.to_string())));
        put("base_grid", self.base_grid.map(|g| Value::from(g.to_string())));
        put("w_grid", self.w_grid.map(|g| Value::from(g.to_string())));
        put("mode", self.mode.map(|m| Value::from(m.as_str())));
        put("kind", self.kind.map(|k| Value::from(k.as_str())));
        put("tolerance", float(self.tolerance));
        put("bound", float(self.bound));
        put("nu_max", float(self.nu_max));
        put("dnu", float(self.dnu));
        m
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Hausdorff moment condition on a coefficient file
    CheckHausdorff,
    /// Legendre series and the trigonometric dual
    Series {
        #[command(subcommand)]
        op: SeriesOp,
    },
    /// Abel and horocyclic Radon transforms
    Abel {
        #[command(subcommand)]
        op: AbelOp,
    },
    /// Spherical-Laplace transform of the jump and its inversion
    Jump {
        #[command(subcommand)]
        op: JumpOp,
    },
    /// Pollaczek reconstruction of the jump from coefficients
    Reconstruct,
    /// Evaluate a special function on a grid
    Eval {
        #[arg(value_enum)]
        function: EvalFunction,
    },
    /// Run the acceptance checks
    Verify {
        /// Only this criterion (1-10)
        #[arg(long)]
        criterion: Option<u32>,
    },
    /// Write a built-in input file
    Fixture { name: String },
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::CheckHausdorff => "check-hausdorff".into(),
            Command::Series { op } => format!("series {}", op.as_str()),
            Command::Abel { op } => format!("abel {}", op.as_str()),
            Command::Jump { op } => format!("jump {}", op.as_str()),
            Command::Reconstruct => "reconstruct".into(),
            Command::Eval { function } => format!("eval {}", function.as_str()),
            Command::Verify { .. } => "verify".into(),
            Command::Fixture { name } => format!("fixture {name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum SeriesOp {
    /// Coefficients to f(u) on a u grid
    Synth,
    /// Sampled f(u) to coefficients a_0..a_L
    Analyze,
    /// Coefficients to the dual function f̂(t)
    Dualize,
}

impl SeriesOp {
    fn as_str(self) -> &'static str {
        match self {
            SeriesOp::Synth => "synth",
            SeriesOp::Analyze => "analyze",
            SeriesOp::Dualize => "dualize",
        }
    }
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum AbelOp {
    /// Base jump F(v) to its Abel transform on a w grid
    Forward,
    /// F̂ on a w (or t) grid back to F(v) (or f(u))
    Inverse,
    /// Integral of F over horocycles
    Radon,
}

impl AbelOp {
    fn as_str(self) -> &'static str {
        match self {
            AbelOp::Forward => "forward",
            AbelOp::Inverse => "inverse",
            AbelOp::Radon => "radon",
        }
    }
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum JumpOp {
    /// Sampled jump (w or v grid) to ã on the line Re λ = σ
    Forward,
    /// ã on a line to F̂ (and optionally F)
    Inverse,
    /// Both sides of the Plancherel identity
    Plancherel,
    /// L¹ bound on F̂ and the odd-part check at σ = -1/2
    Check,
}

impl JumpOp {
    fn as_str(self) -> &'static str {
        match self {
            JumpOp::Forward => "forward",
            JumpOp::Inverse => "inverse",
            JumpOp::Plancherel => "plancherel",
            JumpOp::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFunction {
    /// P_n(x), x in [-1, 1]
    LegendreP,
    /// P_λ(cosh v), λ = σ + iν
    LegendrePDeg,
    /// Q_λ(cosh v), λ = σ + iν
    LegendreQ,
    /// ψ_n(u)
    Psi,
    /// L_n(x)
    Laguerre,
    /// Pollaczek polynomial at x + iν
    Pollaczek,
    /// Φ_n(w)
    Phi,
}

impl EvalFunction {
    fn as_str(self) -> &'static str {
        match self {
            EvalFunction::LegendreP => "legendre-p",
            EvalFunction::LegendrePDeg => "legendre-p-deg",
            EvalFunction::LegendreQ => "legendre-q",
            EvalFunction::Psi => "psi",
            EvalFunction::Laguerre => "laguerre",
            EvalFunction::Pollaczek => "pollaczek",
            EvalFunction::Phi => "phi",
        }
    }
}

/// Caps rayon's pool from `CUTPLANE_THREADS`.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CUTPLANE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CUTPLANE_THREADS must be a positive integer, got `{v}`"))?;
    // a second call in the same process (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (including the program name), runs, writes
/// `report.json`, and returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let start = Instant::now();
    let file = match &cli.flags.config {
        Some(p) => match config::read_config_file(p) {
            Ok(m) => m,
            Err(e) => return usage_failure(&e),
        },
        None => Map::new(),
    };
    let (cfg, warnings) = match config::merge(file, cli.flags.to_map()) {
        Ok(x) => x,
        Err(e) => return usage_failure(&e),
    };
    let report = run::run(&cli.command, &cfg, echo, warnings, start);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(e) = &report.error {
        eprintln!("error [{}]: {}", e.code, e.message);
    }
    let path = cfg.out.join("report.json");
    if let Err(e) = crate::io::write_json(&path, &report) {
        eprintln!("error [{}]: {e}", e.code());
        return EXIT_USAGE;
    }
    report.exit_code
}

fn usage_failure(e: &Error) -> i32 {
    eprintln!("error [{}]: {e}", e.code());
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERIC
    }
}
