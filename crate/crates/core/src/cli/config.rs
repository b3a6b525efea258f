//! Flat-key JSON configuration merged with command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, Warning, WarningCode};
use crate::grid::{self, CoordKind};
use crate::jump::JumpMode;

/// `START:STOP:STEP`, inclusive of `STOP` when it lands on a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        grid::uniform(self.start, self.stop, self.step)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected START:STOP:STEP, got `{s}`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number in grid `{s}`"));
        let g = Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(g.step > 0.0 && g.stop > g.start) {
            return Err(format!("grid `{s}` needs START < STOP and STEP > 0"));
        }
        Ok(g)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Every recognised key with its expected JSON type.
const KEYS: &[(&str, Kind)] = &[
    ("coeffs", Kind::Path),
    ("input", Kind::Path),
    ("line", Kind::Path),
    ("out", Kind::Path),
    ("p", Kind::UInt),
    ("epsilon", Kind::Float),
    ("sigma", Kind::Float),
    ("L", Kind::UInt),
    ("n_trunc", Kind::UInt),
    ("n", Kind::UInt),
    ("nu", Kind::Float),
    ("grid", Kind::Grid),
    ("base_grid", Kind::Grid),
    ("w_grid", Kind::Grid),
    ("mode", Kind::Mode),
    ("kind", Kind::Coord),
    ("tolerance", Kind::Float),
    ("bound", Kind::Float),
    ("nu_max", Kind::Float),
    ("dnu", Kind::Float),
];

#[derive(Debug, Clone, Copy)]
enum Kind {
    Path,
    UInt,
    Float,
    Grid,
    Mode,
    Coord,
}

/// Validated run parameters with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub coeffs: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub line: Option<PathBuf>,
    pub out: PathBuf,
    pub p: u32,
    pub epsilon: f64,
    pub sigma: f64,
    pub ell: usize,
    pub n_trunc: Option<usize>,
    pub n: usize,
    pub nu: f64,
    pub grid: Option<GridSpec>,
    pub base_grid: Option<GridSpec>,
    pub w_grid: Option<GridSpec>,
    pub mode: JumpMode,
    pub kind: Option<CoordKind>,
    pub tolerance: f64,
    pub bound: f64,
    pub nu_max: f64,
    pub dnu: f64,
    /// The merged key/value view, sorted, used for the config hash.
    pub resolved: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.resolved).expect("plain JSON values");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn coeffs(&self) -> Result<&Path> {
        required(&self.coeffs, "coeffs")
    }

    pub fn input(&self) -> Result<&Path> {
        required(&self.input, "input")
    }

    pub fn line(&self) -> Result<&Path> {
        required(&self.line, "line")
    }

    pub fn grid_or(&self, default: GridSpec) -> Result<Vec<f64>> {
        self.grid.unwrap_or(default).points()
    }
}

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::InvalidInput(format!("missing required input `--{}`", key.replace('_', "-"))))
}

/// Reads a config file into a flat key map; unknown keys are rejected.
pub fn read_config_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Config {
        key: "<document>".into(),
        detail: format!("{}: malformed JSON ({e})", path.display()),
    })?;
    let Value::Object(map) = value else {
        return Err(Error::Config {
            key: "<document>".into(),
            detail: format!("{}: expected a JSON object of flat keys", path.display()),
        });
    };
    let mut out = Map::new();
    for (k, v) in map {
        let kind = KEYS
            .iter()
            .find(|(name, _)| *name == k)
            .map(|(_, kind)| *kind)
            .ok_or_else(|| Error::Config {
                key: k.clone(),
                detail: "unknown key".into(),
            })?;
        check_type(&k, kind, &v)?;
        // 2 and 2.0 must compare equal when a flag repeats a file value
        let v = match kind {
            Kind::Float => Value::from(v.as_f64().expect("checked")),
            _ => v,
        };
        out.insert(k, v);
    }
    Ok(out)
}

fn type_error(key: &str, want: &str, got: &Value) -> Error {
    Error::Config {
        key: key.into(),
        detail: format!("expected {want}, got {got}"),
    }
}

fn check_type(key: &str, kind: Kind, v: &Value) -> Result<()> {
    let ok = match kind {
        Kind::Path => v.is_string(),
        Kind::UInt => v.as_u64().is_some(),
        Kind::Float => v.as_f64().is_some_and(f64::is_finite),
        Kind::Grid => v.as_str().is_some_and(|s| s.parse::<GridSpec>().is_ok()),
        Kind::Mode => v.as_str().is_some_and(|s| s.parse::<JumpMode>().is_ok()),
        Kind::Coord => v.as_str().is_some_and(|s| s.parse::<CoordKind>().is_ok()),
    };
    if ok {
        return Ok(());
    }
    let want = match kind {
        Kind::Path => "a path string",
        Kind::UInt => "a non-negative integer",
        Kind::Float => "a finite number",
        Kind::Grid => "a \"START:STOP:STEP\" string",
        Kind::Mode => "\"eq60\" or \"eq61\"",
        Kind::Coord => "one of \"u\", \"t\", \"v\", \"w\", \"x\"",
    };
    Err(type_error(key, want, v))
}

/// Merges flag values over the file; a flag that changes a file value
/// wins and records [`WarningCode::FlagOverridesConfig`].
pub fn merge(file: Map<String, Value>, flags: Map<String, Value>) -> Result<(RunConfig, Vec<Warning>)> {
    let mut warnings = Vec::new();
    let mut merged: BTreeMap<String, Value> = file.into_iter().collect();
    for (k, v) in flags {
        if let Some(old) = merged.get(&k) {
            if old != &v {
                warnings.push(Warning::new(
                    WarningCode::FlagOverridesConfig,
                    format!("flag --{} = {v} overrides config value {old}", k.replace('_', "-")),
                ));
            }
        }
        merged.insert(k, v);
    }
    Ok((resolve(merged)?, warnings))
}

fn resolve(mut m: BTreeMap<String, Value>) -> Result<RunConfig> {
    let defaults = [
        ("out", Value::from("out")),
        ("p", Value::from(0)),
        ("epsilon", Value::from(0.5)),
        ("sigma", Value::from(0.0)),
        ("L", Value::from(32)),
        ("n", Value::from(0)),
        ("nu", Value::from(0.0)),
        ("mode", Value::from("eq60")),
        ("tolerance", Value::from(1e-6)),
        ("bound", Value::from(10.0)),
        ("nu_max", Value::from(crate::jump::DEFAULT_NU_MAX)),
        ("dnu", Value::from(crate::jump::DEFAULT_DNU)),
    ];
    for (k, v) in defaults {
        m.entry(k.to_string()).or_insert(v);
    }
    for (k, v) in &m {
        let kind = KEYS.iter().find(|(name, _)| name == k).map(|(_, kind)| *kind);
        match kind {
            Some(kind) => check_type(k, kind, v)?,
            None => {
                return Err(Error::Config {
                    key: k.clone(),
                    detail: "unknown key".into(),
                })
            }
        }
    }
    let path = |k: &str| m.get(k).and_then(Value::as_str).map(PathBuf::from);
    let float = |k: &str| m[k].as_f64().expect("checked");
    let uint = |k: &str| m.get(k).and_then(Value::as_u64).map(|x| x as usize);
    let grid = |k: &str| m.get(k).and_then(Value::as_str).map(|s| s.parse::<GridSpec>().expect("checked"));
    let positive = |k: &str| -> Result<f64> {
        let x = float(k);
        if x > 0.0 {
            Ok(x)
        } else {
            Err(Error::Config {
                key: k.into(),
                detail: format!("must be positive, got {x}"),
            })
        }
    };
    let p = uint("p").expect("default");
    let cfg = RunConfig {
        coeffs: path("coeffs"),
        input: path("input"),
        line: path("line"),
        out: path("out").expect("default"),
        p: u32::try_from(p).map_err(|_| Error::Config {
            key: "p".into(),
            detail: format!("{p} is too large"),
        })?,
        epsilon: positive("epsilon")?,
        sigma: float("sigma"),
        ell: uint("L").expect("default"),
        n_trunc: uint("n_trunc"),
        n: uint("n").expect("default"),
        nu: float("nu"),
        grid: grid("grid"),
        base_grid: grid("base_grid"),
        w_grid: grid("w_grid"),
        mode: m["mode"].as_str().expect("checked").parse().expect("checked"),
        kind: m.get("kind").and_then(Value::as_str).map(|s| s.parse().expect("checked")),
        tolerance: positive("tolerance")?,
        bound: positive("bound")?,
        nu_max: positive("nu_max")?,
        dnu: positive("dnu")?,
        resolved: m,
    };
    Ok(cfg)
}

/// Canonical JSON value for a flag, matching the file representation.
pub fn flag_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("plain flag values")
}
