//! CSV and JSON file formats.
//!
//! Numbers are written with 17 significant digits so every value
//! round-trips exactly. Coefficient files may also carry exact rationals
//! such as `1/3`, which are kept exact for the Hausdorff differences.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CoordKind, GridFunction};
use crate::jump::LineSamples;
use crate::moments::{CoefficientSequence, MomentDensity};
use crate::C64;

/// Round-trip formatting of one number.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of -0.0 out of the files
        return "0".into();
    }
    format!("{x:.16e}")
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path.display(), e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn parse_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

fn headers(path: &Path, rdr: &mut csv::Reader<fs::File>) -> Result<Vec<String>> {
    Ok(rdr
        .headers()
        .map_err(|e| parse_err(path, e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect())
}

fn expect_headers(path: &Path, got: &[String], want: &[&str]) -> Result<()> {
    if got.len() != want.len() || got.iter().zip(want).any(|(g, w)| g != w) {
        return Err(parse_err(
            path,
            format!("expected header `{}`, found `{}`", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn rows(path: &Path, rdr: &mut csv::Reader<fs::File>, width: usize) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(path, e.to_string()))?;
        if rec.len() != width {
            return Err(parse_err(path, format!("row {} has {} fields, expected {width}", i + 2, rec.len())));
        }
        out.push(rec.iter().map(str::to_string).collect());
    }
    Ok(out)
}

fn num(path: &Path, row: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_err(path, format!("row {}: `{field}` is not a number", row + 2)))
}

fn rational(field: &str) -> Option<BigRational> {
    let (p, q) = field.split_once('/').unwrap_or((field, "1"));
    let p: BigInt = p.trim().parse().ok()?;
    let q: BigInt = q.trim().parse().ok()?;
    (q != BigInt::from(0)).then(|| BigRational::new(p, q))
}

/// Reads an `n,a_n` file. When every entry is an integer or a fraction the
/// sequence keeps the exact values.
pub fn read_coefficients(path: &Path, p: u32, epsilon: f64) -> Result<CoefficientSequence> {
    let mut rdr = reader(path)?;
    let h = headers(path, &mut rdr)?;
    expect_headers(path, &h, &["n", "a_n"])?;
    let rows = rows(path, &mut rdr, 2)?;
    for (i, r) in rows.iter().enumerate() {
        if r[0].parse::<usize>().ok() != Some(i) {
            return Err(parse_err(path, format!("row {}: expected n = {i}, found `{}`", i + 2, r[0])));
        }
    }
    let exact: Option<Vec<BigRational>> = rows.iter().map(|r| rational(&r[1])).collect();
    match exact {
        Some(ex) => CoefficientSequence::from_rationals(ex, p, epsilon),
        None => {
            let a = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    num(path, i, &r[1]).or_else(|_| {
                        rational(&r[1])
                            .map(|q| crate::moments::rational_value(&q))
                            .ok_or_else(|| parse_err(path, format!("row {}: bad coefficient `{}`", i + 2, r[1])))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            CoefficientSequence::new(a, p, epsilon)
        }
    }
}

pub fn write_coefficients(path: &Path, a: &[f64]) -> Result<()> {
    let mut out = String::from("n,a_n\n");
    for (n, x) in a.iter().enumerate() {
        out.push_str(&format!("{n},{}\n", fmt_num(*x)));
    }
    write_text(path, &out)
}

/// Writes exact coefficients as fractions.
pub fn write_rational_coefficients(path: &Path, a: &[BigRational]) -> Result<()> {
    let mut out = String::from("n,a_n\n");
    for (n, x) in a.iter().enumerate() {
        if x.is_integer() {
            out.push_str(&format!("{n},{}\n", x.numer()));
        } else {
            out.push_str(&format!("{n},{}/{}\n", x.numer(), x.denom()));
        }
    }
    write_text(path, &out)
}

/// Reads an `x,u` density file.
pub fn read_density(path: &Path) -> Result<MomentDensity> {
    let mut rdr = reader(path)?;
    let h = headers(path, &mut rdr)?;
    expect_headers(path, &h, &["x", "u"])?;
    let rows = rows(path, &mut rdr, 2)?;
    let mut x = Vec::with_capacity(rows.len());
    let mut u = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        x.push(num(path, i, &r[0])?);
        u.push(num(path, i, &r[1])?);
    }
    MomentDensity::sampled(x, u)
}

/// Reads a `coord,value_re,value_im` file. The first header names the
/// coordinate (`u`, `t`, `v`, `w`, `x`); a literal `coord` takes `default`.
pub fn read_grid(path: &Path, default: Option<CoordKind>) -> Result<GridFunction> {
    let mut rdr = reader(path)?;
    let h = headers(path, &mut rdr)?;
    if h.len() != 3 || h[1] != "value_re" || h[2] != "value_im" {
        return Err(parse_err(
            path,
            format!("expected header `coord,value_re,value_im`, found `{}`", h.join(",")),
        ));
    }
    let kind = if h[0] == "coord" {
        default.ok_or_else(|| {
            parse_err(path, "coordinate column is `coord`; pass the coordinate kind explicitly")
        })?
    } else {
        h[0].parse::<CoordKind>().map_err(|_| parse_err(path, format!("unknown coordinate `{}`", h[0])))?
    };
    let rows = rows(path, &mut rdr, 3)?;
    let mut grid = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        grid.push(num(path, i, &r[0])?);
        values.push(C64::new(num(path, i, &r[1])?, num(path, i, &r[2])?));
    }
    GridFunction::new(kind, grid, values).map_err(|e| parse_err(path, e.to_string()))
}

pub fn grid_csv(f: &GridFunction) -> String {
    let mut out = format!("{},value_re,value_im\n", f.kind());
    for (x, v) in f.grid().iter().zip(f.values()) {
        out.push_str(&format!("{},{},{}\n", fmt_num(*x), fmt_num(v.re), fmt_num(v.im)));
    }
    out
}

pub fn write_grid(path: &Path, f: &GridFunction) -> Result<()> {
    write_text(path, &grid_csv(f))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Sidecar {
    sigma: f64,
}

/// `foo.csv` → `foo.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn read_line(path: &Path) -> Result<LineSamples> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(side.display(), e))?;
    let meta: Sidecar = serde_json::from_str(&text).map_err(|e| parse_err(&side, e.to_string()))?;
    let mut rdr = reader(path)?;
    let h = headers(path, &mut rdr)?;
    expect_headers(path, &h, &["nu", "re", "im"])?;
    let rows = rows(path, &mut rdr, 3)?;
    let mut nu = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        nu.push(num(path, i, &r[0])?);
        values.push(C64::new(num(path, i, &r[1])?, num(path, i, &r[2])?));
    }
    LineSamples::new(meta.sigma, nu, values)
}

/// Writes the samples and their `{sigma}` sidecar; returns both paths.
pub fn write_line(path: &Path, line: &LineSamples) -> Result<Vec<PathBuf>> {
    let mut out = String::from("nu,re,im\n");
    for (nu, v) in line.nu().iter().zip(line.values()) {
        out.push_str(&format!("{},{},{}\n", fmt_num(*nu), fmt_num(v.re), fmt_num(v.im)));
    }
    write_text(path, &out)?;
    let side = sidecar_path(path);
    write_json(&side, &Sidecar { sigma: line.sigma() })?;
    Ok(vec![path.to_path_buf(), side])
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display(), e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path.display(), e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

/// Simple table: header plus rows of numbers.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coefficient_files_keep_exact_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        std::fs::write(&p, "n,a_n\n0,1\n1,1/2\n2,1/3\n").unwrap();
        let s = read_coefficients(&p, 0, 0.5).unwrap();
        assert!(s.exact().is_some());
        assert_eq!(s.a()[2], 1.0 / 3.0);
        std::fs::write(&p, "n,a_n\n0,1.0\n1,0.5\n2,0.25\n").unwrap();
        assert!(read_coefficients(&p, 0, 0.5).unwrap().exact().is_none());
        std::fs::write(&p, "n,a_n\n0,1\n2,0.5\n3,0.25\n").unwrap();
        assert!(matches!(read_coefficients(&p, 0, 0.5), Err(Error::Parse { .. })));
        std::fs::write(&p, "k,a\n0,1\n").unwrap();
        assert!(matches!(read_coefficients(&p, 0, 0.5), Err(Error::Parse { .. })));
    }

    #[test]
    fn line_files_carry_sigma() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("line.csv");
        let l = LineSamples::from_fn(0.25, 2.0, 0.5, |z| C64::new(1.0, 0.0) / (z + 1.0)).unwrap();
        write_line(&p, &l).unwrap();
        let back = read_line(&p).unwrap();
        assert_eq!(back, l);
    }

    proptest! {
        #[test]
        fn grid_roundtrip_is_exact(vals in proptest::collection::vec(-1e6f64..1e6, 3..20)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("g.csv");
            let grid: Vec<f64> = (0..vals.len()).map(|i| 0.1 * i as f64).collect();
            let values: Vec<C64> = vals.iter().map(|&v| C64::new(v, -v / 3.0)).collect();
            let g = GridFunction::new(CoordKind::W, grid, values).unwrap();
            write_grid(&p, &g).unwrap();
            let back = read_grid(&p, None).unwrap();
            prop_assert_eq!(back.grid(), g.grid());
            prop_assert_eq!(back.values(), g.values());
            prop_assert_eq!(back.kind(), CoordKind::W);
        }
    }
}
