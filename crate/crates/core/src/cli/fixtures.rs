//! Built-in inputs for quick runs and tests.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::grid::{self, CoordKind, GridFunction};
use crate::jump::LineSamples;
use crate::C64;

use super::report::Recorder;

pub const NAMES: [&str; 6] = ["delta", "inv-n", "inv-n-cubed", "const-jump", "inv-line", "inv-cubed-line"];

/// Writes fixture `name` into the output directory.
pub fn emit(name: &str, sigma: f64, nu_max: f64, dnu: f64, rec: &mut Recorder) -> Result<()> {
    let frac = |n: usize, d: usize| BigRational::new(BigInt::from(n), BigInt::from(d));
    match name {
        "delta" => {
            let a: Vec<BigRational> = (0..=64).map(|n| frac(usize::from(n == 0), 1)).collect();
            rational(rec, "delta.csv", &a)
        }
        "inv-n" => {
            let a: Vec<BigRational> = (0..=64).map(|n| frac(1, n + 1)).collect();
            rational(rec, "inv-n.csv", &a)
        }
        "inv-n-cubed" => {
            let a: Vec<BigRational> = (0..=200usize).map(|n| frac(1, (n + 1).pow(3))).collect();
            rational(rec, "inv-n-cubed.csv", &a)
        }
        "const-jump" => {
            let f = GridFunction::from_fn(CoordKind::V, grid::uniform(0.0, 4.0, 0.01)?, |_| C64::new(1.0, 0.0))?;
            rec.text("const-jump.csv", &crate::io::grid_csv(&f))
        }
        "inv-line" => line(rec, "inv-line.csv", LineSamples::from_fn(sigma, nu_max, dnu, |l| 1.0 / (l + 1.0))?),
        "inv-cubed-line" => line(
            rec,
            "inv-cubed-line.csv",
            LineSamples::from_fn(sigma, nu_max, dnu, |l| {
                let d = l + 1.0;
                1.0 / (d * d * d)
            })?,
        ),
        other => Err(Error::InvalidInput(format!(
            "unknown fixture `{other}`; available: {}",
            NAMES.join(", ")
        ))),
    }
}

fn rational(rec: &mut Recorder, name: &str, a: &[BigRational]) -> Result<()> {
    let path = rec.path(name);
    crate::io::write_rational_coefficients(&path, a)?;
    rec.track(&path)
}

fn line(rec: &mut Recorder, name: &str, samples: LineSamples) -> Result<()> {
    for p in crate::io::write_line(&rec.path(name), &samples)? {
        rec.track(&p)?;
    }
    Ok(())
}
