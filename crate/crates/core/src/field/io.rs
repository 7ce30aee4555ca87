use std::io::{Read, Write};

use num_complex::Complex64;

use super::grid::Grid;
use super::spectral::{Repr, SpectralField};
use crate::error::{Error, Result};

/// CSV with columns (index, x|xi, re, im); the second header names the representation.
pub fn write_field_csv<W: Write>(out: W, f: &SpectralField) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let coord = match f.repr() {
        Repr::Physical => "x",
        Repr::Fourier => "xi",
    };
    w.write_record(["index", coord, "re", "im"])?;
    let g = f.grid();
    for (j, z) in f.values().iter().enumerate() {
        let c = match f.repr() {
            Repr::Physical => g.x(j),
            Repr::Fourier => g.xi(j),
        };
        w.write_record(&[j.to_string(), fmt(c), fmt(z.re), fmt(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field_csv<R: Read>(input: R, half_length: f64) -> Result<SpectralField> {
    let mut r = csv::Reader::from_reader(input);
    let repr = match r.headers()?.get(1) {
        Some("x") => Repr::Physical,
        Some("xi") => Repr::Fourier,
        other => {
            return Err(Error::config(format!(
                "unknown coordinate column {other:?}"
            )))
        }
    };
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let re: f64 = parse(rec.get(2))?;
        let im: f64 = parse(rec.get(3))?;
        values.push(Complex64::new(re, im));
    }
    let grid = Grid::new(half_length, values.len())?;
    SpectralField::new(grid, values, repr)
}

fn parse(s: Option<&str>) -> Result<f64> {
    s.ok_or_else(|| Error::config("short CSV row"))?
        .trim()
        .parse()
        .map_err(|e| Error::config(format!("bad number in CSV: {e}")))
}

/// Shortest round-trip formatting.
pub(crate) fn fmt(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let g = Grid::new(4.0, 16).unwrap();
        let f =
            SpectralField::from_fn_physical(g, |x| Complex64::new(x.sin() / 3.0, x.exp() * 1e-7));
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,x,re,im"));
        let back = read_field_csv(buf.as_slice(), 4.0).unwrap();
        assert_eq!(back, f);
    }
}
