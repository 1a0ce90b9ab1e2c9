//! Field snapshot format: CSV with header `component,k1,...,k2n,re,im`,
//! one row per stored coefficient, frequencies as signed integers.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::geometry::TorusGeometry;
use super::valence::Valence;
use crate::error::{GcError, Result};

fn header(axes: usize) -> String {
    let mut h = String::from("component");
    for d in 1..=axes {
        h.push_str(&format!(",k{d}"));
    }
    h.push_str(",re,im");
    h
}

/// Write every stored coefficient of `f` with 17 significant digits.
pub fn write_snapshot(f: &SpectralField, path: &Path) -> Result<()> {
    let mut out = File::create(path)?;
    writeln!(out, "{}", header(f.geometry().axes()))?;
    for c in 0..f.component_count() {
        for k in f.geometry().box_freqs() {
            let v = f.coef(c, &k);
            let ks: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{},{:.16e},{:.16e}", c, ks.join(","), v.re, v.im)?;
        }
    }
    Ok(())
}

/// Read a snapshot produced by [`write_snapshot`] for a known geometry and
/// valence. Missing rows are treated as zero coefficients.
pub fn read_snapshot(geom: TorusGeometry, valence: Valence, path: &Path) -> Result<SpectralField> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let axes = geom.axes();
    let mut f = SpectralField::zero(geom, valence);
    let mut lines = reader.lines();
    let head = lines
        .next()
        .ok_or_else(|| GcError::Parse("empty snapshot".into()))?
        .map_err(GcError::Io)?;
    if head.trim() != header(axes) {
        return Err(GcError::Parse(format!("unexpected snapshot header `{head}`")));
    }
    for line in lines {
        let line = line.map_err(GcError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != axes + 3 {
            return Err(GcError::Parse(format!("bad row `{line}`")));
        }
        let c: usize = parts[0].parse().map_err(|_| GcError::Parse(format!("bad component in `{line}`")))?;
        if c >= f.component_count() {
            return Err(GcError::Parse(format!("component {c} out of range")));
        }
        let mut k = Vec::with_capacity(axes);
        for p in &parts[1..=axes] {
            let kd: i64 = p.parse().map_err(|_| GcError::Parse(format!("bad frequency in `{line}`")))?;
            if kd.unsigned_abs() as usize > geom.truncation {
                return Err(GcError::Parse(format!("frequency {kd} outside the truncation box")));
            }
            k.push(kd);
        }
        let re: f64 = parts[axes + 1].parse().map_err(|_| GcError::Parse(format!("bad re in `{line}`")))?;
        let im: f64 = parts[axes + 2].parse().map_err(|_| GcError::Parse(format!("bad im in `{line}`")))?;
        *f.coef_mut(c, &k) = Complex64::new(re, im);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip_is_exact() {
        let g = TorusGeometry::new(2, 16, 4).unwrap();
        let f =
            SpectralField::random_bandlimited(g, Valence::new(1, 1), 99, 4, 0.8, false).unwrap();
        let dir = std::env::temp_dir().join("gctorus_snapshot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.csv");
        write_snapshot(&f, &path).unwrap();
        let back = read_snapshot(g, f.valence(), &path).unwrap();
        assert_eq!(f, back);
    }
}
