//! File formats: series fixtures (JSON), energy curves and kernel tables (CSV),
//! and height profiles (JSON descriptor or `x,y,H` grid CSV).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matching::KernelTable;
use crate::pade::{AsymptoticSeries, EnergyCurve, Provenance};
use crate::profile::{GridProfile, HeightProfile};

/// Header of energy curve files.
pub const CURVE_HEADER: [&str; 2] = ["d_over_R", "E_over_EPFA"];

/// `v` with 12 significant digits in scientific notation.
pub fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// `v` with 6 significant digits, plain notation where it stays short.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        "0.00000".into()
    } else if (1e-4..1e6).contains(&v.abs()) {
        let digits = 5 - v.abs().log10().floor() as i32;
        format!("{v:.*}", digits.max(0) as usize)
    } else {
        format!("{v:.5e}")
    }
}

pub fn parse_series(text: &str) -> Result<AsymptoticSeries<f64>> {
    let s: AsymptoticSeries<f64> = serde_json::from_str(text)?;
    s.validate()?;
    Ok(s)
}

pub fn read_series(path: &Path) -> Result<AsymptoticSeries<f64>> {
    parse_series(&std::fs::read_to_string(path)?)
}

pub fn write_series<W: Write>(mut w: W, s: &AsymptoticSeries<f64>) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, s)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_curve<W: Write>(w: W, curve: &EnergyCurve<f64>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CURVE_HEADER)?;
    for &(x, e) in &curve.samples {
        out.write_record([sig12(x), sig12(e)])?;
    }
    out.flush()?;
    Ok(())
}

/// Per-sample errors of a curve as `d_over_R,error`.
pub fn write_curve_errors<W: Write>(w: W, curve: &EnergyCurve<f64>) -> Result<()> {
    let errors = curve
        .errors
        .as_ref()
        .ok_or_else(|| Error::Input("curve carries no error estimates".into()))?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["d_over_R", "error"])?;
    for (&(x, _), &e) in curve.samples.iter().zip(errors) {
        out.write_record([sig12(x), sig12(e)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_curve<R: Read>(r: R, provenance: Provenance) -> Result<EnergyCurve<f64>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.len() < 2 || headers[0].trim() != CURVE_HEADER[0] || headers[1].trim() != CURVE_HEADER[1] {
        return Err(Error::Parse(format!(
            "curve header must start with `{},{}`",
            CURVE_HEADER[0], CURVE_HEADER[1]
        )));
    }
    let mut samples = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let x = parse_field(&rec, 0, i)?;
        let e = parse_field(&rec, 1, i)?;
        samples.push((x, e));
    }
    EnergyCurve::new(samples, provenance)
}

pub fn read_curve_file(path: &Path, provenance: Provenance) -> Result<EnergyCurve<f64>> {
    read_curve(File::open(path)?, provenance)
}

fn parse_field(rec: &csv::StringRecord, col: usize, row: usize) -> Result<f64> {
    let raw = rec
        .get(col)
        .ok_or_else(|| Error::Parse(format!("row {}: missing column {}", row + 2, col + 1)))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {}: `{raw}` is not a number", row + 2)))
}

/// Kernel table with columns `k,d,G` and an optional `mu` column, constant
/// per `d` (empty cells allowed).
pub fn read_kernel<R: Read>(r: R) -> Result<KernelTable<f64>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers: Vec<String> = rd.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if headers.len() < 3 || headers[..3] != ["k", "d", "G"] {
        return Err(Error::Parse("kernel header must start with `k,d,G`".into()));
    }
    let mu_col = headers.iter().position(|h| h == "mu");
    let mut rows = Vec::new();
    let mut mu: Vec<(f64, f64)> = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let (k, d, g) = (parse_field(&rec, 0, i)?, parse_field(&rec, 1, i)?, parse_field(&rec, 2, i)?);
        rows.push((k, d, g));
        if let Some(c) = mu_col {
            if rec.get(c).is_some_and(|v| !v.trim().is_empty()) {
                let m = parse_field(&rec, c, i)?;
                match mu.iter().find(|e| e.0 == d) {
                    Some(e) if e.1 != m => {
                        return Err(Error::Parse(format!(
                            "row {}: mu differs from an earlier row at d = {d}",
                            i + 2
                        )))
                    }
                    Some(_) => {}
                    None => mu.push((d, m)),
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("kernel table is empty".into()));
    }
    KernelTable::new(rows, mu)
}

pub fn write_kernel<W: Write>(w: W, table: &KernelTable<f64>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let with_mu = !table.mu.is_empty();
    if with_mu {
        out.write_record(["k", "d", "G", "mu"])?;
    } else {
        out.write_record(["k", "d", "G"])?;
    }
    for &(k, d, g) in &table.rows {
        let mut rec = vec![sig12(k), sig12(d), sig12(g)];
        if with_mu {
            rec.push(
                table
                    .mu
                    .iter()
                    .find(|m| m.0 == d)
                    .map(|m| sig12(m.1))
                    .unwrap_or_default(),
            );
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Grid profile from `x,y,H` rows in row-major order (x fastest).
pub fn read_grid<R: Read>(r: R) -> Result<GridProfile<f64>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers: Vec<String> = rd.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if headers.len() < 3 || headers[..3] != ["x", "y", "H"] {
        return Err(Error::Parse("grid header must be `x,y,H`".into()));
    }
    let mut pts = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        pts.push((parse_field(&rec, 0, i)?, parse_field(&rec, 1, i)?, parse_field(&rec, 2, i)?));
    }
    let first = *pts.first().ok_or_else(|| Error::Parse("grid is empty".into()))?;
    let nx = pts.iter().take_while(|p| p.1 == first.1).count();
    if nx < 2 || pts.len() % nx != 0 {
        return Err(Error::Parse(format!(
            "{} grid points do not form complete rows of {nx}",
            pts.len()
        )));
    }
    let ny = pts.len() / nx;
    if ny < 2 {
        return Err(Error::Parse("grid needs at least two rows".into()));
    }
    let dx = pts[1].0 - pts[0].0;
    let dy = pts[nx].1 - pts[0].1;
    let tol = 1e-9;
    for (idx, &(x, y, _)) in pts.iter().enumerate() {
        let (ix, iy) = (idx % nx, idx / nx);
        let ex = first.0 + dx * ix as f64;
        let ey = first.1 + dy * iy as f64;
        if (x - ex).abs() > tol * dx.abs().max(ex.abs()) || (y - ey).abs() > tol * dy.abs().max(ey.abs()) {
            return Err(Error::Parse(format!(
                "row {}: ({x}, {y}) is off the regular lattice (expected ({ex}, {ey}))",
                idx + 2
            )));
        }
    }
    GridProfile::new(first.0, first.1, dx, dy, nx, ny, pts.into_iter().map(|p| p.2).collect())
}

/// Profile from a JSON descriptor (`.json`) or a grid CSV (anything else).
pub fn read_profile(path: &Path) -> Result<HeightProfile<f64>> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let profile = if is_json {
        serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
    } else {
        HeightProfile::Grid(read_grid(File::open(path)?)?)
    };
    profile.validate()?;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundaryCondition;

    #[test]
    fn sig12_round_trips() {
        let v = 1.0 / 3.0;
        let s = sig12(v);
        assert_eq!(s, "3.33333333333e-1");
        assert!((s.parse::<f64>().unwrap() - v).abs() < 1e-12);
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(-3.7195140), "-3.71951");
        assert_eq!(sig6(1.2345678e-7), "1.23457e-7");
        assert_eq!(sig6(0.0), "0.00000");
    }

    #[test]
    fn series_round_trip() {
        let s = AsymptoticSeries::new(BoundaryCondition::EM, 4, vec![-0.7, 3.5, 1.0], "test");
        let mut buf = Vec::new();
        write_series(&mut buf, &s).unwrap();
        let back = parse_series(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(parse_series(r#"{"bc":"D","j0":2,"coefficients":[1.0,2.0],"source":""}"#).is_err());
        assert!(parse_series(r#"{"bc":"Q","j0":2,"coefficients":[1.0],"source":""}"#).is_err());
    }

    #[test]
    fn curve_round_trip() {
        let c = EnergyCurve::new(vec![(0.1, 1.0306), (0.2, 1.0578)], Provenance::Pade).unwrap();
        let mut buf = Vec::new();
        write_curve(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("d_over_R,E_over_EPFA\n"));
        let back = read_curve(&buf[..], Provenance::Pade).unwrap();
        assert_eq!(back.samples, c.samples);
        assert!(read_curve("a,b\n1,2\n".as_bytes(), Provenance::Pade).is_err());
    }

    #[test]
    fn kernel_round_trip() {
        let text = "k,d,G,mu\n-0.1,1,2.0,0.5\n0,1,2.5,0.5\n0.1,1,2.0,\n";
        let t = read_kernel(text.as_bytes()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.mu, vec![(1.0, 0.5)]);
        let mut buf = Vec::new();
        write_kernel(&mut buf, &t).unwrap();
        let back = read_kernel(&buf[..]).unwrap();
        assert_eq!(back.rows, t.rows);
        assert!(read_kernel("k,d,G\n-0.1,1,2.0\n".as_bytes()).is_err());
    }

    #[test]
    fn grid_csv() {
        let mut text = String::from("x,y,H\n");
        for iy in 0..16 {
            for ix in 0..20 {
                let (x, y) = (-1.0 + 0.1 * ix as f64, 0.05 * iy as f64);
                text.push_str(&format!("{x},{y},{}\n", 1.0 + x * x + y * y));
            }
        }
        let g = read_grid(text.as_bytes()).unwrap();
        assert_eq!((g.nx, g.ny), (20, 16));
        assert!((g.dx - 0.1).abs() < 1e-12);
        let bad = text.replacen("-0.9,0,", "-0.85,0,", 1);
        assert!(matches!(read_grid(bad.as_bytes()), Err(Error::Parse(_))));
    }
}
