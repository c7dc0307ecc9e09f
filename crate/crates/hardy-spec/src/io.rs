//! Plain-text dumps. CSV files start with `#` comment lines (the config hash and
//! shape metadata), then a header row. JSON sidecars carry grid metadata and
//! parameters. Floats are written in Rust's shortest round-trip form, so equal
//! inputs give byte-identical files.

use crate::hardy::Discretization;
use crate::operator::OperatorMatrix;
use crate::spectra::{PseudospectrumMap, SpectralSet};
use crate::symbol::PointCloud;
use crate::{Error, Result, C64};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

fn io_err(e: std::io::Error) -> Error {
    Error::Usage(format!("i/o failure: {e}"))
}

fn comments<W: Write>(w: &mut W, hash: Option<&str>, extra: &[String]) -> Result<()> {
    if let Some(h) = hash {
        writeln!(w, "# config_hash={h}").map_err(io_err)?;
    }
    for line in extra {
        writeln!(w, "# {line}").map_err(io_err)?;
    }
    Ok(())
}

/// Non-comment, non-empty lines after the header row.
fn data_lines<R: BufRead>(r: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut header = false;
    for line in r.lines() {
        let line = line.map_err(io_err)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !header {
            header = true;
            continue;
        }
        out.push(t.to_string());
    }
    Ok(out)
}

fn parse_floats(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Usage(format!("bad number '{s}': {e}"))))
        .collect()
}

/// `re,im` per point.
pub fn write_cloud_csv<W: Write>(w: &mut W, cloud: &PointCloud, hash: Option<&str>) -> Result<()> {
    comments(w, hash, &[format!("label={}", cloud.label)])?;
    writeln!(w, "re,im").map_err(io_err)?;
    for p in &cloud.points {
        writeln!(w, "{},{}", p.re, p.im).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_cloud_csv<R: BufRead>(r: R, label: &str) -> Result<PointCloud> {
    let mut pts = Vec::new();
    for line in data_lines(r)? {
        let v = parse_floats(&line)?;
        if v.len() != 2 {
            return Err(Error::Usage(format!("expected re,im but got '{line}'")));
        }
        pts.push(C64::new(v[0], v[1]));
    }
    Ok(PointCloud::new(pts, label))
}

pub fn write_set_csv<W: Write>(w: &mut W, set: &SpectralSet, hash: Option<&str>) -> Result<()> {
    write_cloud_csv(w, &set.points, hash)
}

/// One CSV line per matrix row: `re_0,im_0,re_1,im_1,...`.
pub fn write_matrix_csv<W: Write>(w: &mut W, m: &Array2<C64>, hash: Option<&str>) -> Result<()> {
    let (r, c) = m.dim();
    comments(w, hash, &[format!("rows={r} cols={c}")])?;
    let head: Vec<String> = (0..c).map(|k| format!("re{k},im{k}")).collect();
    writeln!(w, "{}", head.join(",")).map_err(io_err)?;
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{},{}", v.re, v.im)).collect();
        writeln!(w, "{}", cells.join(",")).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(r: R) -> Result<Array2<C64>> {
    let rows: Vec<Vec<f64>> = data_lines(r)?.iter().map(|l| parse_floats(l)).collect::<Result<_>>()?;
    let n = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    if !width.is_multiple_of(2) || rows.iter().any(|r| r.len() != width) {
        return Err(Error::Usage("matrix CSV rows must have the same even number of fields".into()));
    }
    Ok(Array2::from_shape_fn((n, width / 2), |(i, j)| C64::new(rows[i][2 * j], rows[i][2 * j + 1])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub rows: usize,
    pub cols: usize,
    pub domain: Discretization,
    pub codomain: Discretization,
    pub config_hash: Option<String>,
}

impl MatrixSidecar {
    pub fn of(op: &OperatorMatrix, hash: Option<&str>) -> Self {
        let (rows, cols) = op.dim();
        Self {
            rows,
            cols,
            domain: (*op.domain).clone(),
            codomain: (*op.codomain).clone(),
            config_hash: hash.map(str::to_string),
        }
    }
}

/// `re,im,sigma_min` per grid point, imaginary index outer.
pub fn write_map_csv<W: Write>(w: &mut W, map: &PseudospectrumMap, hash: Option<&str>) -> Result<()> {
    let (nx, ny) = map.resolution;
    comments(w, hash, &[format!("resolution={nx}x{ny}")])?;
    writeln!(w, "re,im,sigma_min").map_err(io_err)?;
    for (j, row) in map.values.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let p = map.point(j, k);
            writeln!(w, "{},{},{}", p.re, p.im, v).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Usage(format!("json encoding failed: {e}")))?;
    writeln!(w).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloud_and_matrix_round_trip() {
        let c = PointCloud::new(vec![C64::new(0.1, -2.5), C64::new(1.0 / 3.0, 1e-300)], "x");
        let mut buf = Vec::new();
        write_cloud_csv(&mut buf, &c, Some("abc")).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# config_hash=abc\n"));
        assert_eq!(read_cloud_csv(&buf[..], "x").unwrap(), c);

        let m = Array2::from_shape_fn((2, 3), |(i, j)| C64::new(i as f64 + 0.1, -(j as f64) / 7.0));
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m, None).unwrap();
        assert_eq!(read_matrix_csv(&buf[..]).unwrap(), m);
    }
}
