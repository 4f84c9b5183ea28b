//! Binary gauge-configuration files.
//!
//! Layout: one ASCII header line `schwinger-u1 v1 L T beta m0 seed\n` followed by
//! `2·L·T` little-endian `f64` link angles in link order (site-major, then μ = x, t).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::field::GaugeField;
use super::geom::LatticeGeom;
use crate::error::{Error, Result};

const MAGIC: &str = "schwinger-u1";
const VERSION: &str = "v1";

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeFileHeader {
    pub l: usize,
    pub t: usize,
    pub beta: f64,
    pub m0: f64,
    pub seed: u64,
}

impl GaugeFileHeader {
    pub fn line(&self) -> String {
        format!(
            "{MAGIC} {VERSION} {} {} {:?} {:?} {}",
            self.l, self.t, self.beta, self.m0, self.seed
        )
    }
}

pub fn write_gauge<W: Write>(mut w: W, header: &GaugeFileHeader, field: &GaugeField) -> Result<()> {
    writeln!(w, "{}", header.line())?;
    for q in field.angles() {
        w.write_all(&q.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_gauge<R: BufRead>(mut r: R, path: &Path) -> Result<(GaugeFileHeader, GaugeField)> {
    let bad = |message: String| Error::GaugeFile {
        path: path.to_path_buf(),
        message,
    };
    let mut line = String::new();
    r.read_line(&mut line)?;
    let tokens: Vec<&str> = line.trim_end_matches('\n').split(' ').collect();
    if tokens.len() != 7 || tokens[0] != MAGIC || tokens[1] != VERSION {
        return Err(bad(format!("bad header `{}`", line.trim_end())));
    }
    let header = GaugeFileHeader {
        l: tokens[2].parse().map_err(|e| bad(format!("L: {e}")))?,
        t: tokens[3].parse().map_err(|e| bad(format!("T: {e}")))?,
        beta: tokens[4].parse().map_err(|e| bad(format!("beta: {e}")))?,
        m0: tokens[5].parse().map_err(|e| bad(format!("m0: {e}")))?,
        seed: tokens[6].parse().map_err(|e| bad(format!("seed: {e}")))?,
    };
    let geom = LatticeGeom::new(header.l, header.t)?;
    let mut bytes = Vec::with_capacity(8 * geom.n_links());
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * geom.n_links() {
        return Err(bad(format!(
            "expected {} bytes of link data, found {}",
            8 * geom.n_links(),
            bytes.len()
        )));
    }
    let angles: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if angles.iter().any(|q| !q.is_finite()) {
        return Err(bad("non-finite link angle".into()));
    }
    Ok((header, GaugeField::from_angles(geom, angles)?))
}

pub fn save_gauge(path: &Path, header: &GaugeFileHeader, field: &GaugeField) -> Result<()> {
    write_gauge(BufWriter::new(File::create(path)?), header, field)
}

pub fn load_gauge(path: &Path) -> Result<(GaugeFileHeader, GaugeField)> {
    read_gauge(BufReader::new(File::open(path)?), path)
}
