//! Reading and writing the `PLSTRAT` text format.
//!
//! ```text
//! PLSTRAT 3
//! 4
//! 0 0 0
//! 1 0 0
//! ...
//! 0 0
//! 1 0 1
//! ```
//!
//! After the header and the vertex block, every remaining line is a cell
//! `dim v0 .. vdim`. Blank lines and text after `#` are ignored.

use std::fmt::Write as _;

use nalgebra::DVector;

use super::complex::StratifiedComplex;
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_plstrat(text: &str) -> Result<StratifiedComplex> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("PLSTRAT") {
        return Err(perr(ln, "expected header `PLSTRAT n`"));
    }
    let n: usize = tok
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| perr(ln, "bad ambient dimension"))?;

    let (ln, count) = lines.next().ok_or_else(|| perr(ln, "missing vertex count"))?;
    let count: usize = count.parse().map_err(|_| perr(ln, "bad vertex count"))?;

    let mut vertices = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, l) = lines.next().ok_or_else(|| perr(ln, "truncated vertex block"))?;
        let coords: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(ln, format!("bad coordinate: {e}")))?;
        if coords.len() != n || coords.iter().any(|c| !c.is_finite()) {
            return Err(perr(ln, format!("expected {n} finite coordinates")));
        }
        vertices.push(DVector::from_vec(coords));
    }

    let mut cells = Vec::new();
    for (ln, l) in lines {
        let nums: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(ln, format!("bad cell entry: {e}")))?;
        let (&dim, verts) = nums.split_first().ok_or_else(|| perr(ln, "empty cell"))?;
        if verts.len() != dim + 1 {
            return Err(perr(ln, format!("cell of dim {dim} needs {} vertices", dim + 1)));
        }
        if let Some(&v) = verts.iter().find(|&&v| v >= count) {
            return Err(perr(ln, format!("vertex {v} out of range")));
        }
        cells.push(verts.to_vec());
    }
    StratifiedComplex::from_cells(vertices, &cells)
}

pub fn write_plstrat(k: &StratifiedComplex) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "PLSTRAT {}", k.ambient_dim());
    let _ = writeln!(s, "{}", k.vertices().len());
    for v in k.vertices() {
        let coords: Vec<String> = v.iter().map(|c| format!("{c:?}")).collect();
        let _ = writeln!(s, "{}", coords.join(" "));
    }
    for (_, c) in k.cells() {
        let idx: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{} {}", c.len() - 1, idx.join(" "));
    }
    s
}
