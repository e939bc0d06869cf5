//! Flat-file formats for fields and trajectories.
//!
//! CSV (field): header `x0,...,x{N-1},value`, one row per node in row-major
//! order (last axis fastest), values printed with 17 significant digits.
//!
//! Checkpoint (trajectory), little endian, version 1:
//!
//! | bytes        | content                              |
//! |--------------|--------------------------------------|
//! | 8            | magic `ANDLTS\0\0`                   |
//! | 4 (u32)      | format version (1)                   |
//! | 4 (u32)      | dimension N                          |
//! | 8·N (u64)    | node counts                          |
//! | 8·N (f64)    | box lower corner                     |
//! | 8·N (f64)    | box upper corner                     |
//! | 8 (u64)      | number of frames F                   |
//! | F·8·(1+len)  | per frame: time, then nodal values   |

use std::io::{BufRead, Read, Write};
use std::sync::Arc;

use super::field::{ScalarField, TimeSeries};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::model::BoxDomain;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"ANDLTS\0\0";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_field_csv<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    let grid = field.grid();
    let header: Vec<String> = (0..grid.dim()).map(|j| format!("x{j}")).collect();
    writeln!(out, "{},value", header.join(","))?;
    let mut x = vec![0.0; grid.dim()];
    for (flat, v) in field.values().iter().enumerate() {
        grid.point_into(flat, &mut x);
        for xi in &x {
            write!(out, "{xi:.17e},")?;
        }
        writeln!(out, "{v:.17e}")?;
    }
    Ok(())
}

/// Reads the values column of a field CSV written for `grid`.
pub fn read_field_csv<R: BufRead>(grid: Arc<Grid>, input: R, time: f64) -> Result<ScalarField> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV".into()))??;
    let columns = header.split(',').count();
    if columns != grid.dim() + 1 {
        return Err(Error::Format(format!(
            "expected {} columns, header has {columns}",
            grid.dim() + 1
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let last = line
            .rsplit(',')
            .next()
            .ok_or_else(|| Error::Format(format!("row {row}: empty")))?;
        let v: f64 = last
            .trim()
            .parse()
            .map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        values.push(v);
    }
    ScalarField::new(grid, values, time)
}

pub fn write_checkpoint<W: Write>(series: &TimeSeries, mut out: W) -> Result<()> {
    let grid = series.grid();
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &c in grid.counts() {
        out.write_all(&(c as u64).to_le_bytes())?;
    }
    for &v in grid.lower().iter().chain(grid.upper()) {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&(series.len() as u64).to_le_bytes())?;
    for frame in series.frames() {
        out.write_all(&frame.time().to_le_bytes())?;
        for v in frame.values() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_array<const B: usize, R: Read>(input: &mut R) -> Result<[u8; B]> {
    let mut buf = [0u8; B];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array::<4, _>(input)?))
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array::<8, _>(input)?))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array::<8, _>(input)?))
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<TimeSeries> {
    let magic = read_array::<8, _>(&mut input)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = read_u32(&mut input)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut input)? as usize;
    if dim == 0 || dim > 8 {
        return Err(Error::Format(format!("implausible dimension {dim}")));
    }
    let counts = (0..dim)
        .map(|_| read_u64(&mut input).map(|c| c as usize))
        .collect::<Result<Vec<_>>>()?;
    let lower = (0..dim).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let upper = (0..dim).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let grid = Arc::new(Grid::new(&BoxDomain::new(lower, upper)?, counts)?);
    let frames = read_u64(&mut input)? as usize;
    let mut out = Vec::with_capacity(frames);
    for _ in 0..frames {
        let t = read_f64(&mut input)?;
        let values = (0..grid.len())
            .map(|_| read_f64(&mut input))
            .collect::<Result<Vec<_>>>()?;
        out.push(ScalarField::new(grid.clone(), values, t)?);
    }
    TimeSeries::new(out)
}
