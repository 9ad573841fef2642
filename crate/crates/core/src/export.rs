//! Plain-text and binary serializations.
//!
//! CSV files use `.` as decimal separator and LF line endings; floats are
//! written with Rust's shortest round-trip formatting so reruns are
//! byte-identical.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::QuasiMode;
use crate::geometry::BoundaryCurve;
use crate::npcore::{OperatorMatrix, SpectrumResult};
use crate::sweep::{NodePolicy, ProbeGrid, SweepReport};

pub fn write_curve_csv<W: Write>(curve: &BoundaryCurve, mut w: W) -> Result<()> {
    writeln!(w, "t,x,y,nx,ny,speed,curvature")?;
    for i in 0..curve.n_nodes() {
        let p = curve.points()[i];
        let n = curve.normals()[i];
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            curve.params()[i],
            p.x,
            p.y,
            n.x,
            n.y,
            curve.speeds()[i],
            curve.curvatures()[i]
        )?;
    }
    Ok(())
}

/// Two little-endian `u64` dimensions followed by row-major little-endian `f64`.
pub fn write_matrix_binary<W: Write>(m: &DMatrix<f64>, mut w: W) -> Result<()> {
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn write_operator_binary<W: Write>(op: &OperatorMatrix, w: W) -> Result<()> {
    write_matrix_binary(&op.entries, w)
}

pub fn read_matrix_binary<R: Read>(mut r: R) -> Result<DMatrix<f64>> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_spectrum_csv<W: Write>(spec: &SpectrumResult, mut w: W) -> Result<()> {
    writeln!(w, "index,eigenvalue")?;
    for (i, l) in spec.eigenvalues.iter().enumerate() {
        writeln!(w, "{i},{l}")?;
    }
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(mut r: R) -> Result<Vec<f64>> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    if lines.next() != Some("index,eigenvalue") {
        return Err(Error::Parse("missing spectrum CSV header".into()));
    }
    lines
        .map(|line| {
            let value = line
                .split(',')
                .nth(1)
                .ok_or_else(|| Error::Parse(format!("malformed row {line:?}")))?;
            value
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{value:?}: {e}")))
        })
        .collect()
}

pub fn write_quasimode_csv<W: Write>(qm: &QuasiMode, mut w: W) -> Result<()> {
    writeln!(w, "x,re,im")?;
    for (x, z) in qm.grid.abscissae().iter().zip(&qm.samples) {
        writeln!(w, "{x},{},{}", z.re, z.im)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub lambda: f64,
    pub r: f64,
    pub ratio: f64,
}

pub fn write_residual_csv<W: Write>(rows: &[ResidualRow], mut w: W) -> Result<()> {
    writeln!(w, "lambda,R,ratio")?;
    for row in rows {
        writeln!(w, "{},{},{}", row.lambda, row.r, row.ratio)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidualRow {
    pub lambda: f64,
    pub r: f64,
    pub n_nodes: usize,
    pub ratio: f64,
}

pub fn write_boundary_residual_csv<W: Write>(rows: &[BoundaryResidualRow], mut w: W) -> Result<()> {
    writeln!(w, "lambda,R,n_nodes,ratio")?;
    for row in rows {
        writeln!(w, "{},{},{},{}", row.lambda, row.r, row.n_nodes, row.ratio)?;
    }
    Ok(())
}

/// On-disk JSON layout of a [`SweepReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepJson {
    pub r_list: Vec<f64>,
    pub n_nodes: Vec<usize>,
    pub eigenvalues: Vec<Vec<f64>>,
    pub fill_distances: Vec<f64>,
    pub outside_counts: Vec<usize>,
    pub grid: ProbeGrid,
    pub node_policy: NodePolicy,
}

impl From<&SweepReport> for SweepJson {
    fn from(r: &SweepReport) -> Self {
        SweepJson {
            r_list: r.r_list.clone(),
            n_nodes: r.spectra.iter().map(|s| s.n_nodes).collect(),
            eigenvalues: r.spectra.iter().map(|s| s.eigenvalues.clone()).collect(),
            fill_distances: r.fill_distances.clone(),
            outside_counts: r.outside_counts.clone(),
            grid: r.lambda_grid,
            node_policy: r.node_policy,
        }
    }
}

pub fn write_sweep_json<W: Write>(report: &SweepReport, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &SweepJson::from(report))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_sweep_json<R: Read>(r: R) -> Result<SweepJson> {
    Ok(serde_json::from_reader(r)?)
}

/// One row per `(R, eigenvalue)`.
pub fn write_sweep_csv<W: Write>(report: &SweepReport, mut w: W) -> Result<()> {
    writeln!(w, "R,index,eigenvalue")?;
    for (r, s) in report.r_list.iter().zip(&report.spectra) {
        for (i, l) in s.eigenvalues.iter().enumerate() {
            writeln!(w, "{r},{i},{l}")?;
        }
    }
    Ok(())
}
