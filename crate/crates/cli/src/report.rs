//! CSV artifacts of a run.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use galerkin_nn::driver::EpochRecord;
use galerkin_nn::forms::Domain;
use galerkin_nn::{IterationRecord, QuadratureRule};
use serde::{Deserialize, Serialize};

pub type CsvResult<T> = Result<T, csv::Error>;

fn writer(path: &Path) -> CsvResult<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub n_i: usize,
    pub eta: f64,
    pub l2_eta: f64,
    pub true_l2: Option<f64>,
    pub true_energy: Option<f64>,
    pub cond: Option<f64>,
    pub wall_time: f64,
}

impl From<&IterationRecord> for HistoryRow {
    fn from(r: &IterationRecord) -> Self {
        HistoryRow {
            iteration: r.iteration,
            n_i: r.width,
            eta: r.eta,
            l2_eta: r.l2_eta,
            true_l2: r.true_l2,
            true_energy: r.true_energy,
            cond: r.cond,
            wall_time: r.wall_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub iteration: usize,
    pub beta: f64,
    pub learning_rate: f64,
    pub orthogonality: Option<f64>,
    pub normalization: Option<f64>,
    pub param_norm: f64,
    pub lsq_fallbacks: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub galerkin_iter: usize,
    pub epoch: usize,
    pub eta: f64,
    pub l2_eta: f64,
    pub param_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondRow {
    pub iteration: usize,
    pub basis_size: usize,
    pub cond: f64,
}

pub fn write_history(path: &Path, history: &[IterationRecord]) -> CsvResult<()> {
    let mut w = writer(path)?;
    for r in history {
        w.serialize(HistoryRow::from(r))?;
    }
    if history.is_empty() {
        w.write_record(["iteration", "n_i", "eta", "l2_eta", "true_l2", "true_energy", "cond", "wall_time"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics(path: &Path, history: &[IterationRecord]) -> CsvResult<()> {
    let mut w = writer(path)?;
    for r in history {
        w.serialize(DiagnosticsRow {
            iteration: r.iteration,
            beta: r.scale,
            learning_rate: r.learning_rate,
            orthogonality: r.orthogonality,
            normalization: r.normalization,
            param_norm: r.param_norm,
            lsq_fallbacks: r.lsq_fallbacks,
            accepted: r.accepted,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_epochs(path: &Path, epochs: &[EpochRecord]) -> CsvResult<()> {
    let mut w = writer(path)?;
    for e in epochs {
        w.serialize(EpochRow {
            galerkin_iter: e.iteration,
            epoch: e.record.epoch,
            eta: e.record.eta,
            l2_eta: e.record.l2_eta,
            param_norm: e.record.param_norm,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// One row per accepted iteration; the basis size is the iteration count
/// after the new function was added.
pub fn write_cond(path: &Path, history: &[IterationRecord]) -> CsvResult<()> {
    let mut w = writer(path)?;
    w.write_record(["iteration", "basis_size", "cond"])?;
    let mut size = 0;
    for r in history.iter().filter(|r| r.accepted) {
        size += 1;
        if let Some(cond) = r.cond {
            w.serialize((r.iteration, size, cond))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Row-major square matrix as `row,col,value`.
pub fn write_matrix(path: &Path, m: usize, values: &[f64]) -> CsvResult<()> {
    let mut w = writer(path)?;
    w.write_record(["row", "col", "value"])?;
    for i in 0..m {
        for j in 0..m {
            w.serialize((i, j, values[i * m + j]))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients(path: &Path, coeffs: &[f64]) -> CsvResult<()> {
    let mut w = writer(path)?;
    w.write_record(["index", "coefficient"])?;
    for (k, c) in coeffs.iter().enumerate() {
        w.serialize((k + 1, c))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x[,y]` followed by one column per named field.
pub fn write_samples(path: &Path, dim: usize, points: &[f64], columns: &[(&str, &[f64])]) -> CsvResult<()> {
    let mut w = writer(path)?;
    let mut header: Vec<&str> = ["x", "y"][..dim].to_vec();
    header.extend(columns.iter().map(|(n, _)| *n));
    w.write_record(&header)?;
    let len = points.len() / dim;
    let mut row = Vec::with_capacity(dim + columns.len());
    for q in 0..len {
        row.clear();
        row.extend_from_slice(&points[q * dim..(q + 1) * dim]);
        row.extend(columns.iter().map(|(_, v)| v[q]));
        w.serialize(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Nodes and weights as `x[,y],w`.
pub fn write_rule(path: &Path, rule: &QuadratureRule) -> CsvResult<()> {
    write_samples(path, rule.dim(), rule.points(), &[("w", rule.weights())])
}

/// Uniform grid with `n` points per direction over the domain's bounding
/// box, keeping the points inside the closed domain.
pub fn grid(domain: &Domain, n: usize) -> Vec<f64> {
    let (lo, hi) = domain.bounding_box();
    let at = |k: usize, i: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64;
    match domain.dim() {
        1 => (0..n).map(|i| at(0, i)).collect(),
        _ => {
            let mut pts = Vec::with_capacity(2 * n * n);
            for j in 0..n {
                for i in 0..n {
                    let p = [at(0, i), at(1, j)];
                    if domain.contains(&p) {
                        pts.extend_from_slice(&p);
                    }
                }
            }
            pts
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_stay_in_the_domain() {
        let g = grid(&Domain::Interval { a: 0.0, b: 1.0 }, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let l = grid(&Domain::LShape, 5);
        // 25 points minus the 4 with x < 0 and y < 0
        assert_eq!(l.len(), 2 * 21);
        let d = grid(&Domain::Disk { radius: 1.0 }, 3);
        // center and the four axis points
        assert_eq!(d.len(), 2 * 5);
    }
}
