//! JSON exchange formats for states and covariance matrices, and report emission.
//!
//! Discrete states: `{"dims":[…], "re":[…], "im":[…]}`. A vector carries
//! `total_dim` amplitudes, a density matrix `total_dim²` entries in row-major
//! order. Covariance matrices: `{"n_modes":k, "rows":[[…],…]}` in quadrature
//! order `(q₁, p₁, …, q_k, p_k)`. Finite doubles round-trip bit-exactly.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discrete::{DensityMatrix, DimsLayout, StateVector};
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmJson {
    pub n_modes: usize,
    pub rows: Vec<Vec<f64>>,
}

/// A decoded discrete state.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscreteState {
    Vector(StateVector),
    Density(DensityMatrix),
}

impl DiscreteState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            DiscreteState::Vector(v) => v.to_density(),
            DiscreteState::Density(d) => d.clone(),
        }
    }
}

/// Any state the exchange formats can carry.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Discrete(DiscreteState),
    Gaussian(CovarianceMatrix),
}

pub fn encode_vector(psi: &StateVector) -> StateJson {
    StateJson {
        dims: psi.layout().dims().to_vec(),
        re: psi.amplitudes().iter().map(|a| a.re).collect(),
        im: psi.amplitudes().iter().map(|a| a.im).collect(),
    }
}

pub fn encode_density(rho: &DensityMatrix) -> StateJson {
    let n = rho.dim();
    let row_major = (0..n).flat_map(|i| (0..n).map(move |j| (i, j)));
    StateJson {
        dims: rho.layout().dims().to_vec(),
        re: row_major.clone().map(|(i, j)| rho.entries()[(i, j)].re).collect(),
        im: row_major.map(|(i, j)| rho.entries()[(i, j)].im).collect(),
    }
}

pub fn encode_cm(sigma: &CovarianceMatrix) -> CmJson {
    let m = sigma.entries();
    CmJson {
        n_modes: sigma.n_modes(),
        rows: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
    }
}

fn exchange_layout(dims: &[usize]) -> Result<DimsLayout> {
    // ancilla parties of dimension 1 appear in purifications
    if dims.contains(&0) {
        return Err(Error::InvalidLayout("local dimension 0".into()));
    }
    match dims.split_last() {
        Some((&last, rest)) if last == 1 && !rest.is_empty() => DimsLayout::new(rest.to_vec())?.with_ancilla(1),
        _ => DimsLayout::new(dims.to_vec()),
    }
}

impl StateJson {
    pub fn decode(&self) -> Result<DiscreteState> {
        let layout = exchange_layout(&self.dims)?;
        if self.re.len() != self.im.len() {
            return Err(Error::LengthMismatch(self.re.len(), self.im.len()));
        }
        let total = layout.total_dim();
        let entries: Vec<Complex64> = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        if entries.len() == total {
            Ok(DiscreteState::Vector(StateVector::from_normalized(entries, layout)?))
        } else if Some(entries.len()) == total.checked_mul(total) {
            let m = DMatrix::from_row_slice(total, total, &entries);
            Ok(DiscreteState::Density(DensityMatrix::new(m, layout)?))
        } else {
            Err(Error::DimensionMismatch {
                expected: total,
                got: entries.len(),
            })
        }
    }
}

impl CmJson {
    pub fn decode(&self) -> Result<CovarianceMatrix> {
        let dim = self
            .n_modes
            .checked_mul(2)
            .filter(|&d| d > 0 && d <= 2 * crate::gaussian::MAX_MODES)
            .ok_or_else(|| Error::Domain(format!("unsupported mode count {}", self.n_modes)))?;
        if self.rows.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.rows.len(),
            });
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        CovarianceMatrix::new(DMatrix::from_fn(dim, dim, |i, j| self.rows[i][j]))
    }
}

pub fn decode_state(text: &str) -> Result<DiscreteState> {
    serde_json::from_str::<StateJson>(text)?.decode()
}

pub fn decode_cm(text: &str) -> Result<CovarianceMatrix> {
    serde_json::from_str::<CmJson>(text)?.decode()
}

/// Decodes either exchange format, dispatching on the `n_modes` key.
pub fn decode_any(text: &str) -> Result<AnyState> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("n_modes").is_some() {
        Ok(AnyState::Gaussian(serde_json::from_value::<CmJson>(value)?.decode()?))
    } else {
        Ok(AnyState::Discrete(serde_json::from_value::<StateJson>(value)?.decode()?))
    }
}

pub fn read_state_file(path: &Path) -> Result<AnyState> {
    decode_any(&fs::read_to_string(path)?)
}

/// Pretty JSON with object keys sorted, followed by a newline.
pub fn to_sorted_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Tabular view of a report for CSV output.
pub trait CsvRows {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

/// A report that can be emitted in either output format.
pub trait Report: Serialize + CsvRows {}

impl<T: Serialize + CsvRows> Report for T {}

pub fn render_report<R: Report + ?Sized>(report: &R, format: Format) -> Result<String> {
    match format {
        Format::Json => to_sorted_json(report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.csv_header())?;
            for row in report.csv_rows() {
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report<R: Report + ?Sized>(report: &R, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render_report(report, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Formats a float for CSV cells using the shortest round-trip representation.
pub(crate) fn cell(x: f64) -> String {
    format!("{x:?}")
}
