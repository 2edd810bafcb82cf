//! Training samples `(x_i, y_i)`.
//!
//! CSV layout: one row per sample, the input features followed by the scalar
//! target in the last column. A header row is optional and detected by
//! whether the first row parses as numbers.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tensor::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vector>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vector>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Dataset("needs at least one sample".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::Dataset(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let d = inputs[0].dim();
        if d == 0 {
            return Err(Error::Dataset("inputs must have at least one feature".into()));
        }
        if let Some(i) = inputs.iter().position(|x| x.dim() != d) {
            return Err(Error::Dataset(format!(
                "sample {i} has {} features, expected {d}",
                inputs[i].dim()
            )));
        }
        Ok(Dataset { inputs, targets })
    }

    /// `n` inputs drawn uniformly from the unit sphere in `R^dim`, targets
    /// uniform on `[lo, hi)`.
    pub fn random_unit(n: usize, dim: usize, lo: f64, hi: f64, rng: &mut RngStream) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::Dataset("random dataset needs n ≥ 1 and dim ≥ 1".into()));
        }
        let mut inputs = Vec::with_capacity(n);
        for _ in 0..n {
            let x = Vector::gaussian(dim, rng);
            let norm = x.l2_norm();
            inputs.push(x.scaled(1.0 / norm));
        }
        let targets = (0..n).map(|_| rng.uniform_range(lo, hi)).collect();
        Dataset::new(inputs, targets)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        Dataset::from_csv_reader(file)
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Dataset(e.to_string()))?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if line == 0 => continue,
                Err(e) => {
                    return Err(Error::Dataset(format!("line {}: {e}", line + 1)));
                }
            };
            if row.len() < 2 {
                return Err(Error::Dataset(format!(
                    "line {}: need at least one feature and a target",
                    line + 1
                )));
            }
            let (x, y) = row.split_at(row.len() - 1);
            inputs.push(Vector::from_vec(x.to_vec()));
            targets.push(y[0]);
        }
        Dataset::new(inputs, targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].dim()
    }

    pub fn inputs(&self) -> &[Vector] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Self> {
        Dataset::new(self.inputs.clone(), targets)
    }
}
