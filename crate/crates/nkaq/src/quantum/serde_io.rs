//! JSON wire formats for matrices, superoperators and measurements.
//!
//! A matrix is `{"dim": n, "entries": [[re, im], ...]}` with row-major
//! entries; a superoperator is `{"kraus": [matrix, ...]}`; a measurement
//! is `{"ops": {"0": matrix, "1": matrix, ...}}` keyed by outcome index.

use super::{CMat, Measurement, QuantumError, Superoperator};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> Self {
        assert!(m.is_square(), "matrix file format is square-only");
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
        MatrixJson { dim, entries }
    }

    pub fn to_mat(&self) -> Result<CMat, QuantumError> {
        if self.entries.len() != self.dim * self.dim {
            return Err(QuantumError::DimMismatch(format!(
                "matrix dim {} needs {} entries, found {}",
                self.dim,
                self.dim * self.dim,
                self.entries.len()
            )));
        }
        Ok(CMat::from_fn(self.dim, self.dim, |r, c| {
            let [re, im] = self.entries[r * self.dim + c];
            Complex64::new(re, im)
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperopJson {
    pub kraus: Vec<MatrixJson>,
}

impl SuperopJson {
    pub fn from_superop(e: &Superoperator) -> Self {
        SuperopJson {
            kraus: e.kraus().iter().map(MatrixJson::from_mat).collect(),
        }
    }

    pub fn to_superop(&self) -> Result<Superoperator, QuantumError> {
        let kraus = self
            .kraus
            .iter()
            .map(MatrixJson::to_mat)
            .collect::<Result<Vec<_>, _>>()?;
        Superoperator::from_kraus(kraus)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub ops: BTreeMap<String, MatrixJson>,
}

impl MeasurementJson {
    pub fn from_measurement(m: &Measurement) -> Self {
        MeasurementJson {
            ops: m
                .ops()
                .iter()
                .enumerate()
                .map(|(i, op)| (i.to_string(), MatrixJson::from_mat(op)))
                .collect(),
        }
    }

    /// Outcome keys must be exactly 0..n.
    pub fn to_measurement(&self, tol: f64) -> Result<Measurement, QuantumError> {
        let mut ops = Vec::new();
        for i in 0..self.ops.len() {
            let m = self.ops.get(&i.to_string()).ok_or_else(|| {
                QuantumError::DimMismatch(format!("missing measurement outcome {i}"))
            })?;
            ops.push(m.to_mat()?);
        }
        Measurement::new(ops, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{choi_distance, ketbra, max_abs};

    #[test]
    fn matrix_roundtrip() {
        let m = ketbra(3, 1, 2).scale(0.5) + ketbra(3, 0, 0);
        let j = MatrixJson::from_mat(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert!(max_abs(&(back.to_mat().unwrap() - m)) < 1e-15);
    }

    #[test]
    fn superop_roundtrip() {
        let e = Measurement::computational(2).branch(0);
        let j = SuperopJson::from_superop(&e);
        let back = j.to_superop().unwrap();
        assert!(choi_distance(&e, &back) < 1e-15);
    }

    #[test]
    fn measurement_roundtrip() {
        let m = Measurement::projective_split(4, &[2, 3]);
        let j = MeasurementJson::from_measurement(&m);
        let back = j.to_measurement(1e-9).unwrap();
        assert_eq!(back.n_outcomes(), 2);
        assert!(max_abs(&(&back.ops()[1] - &m.ops()[1])) < 1e-15);
    }
}
