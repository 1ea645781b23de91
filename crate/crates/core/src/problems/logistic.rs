use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Objective};
use crate::problems::SparseDataset;

/// Average logistic loss `(1/m) Σ log(1 + exp(−yᵢ xᵢᵀw))`.
#[derive(Debug, Clone)]
pub struct LogisticLoss {
    data: Arc<SparseDataset>,
}

/// `log(1 + eᵗ)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl LogisticLoss {
    pub fn new(data: Arc<SparseDataset>) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &SparseDataset {
        &self.data
    }

    fn margin(row: &[(usize, f64)], w: &DenseVector) -> f64 {
        row.iter().map(|&(j, v)| v * w[j]).sum()
    }
}

/// Loss and gradient in one pass; errors on a dimension mismatch.
pub fn logistic_loss_grad(data: &SparseDataset, w: &DenseVector) -> Result<(f64, DenseVector)> {
    if w.len() != data.n_features {
        return Err(Error::DimensionMismatch {
            expected: data.n_features,
            found: w.len(),
        });
    }
    let m = data.n_samples() as f64;
    let mut f = 0.0;
    let mut g = DenseVector::zeros(w.len());
    for (row, &y) in data.rows.iter().zip(&data.labels) {
        let t = -y * LogisticLoss::margin(row, w);
        f += softplus(t);
        let weight = -y * sigmoid(t);
        for &(j, v) in row {
            g[j] += weight * v;
        }
    }
    Ok((f / m, g / m))
}

impl Objective for LogisticLoss {
    fn dim(&self) -> usize {
        self.data.n_features
    }

    fn value(&self, w: &DenseVector) -> f64 {
        let m = self.data.n_samples() as f64;
        self.data
            .rows
            .iter()
            .zip(&self.data.labels)
            .map(|(row, &y)| softplus(-y * Self::margin(row, w)))
            .sum::<f64>()
            / m
    }

    fn gradient(&self, w: &DenseVector) -> DenseVector {
        self.value_and_gradient(w).1
    }

    fn value_and_gradient(&self, w: &DenseVector) -> (f64, DenseVector) {
        logistic_loss_grad(&self.data, w).expect("dimension checked by the solver")
    }
}
