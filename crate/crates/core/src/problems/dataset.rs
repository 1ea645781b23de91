//! Sparse `label idx:val idx:val ...` datasets.

use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Binary classification data with an intercept column appended last.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    /// 0-based `(feature, value)` pairs, strictly increasing in feature index.
    pub rows: Vec<Vec<(usize, f64)>>,
    /// ±1 labels.
    pub labels: Vec<f64>,
    /// Number of columns including the intercept.
    pub n_features: usize,
}

impl SparseDataset {
    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    /// Parses a dataset. `raw_features` fixes the raw column count; when
    /// `None`, the largest index seen is used. Labels `0/1` map to `−1/+1`.
    pub fn parse<R: BufRead>(reader: R, raw_features: Option<usize>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut max_index = 0usize;

        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let mut tokens = content.split_whitespace();
            let label_tok = tokens.next().expect("nonempty line has a token");
            let label: f64 = label_tok
                .parse()
                .map_err(|_| err(format!("bad label '{label_tok}'")))?;
            let label = if label == 1.0 {
                1.0
            } else if label == -1.0 || label == 0.0 {
                -1.0
            } else {
                return Err(err(format!("label {label} is not binary")));
            };

            let mut row = Vec::new();
            let mut last: Option<usize> = None;
            for tok in tokens {
                let (idx, val) = tok
                    .split_once(':')
                    .ok_or_else(|| err(format!("expected index:value, got '{tok}'")))?;
                let idx: usize = idx
                    .parse()
                    .map_err(|_| err(format!("bad feature index '{idx}'")))?;
                let val: f64 = val
                    .parse()
                    .map_err(|_| err(format!("bad feature value '{val}'")))?;
                if idx == 0 {
                    return Err(err("feature indices are 1-based".into()));
                }
                if !val.is_finite() {
                    return Err(err(format!("non-finite value at index {idx}")));
                }
                if last.is_some_and(|prev| idx <= prev) {
                    return Err(err(format!("index {idx} is not strictly increasing")));
                }
                if let Some(limit) = raw_features {
                    if idx > limit {
                        return Err(err(format!(
                            "index {idx} exceeds {limit} declared features"
                        )));
                    }
                }
                last = Some(idx);
                max_index = max_index.max(idx);
                row.push((idx - 1, val));
            }
            rows.push(row);
            labels.push(label);
        }

        if rows.is_empty() {
            return Err(Error::invalid("dataset has no samples"));
        }
        let raw = raw_features.unwrap_or(max_index);
        for row in &mut rows {
            row.push((raw, 1.0));
        }
        Ok(Self {
            rows,
            labels,
            n_features: raw + 1,
        })
    }

    pub fn from_path(path: &Path, raw_features: Option<usize>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(std::io::BufReader::new(file), raw_features)
    }

    /// Random sparse dataset with labels drawn from a logistic model, so that
    /// the classes overlap and the unconstrained loss has a finite minimizer
    /// with high probability.
    pub fn synthetic(samples: usize, raw_features: usize, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (density * raw_features as f64).max(1.0).sqrt();
        let truth: Vec<f64> = (0..raw_features)
            .map(|_| 2.0 * scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let bias: f64 = rng.random_range(-0.5..0.5);

        let mut rows = Vec::with_capacity(samples);
        let mut labels = Vec::with_capacity(samples);
        for _ in 0..samples {
            let mut row = Vec::new();
            let mut margin = bias;
            for (j, t) in truth.iter().enumerate() {
                if rng.random::<f64>() < density {
                    let v: f64 = rng.sample(StandardNormal);
                    margin += t * v;
                    row.push((j, v));
                }
            }
            row.push((raw_features, 1.0));
            let p = 1.0 / (1.0 + (-margin).exp());
            labels.push(if rng.random::<f64>() < p { 1.0 } else { -1.0 });
            rows.push(row);
        }
        Self {
            rows,
            labels,
            n_features: raw_features + 1,
        }
    }

    /// Serializes back to the text format (the intercept column is dropped).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (row, label) in self.rows.iter().zip(&self.labels) {
            out.push_str(if *label > 0.0 { "+1" } else { "-1" });
            for &(j, v) in row.iter().filter(|(j, _)| *j + 1 < self.n_features) {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
            out.push('\n');
        }
        out
    }
}
