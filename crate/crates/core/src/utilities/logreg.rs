//! Multinomial logistic regression fit by full-batch gradient descent.
//!
//! Weights start at zero and the objective is convex, so a fit depends only on
//! the rows it is given: no seeds are involved.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerConfig {
    pub iterations: usize,
    pub step_size: f64,
    pub l2: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig { iterations: 500, step_size: 0.1, l2: 1e-4 }
    }
}

/// Per-feature affine map to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    /// Statistics of all rows of `ds`; constant columns get scale 1.
    pub fn fit(ds: &Dataset) -> Self {
        let d = ds.dim();
        let m = ds.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for row in ds.rows() {
            for (acc, x) in mean.iter_mut().zip(row) {
                *acc += x;
            }
        }
        mean.iter_mut().for_each(|x| *x /= m);
        let mut var = vec![0.0; d];
        for row in ds.rows() {
            for ((acc, x), mu) in var.iter_mut().zip(row).zip(&mean) {
                *acc += (x - mu) * (x - mu);
            }
        }
        let scale = var.into_iter().map(|v| if v > 0.0 { (v / m).sqrt() } else { 1.0 }).collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.dim() != self.mean.len() {
            return Err(Error::invalid(format!("dimension {} does not match standardizer {}", ds.dim(), self.mean.len())));
        }
        let features = ds
            .rows()
            .flat_map(|row| row.iter().zip(&self.mean).zip(&self.scale).map(|((x, mu), s)| (x - mu) / s))
            .collect();
        let mut out = Dataset::new(features, ds.dim(), ds.labels().to_vec(), ds.n_classes())?;
        out.split = ds.split;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    /// Predicts one class everywhere (single-class training rows).
    Constant(usize),
    /// Row-major `n_classes x dim` weights and per-class biases.
    Linear { weights: Vec<f64>, bias: Vec<f64>, dim: usize },
}

impl Classifier {
    /// Highest-scoring class; ties go to the smallest class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            Classifier::Constant(c) => *c,
            Classifier::Linear { weights, bias, dim } => {
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for (c, b) in bias.iter().enumerate() {
                    let w = &weights[c * dim..(c + 1) * dim];
                    let score = b + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                    if score > best_score {
                        best = c;
                        best_score = score;
                    }
                }
                best
            }
        }
    }

    pub fn accuracy(&self, ds: &Dataset) -> f64 {
        if ds.is_empty() {
            return 0.0;
        }
        let correct = ds.rows().zip(ds.labels()).filter(|(x, &y)| self.predict(x) == y).count();
        correct as f64 / ds.len() as f64
    }
}

/// Fits on rows `rows` of `data` (features used as given).
pub fn train_classifier(data: &Dataset, rows: &[usize], cfg: &TrainerConfig) -> Result<Classifier> {
    let Some(&first) = rows.first() else {
        return Err(Error::invalid("cannot train a classifier on zero rows"));
    };
    let y0 = data.label(first);
    if rows.iter().all(|&i| data.label(i) == y0) {
        return Ok(Classifier::Constant(y0));
    }
    let d = data.dim();
    let k = data.n_classes();
    let m = rows.len() as f64;
    let mut weights = vec![0.0; k * d];
    let mut bias = vec![0.0; k];
    let mut grad_w = vec![0.0; k * d];
    let mut grad_b = vec![0.0; k];
    let mut p = vec![0.0; k];
    for _ in 0..cfg.iterations {
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        grad_b.iter_mut().for_each(|g| *g = 0.0);
        for &i in rows {
            let x = data.row(i);
            let mut max = f64::NEG_INFINITY;
            for c in 0..k {
                let w = &weights[c * d..(c + 1) * d];
                p[c] = bias[c] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                max = max.max(p[c]);
            }
            let mut z = 0.0;
            for pc in p.iter_mut() {
                *pc = (*pc - max).exp();
                z += *pc;
            }
            let y = data.label(i);
            for c in 0..k {
                let r = p[c] / z - if c == y { 1.0 } else { 0.0 };
                grad_b[c] += r;
                for (g, xj) in grad_w[c * d..(c + 1) * d].iter_mut().zip(x) {
                    *g += r * xj;
                }
            }
        }
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= cfg.step_size * (g / m + cfg.l2 * *w);
        }
        for (b, g) in bias.iter_mut().zip(&grad_b) {
            *b -= cfg.step_size * g / m;
        }
    }
    Ok(Classifier::Linear { weights, bias, dim: d })
}
