//! Linear surrogates `Û(S) = Σ_{i∈S} θ_i` fit by constrained weighted least squares.
//!
//! The fit minimizes `Σ_{∅≠S⊊D} w(|S|) (U(S) − U(∅) − Û(S))²` subject to
//! `Σ θ = U(D) − U(∅)`. The constraint is eliminated by writing
//! `θ = θ_p + N φ` with `θ_p = (Σθ / n) 1` and the columns of `N` equal to
//! `e_j − e_n`, and the reduced normal equations are solved with a tiny ridge.
//! Under the Shapley kernel the solution is exactly the Shapley value.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::binomial;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::semivalues::{scheme_weights, SemiValueScheme};
use crate::utility::{checked_eval, tabulate, Utility};
use crate::values::rank_by_value;

pub const MAX_EXHAUSTIVE_N: usize = 14;
pub const RIDGE: f64 = 1e-10;

/// Weight of a subset as a function of its size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WlsKernel {
    /// `(n−1) / (C(n,s) s (n−s))`.
    Shapley,
    /// `C(n−1, s−1)^{-1}`.
    InverseBinomial,
    /// `2^{-s}`.
    Banzhaf,
    /// Beta(α, β) semi-value weight of the subsets of size `s − 1`.
    Beta { alpha: f64, beta: f64 },
    Uniform,
}

impl WlsKernel {
    /// Weights for sizes `0..=n`; entries 0 and n are unused.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n + 1];
        let beta = match *self {
            WlsKernel::Beta { alpha, beta } => scheme_weights(SemiValueScheme::Beta { alpha, beta }, n),
            _ => Vec::new(),
        };
        for s in 1..n {
            w[s] = match self {
                WlsKernel::Shapley => (n - 1) as f64 / (binomial(n, s) * s as f64 * (n - s) as f64),
                WlsKernel::InverseBinomial => 1.0 / binomial(n - 1, s - 1),
                WlsKernel::Banzhaf => 0.5f64.powi(s as i32),
                WlsKernel::Beta { .. } => beta[s - 1],
                WlsKernel::Uniform => 1.0,
            };
        }
        w
    }
}

impl fmt::Display for WlsKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WlsKernel::Shapley => write!(f, "shapley"),
            WlsKernel::InverseBinomial => write!(f, "inverse-binomial"),
            WlsKernel::Banzhaf => write!(f, "banzhaf"),
            WlsKernel::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            WlsKernel::Uniform => write!(f, "uniform"),
        }
    }
}

impl FromStr for WlsKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "shapley" => Ok(WlsKernel::Shapley),
            "inverse-binomial" => Ok(WlsKernel::InverseBinomial),
            "banzhaf" => Ok(WlsKernel::Banzhaf),
            "uniform" => Ok(WlsKernel::Uniform),
            other if other.starts_with("beta:") => match other.parse::<SemiValueScheme>()? {
                SemiValueScheme::Beta { alpha, beta } => Ok(WlsKernel::Beta { alpha, beta }),
                _ => unreachable!(),
            },
            other => Err(Error::invalid(format!("unknown surrogate kernel '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMode {
    /// Every proper non-empty subset (n ≤ 14).
    Exhaustive,
    /// `m` subsets drawn with size probability proportional to kernel mass, equally weighted.
    Sampled { m: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSurrogate {
    pub theta: Vec<f64>,
    #[serde(rename = "kernel")]
    pub kernel_id: String,
    /// Weighted squared error of the fit (mean over samples in sampled mode).
    pub residual: f64,
}

impl LinearSurrogate {
    pub fn predict(&self, s: &SubsetMask) -> f64 {
        s.iter().map(|i| self.theta[i]).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Descending-θ order, which is the trajectory of the myopic policy under `Û`.
pub fn myopic_sequence(surrogate: &LinearSurrogate) -> Result<Vec<usize>> {
    rank_by_value(&surrogate.theta)
}

pub fn fit_wls<U: Utility + ?Sized>(u: &U, kernel: WlsKernel, mode: FitMode) -> Result<LinearSurrogate> {
    let n = u.n();
    if n == 0 {
        return Err(Error::invalid("surrogate needs at least one point"));
    }
    let w = kernel.weights(n);
    if let Some(s) = (1..n).find(|&s| !(w[s] > 0.0 && w[s].is_finite())) {
        return Err(Error::invalid(format!("kernel {kernel} is not positive at size {s}")));
    }
    let empty = checked_eval(u, &SubsetMask::empty(n))?;
    let total = checked_eval(u, &SubsetMask::full(n))? - empty;
    if n == 1 {
        return Ok(LinearSurrogate { theta: vec![total], kernel_id: kernel.to_string(), residual: 0.0 });
    }

    // (mask, target, weight) triples
    let rows: Vec<(SubsetMask, f64, f64)> = match mode {
        FitMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::CapExceeded { what: "exhaustive surrogate fit", n, cap: MAX_EXHAUSTIVE_N });
            }
            let table = tabulate(u)?;
            (1..table.len() - 1)
                .map(|b| {
                    let s = SubsetMask::from_bits(n, b as u64);
                    let k = s.len();
                    (s, table[b] - empty, w[k])
                })
                .collect()
        }
        FitMode::Sampled { m, seed } => {
            if m == 0 {
                return Err(Error::invalid("sampled surrogate fit needs m >= 1"));
            }
            let mass: Vec<f64> = (0..=n).map(|s| if s == 0 || s == n { 0.0 } else { binomial(n, s) * w[s] }).collect();
            let z: f64 = mass.iter().sum();
            let masks: Vec<SubsetMask> = (0..m)
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(t as u64);
                    let mut r = rng.random::<f64>() * z;
                    let mut size = n - 1;
                    for (s, &p) in mass.iter().enumerate().take(n).skip(1) {
                        if r < p {
                            size = s;
                            break;
                        }
                        r -= p;
                    }
                    let idx: Vec<usize> = sample(&mut rng, n, size).into_vec();
                    SubsetMask::from_indices(n, &idx).expect("indices in range")
                })
                .collect();
            let targets = masks.par_iter().map(|s| Ok(checked_eval(u, s)? - empty)).collect::<Result<Vec<f64>>>()?;
            let scale = 1.0 / m as f64;
            masks.into_iter().zip(targets).map(|(s, y)| (s, y, scale)).collect()
        }
    };

    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (s, y, wt) in &rows {
        let idx = s.to_vec();
        for &i in &idx {
            b[i] += wt * y;
            for &j in &idx {
                a[(i, j)] += wt;
            }
        }
    }

    let theta_p = DVector::from_element(n, total / n as f64);
    let mut null = DMatrix::<f64>::zeros(n, n - 1);
    for j in 0..n - 1 {
        null[(j, j)] = 1.0;
        null[(n - 1, j)] = -1.0;
    }
    let reduced = null.transpose() * &a * &null + DMatrix::<f64>::identity(n - 1, n - 1) * RIDGE;
    let rhs = null.transpose() * (&b - &a * &theta_p);
    let phi = match reduced.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => reduced.clone().lu().solve(&rhs).ok_or_else(|| {
            let sv = reduced.singular_values();
            Error::Numerical(format!(
                "reduced normal equations singular (condition estimate {:e})",
                sv.max() / sv.min()
            ))
        })?,
    };
    let theta = theta_p + null * phi;
    if theta.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("surrogate coefficients are not finite".into()));
    }
    let theta: Vec<f64> = theta.iter().copied().collect();
    let residual = rows
        .iter()
        .map(|(s, y, wt)| {
            let pred: f64 = s.iter().map(|i| theta[i]).sum();
            wt * (y - pred) * (y - pred)
        })
        .sum();
    Ok(LinearSurrogate { theta, kernel_id: kernel.to_string(), residual })
}
