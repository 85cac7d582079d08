//! Semi-values (Shapley, Beta Shapley, Banzhaf) and leave-one-out.
//!
//! A semi-value scores point `i` by `Σ_{S⊆D\{i}} β_{|S|} (U(S∪{i}) − U(S))`
//! with size-only weights normalized so that `Σ_s C(n−1, s) β_s = 1`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::binomial;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::{checked_eval, tabulate, Utility};
use crate::values::ValueAssignment;

pub const DEFAULT_EXACT_CAP: usize = 14;
/// Monte Carlo samples are reduced in fixed-size chunks so that sums do not
/// depend on the number of worker threads.
const MC_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiValueScheme {
    Shapley,
    Beta { alpha: f64, beta: f64 },
    Banzhaf,
    Loo,
}

impl fmt::Display for SemiValueScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiValueScheme::Shapley => write!(f, "shapley"),
            SemiValueScheme::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            SemiValueScheme::Banzhaf => write!(f, "banzhaf"),
            SemiValueScheme::Loo => write!(f, "loo"),
        }
    }
}

impl FromStr for SemiValueScheme {
    type Err = Error;

    /// `shapley`, `beta:α,β`, `banzhaf` or `loo`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "shapley" => Ok(SemiValueScheme::Shapley),
            "banzhaf" => Ok(SemiValueScheme::Banzhaf),
            "loo" => Ok(SemiValueScheme::Loo),
            other => {
                let params = other
                    .strip_prefix("beta:")
                    .ok_or_else(|| Error::invalid(format!("unknown valuation scheme '{other}'")))?;
                let (a, b) = params
                    .split_once(',')
                    .ok_or_else(|| Error::invalid(format!("beta scheme needs 'beta:α,β', got '{other}'")))?;
                let parse = |x: &str| {
                    x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad beta parameter '{x}'")))
                };
                let (alpha, beta) = (parse(a)?, parse(b)?);
                if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                    return Err(Error::invalid("beta parameters must be positive"));
                }
                Ok(SemiValueScheme::Beta { alpha, beta })
            }
        }
    }
}

impl Serialize for SemiValueScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SemiValueScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Weight `β_s` on a subset of size `s` (0 ≤ s ≤ n−1) not containing the point.
///
/// Leave-one-out puts all mass on `s = n − 1`.
pub fn scheme_weight(scheme: SemiValueScheme, s: usize, n: usize) -> Result<f64> {
    if n == 0 || s >= n {
        return Err(Error::invalid(format!("subset size {s} outside [0, {n})")));
    }
    Ok(scheme_weights(scheme, n)[s])
}

/// `β_0, ..., β_{n−1}`.
pub fn scheme_weights(scheme: SemiValueScheme, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    match scheme {
        SemiValueScheme::Shapley => (0..n).map(|s| 1.0 / (n as f64 * binomial(n - 1, s))).collect(),
        SemiValueScheme::Banzhaf => vec![0.5f64.powi(n as i32 - 1); n],
        SemiValueScheme::Loo => {
            let mut w = vec![0.0; n];
            w[n - 1] = 1.0;
            w
        }
        SemiValueScheme::Beta { alpha, beta } => {
            // β_s = B(s+β, n−1−s+α) / B(α, β), by ratio recurrence
            let mut w = Vec::with_capacity(n);
            let mut r: f64 = (0..n - 1).map(|j| (alpha + j as f64) / (alpha + beta + j as f64)).product();
            for s in 0..n {
                w.push(r);
                if s + 1 < n {
                    r *= (s as f64 + beta) / ((n - 2 - s) as f64 + alpha);
                }
            }
            w
        }
    }
}

/// Exact semi-value by enumerating every subset (n ≤ 14).
pub fn exact_semivalue<U: Utility + ?Sized>(u: &U, scheme: SemiValueScheme) -> Result<ValueAssignment> {
    exact_semivalue_with_cap(u, scheme, DEFAULT_EXACT_CAP)
}

pub fn exact_semivalue_with_cap<U: Utility + ?Sized>(
    u: &U,
    scheme: SemiValueScheme,
    cap: usize,
) -> Result<ValueAssignment> {
    let n = u.n();
    if n == 0 {
        return Err(Error::invalid("semi-values need at least one point"));
    }
    if scheme == SemiValueScheme::Loo {
        return loo(u);
    }
    if n > cap {
        return Err(Error::CapExceeded { what: "exact semi-value", n, cap });
    }
    let weights = scheme_weights(scheme, n);
    let table = tabulate(u)?;
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let bit = 1usize << i;
            (0..table.len())
                .filter(|s| s & bit == 0)
                .map(|s| weights[s.count_ones() as usize] * (table[s | bit] - table[s]))
                .sum()
        })
        .collect();
    ValueAssignment::new(scheme.to_string(), values)
}

/// `U(D) − U(D\{i})`, with `n + 1` evaluations.
pub fn loo<U: Utility + ?Sized>(u: &U) -> Result<ValueAssignment> {
    let n = u.n();
    if n == 0 {
        return Err(Error::invalid("leave-one-out needs at least one point"));
    }
    let full = SubsetMask::full(n);
    let top = checked_eval(u, &full)?;
    let values = (0..n)
        .into_par_iter()
        .map(|i| Ok(top - checked_eval(u, &full.without(i))?))
        .collect::<Result<Vec<f64>>>()?;
    ValueAssignment::new("loo", values)
}

/// Monte Carlo estimate with per-point standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub values: ValueAssignment,
    /// Sample standard deviation over `√n_samples`; 0 for a single sample.
    pub std_errors: Vec<f64>,
    pub n_samples: usize,
}

/// Utility calls per Monte Carlo sample (before any memoization).
pub fn evaluations_per_sample(scheme: SemiValueScheme, n: usize) -> usize {
    match scheme {
        SemiValueScheme::Loo => 0,
        _ => n + 1,
    }
}

/// Largest sample count whose worst-case cost fits in `budget` calls (at least 1).
pub fn samples_for_budget(scheme: SemiValueScheme, n: usize, budget: usize) -> usize {
    (budget / evaluations_per_sample(scheme, n).max(1)).max(1)
}

/// Sampling estimator, deterministic per `seed`.
///
/// Shapley and Beta sample permutations and reweight each marginal at prefix
/// size `s` by `n β_s C(n−1, s)`. Banzhaf samples a uniform subset `T ⊆ D` and
/// uses `T\{i}` as the uniform subset of `D\{i}` for every `i`. Sample `t` draws
/// from ChaCha8 stream `t` of `seed`. Leave-one-out is computed exactly.
pub fn mc_semivalue<U: Utility + ?Sized>(
    u: &U,
    scheme: SemiValueScheme,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let n = u.n();
    if n == 0 {
        return Err(Error::invalid("semi-values need at least one point"));
    }
    if n_samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    if scheme == SemiValueScheme::Loo {
        return Ok(McEstimate { values: loo(u)?, std_errors: vec![0.0; n], n_samples: 1 });
    }
    let factors: Vec<f64> = scheme_weights(scheme, n)
        .iter()
        .enumerate()
        .map(|(s, w)| n as f64 * w * binomial(n - 1, s))
        .collect();

    let sample = |t: usize| -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let mut out = vec![0.0; n];
        match scheme {
            SemiValueScheme::Banzhaf => {
                let mut t_set = SubsetMask::empty(n);
                for i in 0..n {
                    if rng.random::<bool>() {
                        t_set.insert(i);
                    }
                }
                let base = checked_eval(u, &t_set)?;
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = if t_set.contains(i) {
                        base - checked_eval(u, &t_set.without(i))?
                    } else {
                        checked_eval(u, &t_set.with(i))? - base
                    };
                }
            }
            _ => {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let mut s = SubsetMask::empty(n);
                let mut prev = checked_eval(u, &s)?;
                for (pos, &i) in perm.iter().enumerate() {
                    s.insert(i);
                    let cur = checked_eval(u, &s)?;
                    out[i] = factors[pos] * (cur - prev);
                    prev = cur;
                }
            }
        }
        Ok(out)
    };

    let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..n_samples.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; n];
            let mut sq = vec![0.0; n];
            for t in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(n_samples) {
                for ((a, b), x) in sum.iter_mut().zip(sq.iter_mut()).zip(sample(t)?) {
                    *a += x;
                    *b += x * x;
                }
            }
            Ok((sum, sq))
        })
        .collect::<Result<_>>()?;
    let mut sum = vec![0.0; n];
    let mut sq = vec![0.0; n];
    for (cs, cq) in &chunks {
        for i in 0..n {
            sum[i] += cs[i];
            sq[i] += cq[i];
        }
    }
    let m = n_samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_errors = if n_samples < 2 {
        vec![0.0; n]
    } else {
        mean.iter()
            .zip(&sq)
            .map(|(mu, q)| ((q / m - mu * mu).max(0.0) * m / (m - 1.0) / m).sqrt())
            .collect()
    };
    Ok(McEstimate { values: ValueAssignment::new(scheme.to_string(), mean)?, std_errors, n_samples })
}
