//! Exact optimal sequential selection over the subset lattice.
//!
//! The value function is `V(s) = U(s) + max_{a∉s} V(s ∪ {a})` with `V(D) = U(D)`.
//! It is solved backward, one popcount layer at a time, in a flat table indexed
//! by mask bits. The forward pass follows the argmax from `∅` (ties go to the
//! smallest index) and scores the point chosen at step `t` with `n − t`.
//!
//! `V(∅)` includes the constant `U(∅)`, which the sequential objective leaves out;
//! a constant cannot move any argmax.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::SelectionCurve;
use crate::error::{Error, Result};
use crate::mask::{masks_of_size, SubsetMask};
use crate::utility::{checked_eval, tabulate, Utility};
use crate::values::{values_from_order, ValueAssignment};

pub const DEFAULT_DP_CAP: usize = 20;
pub const MAX_DP_CAP: usize = 24;
pub const MAX_BRUTE_FORCE_N: usize = 9;
pub const MAX_OPT_K_N: usize = 20;
/// Largest number of size-k subsets `brute_force_opt_k` will enumerate.
pub const OPT_K_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub optimal_perm: Vec<usize>,
    /// `V(∅)`, including `U(∅)`.
    pub value_table_root: f64,
    pub optimal_values: ValueAssignment,
    /// Mean prefix utility of `optimal_perm`.
    pub objective: f64,
}

#[derive(Serialize, Deserialize)]
struct DpFile {
    perm: Vec<usize>,
    optimal_values: Vec<f64>,
    objective: f64,
}

impl DpSolution {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DpFile {
            perm: self.optimal_perm.clone(),
            optimal_values: self.optimal_values.values.clone(),
            objective: self.objective,
        })?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// `solve_dp_with_cap` at the default cap.
pub fn solve_dp<U: Utility + ?Sized>(u: &U) -> Result<DpSolution> {
    solve_dp_with_cap(u, DEFAULT_DP_CAP)
}

/// Exact DP; refuses populations above `cap` (itself at most 24).
pub fn solve_dp_with_cap<U: Utility + ?Sized>(u: &U, cap: usize) -> Result<DpSolution> {
    let n = u.n();
    if cap > MAX_DP_CAP {
        return Err(Error::invalid(format!("dp cap {cap} above hard maximum {MAX_DP_CAP}")));
    }
    if n > cap {
        return Err(Error::CapExceeded { what: "dp population", n, cap });
    }
    if n == 0 {
        return Err(Error::invalid("dp needs at least one point"));
    }
    let utilities = tabulate(u)?;
    let mut v = utilities.clone();
    for k in (0..n).rev() {
        let layer: Vec<u64> = masks_of_size(n, k).collect();
        let updated: Vec<f64> = layer
            .par_iter()
            .map(|&s| {
                let best = (0..n)
                    .filter(|a| s >> a & 1 == 0)
                    .map(|a| v[(s | 1 << a) as usize])
                    .fold(f64::NEG_INFINITY, f64::max);
                utilities[s as usize] + best
            })
            .collect();
        for (&s, x) in layer.iter().zip(updated) {
            v[s as usize] = x;
        }
    }

    let mut s = 0u64;
    let mut perm = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = None;
        for a in (0..n).filter(|a| s >> a & 1 == 0) {
            let cand = v[(s | 1 << a) as usize];
            if best.is_none_or(|(_, b)| cand > b) {
                best = Some((a, cand));
            }
        }
        let (a, _) = best.expect("a point remains");
        s |= 1 << a;
        perm.push(a);
    }
    let objective = prefix_curve(&perm, &utilities).objective;
    Ok(DpSolution {
        optimal_values: ValueAssignment::new("dp", values_from_order(&perm))?,
        optimal_perm: perm,
        value_table_root: v[0],
        objective,
    })
}

fn prefix_curve(perm: &[usize], table: &[f64]) -> SelectionCurve {
    let mut s = 0usize;
    SelectionCurve::from_utilities(
        perm.iter()
            .map(|&a| {
                s |= 1 << a;
                table[s]
            })
            .collect(),
    )
}

/// Best permutation by exhaustive search (n ≤ 9); ties keep the lexicographically smallest.
pub fn brute_force_best_sequence<U: Utility + ?Sized>(u: &U) -> Result<(Vec<usize>, f64)> {
    let n = u.n();
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::CapExceeded { what: "brute-force sequence search", n, cap: MAX_BRUTE_FORCE_N });
    }
    if n == 0 {
        return Err(Error::invalid("sequence search needs at least one point"));
    }
    let table = tabulate(u)?;

    struct Search<'a> {
        n: usize,
        table: &'a [f64],
        stack: Vec<usize>,
        best: Option<(Vec<usize>, f64)>,
    }
    impl Search<'_> {
        fn go(&mut self, s: usize, total: f64) {
            if self.stack.len() == self.n {
                if self.best.as_ref().is_none_or(|(_, b)| total > *b) {
                    self.best = Some((self.stack.clone(), total));
                }
                return;
            }
            for a in 0..self.n {
                if s >> a & 1 == 0 {
                    self.stack.push(a);
                    self.go(s | 1 << a, total + self.table[s | 1 << a]);
                    self.stack.pop();
                }
            }
        }
    }

    let mut search = Search { n, table: &table, stack: Vec::with_capacity(n), best: None };
    search.go(0, 0.0);
    let (perm, _) = search.best.expect("at least one permutation");
    let objective = prefix_curve(&perm, &table).objective;
    Ok((perm, objective))
}

/// Best size-`k` subset by enumeration; ties keep the smallest mask.
pub fn brute_force_opt_k<U: Utility + ?Sized>(u: &U, k: usize) -> Result<(SubsetMask, f64)> {
    let n = u.n();
    if n > MAX_OPT_K_N {
        return Err(Error::CapExceeded { what: "size-k subset search", n, cap: MAX_OPT_K_N });
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds population {n}")));
    }
    let count = binomial(n, k);
    if count > OPT_K_BUDGET as f64 {
        return Err(Error::BudgetExhausted { budget: OPT_K_BUDGET });
    }
    let masks: Vec<u64> = masks_of_size(n, k).collect();
    let vals = masks
        .par_iter()
        .map(|&b| checked_eval(u, &SubsetMask::from_bits(n, b)))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &x) in vals.iter().enumerate() {
        if x > vals[best] {
            best = i;
        }
    }
    Ok((SubsetMask::from_bits(n, masks[best]), vals[best]))
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64).round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::selection_curve;
    use crate::utilities::{BipartiteGraph, CoverageUtility, LinearUtility};
    use crate::utility::{cardinality, memoize, Shifted, TableUtility};

    #[test]
    fn linear_example() {
        let u = LinearUtility::new(vec![3.0, 1.0, 2.0]).unwrap();
        let sol = solve_dp(&u).unwrap();
        assert_eq!(sol.optimal_perm, vec![0, 2, 1]);
        assert_eq!(sol.optimal_values.values, vec![2.0, 0.0, 1.0]);
        assert_eq!(brute_force_best_sequence(&u).unwrap().0, vec![0, 2, 1]);
        // V(∅) = 0 + 3 + 5 + 6
        assert_eq!(sol.value_table_root, 14.0);
        assert!((sol.objective - 14.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_utility_gives_identity() {
        let sol = solve_dp(&cardinality(6)).unwrap();
        assert_eq!(sol.optimal_perm, (0..6).collect::<Vec<_>>());
        assert_eq!(brute_force_best_sequence(&cardinality(5)).unwrap().0, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn matches_brute_force_on_random_tables() {
        for seed in 0..20 {
            let u = TableUtility::random(7, seed);
            let sol = solve_dp(&u).unwrap();
            let (perm, obj) = brute_force_best_sequence(&u).unwrap();
            assert_eq!(sol.objective, obj, "seed {seed}");
            assert_eq!(sol.optimal_perm, perm, "seed {seed}");
            assert_eq!(selection_curve(&sol.optimal_perm, &u).unwrap().objective, sol.objective);
        }
    }

    #[test]
    fn n8_matches_brute_force() {
        let u = TableUtility::random(8, 99);
        assert_eq!(solve_dp(&u).unwrap().objective, brute_force_best_sequence(&u).unwrap().1);
    }

    #[test]
    fn offset_does_not_change_perm() {
        for seed in 0..10 {
            let u = TableUtility::random(6, seed);
            let shifted = Shifted { inner: &u, offset: 17.5 };
            assert_eq!(solve_dp(&u).unwrap().optimal_perm, solve_dp(&shifted).unwrap().optimal_perm);
        }
    }

    #[test]
    fn values_are_positions() {
        let sol = solve_dp(&TableUtility::random(9, 4)).unwrap();
        for (t, &a) in sol.optimal_perm.iter().enumerate() {
            assert_eq!(sol.optimal_values.values[a], (9 - t - 1) as f64);
        }
        let mut sorted = sol.optimal_values.values.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, (0..9).map(|x| x as f64).collect::<Vec<_>>());
    }

    #[test]
    fn each_mask_evaluated_once() {
        let u = memoize(TableUtility::random(10, 1));
        solve_dp(&u).unwrap();
        assert_eq!(u.evaluations(), 1 << 10);
        solve_dp(&u).unwrap();
        assert_eq!(u.evaluations(), 1 << 10);
    }

    #[test]
    fn caps_enforced() {
        assert!(matches!(solve_dp(&cardinality(21)), Err(Error::CapExceeded { .. })));
        assert!(solve_dp_with_cap(&cardinality(3), 25).is_err());
        assert!(matches!(brute_force_best_sequence(&cardinality(10)), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn non_finite_reported_with_mask() {
        let u = crate::utility::FnUtility::new(3, |s: &SubsetMask| if s.len() == 2 { f64::INFINITY } else { 1.0 });
        assert!(matches!(solve_dp(&u), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let u = TableUtility::random(12, 3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| solve_dp(&u).unwrap());
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| solve_dp(&u).unwrap());
        assert_eq!(one, many);
        assert_eq!(one.value_table_root.to_bits(), many.value_table_root.to_bits());
    }

    #[test]
    fn opt_k_examples() {
        let u = LinearUtility::new(vec![3.0, 1.0, 2.0]).unwrap();
        let (s, v) = brute_force_opt_k(&u, 2).unwrap();
        assert_eq!((s.to_vec(), v), (vec![0, 2], 5.0));
        assert!(brute_force_opt_k(&u, 3).unwrap().0.is_full());
        let g = BipartiteGraph::from_coverage_sets(5, &[vec![1, 2, 3], vec![3, 4], vec![4]]).unwrap();
        let (s, v) = brute_force_opt_k(&CoverageUtility::new(g), 2).unwrap();
        assert_eq!((s.to_vec(), v), (vec![0, 1], 4.0));
    }

    #[test]
    fn json_layout() {
        let sol = solve_dp(&LinearUtility::new(vec![3.0, 1.0, 2.0]).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&sol.to_json().unwrap()).unwrap();
        assert_eq!(v["perm"], serde_json::json!([0, 2, 1]));
        assert_eq!(v["optimal_values"], serde_json::json!([2.0, 0.0, 1.0]));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(20, 10), 184756.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
