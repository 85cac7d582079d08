//! Learned train→validation coverage graphs and greedy coverage selection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::selection_curve;
use crate::dataset::Dataset;
use crate::dp::brute_force_best_sequence;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utilities::{BipartiteGraph, CoverageUtility};
use crate::utility::{checked_eval, Utility};
use crate::values::{values_from_order, ValueAssignment};

/// `D[i][j] = ‖train_i − valid_j‖₂`.
pub fn pairwise_distances(train: &Dataset, valid: &Dataset) -> Result<Vec<Vec<f64>>> {
    if train.dim() != valid.dim() {
        return Err(Error::invalid(format!("feature dimensions differ: {} vs {}", train.dim(), valid.dim())));
    }
    Ok((0..train.len())
        .into_par_iter()
        .map(|i| {
            let x = train.row(i);
            valid.rows().map(|y| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()).collect()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphLearnConfig {
    /// Random subsets used to score each threshold.
    pub n_subsets: usize,
    pub n_thresholds: usize,
    /// Size of each random subset; `None` means `⌈n_train / 2⌉`.
    pub subset_size: Option<usize>,
}

impl Default for GraphLearnConfig {
    fn default() -> Self {
        GraphLearnConfig { n_subsets: 50, n_thresholds: 20, subset_size: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweepReport {
    pub thresholds: Vec<f64>,
    /// Mean `|coverage ratio − accuracy|` over the random subsets, per threshold.
    pub errors: Vec<f64>,
    pub chosen: f64,
}

impl ThresholdSweepReport {
    /// CSV with columns `tau,error`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["tau", "error"])?;
        for (t, e) in self.thresholds.iter().zip(&self.errors) {
            w.write_record([format!("{t:?}"), format!("{e:?}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Picks the distance threshold whose same-label coverage ratio best tracks
/// `accuracy` on random subsets, and returns the unit graph at that threshold.
///
/// `accuracy` is a utility over the training points (typically a
/// [`ModelUtility`](crate::utilities::ModelUtility) on the validation split).
pub fn learn_graph<U: Utility + ?Sized>(
    train: &Dataset,
    valid: &Dataset,
    cfg: &GraphLearnConfig,
    accuracy: &U,
    seed: u64,
) -> Result<(BipartiteGraph, ThresholdSweepReport)> {
    let (n, m) = (train.len(), valid.len());
    if n == 0 || m == 0 {
        return Err(Error::invalid("graph learning needs non-empty train and validation splits"));
    }
    if accuracy.n() != n {
        return Err(Error::invalid(format!("accuracy utility over {} points, train has {n}", accuracy.n())));
    }
    let k = cfg.subset_size.unwrap_or(n.div_ceil(2));
    if cfg.n_subsets == 0 || cfg.n_thresholds < 2 || k == 0 || k > n {
        return Err(Error::invalid("graph learning needs K >= 1, N_tau >= 2 and 1 <= k <= n_train"));
    }
    let dist = pairwise_distances(train, valid)?;
    let (lo, hi) = dist
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let thresholds: Vec<f64> = if lo == hi {
        vec![lo]
    } else {
        let steps = cfg.n_thresholds - 1;
        (0..cfg.n_thresholds)
            .map(|t| if t == steps { hi } else { lo + (hi - lo) * t as f64 / steps as f64 })
            .collect()
    };

    let subsets: Vec<Vec<usize>> = (0..cfg.n_subsets)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut idx = sample(&mut rng, n, k).into_vec();
            idx.sort_unstable();
            idx
        })
        .collect();
    let per_subset = subsets
        .par_iter()
        .map(|idx| {
            let acc = checked_eval(accuracy, &SubsetMask::from_indices(n, idx)?)?;
            // nearest same-label member of the subset, per validation point
            let reach: Vec<f64> = (0..m)
                .map(|j| {
                    idx.iter()
                        .filter(|&&i| train.label(i) == valid.label(j))
                        .map(|&i| dist[i][j])
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            Ok((acc, reach))
        })
        .collect::<Result<Vec<_>>>()?;

    let errors: Vec<f64> = thresholds
        .par_iter()
        .map(|&tau| {
            per_subset
                .iter()
                .map(|(acc, reach)| {
                    let ratio = reach.iter().filter(|&&d| d <= tau).count() as f64 / m as f64;
                    (ratio - acc).abs()
                })
                .sum::<f64>()
                / per_subset.len() as f64
        })
        .collect();
    let mut best = 0;
    for (t, e) in errors.iter().enumerate() {
        if *e < errors[best] {
            best = t;
        }
    }
    let tau = thresholds[best];
    let edges = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| dist[i][j] <= tau && train.label(i) == valid.label(j))
        .map(|(i, j)| (i, j, 1.0))
        .collect();
    let graph = BipartiteGraph::new(n, m, edges, vec![1.0; m])?.with_threshold(tau);
    Ok((graph, ThresholdSweepReport { thresholds, errors, chosen: tau }))
}

/// Fraction of validation vertices adjacent to `r`.
pub fn coverage_ratio(graph: &BipartiteGraph, r: &SubsetMask) -> f64 {
    if graph.n_valid() == 0 {
        return 0.0;
    }
    graph.covered_count(r) as f64 / graph.n_valid() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedySelection {
    pub perm: Vec<usize>,
    /// Marginal capacitated coverage gain at each step.
    pub gains: Vec<f64>,
    pub values: ValueAssignment,
}

fn gain(graph: &BipartiteGraph, load: &[f64], i: usize) -> f64 {
    let caps = graph.capacities();
    graph.neighbors(i).iter().fold(0.0, |acc, &(j, w)| acc + w.min((caps[j] - load[j]).max(0.0)))
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn finish(graph: &BipartiteGraph, perm: Vec<usize>, gains: Vec<f64>) -> GreedySelection {
    debug_assert_eq!(perm.len(), graph.n_train());
    let values = ValueAssignment { method: "bipartite".into(), values: values_from_order(&perm) };
    GreedySelection { perm, gains, values }
}

/// Greedy maximum coverage with lazy re-evaluation; ties go to the smallest index.
pub fn greedy_select(graph: &BipartiteGraph) -> GreedySelection {
    let n = graph.n_train();
    let mut load = vec![0.0; graph.n_valid()];
    let mut heap: BinaryHeap<Key> = (0..n).map(|i| Key(gain(graph, &load, i), i)).collect();
    let mut perm = Vec::with_capacity(n);
    let mut gains = Vec::with_capacity(n);
    while let Some(Key(_, i)) = heap.pop() {
        let fresh = Key(gain(graph, &load, i), i);
        if heap.peek().is_some_and(|top| *top > fresh) {
            heap.push(fresh);
            continue;
        }
        for &(j, w) in graph.neighbors(i) {
            load[j] += w;
        }
        perm.push(i);
        gains.push(fresh.0);
    }
    finish(graph, perm, gains)
}

/// Reference greedy that rescans every remaining point at each step.
pub fn greedy_select_naive(graph: &BipartiteGraph) -> GreedySelection {
    let n = graph.n_train();
    let mut load = vec![0.0; graph.n_valid()];
    let mut left: Vec<usize> = (0..n).collect();
    let mut perm = Vec::with_capacity(n);
    let mut gains = Vec::with_capacity(n);
    while !left.is_empty() {
        let (pos, g) = left
            .iter()
            .enumerate()
            .map(|(p, &i)| (p, gain(graph, &load, i)))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        let i = left.remove(pos);
        for &(j, w) in graph.neighbors(i) {
            load[j] += w;
        }
        perm.push(i);
        gains.push(g);
    }
    finish(graph, perm, gains)
}

/// Greedy versus the best sequence on a small graph (n ≤ 9).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOptimalityProbe {
    pub greedy_perm: Vec<usize>,
    pub greedy_objective: f64,
    pub best_perm: Vec<usize>,
    pub best_objective: f64,
}

impl GreedyOptimalityProbe {
    pub fn greedy_is_optimal(&self) -> bool {
        self.greedy_objective >= self.best_objective - 1e-12
    }
}

pub fn probe_greedy_optimality(graph: &BipartiteGraph) -> Result<GreedyOptimalityProbe> {
    let u = CoverageUtility::new(graph.clone());
    let greedy = greedy_select(graph);
    let greedy_objective = selection_curve(&greedy.perm, &u)?.objective;
    let (best_perm, best_objective) = brute_force_best_sequence(&u)?;
    Ok(GreedyOptimalityProbe { greedy_perm: greedy.perm, greedy_objective, best_perm, best_objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::brute_force_opt_k;
    use crate::utilities::{ModelUtility, TrainerConfig};
    use rand::Rng;

    fn example() -> BipartiteGraph {
        BipartiteGraph::from_coverage_sets(5, &[vec![1, 2, 3], vec![3, 4], vec![4]]).unwrap()
    }

    pub(crate) fn random_graph(n: usize, m: usize, weighted: bool, rng: &mut impl Rng) -> BipartiteGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..m {
                if rng.random_bool(0.3) {
                    let w = if weighted { rng.random_range(1..=8) as f64 * 0.25 } else { 1.0 };
                    edges.push((i, j, w));
                }
            }
        }
        let caps = (0..m).map(|_| if weighted { rng.random_range(1..=8) as f64 * 0.25 } else { 1.0 }).collect();
        BipartiteGraph::new(n, m, edges, caps).unwrap()
    }

    #[test]
    fn distances() {
        let a = Dataset::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]], vec![0, 1]).unwrap();
        let b = Dataset::from_rows(&[vec![3.0, 4.0], vec![0.0, 0.0]], vec![0, 1]).unwrap();
        let d = pairwise_distances(&a, &b).unwrap();
        assert_eq!(d[0], vec![5.0, 0.0]);
        let dd = pairwise_distances(&a, &a).unwrap();
        assert_eq!(dd[0][1], dd[1][0]);
        let c = Dataset::from_rows(&[vec![0.0]], vec![0]).unwrap();
        assert!(pairwise_distances(&a, &c).is_err());
    }

    #[test]
    fn greedy_example() {
        let sel = greedy_select(&example());
        assert_eq!(sel.perm, vec![0, 1, 2]);
        assert_eq!(sel.gains, vec![3.0, 1.0, 0.0]);
        assert_eq!(sel.values.values, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn greedy_duplicates_and_empty() {
        let g = BipartiteGraph::from_coverage_sets(3, &[vec![0, 1], vec![0, 1], vec![2]]).unwrap();
        let sel = greedy_select(&g);
        assert_eq!(sel.perm[0], 0);
        let dup_step = sel.perm.iter().position(|&i| i == 1).unwrap();
        assert_eq!(sel.gains[dup_step], 0.0);
        let empty = BipartiteGraph::new(4, 2, vec![], vec![1.0, 1.0]).unwrap();
        let sel = greedy_select(&empty);
        assert_eq!(sel.perm, vec![0, 1, 2, 3]);
        assert!(sel.gains.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn lazy_equals_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for t in 0..200 {
            let g = random_graph(rng.random_range(1..20), rng.random_range(1..15), t % 2 == 1, &mut rng);
            let (lazy, naive) = (greedy_select(&g), greedy_select_naive(&g));
            assert_eq!(lazy, naive);
            assert!(lazy.gains.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn greedy_prefix_guarantee() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bound = 1.0 - (-1.0f64).exp();
        for _ in 0..30 {
            let g = random_graph(8, 10, false, &mut rng);
            let u = CoverageUtility::new(g.clone());
            let curve = selection_curve(&greedy_select(&g).perm, &u).unwrap();
            for k in 1..=8 {
                let (_, opt) = brute_force_opt_k(&u, k).unwrap();
                assert!(curve.points[k - 1].1 >= bound * opt - 1e-12);
            }
        }
    }

    #[test]
    fn prefix_sums_match_running_unions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = random_graph(7, 9, false, &mut rng);
            let perm = greedy_select(&g).perm;
            let total: f64 = selection_curve(&perm, &CoverageUtility::new(g.clone())).unwrap().utilities().iter().sum();
            let mut seen = std::collections::BTreeSet::new();
            let mut running = 0usize;
            for &i in &perm {
                seen.extend(g.neighbors(i).iter().map(|&(j, _)| j));
                running += seen.len();
            }
            assert_eq!(total, running as f64);
        }
    }

    #[test]
    fn coverage_ratios() {
        let g = example();
        assert_eq!(coverage_ratio(&g, &SubsetMask::empty(3)), 0.0);
        assert_eq!(coverage_ratio(&g, &SubsetMask::from_indices(3, &[0]).unwrap()), 0.6);
        let complete = BipartiteGraph::from_coverage_sets(3, &[vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert_eq!(coverage_ratio(&complete, &SubsetMask::from_indices(2, &[1]).unwrap()), 1.0);
    }

    fn two_clusters() -> (Dataset, Dataset) {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut make = |count: usize| {
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for c in 0..2 {
                for _ in 0..count {
                    let centre = 10.0 * c as f64;
                    rows.push(vec![centre + rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)]);
                    labels.push(c);
                }
            }
            Dataset::from_rows(&rows, labels).unwrap()
        };
        (make(10), make(8))
    }

    #[test]
    fn two_cluster_sweep() {
        let (train, valid) = two_clusters();
        let u = ModelUtility::new(&train, &valid, TrainerConfig::default()).unwrap();
        let (g, report) = learn_graph(&train, &valid, &GraphLearnConfig::default(), &u, 3).unwrap();
        assert!(report.chosen < 10.0);
        assert_eq!(report.thresholds.len(), 20);
        assert!(report.errors.iter().all(|&e| e >= report.errors[report.thresholds.iter().position(|&t| t == report.chosen).unwrap()]));
        for i in 0..train.len() {
            for j in 0..valid.len() {
                assert_eq!(g.has_edge(i, j), train.label(i) == valid.label(j), "({i},{j})");
            }
        }
        let again = learn_graph(&train, &valid, &GraphLearnConfig::default(), &u, 3).unwrap();
        assert_eq!(again.0, g);
        assert_eq!(greedy_select(&again.0), greedy_select(&g));
    }

    #[test]
    fn extreme_thresholds() {
        let (train, valid) = two_clusters();
        let single = |ds: &Dataset| Dataset::new(ds.features().to_vec(), 2, vec![0; ds.len()], 2).unwrap();
        let (train, valid) = (single(&train), single(&valid));
        // constant accuracy 1: the sweep picks the smallest threshold with full coverage
        let acc = crate::utility::FnUtility::new(train.len(), |_: &SubsetMask| 1.0);
        let (g, report) = learn_graph(&train, &valid, &GraphLearnConfig::default(), &acc, 0).unwrap();
        let best = report.thresholds.iter().position(|&t| t == report.chosen).unwrap();
        assert_eq!(report.errors[best], 0.0);
        assert!(report.errors[..best].iter().all(|&e| e > 0.0));
        assert_eq!(coverage_ratio(&g, &SubsetMask::full(train.len())), 1.0);
        let all: Vec<(usize, usize, f64)> =
            (0..train.len()).flat_map(|i| (0..valid.len()).map(move |j| (i, j, 1.0))).collect();
        let complete = BipartiteGraph::new(train.len(), valid.len(), all, vec![1.0; valid.len()]).unwrap();
        assert_eq!(coverage_ratio(&complete, &SubsetMask::from_indices(train.len(), &[3]).unwrap()), 1.0);
        // constant accuracy 0: the sparsest threshold wins
        let acc0 = crate::utility::FnUtility::new(train.len(), |_: &SubsetMask| 0.0);
        let (g0, r0) = learn_graph(&train, &valid, &GraphLearnConfig::default(), &acc0, 0).unwrap();
        assert_eq!(r0.chosen, r0.thresholds[0]);
        assert!(g0.n_edges() < train.len() * valid.len());
    }

    #[test]
    fn degenerate_distances_single_threshold() {
        let ds = Dataset::from_rows(&[vec![1.0], vec![1.0]], vec![0, 1]).unwrap();
        let acc = crate::utility::FnUtility::new(2, |_: &SubsetMask| 0.5);
        let (_, report) = learn_graph(&ds, &ds, &GraphLearnConfig::default(), &acc, 0).unwrap();
        assert_eq!(report.thresholds, vec![0.0]);
    }

    #[test]
    fn sweep_csv() {
        let r = ThresholdSweepReport { thresholds: vec![0.5, 1.0], errors: vec![0.25, 0.125], chosen: 1.0 };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tau,error\n0.5,0.25\n1.0,0.125\n");
    }

    #[test]
    fn probe_runs() {
        let p = probe_greedy_optimality(&example()).unwrap();
        assert!(p.greedy_is_optimal());
        assert_eq!(p.best_objective, 11.0 / 3.0);
    }
}
