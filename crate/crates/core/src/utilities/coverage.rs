use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::Utility;

/// Weighted train→validation edges with per-validation-vertex capacities.
///
/// JSON form: `{"n_train", "n_valid", "threshold", "edges": [[i, j, w]...], "capacities": [c_v...]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    n_train: usize,
    n_valid: usize,
    /// Per training point: `(validation index, weight)` sorted by validation index.
    adjacency: Vec<Vec<(usize, f64)>>,
    capacities: Vec<f64>,
    /// Distance threshold the edges were learned at, if any.
    pub threshold: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n_train: usize,
    n_valid: usize,
    threshold: Option<f64>,
    edges: Vec<(usize, usize, f64)>,
    capacities: Vec<f64>,
}

impl BipartiteGraph {
    pub fn new(n_train: usize, n_valid: usize, edges: Vec<(usize, usize, f64)>, capacities: Vec<f64>) -> Result<Self> {
        if capacities.len() != n_valid {
            return Err(Error::invalid(format!("{} capacities for {n_valid} validation vertices", capacities.len())));
        }
        if let Some(v) = capacities.iter().position(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::invalid(format!("capacity of validation vertex {v} must be positive")));
        }
        let mut adjacency = vec![Vec::new(); n_train];
        for (i, j, w) in edges {
            if i >= n_train || j >= n_valid {
                return Err(Error::invalid(format!("edge ({i}, {j}) out of range")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("edge ({i}, {j}) weight must be positive")));
            }
            adjacency[i].push((j, w));
        }
        for (i, adj) in adjacency.iter_mut().enumerate() {
            adj.sort_by_key(|&(j, _)| j);
            if adj.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::invalid(format!("duplicate edge from training point {i}")));
            }
        }
        Ok(BipartiteGraph { n_train, n_valid, adjacency, capacities, threshold: None })
    }

    /// Unit weights and unit capacities; `sets[i]` lists the validation points covered by `i`.
    pub fn from_coverage_sets(n_valid: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let edges = sets
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j, 1.0)))
            .collect();
        BipartiteGraph::new(sets.len(), n_valid, edges, vec![1.0; n_valid])
    }

    pub fn with_threshold(mut self, tau: f64) -> Self {
        self.threshold = Some(tau);
        self
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn n_valid(&self) -> usize {
        self.n_valid
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Edges ordered by training index, then validation index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| adj.iter().map(move |&(j, w)| (i, j, w)))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search_by_key(&j, |&(v, _)| v).is_ok()
    }

    /// `Σ_v min{c_v, Σ_{u∈S} w_uv}`.
    pub fn coverage(&self, s: &SubsetMask) -> f64 {
        let mut load = vec![0.0; self.n_valid];
        for i in s.iter() {
            for &(j, w) in &self.adjacency[i] {
                load[j] += w;
            }
        }
        load.iter().zip(&self.capacities).map(|(&x, &c)| x.min(c)).sum()
    }

    /// Number of validation vertices adjacent to at least one member of `s`.
    pub fn covered_count(&self, s: &SubsetMask) -> usize {
        let mut hit = vec![false; self.n_valid];
        for i in s.iter() {
            for &(j, _) in &self.adjacency[i] {
                hit[j] = true;
            }
        }
        hit.into_iter().filter(|&h| h).count()
    }

    pub fn is_unit(&self) -> bool {
        self.capacities.iter().all(|&c| c == 1.0) && self.edges().all(|(_, _, w)| w == 1.0)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GraphFile {
            n_train: self.n_train,
            n_valid: self.n_valid,
            threshold: self.threshold,
            edges: self.edges().collect(),
            capacities: self.capacities.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let mut g = BipartiteGraph::new(file.n_train, file.n_valid, file.edges, file.capacities)?;
        g.threshold = file.threshold;
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Capacitated coverage of the validation side; `U(∅) = 0`.
#[derive(Debug, Clone)]
pub struct CoverageUtility {
    graph: BipartiteGraph,
}

impl CoverageUtility {
    pub fn new(graph: BipartiteGraph) -> Self {
        CoverageUtility { graph }
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }
}

impl Utility for CoverageUtility {
    fn n(&self) -> usize {
        self.graph.n_train
    }

    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        if s.n() != self.graph.n_train {
            return Err(Error::invalid(format!("mask over {} points, graph has {} training points", s.n(), self.graph.n_train)));
        }
        Ok(self.graph.coverage(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> BipartiteGraph {
        // S_0 = {1,2,3}, S_1 = {3,4}, S_2 = {4} over 5 validation points
        BipartiteGraph::from_coverage_sets(5, &[vec![1, 2, 3], vec![3, 4], vec![4]]).unwrap()
    }

    fn union_size(sets: &[Vec<usize>], members: &[usize]) -> usize {
        let mut all: Vec<usize> = members.iter().flat_map(|&i| sets[i].clone()).collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }

    #[test]
    fn unit_coverage_is_union_size() {
        let sets = vec![vec![1, 2, 3], vec![3, 4], vec![4]];
        let u = CoverageUtility::new(example());
        for bits in 0..8u64 {
            let s = SubsetMask::from_bits(3, bits);
            assert_eq!(u.eval(&s).unwrap(), union_size(&sets, &s.to_vec()) as f64);
        }
        assert_eq!(u.eval(&SubsetMask::from_indices(3, &[0, 1]).unwrap()).unwrap(), 4.0);
        assert_eq!(u.eval(&SubsetMask::empty(3)).unwrap(), 0.0);
    }

    #[test]
    fn capacity_clamps() {
        let g = BipartiteGraph::new(2, 1, vec![(0, 0, 1.5), (1, 0, 1.5)], vec![2.0]).unwrap();
        let u = CoverageUtility::new(g);
        assert_eq!(u.eval(&SubsetMask::full(2)).unwrap(), 2.0);
        assert_eq!(u.eval(&SubsetMask::from_indices(2, &[0]).unwrap()).unwrap(), 1.5);
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(BipartiteGraph::new(1, 1, vec![(0, 1, 1.0)], vec![1.0]).is_err());
        assert!(BipartiteGraph::new(1, 1, vec![(0, 0, 0.0)], vec![1.0]).is_err());
        assert!(BipartiteGraph::new(1, 1, vec![(0, 0, 1.0)], vec![-1.0]).is_err());
        assert!(BipartiteGraph::new(1, 1, vec![(0, 0, 1.0), (0, 0, 2.0)], vec![1.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = BipartiteGraph::new(2, 2, vec![(1, 0, 0.5), (0, 1, 2.0)], vec![1.0, 3.0]).unwrap().with_threshold(0.75);
        let text = g.to_json().unwrap();
        assert_eq!(
            text,
            r#"{"n_train":2,"n_valid":2,"threshold":0.75,"edges":[[0,1,2.0],[1,0,0.5]],"capacities":[1.0,3.0]}"#
        );
        assert_eq!(BipartiteGraph::from_json(&text).unwrap(), g);
    }
}
