//! Measures the curvature of coverage utilities and checks the resulting
//! lower bound on value-based selection against the best subsets.
//!
//! `cargo run --release --example curvature_bounds`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqval::dp::brute_force_opt_k;
use seqval::utilities::{curvature, BipartiteGraph, CoverageUtility};
use seqval::{exact_semivalue, rank_by_value, SemiValueScheme, SubsetMask, Utility};

fn main() -> seqval::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let n = 7;
    for private in [true, false] {
        let mut edges: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|i| (1..6).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(0.3))
            .map(|(i, j)| (i, j, 1.0))
            .collect();
        let m = if private {
            edges.extend((0..n).map(|i| (i, 6 + i, 1.0)));
            6 + n
        } else {
            // every point also covers node 0, so some gain vanishes in context
            edges.extend((0..n).map(|i| (i, 0, 1.0)));
            6
        };
        let u = CoverageUtility::new(BipartiteGraph::new(n, m, edges, vec![1.0; m])?);
        let c = curvature(&u)?.c;
        let factor = (1.0 - c).powi(2);
        let perm = rank_by_value(&exact_semivalue(&u, SemiValueScheme::Shapley)?.values)?;
        println!("curvature {c:.3}, bound factor (1−c)² = {factor:.3}");
        for k in 1..=n {
            let g = u.eval(&SubsetMask::from_indices(n, &perm[..k])?)?;
            let (_, opt) = brute_force_opt_k(&u, k)?;
            println!("  k={k}: shapley prefix {g:.0}, best {opt:.0}, bound {:.2}", factor * opt);
        }
    }
    Ok(())
}
