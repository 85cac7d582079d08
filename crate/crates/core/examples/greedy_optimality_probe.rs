//! Compares the greedy coverage sequence with the best sequence over all
//! orderings on small random graphs and prints any counterexamples.
//!
//! `cargo run --release --example greedy_optimality_probe`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqval::bipartite::probe_greedy_optimality;
use seqval::utilities::BipartiteGraph;

fn main() -> seqval::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut optimal = 0;
    let mut shown = 0;
    let trials = 200;
    for t in 0..trials {
        let n = rng.random_range(3..=7);
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(0.35))
            .map(|(i, j)| (i, j, 1.0))
            .collect();
        let probe = probe_greedy_optimality(&BipartiteGraph::new(n, 8, edges, vec![1.0; 8])?)?;
        if probe.greedy_is_optimal() {
            optimal += 1;
        } else if shown < 3 {
            shown += 1;
            println!(
                "trial {t}: greedy {:?} scores {:.4}, best {:?} scores {:.4}",
                probe.greedy_perm, probe.greedy_objective, probe.best_perm, probe.best_objective
            );
        }
    }
    println!("greedy sequence optimal on {optimal}/{trials} graphs");
    Ok(())
}
