//! Runs a small seeded experiment and reports every method's gap to the
//! exact optimum, writing the full result tree to a directory.
//!
//! `cargo run --release --example experiment_gap [output-dir]`

use seqval::harness::{gap_report, run_experiment, DataSource, ExperimentConfig, GmmSource, SplitSizes};

fn main() -> seqval::Result<()> {
    let methods = ["dp", "shapley", "beta:16,1", "banzhaf", "loo", "wls:shapley", "wls:banzhaf", "bipartite", "random"];
    let mut cfg = ExperimentConfig::new(
        DataSource::Gmm(GmmSource { n_per_class: 40, classes: 3, dim: 3, separation: 2.0, seed: 2 }),
        SplitSizes { train: 12, valid: 30, test: 60 },
        methods.iter().map(|m| m.parse()).collect::<Result<_, _>>()?,
    );
    cfg.n_runs = 5;
    let result = run_experiment(&cfg)?;
    let gaps = gap_report(&result)?;
    println!("{:>12} {:>10} {:>10} {:>10}", "method", "objective", "std", "gap");
    for m in &result.methods {
        let gap = gaps.entry(m.method).map_or(0.0, |e| e.objective_gap);
        println!("{:>12} {:>10.4} {:>10.4} {:>10.4}", m.method.to_string(), m.mean_objective, m.std_objective, gap);
    }
    if let Some(dir) = std::env::args().nth(1) {
        result.write(&dir)?;
        gaps.write(&dir)?;
        println!("wrote {dir}");
    }
    Ok(())
}
