//! Moves points toward their class means and tracks curvature and selection
//! quality of the semi-value rankings.
//!
//! `cargo run --release --example curvature_sweep [all|train]`

use seqval::harness::{curvature_sweep, DataSource, ExperimentConfig, GmmSource, Method, MessageScope, SplitSizes, SweepConfig};

fn main() -> seqval::Result<()> {
    let scope = match std::env::args().nth(1).as_deref() {
        Some("train") => MessageScope::Train,
        _ => MessageScope::All,
    };
    let methods: Vec<Method> =
        ["random", "shapley", "beta:16,1", "banzhaf", "loo"].iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
    let mut cfg = ExperimentConfig::new(
        DataSource::Gmm(GmmSource { n_per_class: 184, classes: 3, dim: 3, separation: 2.0, seed: 7 }),
        SplitSizes { train: 150, valid: 100, test: 300 },
        methods,
    );
    cfg.n_runs = 3;
    let sweep = SweepConfig { experiment: cfg, lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0], scope };
    let (report, _) = curvature_sweep(&sweep)?;
    print!("{:>6} {:>10}", "lambda", "curvature");
    for o in &report.entries[0].objectives {
        print!(" {:>10}", o.method.to_string());
    }
    println!();
    for e in &report.entries {
        print!("{:>6.2} {:>10.4}", e.lambda, e.curvature);
        for o in &e.objectives {
            print!(" {:>10.4}", o.mean_objective);
        }
        println!();
    }
    match report.curvature_spearman {
        Some(rho) => println!("spearman(lambda, curvature) = {rho:.3}"),
        None => println!("curvature is constant across lambda"),
    }
    Ok(())
}
