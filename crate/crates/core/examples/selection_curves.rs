//! Ranks training points by value and traces validation accuracy along the
//! nested prefixes of the ranking.
//!
//! `cargo run --release --example selection_curves`

use seqval::utilities::{generate_gmm, GmmSpec, ModelUtility, TrainerConfig};
use seqval::{rank_by_value, selection_curve, split_dataset, SemiValueScheme};

fn main() -> seqval::Result<()> {
    let pool = generate_gmm(&GmmSpec { n_per_class: 30, classes: 3, dim: 3, separation: 2.0 }, 3);
    let sp = split_dataset(&pool, 12, 30, 48, 0)?;
    let valuation = ModelUtility::new(&sp.train, &sp.valid, TrainerConfig::default())?;
    let evaluation = ModelUtility::new(&sp.train, &sp.test, TrainerConfig::default())?;

    let shapley = seqval::exact_semivalue(&valuation, SemiValueScheme::Shapley)?;
    let loo = seqval::loo(&valuation)?;
    for (name, values) in [("shapley", &shapley.values), ("loo", &loo.values)] {
        let perm = rank_by_value(values)?;
        let curve = selection_curve(&perm, &evaluation)?;
        let accs: Vec<String> = curve.utilities().iter().map(|u| format!("{u:.2}")).collect();
        println!("{name:>8}: objective {:.4}  curve [{}]", curve.objective, accs.join(" "));
    }
    Ok(())
}
