//! Solves the sequential selection problem exactly and reads off the optimal
//! data values, then compares semi-value rankings with the optimum.
//!
//! `cargo run --release --example optimal_values_dp`

use seqval::utilities::{generate_gmm, GmmSpec, ModelUtility, TrainerConfig};
use seqval::{exact_semivalue, memoize, rank_by_value, selection_curve, solve_dp, split_dataset, SemiValueScheme};

fn main() -> seqval::Result<()> {
    let pool = generate_gmm(&GmmSpec { n_per_class: 30, classes: 3, dim: 3, separation: 2.0 }, 5);
    let sp = split_dataset(&pool, 12, 40, 1, 0)?;
    let u = memoize(ModelUtility::new(&sp.train, &sp.valid, TrainerConfig::default())?);

    let dp = solve_dp(&u)?;
    println!("optimal sequence {:?}", dp.optimal_perm);
    println!("optimal values   {:?}", dp.optimal_values.values);
    println!("objective {:.4} (V(∅) = {:.4}, {} utility calls)", dp.objective, dp.value_table_root, u.evaluations());

    let schemes = ["shapley", "beta:16,1", "beta:4,1", "banzhaf"];
    for s in schemes {
        let scheme: SemiValueScheme = s.parse()?;
        let values = exact_semivalue(&u, scheme)?;
        let obj = selection_curve(&rank_by_value(&values.values)?, &u)?.objective;
        println!("{s:>10}: objective {obj:.4}  gap {:.4}", dp.objective - obj);
    }
    println!("cached subsets after all methods: {}", u.evaluations());
    Ok(())
}
