//! Exact and Monte Carlo semi-values on the three-player glove game and on a
//! random utility.
//!
//! `cargo run --release --example semivalues`

use seqval::utility::{FnUtility, TableUtility};
use seqval::{exact_semivalue, loo, mc_semivalue, SemiValueScheme, SubsetMask};

fn main() -> seqval::Result<()> {
    // player 0 holds a left glove, players 1 and 2 a right glove each
    let glove = FnUtility::new(3, |s: &SubsetMask| (s.contains(0) && (s.contains(1) || s.contains(2))) as u8 as f64);
    for s in ["shapley", "beta:16,1", "beta:1,16", "banzhaf"] {
        let scheme: SemiValueScheme = s.parse()?;
        println!("{s:>10}: {:?}", exact_semivalue(&glove, scheme)?.values);
    }
    println!("{:>10}: {:?}", "loo", loo(&glove)?.values);

    let u = TableUtility::random(10, 42);
    let exact = exact_semivalue(&u, SemiValueScheme::Shapley)?;
    for m in [100, 1_000, 10_000] {
        let est = mc_semivalue(&u, SemiValueScheme::Shapley, m, 0)?;
        let err = est.values.values.iter().zip(&exact.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let se = est.std_errors.iter().cloned().fold(0.0, f64::max);
        println!("{m:>6} permutations: max error {err:.4}, max standard error {se:.4}");
    }
    Ok(())
}
