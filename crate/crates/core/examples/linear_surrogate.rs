//! Fits linear surrogates under several subset-size kernels, checks that the
//! Shapley kernel recovers Shapley values, and compares each kernel's myopic
//! sequence with the exact optimum.
//!
//! `cargo run --release --example linear_surrogate`

use seqval::utilities::{generate_gmm, GmmSpec, ModelUtility, TrainerConfig};
use seqval::{
    exact_semivalue, fit_wls, memoize, myopic_sequence, selection_curve, solve_dp, split_dataset, FitMode,
    SemiValueScheme, WlsKernel,
};

fn main() -> seqval::Result<()> {
    let pool = generate_gmm(&GmmSpec { n_per_class: 30, classes: 3, dim: 3, separation: 2.0 }, 9);
    let sp = split_dataset(&pool, 10, 40, 1, 0)?;
    let u = memoize(ModelUtility::new(&sp.train, &sp.valid, TrainerConfig::default())?);
    let dp = solve_dp(&u)?;

    let shapley = exact_semivalue(&u, SemiValueScheme::Shapley)?;
    let fit = fit_wls(&u, WlsKernel::Shapley, FitMode::Exhaustive)?;
    let err = fit.theta.iter().zip(&shapley.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("shapley kernel vs exact shapley: max |Δ| = {err:.2e}");

    println!("{:>14} {:>10} {:>10} {:>10}", "kernel", "objective", "gap", "residual");
    for k in ["shapley", "inverse-binomial", "banzhaf", "beta:16,1", "beta:4,1", "uniform"] {
        let kernel: WlsKernel = k.parse()?;
        let fit = fit_wls(&u, kernel, FitMode::Exhaustive)?;
        let obj = selection_curve(&myopic_sequence(&fit)?, &u)?.objective;
        println!("{k:>14} {obj:>10.4} {:>10.4} {:>10.4}", dp.objective - obj, fit.residual);
    }
    let sampled = fit_wls(&u, WlsKernel::Shapley, FitMode::Sampled { m: 400, seed: 1 })?;
    let err = sampled.theta.iter().zip(&fit.theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("sampled fit (m = 400) vs exhaustive: max |Δ| = {err:.3}");
    Ok(())
}
