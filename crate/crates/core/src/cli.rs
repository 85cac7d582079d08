//! Command-line front end. Exit codes: 0 success, 2 invalid input,
//! 3 resource cap exceeded, 4 numerical failure.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bipartite::{greedy_select, learn_graph, GraphLearnConfig};
use crate::curve::selection_curve;
use crate::dataset::Dataset;
use crate::dp::{solve_dp_with_cap, DEFAULT_DP_CAP};
use crate::error::{Error, Result};
use crate::harness::{
    compute_values, curvature_sweep, gap_report, run_experiment, DataSource, ExperimentConfig, Method, RunInputs,
    SplitSizes, SweepConfig,
};
use crate::utilities::{
    curvature, curvature_of_active, generate_gmm, message_passing, BipartiteGraph, CoverageUtility, GmmSpec,
    ModelUtility, TrainerConfig,
};
use crate::utility::memoize;
use crate::values::ValueAssignment;

#[derive(Debug, Parser)]
#[command(name = "seqval", version, about = "Sequential data selection and data valuation")]
pub struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file or directory (depends on the command).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON configuration (experiment for `report`, sweep for `sweep`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a Gaussian-mixture dataset to CSV.
    Generate(GenerateArgs),
    /// Compute data values for a training set against a validation set.
    Value(ValueArgs),
    /// Exact optimal sequence and optimal data values.
    Dp(PairArgs),
    /// Selection curve of a value file on a held-out set.
    Select(SelectArgs),
    /// Learn a coverage graph and rank points greedily.
    Bipartite(BipartiteArgs),
    /// Curvature of the validation-accuracy utility or of a coverage graph.
    Curvature(CurvatureArgs),
    /// Curvature sweep over message-passing strengths (needs --config).
    Sweep,
    /// Run an experiment and its gap-to-optimal report (needs --config).
    Report,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 50)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 2.0)]
    pub separation: f64,
    /// Message-passing proportion applied after sampling.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Training CSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Validation CSV.
    #[arg(long)]
    pub valid: PathBuf,
    /// Gradient-descent iterations of the inner classifier.
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// Largest training set for exact methods.
    #[arg(long, default_value_t = DEFAULT_DP_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct ValueArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// dp, shapley, beta:α,β, banzhaf, loo, wls:<kernel>, bipartite or random.
    #[arg(long)]
    pub method: String,
    /// Utility calls allowed for sampling methods.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Value JSON (`{"method", "values"}`).
    #[arg(long)]
    pub values: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    /// Held-out CSV the curve is measured on.
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
}

#[derive(Debug, Args)]
pub struct BipartiteArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 50)]
    pub n_subsets: usize,
    #[arg(long, default_value_t = 20)]
    pub n_thresholds: usize,
    /// Random subset size (default: half the training set, rounded up).
    #[arg(long)]
    pub subset_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// Coverage graph JSON; when given, its curvature is reported.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub valid: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// Ignore points whose singleton gain is not positive.
    #[arg(long)]
    pub active_only: bool,
}

fn out_path(cli: &Cli) -> Result<&Path> {
    cli.out.as_deref().ok_or_else(|| Error::invalid("--out is required for this command"))
}

fn config_path(cli: &Cli) -> Result<&Path> {
    cli.config.as_deref().ok_or_else(|| Error::invalid("--config is required for this command"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn model_utility(train: &Path, valid: &Path, iterations: usize) -> Result<ModelUtility> {
    let cfg = TrainerConfig { iterations, ..TrainerConfig::default() };
    ModelUtility::new(&Dataset::load(train)?, &Dataset::load(valid)?, cfg)
}

fn single_run_config(pair: &PairArgs, n: usize, method: Method, budget: usize, graph: GraphLearnConfig) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        DataSource::Csv(pair.train.clone()),
        SplitSizes { train: n, valid: 1, test: 1 },
        vec![method],
    );
    cfg.budget = budget;
    cfg.dp_cap = pair.cap;
    cfg.graph = graph;
    cfg
}

fn pair_inputs(u: ModelUtility) -> RunInputs {
    let features = Some((u.train().clone(), u.held_out().clone()));
    let u = Arc::new(u);
    RunInputs { valuation: u.clone(), evaluation: u, features }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => {
            let spec = GmmSpec { n_per_class: a.n_per_class, classes: a.classes, dim: a.dim, separation: a.separation };
            spec.validate()?;
            let ds = message_passing(&generate_gmm(&spec, cli.seed), a.lambda)?;
            ds.save(out_path(cli)?)
        }
        Command::Value(a) => {
            let method: Method = a.method.parse()?;
            let u = model_utility(&a.pair.train, &a.pair.valid, a.pair.iterations)?;
            let cfg = single_run_config(&a.pair, u.train().len(), method, a.budget, GraphLearnConfig::default());
            if method == Method::Dp && u.train().len() > a.pair.cap {
                return Err(Error::CapExceeded { what: "dp training set", n: u.train().len(), cap: a.pair.cap });
            }
            let (values, _) = compute_values(method, &pair_inputs(u), &cfg, cli.seed)?;
            ValueAssignment::new(method.to_string(), values)?.save(out_path(cli)?)
        }
        Command::Dp(a) => {
            let u = model_utility(&a.train, &a.valid, a.iterations)?;
            let sol = solve_dp_with_cap(&memoize(&u), a.cap)?;
            sol.save(out_path(cli)?)
        }
        Command::Select(a) => {
            let values = ValueAssignment::load(&a.values)?;
            let u = model_utility(&a.train, &a.test, a.iterations)?;
            if values.len() != u.train().len() {
                return Err(Error::invalid(format!("{} values for {} training points", values.len(), u.train().len())));
            }
            selection_curve(&values.ranking()?, &u)?.save(out_path(cli)?)
        }
        Command::Bipartite(a) => {
            let u = model_utility(&a.pair.train, &a.pair.valid, a.pair.iterations)?;
            let graph_cfg =
                GraphLearnConfig { n_subsets: a.n_subsets, n_thresholds: a.n_thresholds, subset_size: a.subset_size };
            let (graph, report) = learn_graph(u.train(), u.held_out(), &graph_cfg, &u, cli.seed)?;
            let sel = greedy_select(&graph);
            let dir = out_path(cli)?;
            std::fs::create_dir_all(dir)?;
            graph.save(dir.join("graph.json"))?;
            report.save(dir.join("sweep.csv"))?;
            sel.values.save(dir.join("values.json"))?;
            write_json(&dir.join("selection.json"), &sel)
        }
        Command::Curvature(a) => {
            let rep = if let Some(g) = &a.graph {
                let u = CoverageUtility::new(BipartiteGraph::load(g)?);
                if a.active_only { curvature_of_active(&u)? } else { curvature(&u)? }
            } else {
                let (Some(train), Some(valid)) = (&a.train, &a.valid) else {
                    return Err(Error::invalid("curvature needs --graph or both --train and --valid"));
                };
                let u = model_utility(train, valid, a.iterations)?;
                if a.active_only { curvature_of_active(&u)? } else { curvature(&u)? }
            };
            write_json(out_path(cli)?, &rep)
        }
        Command::Sweep => {
            let sweep: SweepConfig = serde_json::from_str(&std::fs::read_to_string(config_path(cli)?)?)?;
            let dir = out_path(cli)?.to_path_buf();
            let (report, results) = curvature_sweep(&sweep)?;
            report.write(&dir)?;
            for (i, res) in results.iter().enumerate() {
                res.write(dir.join(format!("lambda_{i}")))?;
            }
            Ok(())
        }
        Command::Report => {
            let mut cfg = ExperimentConfig::load(config_path(cli)?)?;
            let dir = match (&cli.out, &cfg.output_dir) {
                (Some(d), _) | (None, Some(d)) => d.clone(),
                (None, None) => return Err(Error::invalid("report needs --out or output_dir in the config")),
            };
            cfg.output_dir = None;
            let result = run_experiment(&cfg)?;
            result.write(&dir)?;
            gap_report(&result)?.write(&dir)
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
