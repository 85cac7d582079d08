//! Sequential data selection and data valuation.
//!
//! Data selection is cast as a finite-horizon decision problem over the subset
//! lattice: a ranking `π` is scored by the mean utility of its nested prefixes.
//! The crate provides exact optimal sequences by dynamic programming, classical
//! semi-value data values, linear-surrogate fits that connect the two, and a
//! bipartite coverage approximation with greedy selection.

pub mod bipartite;
pub mod cli;
pub mod curve;
pub mod dataset;
pub mod dp;
pub mod error;
pub mod harness;
pub mod mask;
pub mod semivalues;
pub mod surrogate;
pub mod utilities;
pub mod utility;
pub mod values;

pub use curve::{selection_curve, SelectionCurve};
pub use bipartite::{greedy_select, learn_graph, GreedySelection};
pub use dataset::{split_dataset, Dataset, SplitTag, Splits};
pub use dp::{solve_dp, DpSolution};
pub use error::{Error, Result};
pub use mask::SubsetMask;
pub use semivalues::{exact_semivalue, loo, mc_semivalue, SemiValueScheme};
pub use surrogate::{fit_wls, myopic_sequence, FitMode, LinearSurrogate, WlsKernel};
pub use utility::{memoize, Memoized, Utility};
pub use values::{rank_by_value, ValueAssignment};
