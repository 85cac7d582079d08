//! Concrete utility functions and tools for measuring their structure.

mod coverage;
mod curvature;
mod linear;
mod logreg;
mod model;
mod submodularity;
mod synth;

pub use coverage::{BipartiteGraph, CoverageUtility};
pub use curvature::{curvature, curvature_of_active, CurvatureReport};
pub use linear::LinearUtility;
pub use logreg::{train_classifier, Classifier, Standardizer, TrainerConfig};
pub use model::ModelUtility;
pub use submodularity::{check_monotone_submodular, PropertyReport, Violation, MAX_CHECK_N};
pub use synth::{generate_gmm, message_passing, GmmSpec};
