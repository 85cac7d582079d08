use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::Utility;

use super::logreg::{train_classifier, Standardizer, TrainerConfig};

/// Held-out accuracy of a logistic-regression model trained on the rows in `S`.
///
/// Features of both splits are standardized with statistics of the whole
/// training split, so `U(S)` depends on nothing but the rows of `S`.
/// `U(∅)` is the frequency of the majority class in the held-out split.
#[derive(Debug, Clone)]
pub struct ModelUtility {
    train: Dataset,
    held_out: Dataset,
    cfg: TrainerConfig,
    empty_value: f64,
}

impl ModelUtility {
    pub fn new(train: &Dataset, held_out: &Dataset, cfg: TrainerConfig) -> Result<Self> {
        if held_out.is_empty() {
            return Err(Error::invalid("model utility needs a non-empty held-out split"));
        }
        if train.dim() != held_out.dim() {
            return Err(Error::invalid(format!(
                "train has {} features, held-out split has {}",
                train.dim(),
                held_out.dim()
            )));
        }
        let n_classes = train.n_classes().max(held_out.n_classes());
        if n_classes < 2 {
            return Err(Error::invalid("classification utility needs at least two classes"));
        }
        let st = Standardizer::fit(train);
        let relabel = |ds: &Dataset| -> Result<Dataset> {
            let z = st.apply(ds)?;
            let mut out = Dataset::new(z.features().to_vec(), z.dim(), z.labels().to_vec(), n_classes)?;
            out.split = ds.split;
            Ok(out)
        };
        let held_out = relabel(held_out)?;
        let majority = held_out.class_counts().into_iter().max().unwrap_or(0);
        Ok(ModelUtility {
            train: relabel(train)?,
            empty_value: majority as f64 / held_out.len() as f64,
            held_out,
            cfg,
        })
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.cfg
    }

    /// Standardized training split.
    pub fn train(&self) -> &Dataset {
        &self.train
    }

    pub fn held_out(&self) -> &Dataset {
        &self.held_out
    }

    pub fn empty_value(&self) -> f64 {
        self.empty_value
    }
}

impl Utility for ModelUtility {
    fn n(&self) -> usize {
        self.train.len()
    }

    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        if s.n() != self.train.len() {
            return Err(Error::invalid(format!("mask over {} points, training split has {}", s.n(), self.train.len())));
        }
        if s.is_empty() {
            return Ok(self.empty_value);
        }
        let rows = s.to_vec();
        Ok(train_classifier(&self.train, &rows, &self.cfg)?.accuracy(&self.held_out))
    }
}
