//! Labelled feature matrices and their CSV form.
//!
//! CSV layout: a header row `f0,...,f{d-1},label`, one sample per row, integer labels.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Valid,
    Test,
}

/// Dense row-major features with class labels in `[0, n_classes)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    dim: usize,
    labels: Vec<usize>,
    n_classes: usize,
    /// `None` for pooled data that has not been split yet.
    pub split: Option<SplitTag>,
}

impl Dataset {
    pub fn new(features: Vec<f64>, dim: usize, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dataset needs at least one feature column"));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::invalid(format!(
                "feature buffer has {} values, expected {} rows x {dim}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature in row {}", pos / dim)));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= n_classes) {
            return Err(Error::invalid(format!("label {bad} outside [0, {n_classes})")));
        }
        Ok(Dataset { features, dim, labels, n_classes, split: None })
    }

    /// Builds from rows, inferring the class count as `max(label) + 1` (at least 2).
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("ragged feature rows"));
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        let n_classes = labels.iter().max().map_or(2, |&m| (m + 1).max(2));
        Dataset::new(rows.concat(), dim, labels, n_classes)
    }

    pub fn with_split(mut self, tag: SplitTag) -> Self {
        self.split = Some(tag);
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Rows `idx` in the given order. The class count is preserved.
    pub fn select(&self, idx: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            features,
            dim: self.dim,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            split: self.split,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let d = headers.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| {
            Error::invalid("dataset CSV needs at least one feature column and a label column")
        })?;
        for (j, h) in headers.iter().take(d).enumerate() {
            if h.trim() != format!("f{j}") {
                return Err(Error::invalid(format!("expected header f{j}, found {h:?}")));
            }
        }
        if headers[d].trim() != "label" {
            return Err(Error::invalid("last CSV column must be `label`"));
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            for j in 0..d {
                let v: f64 = record[j]
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("row {r}, column f{j}: not a number")))?;
                features.push(v);
            }
            let y: usize = record[d]
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("row {r}: label must be a non-negative integer")))?;
            labels.push(y);
        }
        let n_classes = labels.iter().max().map_or(2, |&m| (m + 1).max(2));
        Dataset::new(features, d, labels, n_classes)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.dim).map(|j| format!("f{j}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for (row, y) in self.rows().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Train / validation / test partition of a pooled dataset.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub valid: Dataset,
    pub test: Dataset,
}

/// Shuffles rows with `seed` and takes consecutive blocks of the requested sizes.
pub fn split_dataset(ds: &Dataset, n_train: usize, n_valid: usize, n_test: usize, seed: u64) -> Result<Splits> {
    let need = n_train + n_valid + n_test;
    if need > ds.len() {
        return Err(Error::invalid(format!("split sizes sum to {need} but dataset has {} rows", ds.len())));
    }
    if n_train == 0 || n_valid == 0 || n_test == 0 {
        return Err(Error::invalid("every split needs at least one row"));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(Splits {
        train: ds.select(&idx[..n_train]).with_split(SplitTag::Train),
        valid: ds.select(&idx[n_train..n_train + n_valid]).with_split(SplitTag::Valid),
        test: ds.select(&idx[n_train + n_valid..need]).with_split(SplitTag::Test),
    })
}
