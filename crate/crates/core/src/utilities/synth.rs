//! Synthetic data for curvature experiments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Isotropic Gaussian mixture with one unit-variance component per class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmSpec {
    pub n_per_class: usize,
    pub classes: usize,
    pub dim: usize,
    /// Distance between class means (exact whenever `classes <= dim`).
    pub separation: f64,
}

impl GmmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 || self.classes == 0 || self.dim == 0 {
            return Err(Error::invalid("gmm counts must be at least 1"));
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return Err(Error::invalid("gmm separation must be finite and non-negative"));
        }
        Ok(())
    }

    /// Mean of class `c`: a scaled coordinate axis, with signs and radii
    /// alternating once the axes run out.
    pub fn class_mean(&self, c: usize) -> Vec<f64> {
        let r = self.separation / std::f64::consts::SQRT_2;
        let lap = c / self.dim;
        let sign = if lap.is_multiple_of(2) { 1.0 } else { -1.0 };
        let radius = r * (1 + lap / 2) as f64;
        let mut mean = vec![0.0; self.dim];
        mean[c % self.dim] = sign * radius;
        mean
    }
}

/// Draws `n_per_class` rows per class, class-blocked in label order.
pub fn generate_gmm(spec: &GmmSpec, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(spec.n_per_class * spec.classes * spec.dim);
    let mut labels = Vec::with_capacity(spec.n_per_class * spec.classes);
    for c in 0..spec.classes {
        let mean = spec.class_mean(c);
        for _ in 0..spec.n_per_class {
            for mu in &mean {
                let z: f64 = StandardNormal.sample(&mut rng);
                features.push(mu + z);
            }
            labels.push(c);
        }
    }
    Dataset::new(features, spec.dim.max(1), labels, spec.classes.max(2)).expect("generated data is well-formed")
}

/// Moves every row a fraction `lambda` of the way to its class mean.
pub fn message_passing(ds: &Dataset, lambda: f64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("propagation proportion {lambda} outside [0, 1]")));
    }
    let d = ds.dim();
    let counts = ds.class_counts();
    let mut sums = vec![0.0; ds.n_classes() * d];
    for (row, &y) in ds.rows().zip(ds.labels()) {
        for (acc, x) in sums[y * d..(y + 1) * d].iter_mut().zip(row) {
            *acc += x;
        }
    }
    let mut features = Vec::with_capacity(ds.features().len());
    for (row, &y) in ds.rows().zip(ds.labels()) {
        if counts[y] == 1 {
            features.extend_from_slice(row);
            continue;
        }
        let m = counts[y] as f64;
        for (x, s) in row.iter().zip(&sums[y * d..(y + 1) * d]) {
            features.push((1.0 - lambda) * x + lambda * (s / m));
        }
    }
    let mut out = Dataset::new(features, d, ds.labels().to_vec(), ds.n_classes())?;
    out.split = ds.split;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GmmSpec {
        GmmSpec { n_per_class: 50, classes: 3, dim: 3, separation: 4.0 }
    }

    #[test]
    fn shape_and_balance() {
        let ds = generate_gmm(&spec(), 11);
        assert_eq!(ds.len(), 150);
        assert_eq!(ds.class_counts(), vec![50, 50, 50]);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_gmm(&spec(), 5), generate_gmm(&spec(), 5));
        assert_ne!(generate_gmm(&spec(), 5), generate_gmm(&spec(), 6));
    }

    #[test]
    fn means_at_requested_distance() {
        let s = spec();
        for a in 0..3 {
            for b in a + 1..3 {
                let (ma, mb) = (s.class_mean(a), s.class_mean(b));
                let dist: f64 = ma.iter().zip(&mb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                assert!((dist - 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_separation_shares_one_mean() {
        let s = GmmSpec { separation: 0.0, ..spec() };
        assert!((0..3).all(|c| s.class_mean(c).iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn message_passing_endpoints() {
        let ds = generate_gmm(&spec(), 2);
        assert_eq!(message_passing(&ds, 0.0).unwrap(), ds);
        let full = message_passing(&ds, 1.0).unwrap();
        for c in 0..3 {
            let rows: Vec<&[f64]> = full.rows().zip(full.labels()).filter(|(_, &y)| y == c).map(|(r, _)| r).collect();
            assert!(rows.windows(2).all(|w| w[0] == w[1]));
        }
        assert_eq!(full.labels(), ds.labels());
        assert!(message_passing(&ds, 1.5).is_err());
    }

    #[test]
    fn message_passing_half_step() {
        let ds = Dataset::from_rows(&[vec![0.0, 0.0], vec![2.0, 2.0], vec![9.0, -3.0]], vec![0, 0, 1]).unwrap();
        let out = message_passing(&ds, 0.5).unwrap();
        assert_eq!(out.row(0), &[0.5, 0.5]);
        assert_eq!(out.row(1), &[1.5, 1.5]);
        // singleton class untouched
        assert_eq!(out.row(2), &[9.0, -3.0]);
    }
}
