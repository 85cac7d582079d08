use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-point scores `v(i)` plus the name of the method that produced them.
///
/// JSON form: `{"method": string, "values": [real...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueAssignment {
    pub method: String,
    pub values: Vec<f64>,
}

impl ValueAssignment {
    pub fn new(method: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let va = ValueAssignment { method: method.into(), values };
        va.validate()?;
        Ok(va)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("value of point {i} is not finite")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ranking(&self) -> Result<Vec<usize>> {
        rank_by_value(&self.values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let va: ValueAssignment = serde_json::from_reader(std::fs::File::open(path)?)?;
        va.validate()?;
        Ok(va)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Descending-value permutation; equal values keep ascending index order.
pub fn rank_by_value(values: &[f64]) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::invalid("cannot rank an empty value assignment"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("value of point {i} is not finite")));
    }
    let mut perm: Vec<usize> = (0..values.len()).collect();
    // stable sort keeps index order on ties
    perm.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite"));
    Ok(perm)
}

/// Checks that `perm` is a permutation of `[0, n)`.
pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::invalid(format!("permutation has {} entries, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid(format!("not a permutation of [0, {n}): entry {p}")));
        }
    }
    Ok(())
}

/// Values `n - t` for the point selected at (1-based) step `t`.
pub fn values_from_order(perm: &[usize]) -> Vec<f64> {
    let n = perm.len();
    let mut v = vec![0.0; n];
    for (t, &a) in perm.iter().enumerate() {
        v[a] = (n - (t + 1)) as f64;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_descending() {
        assert_eq!(rank_by_value(&[0.2, 0.9, 0.5]).unwrap(), vec![1, 2, 0]);
    }

    #[test]
    fn ties_by_index() {
        assert_eq!(rank_by_value(&[1.0, 1.0, 0.0]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn scale_invariant() {
        assert_eq!(rank_by_value(&[3.0, 1.0, 2.0]).unwrap(), rank_by_value(&[30.0, 10.0, 20.0]).unwrap());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(rank_by_value(&[1.0, f64::INFINITY]).is_err());
        assert!(rank_by_value(&[]).is_err());
        assert!(ValueAssignment::new("x", vec![f64::NAN]).is_err());
    }

    #[test]
    fn json_shape() {
        let va = ValueAssignment::new("shapley", vec![0.5, -1.0]).unwrap();
        let s = serde_json::to_string(&va).unwrap();
        assert_eq!(s, r#"{"method":"shapley","values":[0.5,-1.0]}"#);
    }

    #[test]
    fn order_values() {
        assert_eq!(values_from_order(&[0, 2, 1]), vec![2.0, 0.0, 1.0]);
        assert!(check_permutation(&[0, 0, 1], 3).is_err());
        assert!(check_permutation(&[2, 0, 1], 3).is_ok());
    }

    proptest! {
        #[test]
        fn strictly_increasing_transforms_preserve_ranking(v in proptest::collection::vec(-10.0f64..10.0, 1..30)) {
            let base = rank_by_value(&v).unwrap();
            let affine: Vec<f64> = v.iter().map(|x| 2.0 * x + 1.0).collect();
            let cubic: Vec<f64> = v.iter().map(|x| x * x * x).collect();
            prop_assert_eq!(rank_by_value(&affine).unwrap(), base.clone());
            prop_assert_eq!(rank_by_value(&cubic).unwrap(), base.clone());
            let mut sorted = base.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..v.len()).collect::<Vec<_>>());
            prop_assert!(base.windows(2).all(|w| v[w[0]] >= v[w[1]]));
        }
    }
}
