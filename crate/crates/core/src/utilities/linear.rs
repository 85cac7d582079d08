use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::Utility;

/// `U(S) = Σ_{i∈S} w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearUtility {
    weights: Vec<f64>,
}

impl LinearUtility {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::invalid(format!("weight {i} is not finite")));
        }
        Ok(LinearUtility { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Utility for LinearUtility {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        if s.n() != self.weights.len() {
            return Err(Error::invalid(format!("mask over {} points, utility over {}", s.n(), self.weights.len())));
        }
        Ok(s.iter().map(|i| self.weights[i]).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_selected_weights() {
        let u = LinearUtility::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(u.eval(&SubsetMask::from_indices(3, &[0, 2]).unwrap()).unwrap(), 5.0);
        assert_eq!(u.eval(&SubsetMask::empty(3)).unwrap(), 0.0);
        assert_eq!(u.eval(&SubsetMask::full(3)).unwrap(), 6.0);
        assert!(u.eval(&SubsetMask::empty(4)).is_err());
        assert!(LinearUtility::new(vec![f64::NAN]).is_err());
    }
}
