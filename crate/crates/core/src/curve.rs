use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::{checked_eval, Utility};
use crate::values::check_permutation;

/// `U(S_k)` for the nested prefixes `S_k = {π(1), ..., π(k)}`, `k = 1..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionCurve {
    pub points: Vec<(usize, f64)>,
    /// Mean of the utilities over all prefix sizes.
    pub objective: f64,
}

impl SelectionCurve {
    pub fn from_utilities(utilities: Vec<f64>) -> Self {
        let objective = mean(&utilities);
        SelectionCurve { points: utilities.into_iter().enumerate().map(|(i, u)| (i + 1, u)).collect(), objective }
    }

    pub fn utilities(&self) -> Vec<f64> {
        self.points.iter().map(|&(_, u)| u).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with columns `k,utility`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "utility"])?;
        for &(k, u) in &self.points {
            w.write_record([k.to_string(), format!("{u:?}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut utilities = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let k: usize = rec[0].parse().map_err(|_| Error::invalid("bad k column"))?;
            if k != row + 1 {
                return Err(Error::invalid(format!("curve row {row} has k = {k}")));
            }
            utilities.push(rec[1].parse().map_err(|_| Error::invalid("bad utility column"))?);
        }
        Ok(SelectionCurve::from_utilities(utilities))
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Evaluates `u` on each prefix of `perm`. The empty prefix is not part of the curve.
pub fn selection_curve<U: Utility + ?Sized>(perm: &[usize], u: &U) -> Result<SelectionCurve> {
    let n = u.n();
    check_permutation(perm, n)?;
    let mut s = SubsetMask::empty(n);
    let mut utilities = Vec::with_capacity(n);
    for (k, &a) in perm.iter().enumerate() {
        s.insert(a);
        let v = checked_eval(u, &s).map_err(|e| Error::AtPrefix { k: k + 1, source: Box::new(e) })?;
        utilities.push(v);
    }
    Ok(SelectionCurve::from_utilities(utilities))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::{cardinality, FnUtility};

    #[test]
    fn cardinality_curve() {
        let c = selection_curve(&[2, 0, 1], &cardinality(3)).unwrap();
        assert_eq!(c.utilities(), vec![1.0, 2.0, 3.0]);
        assert_eq!(c.objective, 2.0);
        assert_eq!(c.points.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn linear_prefix_sums() {
        let w = [3.0, 1.0, 2.0];
        let u = FnUtility::new(3, move |s: &SubsetMask| s.iter().map(|i| w[i]).sum());
        let c = selection_curve(&[0, 2, 1], &u).unwrap();
        assert_eq!(c.utilities(), vec![3.0, 5.0, 6.0]);
        assert!((c.objective - 14.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn failure_carries_prefix_size() {
        let u = FnUtility::new(3, |s: &SubsetMask| if s.len() == 2 { f64::NAN } else { 0.0 });
        match selection_curve(&[0, 1, 2], &u) {
            Err(Error::AtPrefix { k, .. }) => assert_eq!(k, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(selection_curve(&[0, 1], &u).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = SelectionCurve::from_utilities(vec![0.25, 0.5, 1.0 / 3.0]);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("k,utility\n1,0.25\n"));
        assert_eq!(SelectionCurve::read_csv(buf.as_slice()).unwrap(), c);
    }
}
