use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::{checked_eval, Utility};

/// Total curvature `c = 1 - min_i Δ_i U(D\{i}) / Δ_i U(∅)`.
///
/// `Δ_i U(∅)` is taken as `U({i}) - U(∅)`, so adding a constant to `U` does
/// not change the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub c: f64,
    pub argmin_index: usize,
    /// Per-point ratio; `None` for points left out of the minimum.
    pub ratios: Vec<Option<f64>>,
}

struct Gains {
    last: Vec<f64>,
    first: Vec<f64>,
}

fn gains<U: Utility + ?Sized>(u: &U) -> Result<Gains> {
    let n = u.n();
    if n == 0 {
        return Err(Error::invalid("curvature of a utility over zero points"));
    }
    let empty = SubsetMask::empty(n);
    let full = SubsetMask::full(n);
    let u_empty = checked_eval(u, &empty)?;
    let u_full = checked_eval(u, &full)?;
    let mut last = Vec::with_capacity(n);
    let mut first = Vec::with_capacity(n);
    for i in 0..n {
        last.push(u_full - checked_eval(u, &full.without(i))?);
        first.push(checked_eval(u, &empty.with(i))? - u_empty);
    }
    Ok(Gains { last, first })
}

fn report(g: &Gains, active: impl Fn(usize) -> bool) -> Result<CurvatureReport> {
    let ratios: Vec<Option<f64>> =
        (0..g.first.len()).map(|i| active(i).then(|| g.last[i] / g.first[i])).collect();
    let (argmin_index, min) = ratios
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .fold(None, |best: Option<(usize, f64)>, (i, r)| match best {
            Some((_, b)) if b <= r => best,
            _ => Some((i, r)),
        })
        .ok_or_else(|| Error::invalid("no point has a positive singleton gain"))?;
    Ok(CurvatureReport { c: 1.0 - min, argmin_index, ratios })
}

/// Curvature over all points. Fails if any singleton gain `U({i}) - U(∅)` is not positive.
pub fn curvature<U: Utility + ?Sized>(u: &U) -> Result<CurvatureReport> {
    let g = gains(u)?;
    if let Some(i) = g.first.iter().position(|&d| d <= 0.0) {
        return Err(Error::CurvatureUndefined { index: i, gain: g.first[i] });
    }
    report(&g, |_| true)
}

/// Curvature over the points with a positive singleton gain only.
///
/// For a monotone submodular utility a point with zero singleton gain adds
/// nothing to any set, so it carries no information about diminishing returns.
pub fn curvature_of_active<U: Utility + ?Sized>(u: &U) -> Result<CurvatureReport> {
    let g = gains(u)?;
    let first = g.first.clone();
    report(&g, |i| first[i] > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utilities::{BipartiteGraph, CoverageUtility, LinearUtility};
    use crate::utility::Shifted;

    #[test]
    fn linear_has_zero_curvature() {
        let r = curvature(&LinearUtility::new(vec![3.0, 1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(r.c, 0.0);
        assert!(r.ratios.iter().all(|&x| x == Some(1.0)));
    }

    #[test]
    fn identical_coverage_has_full_curvature() {
        let g = BipartiteGraph::from_coverage_sets(4, &[vec![0, 1], vec![0, 1], vec![2, 3]]).unwrap();
        let r = curvature(&CoverageUtility::new(g)).unwrap();
        assert_eq!(r.c, 1.0);
        assert_eq!(r.argmin_index, 0);
    }

    #[test]
    fn disjoint_coverage_is_modular() {
        let g = BipartiteGraph::from_coverage_sets(5, &[vec![0], vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(curvature(&CoverageUtility::new(g)).unwrap().c, 0.0);
    }

    #[test]
    fn zero_gain_is_reported() {
        let g = BipartiteGraph::from_coverage_sets(2, &[vec![0], vec![]]).unwrap();
        let u = CoverageUtility::new(g);
        assert!(matches!(curvature(&u), Err(Error::CurvatureUndefined { index: 1, .. })));
        let r = curvature_of_active(&u).unwrap();
        assert_eq!(r.c, 0.0);
        assert_eq!(r.ratios, vec![Some(1.0), None]);
    }

    #[test]
    fn offset_invariant() {
        let g = BipartiteGraph::from_coverage_sets(4, &[vec![0, 1], vec![1, 2], vec![3]]).unwrap();
        let base = curvature(&CoverageUtility::new(g.clone())).unwrap();
        let shifted = curvature(&Shifted { inner: CoverageUtility::new(g), offset: 0.375 }).unwrap();
        assert_eq!(base, shifted);
        assert_eq!(base.c, 0.5);
    }
}
