//! The set-function interface `U: 2^D -> R` and generic adapters around it.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use dashmap::mapref::entry::Entry;
use dashmap::DashMap;
use once_cell::sync::OnceCell;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;

/// A deterministic set function over a population of `n` points.
///
/// Implementations must return the same value for the same mask on every call,
/// including concurrent calls from several threads. Each implementation
/// documents its own value at the empty set.
pub trait Utility: Send + Sync {
    fn n(&self) -> usize;

    fn eval(&self, s: &SubsetMask) -> Result<f64>;
}

impl<U: Utility + ?Sized> Utility for &U {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        (**self).eval(s)
    }
}

impl<U: Utility + ?Sized> Utility for Box<U> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        (**self).eval(s)
    }
}

impl<U: Utility + ?Sized> Utility for Arc<U> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        (**self).eval(s)
    }
}

/// Evaluates `u` after checking the mask width, and rejects non-finite results.
pub fn checked_eval<U: Utility + ?Sized>(u: &U, s: &SubsetMask) -> Result<f64> {
    if s.n() != u.n() {
        return Err(Error::invalid(format!("mask over {} points given to utility over {}", s.n(), u.n())));
    }
    let v = u.eval(s)?;
    if !v.is_finite() {
        return Err(Error::NonFinite { mask: s.to_string(), value: v });
    }
    Ok(v)
}

/// Evaluates `u` on every mask `0..2^n` (n ≤ 30), in parallel, returning a table indexed by mask bits.
pub fn tabulate<U: Utility + ?Sized>(u: &U) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    let n = u.n();
    assert!(n <= 30, "tabulate needs n <= 30");
    (0..1u64 << n)
        .into_par_iter()
        .map(|bits| checked_eval(u, &SubsetMask::from_bits(n, bits)))
        .collect()
}

/// Closure-backed utility.
pub struct FnUtility<F> {
    n: usize,
    f: F,
}

impl<F> FnUtility<F>
where
    F: Fn(&SubsetMask) -> f64 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        FnUtility { n, f }
    }
}

impl<F> Utility for FnUtility<F>
where
    F: Fn(&SubsetMask) -> f64 + Send + Sync,
{
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        Ok((self.f)(s))
    }
}

/// `U(S) = |S|`.
pub fn cardinality(n: usize) -> FnUtility<impl Fn(&SubsetMask) -> f64 + Send + Sync> {
    FnUtility::new(n, |s: &SubsetMask| s.len() as f64)
}

/// An explicit value per mask, indexed by the mask's integer value.
#[derive(Debug, Clone)]
pub struct TableUtility {
    n: usize,
    values: Vec<f64>,
}

impl TableUtility {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > 30 || values.len() != 1usize << n {
            return Err(Error::invalid(format!("table of {} values does not cover 2^{n} masks", values.len())));
        }
        Ok(TableUtility { n, values })
    }

    /// Independent uniform `[0, 1)` values per mask.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..1usize << n).map(|_| rng.random::<f64>()).collect();
        TableUtility { n, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Utility for TableUtility {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        let bits = s.to_bits().ok_or_else(|| Error::invalid("mask too wide for table utility"))?;
        Ok(self.values[bits as usize])
    }
}

/// `U(S) + offset`.
pub struct Shifted<U> {
    pub inner: U,
    pub offset: f64,
}

impl<U: Utility> Utility for Shifted<U> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        Ok(self.inner.eval(s)? + self.offset)
    }
}

/// Default cap on memoized masks.
pub const DEFAULT_MEMO_CAPACITY: usize = 1 << 24;

/// Caches every distinct mask's value; the wrapped utility runs at most once per mask.
///
/// Insertion is serialized per key (a `OnceCell` per entry), so concurrent
/// callers asking for unrelated masks never wait on each other's evaluation.
/// When `capacity` distinct masks are cached, new masks fail with
/// [`Error::CacheFull`] instead of evicting.
pub struct Memoized<U> {
    inner: U,
    cache: DashMap<SubsetMask, Arc<OnceCell<f64>>>,
    entries: AtomicUsize,
    evaluations: AtomicUsize,
    capacity: usize,
}

impl<U: Utility> Memoized<U> {
    pub fn new(inner: U) -> Self {
        Self::with_capacity(inner, DEFAULT_MEMO_CAPACITY)
    }

    pub fn with_capacity(inner: U, capacity: usize) -> Self {
        Memoized {
            inner,
            cache: DashMap::new(),
            entries: AtomicUsize::new(0),
            evaluations: AtomicUsize::new(0),
            capacity,
        }
    }

    /// Number of calls that reached the wrapped utility.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::SeqCst)
    }

    pub fn cached(&self) -> usize {
        self.entries.load(Ordering::SeqCst)
    }

    pub fn inner(&self) -> &U {
        &self.inner
    }

    fn cell(&self, s: &SubsetMask) -> Result<Arc<OnceCell<f64>>> {
        if let Some(c) = self.cache.get(s) {
            return Ok(c.clone());
        }
        match self.cache.entry(s.clone()) {
            Entry::Occupied(e) => Ok(e.get().clone()),
            Entry::Vacant(v) => {
                if self.entries.fetch_add(1, Ordering::SeqCst) >= self.capacity {
                    self.entries.fetch_sub(1, Ordering::SeqCst);
                    return Err(Error::CacheFull { cap: self.capacity });
                }
                Ok(v.insert(Arc::new(OnceCell::new())).clone())
            }
        }
    }
}

/// Wraps `u` in a memo cache with the default capacity.
pub fn memoize<U: Utility>(u: U) -> Memoized<U> {
    Memoized::new(u)
}

impl<U: Utility> Utility for Memoized<U> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        let cell = self.cell(s)?;
        cell.get_or_try_init(|| {
            self.evaluations.fetch_add(1, Ordering::SeqCst);
            self.inner.eval(s)
        })
        .copied()
    }
}

/// Counts calls and refuses any beyond `budget`.
pub struct Budgeted<U> {
    inner: U,
    budget: usize,
    calls: AtomicUsize,
}

impl<U: Utility> Budgeted<U> {
    pub fn new(inner: U, budget: usize) -> Self {
        Budgeted { inner, budget, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst).min(self.budget)
    }
}

impl<U: Utility> Utility for Budgeted<U> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn eval(&self, s: &SubsetMask) -> Result<f64> {
        if self.calls.fetch_add(1, Ordering::SeqCst) >= self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget });
        }
        self.inner.eval(s)
    }
}
