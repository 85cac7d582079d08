use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::utility::{tabulate, Utility};

/// Largest population the exhaustive check accepts.
pub const MAX_CHECK_N: usize = 12;
const TOL: f64 = 1e-9;

/// A pair `A ⊆ B` and an element `i` at which a property fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub a: SubsetMask,
    pub b: SubsetMask,
    pub i: usize,
    /// How far the inequality is violated.
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub monotone: bool,
    pub submodular: bool,
    pub monotone_witness: Option<Violation>,
    pub submodular_witness: Option<Violation>,
}

/// Checks `U(A) ≤ U(B)` and `Δ_i U(A) ≥ Δ_i U(B)` for every `A ⊆ B`, `i ∉ B`, to within 1e-9.
pub fn check_monotone_submodular<U: Utility + ?Sized>(u: &U) -> Result<PropertyReport> {
    let n = u.n();
    if n > MAX_CHECK_N {
        return Err(Error::CapExceeded { what: "monotone/submodular check", n, cap: MAX_CHECK_N });
    }
    let table = tabulate(u)?;
    let full = (1u64 << n) - 1;
    let mask = |bits: u64| SubsetMask::from_bits(n, bits);
    let mut monotone_witness = None;
    let mut submodular_witness = None;
    for b in 0..=full {
        // submasks of b in increasing order
        let mut sub = 0u64;
        loop {
            let a = sub;
            if monotone_witness.is_none() && a != b && table[a as usize] > table[b as usize] + TOL {
                let i = (b & !a).trailing_zeros() as usize;
                monotone_witness =
                    Some(Violation { a: mask(a), b: mask(b), i, amount: table[a as usize] - table[b as usize] });
            }
            if submodular_witness.is_none() {
                let mut rest = full & !b;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let da = table[(a | 1 << i) as usize] - table[a as usize];
                    let db = table[(b | 1 << i) as usize] - table[b as usize];
                    if da < db - TOL {
                        submodular_witness = Some(Violation { a: mask(a), b: mask(b), i, amount: db - da });
                        break;
                    }
                }
            }
            if sub == b {
                break;
            }
            sub = (sub.wrapping_sub(b)) & b;
        }
        if monotone_witness.is_some() && submodular_witness.is_some() {
            break;
        }
    }
    Ok(PropertyReport {
        monotone: monotone_witness.is_none(),
        submodular: submodular_witness.is_none(),
        monotone_witness,
        submodular_witness,
    })
}
