//! Complex counts `N_d` of rational plane curves and the real lower-bound
//! report built from them.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::pascal_rows;
use crate::surface::SurfaceClass;
use crate::symbolic::AffineExpr;

static MEMO: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

/// `N_1, …, N_max` by Kontsevich's recursion
/// `N_d = Σ_{d₁+d₂=d} N_{d₁}N_{d₂} d₁² d₂ (d₂ C(3d−4, 3d₁−2) − d₁ C(3d−4, 3d₁−1))`.
pub fn kontsevich_table(max_d: usize) -> Vec<BigInt> {
    let mut n = vec![BigInt::zero(); max_d + 1];
    if max_d == 0 {
        return n;
    }
    n[1] = BigInt::from(1);
    let pascal = pascal_rows((3 * max_d).saturating_sub(4));
    for d in 2..=max_d {
        let row = &pascal[3 * d - 4];
        let choose = |k: usize| row.get(k).cloned().unwrap_or_default();
        let mut total = BigInt::zero();
        for d1 in 1..d {
            let d2 = d - d1;
            let (a, b) = (BigInt::from(d1), BigInt::from(d2));
            let bracket = &b * choose(3 * d1 - 2) - &a * choose(3 * d1 - 1);
            total += &n[d1] * &n[d2] * &a * &a * &b * bracket;
        }
        n[d] = total;
    }
    n
}

/// `N_d`, memoized across calls.
pub fn kontsevich_nd(d: i64) -> Result<BigInt> {
    if d < 1 {
        return Err(Error::OutOfRange(format!("degree must be >= 1, got {d}")));
    }
    let d = d as usize;
    if let Some(v) = MEMO.read().unwrap().get(d) {
        return Ok(v.clone());
    }
    let mut memo = MEMO.write().unwrap();
    if memo.len() <= d {
        *memo = kontsevich_table(d.max(8));
    }
    Ok(memo[d].clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub cls: SurfaceClass,
    pub r: i64,
    #[serde(serialize_with = "as_string")]
    pub chi_abs: BigInt,
    #[serde(serialize_with = "as_string")]
    pub n_d: BigInt,
    #[serde(serialize_with = "as_string")]
    pub all_real_threshold: BigRational,
    pub parity_ok: bool,
}

fn as_string<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `|χ_r|` is a lower bound for the number of real curves among the `N_d`;
/// `(N_d − |χ_r|)/2` curves of the right mass parity force all to be real.
pub fn bound_report(cls: &SurfaceClass, r: i64, chi: &AffineExpr, n_d: &BigInt) -> Result<BoundReport> {
    let chi_value = chi
        .as_constant()
        .ok_or_else(|| Error::SymbolicCoefficient(chi.to_string()))?;
    let chi_abs = chi_value.abs();
    // non-real curves pair up under conjugation
    let parity_ok = ((n_d - chi_value) % BigInt::from(2)).is_zero();
    let all_real_threshold =
        BigRational::new(n_d - &chi_abs, BigInt::from(2));
    Ok(BoundReport {
        cls: cls.clone(),
        r,
        chi_abs,
        n_d: n_d.clone(),
        all_real_threshold,
        parity_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::UnknownSymbol;

    fn naive(d: usize) -> BigInt {
        if d == 1 {
            return BigInt::from(1);
        }
        let binom = |n: usize, k: usize| -> BigInt {
            if k > n {
                return BigInt::zero();
            }
            (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
        };
        (1..d)
            .map(|d1| {
                let d2 = d - d1;
                let (a, b) = (BigInt::from(d1), BigInt::from(d2));
                naive(d1) * naive(d2) * &a * &a * &b
                    * (&b * binom(3 * d - 4, 3 * d1 - 2) - &a * binom(3 * d - 4, 3 * d1 - 1))
            })
            .sum()
    }

    #[test]
    fn small_values() {
        let expect = [1, 1, 12, 620, 87304];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(kontsevich_nd(d as i64 + 1).unwrap(), BigInt::from(*e));
        }
        assert!(kontsevich_nd(0).is_err());
    }

    #[test]
    fn memo_agrees_with_naive_and_increases() {
        for d in 1..=8 {
            assert_eq!(kontsevich_nd(d as i64).unwrap(), naive(d));
        }
        let t = kontsevich_table(8);
        for d in 3..8 {
            assert!(t[d] > BigInt::zero() && t[d + 1] > t[d]);
        }
        assert_eq!(kontsevich_nd(12).unwrap(), kontsevich_table(12)[12]);
    }

    #[test]
    fn bound_reports() {
        let c3 = SurfaceClass::cp2(3).unwrap();
        let r = bound_report(&c3, 8, &AffineExpr::constant(8), &BigInt::from(12)).unwrap();
        assert_eq!(r.all_real_threshold, BigRational::from_integer(BigInt::from(2)));
        assert!(r.parity_ok);
        assert!(r.chi_abs <= r.n_d);

        let c1 = SurfaceClass::cp2(1).unwrap();
        let r = bound_report(&c1, 2, &AffineExpr::constant(1), &BigInt::from(1)).unwrap();
        assert!(r.all_real_threshold.is_zero() && r.parity_ok);

        let c2 = SurfaceClass::cp2(2).unwrap();
        let r = bound_report(&c2, 5, &AffineExpr::constant(1), &BigInt::from(1)).unwrap();
        assert!(r.all_real_threshold.is_zero() && r.parity_ok);

        let r = bound_report(&c3, 8, &AffineExpr::constant(7), &BigInt::from(12)).unwrap();
        assert!(!r.parity_ok);

        let sym = AffineExpr::symbol(UnknownSymbol::new("4", 0, 1));
        assert!(matches!(
            bound_report(&c3, 8, &sym, &BigInt::from(12)),
            Err(Error::SymbolicCoefficient(_))
        ));
    }
}
