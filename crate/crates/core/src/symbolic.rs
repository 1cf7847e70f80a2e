//! Exact affine forms over named unknowns, and exact linear solving.
//!
//! Coefficients are arbitrary-precision integers. Elimination runs over
//! `BigRational` and pivots columns in symbol order, so witnesses and
//! solutions are reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undetermined lattice cell `θ^{σ}_s` of the class tagged `tag`.
///
/// Ordering is lexicographic on `(tag, sigma, s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnknownSymbol {
    pub tag: String,
    pub sigma: i64,
    pub s: i64,
}

impl UnknownSymbol {
    pub fn new(tag: impl Into<String>, sigma: i64, s: i64) -> Self {
        UnknownSymbol {
            tag: tag.into(),
            sigma,
            s,
        }
    }

    /// Identifier form, `theta(d,sigma,s)`.
    pub fn name(&self) -> String {
        format!("theta({},{},{})", self.tag, self.sigma, self.s)
    }

    /// Display form used in relations: `chi[d,s]` on the σ = 0 row and
    /// `theta[d,sigma,s]` elsewhere.
    pub fn display(&self) -> String {
        if self.sigma == 0 {
            format!("chi[{},{}]", self.tag, self.s)
        } else {
            format!("theta[{},{},{}]", self.tag, self.sigma, self.s)
        }
    }
}

/// `constant + Σ coefficient·symbol` with integer coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AffineExpr {
    constant: BigInt,
    terms: BTreeMap<UnknownSymbol, BigInt>,
}

impl AffineExpr {
    pub fn zero() -> Self {
        AffineExpr::default()
    }

    pub fn constant(value: impl Into<BigInt>) -> Self {
        AffineExpr {
            constant: value.into(),
            terms: BTreeMap::new(),
        }
    }

    pub fn symbol(sym: UnknownSymbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(sym, BigInt::one());
        AffineExpr {
            constant: BigInt::zero(),
            terms,
        }
    }

    pub fn from_parts(
        constant: impl Into<BigInt>,
        terms: impl IntoIterator<Item = (UnknownSymbol, BigInt)>,
    ) -> Self {
        let mut e = AffineExpr::constant(constant);
        for (sym, c) in terms {
            e.add_term(sym, c);
        }
        e
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<UnknownSymbol, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, sym: &UnknownSymbol) -> BigInt {
        self.terms.get(sym).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the expression has no unknowns.
    pub fn as_constant(&self) -> Option<&BigInt> {
        self.is_constant().then_some(&self.constant)
    }

    fn add_term(&mut self, sym: UnknownSymbol, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(sym.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn plus(&self, other: &AffineExpr) -> AffineExpr {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (sym, c) in &other.terms {
            out.add_term(sym.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> AffineExpr {
        if k.is_zero() {
            return AffineExpr::zero();
        }
        AffineExpr {
            constant: &self.constant * k,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
        }
    }

    pub fn eval(&self, assignment: &BTreeMap<UnknownSymbol, BigInt>) -> Result<BigInt> {
        let mut total = self.constant.clone();
        for (sym, c) in &self.terms {
            let v = assignment
                .get(sym)
                .ok_or_else(|| Error::MissingSymbol(sym.name()))?;
            total += c * v;
        }
        Ok(total)
    }

    /// Replaces every symbol present in `map` by its expression.
    pub fn substitute(&self, map: &BTreeMap<UnknownSymbol, AffineExpr>) -> AffineExpr {
        let mut out = AffineExpr::constant(self.constant.clone());
        for (sym, c) in &self.terms {
            match map.get(sym) {
                Some(e) => out = out.plus(&e.scale(c)),
                None => out.add_term(sym.clone(), c.clone()),
            }
        }
        out
    }

    fn to_rational_row(&self) -> (BTreeMap<UnknownSymbol, BigRational>, BigRational) {
        (
            self.terms
                .iter()
                .map(|(s, c)| (s.clone(), BigRational::from_integer(c.clone())))
                .collect(),
            BigRational::from_integer(self.constant.clone()),
        )
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;
    fn add(self, rhs: AffineExpr) -> AffineExpr {
        self.plus(&rhs)
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self.scale(&BigInt::from(-1))
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: AffineExpr) -> AffineExpr {
        self.plus(&-rhs)
    }
}

/// Canonical rendering: terms in symbol order, constant last, e.g.
/// `chi[4,1] + 6*theta[4,1,2] + 12*theta[4,2,3] + 8`.
impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let mut write_part = |f: &mut fmt::Formatter<'_>, negative: bool, body: String| {
            let r = match (first, negative) {
                (true, false) => write!(f, "{body}"),
                (true, true) => write!(f, "-{body}"),
                (false, false) => write!(f, " + {body}"),
                (false, true) => write!(f, " - {body}"),
            };
            first = false;
            r
        };
        for (sym, c) in &self.terms {
            let mag = c.abs();
            let body = if mag.is_one() {
                sym.display()
            } else {
                format!("{mag}*{}", sym.display())
            };
            write_part(f, c.is_negative(), body)?;
        }
        if !self.constant.is_zero() {
            write_part(f, self.constant.is_negative(), self.constant.abs().to_string())?;
        }
        Ok(())
    }
}

/// Rational multipliers whose combination of the input expressions is a
/// nonzero constant, proving the expressions cannot vanish together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub multipliers: Vec<BigRational>,
    pub constant: BigRational,
}

impl Witness {
    /// Recombines `exprs` and checks the result is the nonzero constant.
    pub fn verify(&self, exprs: &[AffineExpr]) -> bool {
        if self.multipliers.len() != exprs.len() || self.constant.is_zero() {
            return false;
        }
        let mut terms: BTreeMap<&UnknownSymbol, BigRational> = BTreeMap::new();
        let mut constant = BigRational::zero();
        for (lambda, e) in self.multipliers.iter().zip(exprs) {
            constant += lambda * BigRational::from_integer(e.constant.clone());
            for (sym, c) in &e.terms {
                *terms.entry(sym).or_insert_with(BigRational::zero) +=
                    lambda * BigRational::from_integer(c.clone());
            }
        }
        terms.values().all(Zero::is_zero) && constant == self.constant
    }

    /// Multipliers cleared to integers; the combined constant scales by the
    /// same factor.
    pub fn integral(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self
            .multipliers
            .iter()
            .fold(BigInt::one(), |acc, m| num_integer::lcm(acc, m.denom().clone()));
        let ints = self
            .multipliers
            .iter()
            .map(|m| (m * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let c = (&self.constant * BigRational::from_integer(lcm)).to_integer();
        (ints, c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// A common zero: free symbols set to 0, pivots solved.
    Feasible(BTreeMap<UnknownSymbol, BigRational>),
    Infeasible(Witness),
}

/// A pivot symbol expressed through the free symbols of a consistent system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedSymbol {
    pub symbol: UnknownSymbol,
    pub constant: BigRational,
    pub terms: BTreeMap<UnknownSymbol, BigRational>,
}

impl SolvedSymbol {
    /// The solution as an integer affine form, when every coefficient is integral.
    pub fn to_integral(&self) -> Option<AffineExpr> {
        if !self.constant.is_integer() || self.terms.values().any(|c| !c.is_integer()) {
            return None;
        }
        Some(AffineExpr::from_parts(
            self.constant.to_integer(),
            self.terms.iter().map(|(s, c)| (s.clone(), c.to_integer())),
        ))
    }
}

struct Row {
    coeffs: BTreeMap<UnknownSymbol, BigRational>,
    constant: BigRational,
    // multipliers of the original expressions producing this row
    combo: Vec<BigRational>,
}

impl Row {
    fn axpy(&mut self, k: &BigRational, other: &Row) {
        for (sym, c) in &other.coeffs {
            let slot = self.coeffs.entry(sym.clone()).or_insert_with(BigRational::zero);
            *slot += k * c;
            if slot.is_zero() {
                self.coeffs.remove(sym);
            }
        }
        self.constant += k * &other.constant;
        for (a, b) in self.combo.iter_mut().zip(&other.combo) {
            *a += k * b;
        }
    }

    fn scale(&mut self, k: &BigRational) {
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        for c in &mut self.combo {
            *c *= k;
        }
    }
}

/// Reduced row echelon form of `exprs = 0`. Returns the pivot rows (each with
/// pivot coefficient 1) or a witness of inconsistency.
fn reduce(exprs: &[AffineExpr]) -> std::result::Result<Vec<(UnknownSymbol, Row)>, Witness> {
    let n = exprs.len();
    let mut rows: Vec<Row> = exprs
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (coeffs, constant) = e.to_rational_row();
            let mut combo = vec![BigRational::zero(); n];
            combo[i] = BigRational::one();
            Row {
                coeffs,
                constant,
                combo,
            }
        })
        .collect();

    let symbols: Vec<UnknownSymbol> = {
        let mut all: Vec<UnknownSymbol> = exprs
            .iter()
            .flat_map(|e| e.terms.keys().cloned())
            .collect();
        all.sort();
        all.dedup();
        all
    };

    let mut pivots: Vec<(UnknownSymbol, Row)> = Vec::new();
    for sym in symbols {
        let Some(pos) = rows.iter().position(|r| r.coeffs.contains_key(&sym)) else {
            continue;
        };
        let mut pivot = rows.remove(pos);
        let inv = pivot.coeffs[&sym].recip();
        pivot.scale(&inv);
        for r in rows.iter_mut() {
            if let Some(c) = r.coeffs.get(&sym).cloned() {
                r.axpy(&-c, &pivot);
            }
        }
        for (_, r) in pivots.iter_mut() {
            if let Some(c) = r.coeffs.get(&sym).cloned() {
                r.axpy(&-c, &pivot);
            }
        }
        pivots.push((sym, pivot));
    }

    // Remaining rows have no symbols left.
    if let Some(bad) = rows.into_iter().find(|r| !r.constant.is_zero()) {
        return Err(Witness {
            multipliers: bad.combo,
            constant: bad.constant,
        });
    }
    Ok(pivots)
}

/// Decides whether all `exprs` can vanish simultaneously.
pub fn zero_system_feasibility(exprs: &[AffineExpr]) -> Feasibility {
    match reduce(exprs) {
        Err(w) => Feasibility::Infeasible(w),
        Ok(pivots) => {
            let mut assignment: BTreeMap<UnknownSymbol, BigRational> = exprs
                .iter()
                .flat_map(|e| e.terms.keys().cloned())
                .map(|s| (s, BigRational::zero()))
                .collect();
            for (sym, row) in pivots {
                assignment.insert(sym, -row.constant);
            }
            Feasibility::Feasible(assignment)
        }
    }
}

/// Solves `exprs = 0` for the pivot symbols in terms of the free ones.
pub fn solve_system(exprs: &[AffineExpr]) -> std::result::Result<Vec<SolvedSymbol>, Witness> {
    let pivots = reduce(exprs)?;
    Ok(pivots
        .into_iter()
        .map(|(symbol, row)| SolvedSymbol {
            constant: -row.constant,
            terms: row
                .coeffs
                .into_iter()
                .filter(|(s, _)| *s != symbol)
                .map(|(s, c)| (s, -c))
                .collect(),
            symbol,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(n: &str) -> UnknownSymbol {
        UnknownSymbol::new(n, 1, 0)
    }

    fn x() -> AffineExpr {
        AffineExpr::symbol(sym("x"))
    }

    fn y() -> AffineExpr {
        AffineExpr::symbol(sym("y"))
    }

    fn k(v: i64) -> AffineExpr {
        AffineExpr::constant(v)
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn add_examples() {
        let a = x() + k(1);
        let b = x().scale(&big(2)) - k(1);
        assert_eq!(a + b, x().scale(&big(3)));
        let e = x() + k(5);
        assert_eq!(AffineExpr::zero() + e.clone(), e);
        let c = y().scale(&big(2)) + k(448);
        let r = c + y().scale(&big(-2));
        assert_eq!(r, k(448));
        assert!(r.terms().is_empty());
    }

    #[test]
    fn scale_examples() {
        assert_eq!((x() + k(1)).scale(&big(2)), x().scale(&big(2)) + k(2));
        assert!((x() + k(1)).scale(&big(0)).is_zero());
        assert_eq!((x() - k(3)).scale(&big(-1)), k(3) - x());
    }

    #[test]
    fn eval_examples() {
        let c41 = UnknownSymbol::new("4", 0, 1);
        let t42 = UnknownSymbol::new("4", 1, 2);
        let t43 = UnknownSymbol::new("4", 2, 3);
        let zeros: BTreeMap<_, _> = [c41.clone(), t42.clone(), t43.clone()]
            .into_iter()
            .map(|s| (s, BigInt::zero()))
            .collect();
        let e = AffineExpr::symbol(c41.clone()) + AffineExpr::symbol(t42.clone()).scale(&big(2));
        assert_eq!(e.eval(&zeros).unwrap(), big(0));
        let e = AffineExpr::from_parts(8, [(c41, big(1)), (t42, big(6)), (t43, big(12))]);
        assert_eq!(e.eval(&zeros).unwrap(), big(8));
        assert_eq!(k(448).eval(&BTreeMap::new()).unwrap(), big(448));
        assert!(matches!(x().eval(&BTreeMap::new()), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn rendering() {
        let c41 = UnknownSymbol::new("4", 0, 1);
        let t42 = UnknownSymbol::new("4", 1, 2);
        let t43 = UnknownSymbol::new("4", 2, 3);
        let e = AffineExpr::from_parts(8, [(c41, big(1)), (t42, big(6)), (t43, big(12))]);
        assert_eq!(e.to_string(), "chi[4,1] + 6*theta[4,1,2] + 12*theta[4,2,3] + 8");
        assert_eq!(k(3).to_string(), "3");
        assert_eq!(AffineExpr::zero().to_string(), "0");
        assert_eq!((k(3) - x()).to_string(), "-theta[x,1,0] + 3");
        assert_eq!((x().scale(&big(-2)) - k(5)).to_string(), "-2*theta[x,1,0] - 5");
    }

    #[test]
    fn infeasible_pair() {
        let exprs = vec![x(), x() + k(2)];
        match zero_system_feasibility(&exprs) {
            Feasibility::Infeasible(w) => {
                assert!(w.verify(&exprs));
                assert_eq!(
                    w.multipliers,
                    vec![BigRational::from_integer(big(-1)), BigRational::one()]
                );
                assert_eq!(w.constant, BigRational::from_integer(big(2)));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn feasible_pair() {
        let exprs = vec![x() + y(), x() - y()];
        match zero_system_feasibility(&exprs) {
            Feasibility::Feasible(a) => {
                assert!(a.values().all(Zero::is_zero));
                assert_eq!(a.len(), 2);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn empty_system_is_feasible() {
        assert_eq!(
            zero_system_feasibility(&[]),
            Feasibility::Feasible(BTreeMap::new())
        );
        assert!(matches!(
            zero_system_feasibility(&[k(1)]),
            Feasibility::Infeasible(_)
        ));
    }

    #[test]
    fn solve_parametrizes_pivots() {
        // x + y - 3 = 0  =>  x = 3 - y
        let sols = solve_system(&[x() + y() - k(3)]).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].symbol, sym("x"));
        assert_eq!(sols[0].to_integral().unwrap(), k(3) - y());
        // 2x - y = 0 has no integral parametrization with x as pivot
        let sols = solve_system(&[x().scale(&big(2)) - y()]).unwrap();
        assert!(sols[0].to_integral().is_none());
    }

    fn arb_expr() -> impl Strategy<Value = AffineExpr> {
        let syms = ["a", "b", "c", "d", "e", "f"];
        (
            -1_000_000i64..=1_000_000,
            proptest::collection::vec((0usize..6, -1_000_000i64..=1_000_000), 0..6),
        )
            .prop_map(move |(c, ts)| {
                AffineExpr::from_parts(c, ts.into_iter().map(|(i, v)| (sym(syms[i]), big(v))))
            })
    }

    fn arb_assignment() -> impl Strategy<Value = BTreeMap<UnknownSymbol, BigInt>> {
        proptest::collection::vec(-1000i64..1000, 6).prop_map(|vs| {
            ["a", "b", "c", "d", "e", "f"]
                .iter()
                .zip(vs)
                .map(|(n, v)| (sym(n), big(v)))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn module_axioms(a in arb_expr(), b in arb_expr(), c in arb_expr(), k1 in -1000i64..1000, k2 in -1000i64..1000) {
            prop_assert_eq!(a.plus(&b), b.plus(&a));
            prop_assert_eq!(a.plus(&b).plus(&c), a.plus(&b.plus(&c)));
            prop_assert_eq!(a.plus(&b).scale(&big(k1)), a.scale(&big(k1)).plus(&b.scale(&big(k1))));
            prop_assert_eq!(a.scale(&big(k1 + k2)), a.scale(&big(k1)).plus(&a.scale(&big(k2))));
            prop_assert_eq!(a.scale(&big(k1)).scale(&big(k2)), a.scale(&big(k1 * k2)));
            prop_assert!(a.plus(&a.scale(&big(-1))).is_zero());
            prop_assert!(a.terms().values().all(|v| !v.is_zero()));
        }

        #[test]
        fn eval_is_homomorphism(a in arb_expr(), b in arb_expr(), k in -1000i64..1000, asg in arb_assignment()) {
            let ea = a.eval(&asg).unwrap();
            let eb = b.eval(&asg).unwrap();
            prop_assert_eq!(a.plus(&b).eval(&asg).unwrap(), &ea + &eb);
            prop_assert_eq!(a.scale(&big(k)).eval(&asg).unwrap(), ea * big(k));
        }

        // Grid search over {p/q : |p| <= 6, 1 <= q <= 4}. A grid hit proves
        // feasibility; a returned assignment must satisfy every row; an
        // infeasible verdict must come with a verifying witness.
        #[test]
        fn feasibility_agrees_with_grid_search(
            rows in proptest::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3), 1..4)
        ) {
            let names = ["p", "q", "r"];
            let exprs: Vec<AffineExpr> = rows
                .iter()
                .map(|&(a, b, c, k0)| {
                    AffineExpr::from_parts(k0, [(sym(names[0]), big(a)), (sym(names[1]), big(b)), (sym(names[2]), big(c))])
                })
                .collect();
            let mut grid = Vec::new();
            for p in -6i64..=6 {
                for q in 1i64..=4 {
                    grid.push(BigRational::new(big(p), big(q)));
                }
            }
            grid.sort();
            grid.dedup();
            let eval = |e: &AffineExpr, v: [&BigRational; 3]| -> BigRational {
                let mut t = BigRational::from_integer(e.constant_term().clone());
                for (i, n) in names.iter().enumerate() {
                    t += BigRational::from_integer(e.coefficient(&sym(n))) * v[i];
                }
                t
            };
            let mut hit = false;
            'outer: for a in &grid {
                for b in &grid {
                    for c in &grid {
                        if exprs.iter().all(|e| eval(e, [a, b, c]).is_zero()) {
                            hit = true;
                            break 'outer;
                        }
                    }
                }
            }
            match zero_system_feasibility(&exprs) {
                Feasibility::Feasible(asg) => {
                    let zero = BigRational::zero();
                    let v = |n: &str| asg.get(&sym(n)).cloned().unwrap_or(zero.clone());
                    let (a, b, c) = (v("p"), v("q"), v("r"));
                    for e in &exprs {
                        prop_assert!(eval(e, [&a, &b, &c]).is_zero());
                    }
                }
                Feasibility::Infeasible(w) => {
                    prop_assert!(!hit);
                    prop_assert!(w.verify(&exprs));
                }
            }
        }
    }
}
