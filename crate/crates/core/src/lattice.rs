//! The `θ^{σ}_s` lattice of a class.
//!
//! Cells are filled bottom-up in `s` with
//! `θ^{σ}_{s+2} = θ^{σ}_s + 2·θ^{σ+1}_{s+1}` wherever `2σ ≤ c1·d − 3`.
//! The two lowest cells of each row are free generators unless seeded; seeds
//! on higher cells become linear constraints which are solved exactly and
//! substituted back, so that e.g. the `χ³` coefficients determine the
//! `σ = 1` row of degree 3.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Sub;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::surface::{CellDomain, LatticeIndex, SurfaceClass};
use crate::symbolic::{self, AffineExpr, Feasibility, UnknownSymbol, Witness};

/// A known value of one lattice cell, with where it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedEntry {
    pub cls: SurfaceClass,
    pub sigma: i64,
    pub s: i64,
    pub value: BigInt,
    pub provenance: String,
}

impl SeedEntry {
    pub fn new(
        cls: SurfaceClass,
        sigma: i64,
        s: i64,
        value: impl Into<BigInt>,
        provenance: impl Into<String>,
    ) -> Self {
        SeedEntry {
            cls,
            sigma,
            s,
            value: value.into(),
            provenance: provenance.into(),
        }
    }

    pub fn index(&self) -> LatticeIndex {
        LatticeIndex::new(self.sigma, self.s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Treat cells with more prescribed nodes than the class has as zero.
    /// Disabling it turns them into ordinary cells so that seeds can be used
    /// to derive their vanishing instead.
    pub node_budget_rule: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            node_budget_rule: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ThetaGrid {
    pub cls: SurfaceClass,
    cells: BTreeMap<LatticeIndex, AffineExpr>,
    /// Free generators remaining after seed constraints were solved.
    pub unknowns: Vec<UnknownSymbol>,
    /// Seed constraints that could not be substituted with integer
    /// coefficients; each must vanish. Empty for consistent integral data.
    pub residual: Vec<AffineExpr>,
    options: BuildOptions,
}

impl ThetaGrid {
    /// Cell value; zero outside the stored range.
    pub fn cell(&self, sigma: i64, s: i64) -> AffineExpr {
        self.cells
            .get(&LatticeIndex::new(sigma, s))
            .cloned()
            .unwrap_or_default()
    }

    pub fn cells(&self) -> &BTreeMap<LatticeIndex, AffineExpr> {
        &self.cells
    }

    pub fn domain(&self, idx: LatticeIndex) -> CellDomain {
        effective_domain(&self.cls, idx, self.options)
    }

    /// Whether the recursion producing cell `(σ, s)` from lower cells applies.
    pub fn licensed(&self, sigma: i64, s: i64) -> bool {
        s >= sigma + 2 && 2 * sigma <= self.cls.c1d - 3
    }

    /// `θ^{σ}_{s} − θ^{σ}_{s−2} − 2·θ^{σ+1}_{s−1}`; zero on every licensed cell.
    pub fn recursion_residual(&self, sigma: i64, s: i64) -> AffineExpr {
        self.cell(sigma, s)
            .sub(self.cell(sigma, s - 2))
            .sub(self.cell(sigma + 1, s - 1).scale(&BigInt::from(2)))
    }
}

fn effective_domain(cls: &SurfaceClass, idx: LatticeIndex, options: BuildOptions) -> CellDomain {
    match cls.theta_domain(idx) {
        CellDomain::NodeBudgetZero if !options.node_budget_rule => {
            if (cls.c1d - 1 - idx.sigma - idx.s).rem_euclid(2) == 0 {
                CellDomain::Valid
            } else {
                CellDomain::ParityZero
            }
        }
        d => d,
    }
}

pub fn build_grid(cls: &SurfaceClass, seeds: &[SeedEntry]) -> Result<ThetaGrid> {
    build_grid_with(cls, seeds, BuildOptions::default())
}

pub fn build_grid_with(
    cls: &SurfaceClass,
    seeds: &[SeedEntry],
    options: BuildOptions,
) -> Result<ThetaGrid> {
    cls.validate()?;
    let mut seeded: BTreeMap<LatticeIndex, &SeedEntry> = BTreeMap::new();
    for seed in seeds {
        if seed.cls != *cls {
            return Err(Error::InvalidSeed(format!(
                "seed for {} used with {}",
                seed.cls, cls
            )));
        }
        let idx = seed.index();
        if effective_domain(cls, idx, options) != CellDomain::Valid {
            return Err(Error::InvalidSeed(format!(
                "seed at sigma={}, s={} is not a valid cell of {}",
                idx.sigma, idx.s, cls
            )));
        }
        if let Some(prev) = seeded.insert(idx, seed) {
            if prev.value != seed.value {
                return Err(Error::SeedConflict {
                    message: format!(
                        "two seeds for sigma={}, s={}: {} ({}) and {} ({})",
                        idx.sigma, idx.s, prev.value, prev.provenance, seed.value, seed.provenance
                    ),
                    witness: None,
                });
            }
        }
    }

    let tag = cls.tag();
    let budget = cls.point_budget();
    let max_sigma = cls.max_sigma();
    let mut cells: BTreeMap<LatticeIndex, AffineExpr> = BTreeMap::new();
    let mut unknowns = Vec::new();
    let mut constraints = Vec::new();
    let mut constraint_at = Vec::new();

    for s in 0..=budget {
        for sigma in 0..=max_sigma {
            let idx = LatticeIndex::new(sigma, s);
            match effective_domain(cls, idx, options) {
                CellDomain::OutOfDomain => continue,
                CellDomain::ParityZero | CellDomain::NodeBudgetZero => {
                    cells.insert(idx, AffineExpr::zero());
                    continue;
                }
                CellDomain::Valid => {}
            }
            let get = |sg: i64, ss: i64| {
                cells
                    .get(&LatticeIndex::new(sg, ss))
                    .cloned()
                    .unwrap_or_default()
            };
            let recursed = (s >= sigma + 2 && 2 * sigma <= cls.c1d - 3)
                .then(|| get(sigma, s - 2).plus(&get(sigma + 1, s - 1).scale(&BigInt::from(2))));
            let value = match (seeded.get(&idx), recursed) {
                (Some(seed), Some(rec)) => {
                    let fixed = AffineExpr::constant(seed.value.clone());
                    constraints.push(rec.sub(fixed.clone()));
                    constraint_at.push(*seed);
                    fixed
                }
                (Some(seed), None) => AffineExpr::constant(seed.value.clone()),
                (None, Some(rec)) => rec,
                (None, None) => {
                    let sym = UnknownSymbol::new(tag.clone(), sigma, s);
                    unknowns.push(sym.clone());
                    AffineExpr::symbol(sym)
                }
            };
            cells.insert(idx, value);
        }
    }

    let solved = symbolic::solve_system(&constraints).map_err(|w| conflict(&constraint_at, w))?;
    let mut subst = BTreeMap::new();
    let mut residual = Vec::new();
    for sol in solved {
        match sol.to_integral() {
            Some(expr) => {
                subst.insert(sol.symbol, expr);
            }
            None => {
                // clear denominators of  symbol - (constant + terms) = 0
                let lcm = sol
                    .terms
                    .values()
                    .chain(std::iter::once(&sol.constant))
                    .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
                let scale = |c: &num_rational::BigRational| {
                    (c * num_rational::BigRational::from_integer(lcm.clone())).to_integer()
                };
                let expr = AffineExpr::from_parts(
                    -scale(&sol.constant),
                    std::iter::once((sol.symbol.clone(), lcm.clone()))
                        .chain(sol.terms.iter().map(|(s, c)| (s.clone(), -scale(c)))),
                );
                residual.push(expr);
            }
        }
    }
    if !subst.is_empty() {
        for v in cells.values_mut() {
            *v = v.substitute(&subst);
        }
        unknowns.retain(|u| !subst.contains_key(u));
        for r in residual.iter_mut() {
            *r = r.substitute(&subst);
        }
    }

    unknowns.sort();
    Ok(ThetaGrid {
        cls: cls.clone(),
        cells,
        unknowns,
        residual,
        options,
    })
}

fn conflict(constraint_at: &[&SeedEntry], w: Witness) -> Error {
    let involved: Vec<String> = constraint_at
        .iter()
        .zip(&w.multipliers)
        .filter(|(_, m)| !m.is_zero())
        .map(|(seed, _)| format!("theta[{},{}]={} ({})", seed.sigma, seed.s, seed.value, seed.provenance))
        .collect();
    Error::SeedConflict {
        message: format!(
            "seeds contradict the recursion: {} (combination leaves constant {})",
            involved.join(", "),
            w.constant
        ),
        witness: Some(Box::new(w)),
    }
}

/// The σ = 0 row of a grid as the polynomial `Σ χ_r T^r`.
#[derive(Clone, Debug)]
pub struct ChiPolynomial {
    pub cls: SurfaceClass,
    /// Indexed by `r`, `0 ≤ r ≤ c1·d − 1`.
    pub coefficients: Vec<AffineExpr>,
}

impl ChiPolynomial {
    pub fn coefficient(&self, r: usize) -> &AffineExpr {
        &self.coefficients[r]
    }

    /// Rendering over parity-admissible exponents, e.g. `T + T^3 + T^5`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let budget = self.cls.point_budget();
        for (r, c) in self.coefficients.iter().enumerate() {
            let r = r as i64;
            if !matches!(self.cls.chi_parity_admissible(r), Ok(true)) || r > budget {
                continue;
            }
            let monomial = match r {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{r}"),
            };
            let (negative, body) = match c.as_constant() {
                Some(v) => {
                    let mag = v.abs();
                    let body = if mag.is_one() && !monomial.is_empty() {
                        monomial
                    } else {
                        format!("{mag}{monomial}")
                    };
                    (v.is_negative(), body)
                }
                None => (false, format!("({c}){monomial}")),
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let _ = write!(out, "{body}");
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

pub fn chi_polynomial(grid: &ThetaGrid) -> ChiPolynomial {
    ChiPolynomial {
        cls: grid.cls.clone(),
        coefficients: (0..=grid.cls.point_budget()).map(|r| grid.cell(0, r)).collect(),
    }
}

/// `χ_r` in terms of the grid's unknowns.
pub fn derive_relation(grid: &ThetaGrid, r: i64) -> Result<AffineExpr> {
    if !grid.cls.chi_parity_admissible(r)? {
        return Err(Error::ParityInadmissible(r));
    }
    Ok(grid.cell(0, r))
}

/// `chi[d,r] = <expression>`.
pub fn render_relation(grid: &ThetaGrid, r: i64) -> Result<String> {
    let expr = derive_relation(grid, r)?;
    let lhs = UnknownSymbol::new(grid.cls.tag(), 0, r).display();
    Ok(format!("{lhs} = {expr}"))
}

/// Rows `0..=n` of Pascal's triangle.
pub fn pascal_rows(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut row = vec![BigInt::one(); k + 1];
        for j in 1..k {
            row[j] = &rows[k - 1][j - 1] + &rows[k - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// `χ_{r₀+2k} = Σ_j 2^j·C(k, j)·θ^{j}_{r₀+j}`, read off the grid's base cells.
pub fn closed_form_chi(grid: &ThetaGrid, r: i64) -> Result<AffineExpr> {
    if !grid.cls.chi_parity_admissible(r)? {
        return Err(Error::ParityInadmissible(r));
    }
    let r0 = (grid.cls.c1d - 1).rem_euclid(2);
    let k = ((r - r0) / 2) as usize;
    let binom = &pascal_rows(k)[k];
    let mut total = AffineExpr::zero();
    let mut pow2 = BigInt::one();
    for (j, c) in binom.iter().enumerate() {
        let j = j as i64;
        total = total.plus(&grid.cell(j, r0 + j).scale(&(c * &pow2)));
        pow2 *= 2;
    }
    Ok(total)
}

/// `χ_{r+2} − χ_r − 2·θ^{1}_{r+1}`; vanishes identically on a built grid.
pub fn theorem_rel_check(grid: &ThetaGrid, r: i64) -> Result<AffineExpr> {
    if r < 0 || r > grid.cls.c1d - 3 {
        return Err(Error::OutOfRange(format!(
            "r = {r} outside 0..={}",
            grid.cls.c1d - 3
        )));
    }
    Ok(grid.recursion_residual(0, r + 2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The coefficients cannot all vanish; the witness combines them into a
    /// nonzero constant.
    NonTrivial(Witness),
    /// All coefficients vanishing is consistent with the data.
    Unknown,
}

pub fn nontriviality_certificate(poly: &ChiPolynomial) -> Certificate {
    match symbolic::zero_system_feasibility(&poly.coefficients) {
        Feasibility::Infeasible(w) => Certificate::NonTrivial(w),
        Feasibility::Feasible(_) => Certificate::Unknown,
    }
}
