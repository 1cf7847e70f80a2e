//! Numerical model of a real rational surface together with a homology class.
//!
//! A class is carried only through the two intersection numbers every formula
//! here consumes: `c1·d` and `d·d`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A homology class on a real rational surface, reduced to `(c1·d, d·d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceClass {
    pub c1d: i64,
    pub dd: i64,
    pub label: String,
}

impl SurfaceClass {
    /// Validating constructor.
    pub fn new(c1d: i64, dd: i64, label: impl Into<String>) -> Result<Self> {
        let cls = SurfaceClass {
            c1d,
            dd,
            label: label.into(),
        };
        cls.validate()?;
        Ok(cls)
    }

    /// Degree `d` curves of the projective plane: `c1·d = 3d`, `d·d = d²`.
    pub fn cp2(degree: i64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidClass(format!("degree must be >= 1, got {degree}")));
        }
        Self::new(3 * degree, degree * degree, format!("CP2 degree {degree}"))
    }

    /// The class of a line on a real cubic surface whose real part is RP² blown
    /// up at `2k` points.
    pub fn cubic_surface_line(k: u32) -> Result<Self> {
        Self::new(1, -1, format!("cubic surface line, k={k}"))
    }

    pub fn validate(&self) -> Result<()> {
        if self.c1d < 1 {
            return Err(Error::InvalidClass(format!(
                "c1·d must be positive, got {}",
                self.c1d
            )));
        }
        let twice_delta = self.dd - self.c1d + 2;
        if twice_delta < 0 || twice_delta % 2 != 0 {
            return Err(Error::InvalidClass(format!(
                "d·d - c1·d + 2 = {twice_delta} is not a nonnegative even integer"
            )));
        }
        Ok(())
    }

    /// Number of double points of an irreducible rational nodal curve in the
    /// class (adjunction).
    pub fn delta(&self) -> Result<i64> {
        self.validate()?;
        Ok((self.dd - self.c1d + 2) / 2)
    }

    /// Number of points `c1·d − 1` cutting out finitely many rational curves.
    pub fn point_budget(&self) -> i64 {
        self.c1d - 1
    }

    /// Largest admissible number of prescribed nodes, `⌊(c1·d − 1)/2⌋`.
    pub fn max_sigma(&self) -> i64 {
        (self.c1d - 1).div_euclid(2)
    }

    /// The degree when the numbers are those of a plane curve class.
    pub fn cp2_degree(&self) -> Option<i64> {
        if self.c1d % 3 == 0 && self.dd == (self.c1d / 3) * (self.c1d / 3) {
            Some(self.c1d / 3)
        } else {
            None
        }
    }

    /// Short tag used in symbol names: the degree for plane classes,
    /// `c1d/dd` otherwise.
    pub fn tag(&self) -> String {
        match self.cp2_degree() {
            Some(d) => d.to_string(),
            None => format!("{}/{}", self.c1d, self.dd),
        }
    }

    /// `χ_r` vanishes by convention unless `r ≡ c1·d − 1 (mod 2)`.
    pub fn chi_parity_admissible(&self, r: i64) -> Result<bool> {
        if r < 0 || r > self.point_budget() {
            return Err(Error::OutOfRange(format!(
                "r = {r} outside 0..={}",
                self.point_budget()
            )));
        }
        Ok((self.c1d - 1 - r).rem_euclid(2) == 0)
    }

    /// Classifies a lattice cell `θ^{σ}_s` of this class.
    pub fn theta_domain(&self, idx: LatticeIndex) -> CellDomain {
        let LatticeIndex { sigma, s } = idx;
        if sigma < 0 || 2 * sigma > self.c1d - 1 || s < sigma || s > self.c1d - 1 - sigma {
            return CellDomain::OutOfDomain;
        }
        let delta = (self.dd - self.c1d + 2) / 2;
        if sigma > delta {
            return CellDomain::NodeBudgetZero;
        }
        if (self.c1d - 1 - sigma - s).rem_euclid(2) != 0 {
            return CellDomain::ParityZero;
        }
        CellDomain::Valid
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (c1d={}, dd={})", self.label, self.c1d, self.dd)
    }
}

/// Position `(σ, s)` in the lattice: `σ` prescribed nodes, `s` real points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeIndex {
    pub sigma: i64,
    pub s: i64,
}

impl LatticeIndex {
    pub fn new(sigma: i64, s: i64) -> Self {
        LatticeIndex { sigma, s }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellDomain {
    Valid,
    ParityZero,
    NodeBudgetZero,
    OutOfDomain,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn delta_values() {
        assert_eq!(SurfaceClass::cp2(3).unwrap().delta().unwrap(), 1);
        assert_eq!(SurfaceClass::cp2(1).unwrap().delta().unwrap(), 0);
        assert_eq!(SurfaceClass::cp2(5).unwrap().delta().unwrap(), 6);
        assert_eq!(SurfaceClass::cubic_surface_line(2).unwrap().delta().unwrap(), 0);
    }

    #[test]
    fn rejects_bad_classes() {
        assert!(SurfaceClass::new(3, 2, "odd").is_err());
        assert!(SurfaceClass::new(9, 3, "negative delta").is_err());
        assert!(SurfaceClass::new(0, 2, "c1d zero").is_err());
        assert!(SurfaceClass::cp2(0).is_err());
    }

    #[test]
    fn point_budgets() {
        assert_eq!(SurfaceClass::cp2(4).unwrap().point_budget(), 11);
        assert_eq!(SurfaceClass::cp2(1).unwrap().point_budget(), 2);
        assert_eq!(SurfaceClass::cubic_surface_line(0).unwrap().point_budget(), 0);
    }

    #[test]
    fn chi_parity() {
        let c3 = SurfaceClass::cp2(3).unwrap();
        assert!(c3.chi_parity_admissible(8).unwrap());
        assert!(!c3.chi_parity_admissible(7).unwrap());
        assert!(SurfaceClass::cp2(2).unwrap().chi_parity_admissible(5).unwrap());
        assert!(c3.chi_parity_admissible(9).is_err());
        assert!(c3.chi_parity_admissible(-1).is_err());
    }

    #[test]
    fn theta_domains() {
        let c5 = SurfaceClass::cp2(5).unwrap();
        assert_eq!(c5.theta_domain(LatticeIndex::new(7, 7)), CellDomain::NodeBudgetZero);
        let c4 = SurfaceClass::cp2(4).unwrap();
        assert_eq!(c4.theta_domain(LatticeIndex::new(1, 2)), CellDomain::Valid);
        assert_eq!(c4.theta_domain(LatticeIndex::new(0, 2)), CellDomain::ParityZero);
        assert_eq!(c4.theta_domain(LatticeIndex::new(6, 6)), CellDomain::OutOfDomain);
        assert_eq!(c4.theta_domain(LatticeIndex::new(2, 1)), CellDomain::OutOfDomain);
        assert_eq!(c4.theta_domain(LatticeIndex::new(0, 12)), CellDomain::OutOfDomain);
    }

    fn arb_class() -> impl Strategy<Value = SurfaceClass> {
        (1i64..40, 0i64..30).prop_map(|(c1d, delta)| {
            SurfaceClass::new(c1d, 2 * delta + c1d - 2, "random").unwrap()
        })
    }

    proptest! {
        #[test]
        fn exactly_one_of_consecutive_r_admissible(cls in arb_class(), r in 0i64..40) {
            prop_assume!(r < cls.point_budget());
            let a = cls.chi_parity_admissible(r).unwrap();
            let b = cls.chi_parity_admissible(r + 1).unwrap();
            prop_assert!(a ^ b);
        }

        #[test]
        fn sigma_zero_domain_matches_chi_parity(cls in arb_class(), r in 0i64..40) {
            prop_assume!(r <= cls.point_budget());
            let valid = cls.theta_domain(LatticeIndex::new(0, r)) == CellDomain::Valid;
            prop_assert_eq!(valid, cls.chi_parity_admissible(r).unwrap());
        }

        #[test]
        fn delta_monotone_in_dd(c1d in 1i64..40, delta in 0i64..30) {
            let a = SurfaceClass::new(c1d, 2 * delta + c1d - 2, "a").unwrap();
            let b = SurfaceClass::new(c1d, 2 * delta + c1d, "b").unwrap();
            prop_assert!(a.delta().unwrap() >= 0);
            prop_assert!(b.delta().unwrap() > a.delta().unwrap());
        }
    }
}
