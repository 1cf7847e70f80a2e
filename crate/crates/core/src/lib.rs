//! Exact computations for counts of real rational curves on real rational
//! surfaces.
//!
//! * [`lattice`] builds the `θ^{σ}_s` recursion lattice over affine
//!   expressions and extracts the polynomials `χ^d(T)`;
//! * [`gw`] and [`floor`] compute `N_d` two independent ways, the latter also
//!   producing the fully real count `W_d = χ^d_{3d−1}`;
//! * [`bezout`] and [`wall`] mechanize the uniqueness and conservation
//!   arguments behind the invariance of these counts.

pub mod acceptance;
pub mod bezout;
pub mod error;
pub mod floor;
pub mod gw;
pub mod lattice;
pub mod seeds;
pub mod surface;
pub mod symbolic;
pub mod wall;

pub use error::{Error, Result};
pub use lattice::{ChiPolynomial, SeedEntry, ThetaGrid};
pub use surface::{CellDomain, LatticeIndex, SurfaceClass};
pub use symbolic::{AffineExpr, UnknownSymbol};
