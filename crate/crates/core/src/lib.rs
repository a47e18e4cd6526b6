//! Exact point counting for trinomial plane curves
//! `rho^i x^{a11} y^{a12} + rho^j x^{a21} y^{a22} = x^{a31} y^{a32}` over `F_{p^n}`,
//! together with checkers for the identities and bounds satisfied by the
//! error terms `N_ij`.

pub mod arith;
pub mod counter;
pub mod diophantine;
pub mod error;
pub mod field;
pub mod gauss;
pub mod genus;
pub mod lattice;
pub mod laws;

pub use counter::{CurveFamily, NTable, TableMode};
pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElement, PrimePower};
pub use lattice::{CokerGroup, CurveConstants, ExponentMatrix};
