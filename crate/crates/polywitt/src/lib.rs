//! Polynomial Witt vectors of based vector spaces over small finite fields.
//!
//! The crate is layered bottom-up: finite fields and truncated Witt rings
//! ([`field`], [`scalar`], [`witt_poly`]), rotation orbits of words
//! ([`orbits`]), Tate cohomology of cyclic groups in canonical coordinates
//! ([`tate`]), the functors `W_m` themselves ([`functor`]) and their
//! structure maps ([`structure`]), and the universal addition cocycles
//! ([`cocycle`]). [`verify`] bundles the executable invariants into suites.

pub mod error;
pub mod cocycle;
pub mod field;
pub mod functor;
pub mod linalg;
pub mod orbits;
pub mod scalar;
pub mod structure;
pub mod tate;
pub mod verify;
pub mod witt_poly;

pub use error::{Error, ErrorClass, Result};
pub use field::{FieldSpec, FqElement};
pub use functor::{BasedSpace, LinearMap, LiftedMap, WittElement, WittTower};
pub use scalar::{WittRing, WittScalar};
pub use witt_poly::{compute_witt_polynomials, UniversalWittPolynomials};
