//! Exact computer algebra for deciding finite-gapness of Fuchsian equations
//! with `M + 4` regular singular points.
//!
//! The crate works over the coefficient tower `Q -> Q[a] -> Q(a) -> Q(a)[b]/(p_b)`:
//! `a` is the position of the third finite singular point, `b` an algebraic
//! position of a candidate false singular point, and `p_b` the polynomial
//! condition cutting out a branch of false points.  Everything downstream of
//! [`algebra`] is exact; floating point is confined to [`numeric`].
//!
//! The pipeline: [`fuchsian`] builds the equation data, [`false_point`]
//! locates apparent singularities, [`novikov`] finds the minimal recursion
//! relation (the genus), [`psi`] solves for the polynomial `Psi(lambda, z)`
//! and the hyperelliptic curve `nu^2(lambda)`, [`elliptic`] translates to the
//! elliptic side, and [`numeric`] validates with high-order ODE integration.

pub mod algebra;
pub mod elliptic;
pub mod error;
pub mod factor;
pub mod false_point;
pub mod fuchsian;
pub mod novikov;
pub mod numeric;
pub mod par;
pub mod parse;
pub mod psi;
pub mod ratz;
pub mod serialize;
pub mod zpoly;

pub use error::{Error, Result};
