//! Exact arithmetic foundation: arbitrary-precision rationals, polynomials in
//! the parameters `a` and `b`, quotient-ring reduction modulo the branch
//! condition, and fraction-free linear algebra.

mod matrix;
mod qa;
mod scalar;

pub use matrix::{nullspace, solve_affine, AffineSolution, ExactMatrix};
pub use qa::{rat, rat_i, QaPoly, QaRat, Rat};
pub use scalar::{
    crt_combine, quotient_reduce, BPoly, BranchTag, ConditionPolynomial, ParamScalar, ScalarCtx,
};
