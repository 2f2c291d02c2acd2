//! Exact arithmetic for the Mordell-Weil groups of the elliptic curves
//! `y^2 = x^3 + A t^6 + B` over `Q(t)`.
//!
//! The crate decides the rank of `E_{A,B}(Q(t))` from simple arithmetic
//! predicates on `A` and `B`, produces explicit minimal-height generators
//! with exact verification (curve membership, Gram matrices, saturation),
//! verifies the orbit and lattice structure of the full rank-8 group over
//! the algebraic closure, and classifies the sextic-twist families with
//! constant fibre root number.
//!
//! Everything is exact: arbitrary-precision integers and rationals, dense
//! polynomials over exact coefficient fields, and lattice invariants
//! computed by bounded enumeration. No floating point enters any result
//! (a float-assisted search is used once to *guess* algebraic constants,
//! which are then verified exactly before use).

pub mod basisgen;
pub mod cli;
pub mod ellcurve;
pub mod exactnum;
pub mod funcfield;
pub mod heightlat;
pub mod qbar;
pub mod ranker;
pub mod rootnum;

pub use exactnum::{ExactInt, ExactRat};
