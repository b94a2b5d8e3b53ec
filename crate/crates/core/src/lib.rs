//! Exact computation of polynomial invariants for polynomial loops.
//!
//! The crate works over arbitrary-precision rationals throughout: sparse
//! multivariate polynomials, exact linear algebra, Groebner bases with
//! radical membership, and on top of those the loop-analysis layers:
//!
//! - [`invariant`]: the invariant-set fixpoint for algebraic sets under a
//!   polynomial map, and the check deciding whether a candidate polynomial
//!   is an invariant of a loop from a given initial state.
//! - [`generate`]: invariant bases for a candidate space, either as an
//!   ansatz matrix / classification by initial values (symbolic initial
//!   state) or as a truncated-ideal basis (concrete initial state).
//! - [`general`]: invariants of the form f(x) - f(a) valid for every
//!   initial state, obtained from exact kernels of linear constraint forms.
//! - [`termination`]: the decision procedure for non-termination of loops
//!   guarded by polynomial equations.
//!
//! Loops are nondeterministically branching polynomial transition systems
//! with inequation guards; see [`loops`] for the program representation and
//! the text format parsed by [`loops::parse_loop`].

pub mod rational;
pub mod context;
pub mod poly;
pub mod parse;
pub mod linalg;
pub mod groebner;
pub mod cells;
pub mod loops;
pub mod invariant;
pub mod generate;
pub mod general;
pub mod termination;

mod modp;

pub use context::VarContext;
pub use poly::{Monomial, Polynomial};
pub use rational::{Int, Rational};
