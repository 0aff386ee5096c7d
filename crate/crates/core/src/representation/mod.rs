//! Equation encoding: tokens multiply into terms, terms sum into equations.
//!
//! The structure is a fixed three-level tree (sum of products of tokens), so
//! every candidate is a list of token multisets plus a marked right-hand-side
//! term. Coefficients are filled in by [`crate::regression::fit_equation`].

mod equation;
mod pool;
mod term;
mod token;

pub use equation::{CanonicalForm, Equation, Fit};
pub use pool::{Bounds, ParametricSlot, TokenPool, MAX_RETRIES};
pub use term::Term;
pub use token::{format_sig, Family, Parametric, Token, TokenShape};
