//! Evolutionary discovery of partial differential equations from gridded
//! data.
//!
//! A candidate equation is a linear combination of products of tokens
//! (derivatives of `u`, powers, and parametric functions of `t` or `x`), one
//! term of which is marked as the right-hand side. Coefficients are fitted
//! by LASSO followed by a least-squares refit, and candidates are scored by
//! the RMS residual of the fitted equation (`q_op`) and by their token count
//! (complexity).
//!
//! Two searches are provided: an elitist single-objective EA on `q_op`, and
//! MOEA/DD over `(q_op, complexity)`.
//!
//! ```no_run
//! use eqsearch::optimizers::{run_single_objective, SingleObjectiveConfig};
//! use eqsearch::synthetic::{BenchmarkCase, BenchmarkName};
//!
//! let case = BenchmarkCase::generate(BenchmarkName::Wave, 101, 101)?;
//! let table = case.table(true)?;
//! let result = run_single_objective(&table, &case.pool, &SingleObjectiveConfig::default())?;
//! println!("{}", result.best.canonical());
//! # Ok::<(), eqsearch::Error>(())
//! ```

pub mod derivatives;
pub mod error;
pub mod grid;
pub mod harness;
pub mod objectives;
pub mod operators;
pub mod optimizers;
pub mod regression;
pub mod representation;
pub mod synthetic;

pub use error::{Error, Result};
