//! Search strategies over equation structures.
//!
//! [`run_single_objective`] is an elitist generational EA minimizing the
//! operator discrepancy alone. [`run_moeadd`] is a dominance-and-decomposition
//! multi-objective EA over (discrepancy, complexity). Both record a
//! per-iteration [`TraceRow`] and keep a [`ParetoArchive`] of everything they
//! evaluate, so their outputs are directly comparable.

mod moeadd;
mod pareto;
mod single;

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use crate::objectives::{Individual, Objectives};
pub use moeadd::{associate, pbi, run_moeadd, sector_weights, MoeaddConfig, MoeaddResult, WeightSector};
pub use pareto::{dominates, hypervolume, nondominated_sort, sort_individuals, ParetoArchive};
pub use single::{run_single_objective, SingleObjectiveConfig, SingleObjectiveResult};

/// One row of an optimization trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub evaluations: usize,
    pub best_q_op: f64,
    pub archive_size: usize,
    pub hypervolume: f64,
}

/// Writes trace rows as CSV with a header line.
pub fn write_trace_csv(rows: &[TraceRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reference point for hypervolume tracking: 10% beyond the worst finite
/// discrepancy of the initial population, and one token beyond the largest
/// expressible equation.
pub(crate) fn reference_point(initial: &[Individual], max_complexity: usize) -> [f64; 2] {
    let worst = initial
        .iter()
        .map(|i| i.q_op())
        .filter(|q| q.is_finite())
        .fold(0.0f64, f64::max);
    let q_ref = if worst > 0.0 { worst * 1.1 } else { 1.0 };
    [q_ref, (max_complexity + 1) as f64]
}

/// Best-by-discrepancy comparison used for elitism and tournaments:
/// smaller `q_op`, then smaller complexity.
pub(crate) fn better(a: &Individual, b: &Individual) -> bool {
    a.q_op()
        .total_cmp(&b.q_op())
        .then(a.complexity().cmp(&b.complexity()))
        .is_lt()
}
