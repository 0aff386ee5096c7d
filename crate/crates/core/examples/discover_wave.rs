//! Single-objective search on the wave benchmark: the run reports the
//! equation with the smallest operator discrepancy and a per-generation trace.

use eqsearch::optimizers::{run_single_objective, SingleObjectiveConfig};
use eqsearch::synthetic::{BenchmarkCase, BenchmarkName};

fn main() -> eqsearch::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let case = BenchmarkCase::generate(BenchmarkName::Wave, 101, 101)?;
    let table = case.table(true)?;
    let config = SingleObjectiveConfig {
        seed,
        ..Default::default()
    };
    let result = run_single_objective(&table, &case.pool, &config)?;

    println!("true equation: {}", case.true_equation_string());
    println!("discovered:    {}", result.best.canonical());
    println!(
        "q_op {:.3e}, complexity {}, {} evaluations",
        result.best.q_op(),
        result.best.complexity(),
        result.evaluations
    );
    println!("\ngeneration  best q_op");
    for row in result.trace.iter().step_by(8) {
        println!("{:>10}  {:.3e}", row.iteration, row.best_q_op);
    }
    Ok(())
}
