//! Exhaustive search over a small pool gives the exact optimum that the
//! evolutionary runs can be checked against.

use eqsearch::harness::{brute_force_oracle, equation_count};
use eqsearch::optimizers::{run_single_objective, SingleObjectiveConfig};
use eqsearch::regression::DEFAULT_LAMBDA;
use eqsearch::representation::TokenPool;
use eqsearch::synthetic::{BenchmarkCase, BenchmarkName};

fn main() -> eqsearch::Result<()> {
    let case = BenchmarkCase::generate(BenchmarkName::Burgers, 101, 101)?;
    let table = case.table(true)?;
    let pool = TokenPool::parse("u,du/dt,du/dx,d2u/dx2;factors=2;terms=3")?;
    let terms = pool.enumerate_terms();
    println!(
        "{} candidate terms, {} equations",
        terms.len(),
        equation_count(terms.len(), pool.max_terms)
    );

    let oracle = brute_force_oracle(&table, &pool, DEFAULT_LAMBDA)?;
    println!(
        "oracle:       {} (q_op {:.3e})",
        oracle.best.canonical(),
        oracle.best.q_op()
    );

    for seed in 0..3 {
        let run = run_single_objective(
            &table,
            &pool,
            &SingleObjectiveConfig {
                seed,
                ..Default::default()
            },
        )?;
        println!(
            "EA seed {seed}:    {} (q_op {:.3e})",
            run.best.canonical(),
            run.best.q_op()
        );
    }
    Ok(())
}
