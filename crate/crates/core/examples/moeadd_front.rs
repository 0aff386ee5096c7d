//! Multi-objective search on the Burgers benchmark. The archive holds every
//! non-dominated (discrepancy, complexity) trade-off the run found.

use eqsearch::optimizers::{run_moeadd, sector_weights, MoeaddConfig};
use eqsearch::synthetic::{BenchmarkCase, BenchmarkName};

fn main() -> eqsearch::Result<()> {
    let case = BenchmarkCase::generate(BenchmarkName::Burgers, 101, 101)?;
    let table = case.table(true)?;
    let config = MoeaddConfig {
        seed: 3,
        ..Default::default()
    };

    println!("weight sectors and their {} nearest neighbours:", config.neighbors);
    for (i, s) in sector_weights(config.population, config.neighbors).iter().enumerate() {
        println!("  {i}: ({:.3}, {:.3}) -> {:?}", s.weight[0], s.weight[1], s.neighbors);
    }

    let result = run_moeadd(&table, &case.pool, &config)?;
    let mut front = result.archive.individuals().to_vec();
    front.sort_by_key(|i| i.complexity());
    println!("\ntrue equation: {}", case.true_equation_string());
    println!("pareto archive after {} evaluations:", result.evaluations);
    for ind in &front {
        println!(
            "  C = {:<2} q_op = {:<10.3e} {}",
            ind.complexity(),
            ind.q_op(),
            ind.canonical()
        );
    }
    let last = result.trace.last().expect("trace has the initial row");
    println!("hypervolume {:.4}", last.hypervolume);
    Ok(())
}
