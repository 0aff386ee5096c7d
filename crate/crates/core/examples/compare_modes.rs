//! The comparison experiment: repeated seeded runs of both optimizers on one
//! benchmark, with the mean and sample variance of the final discrepancy.
//!
//! Pass a config file as the first argument (see `experiment.cfg` next to
//! this example) or rely on the defaults below. Reports are written to the
//! configured `out` directory when one is set.

use eqsearch::harness::{run_experiment, ExperimentConfig, Mode};
use eqsearch::synthetic::BenchmarkName;

fn main() -> eqsearch::Result<()> {
    let mut config = ExperimentConfig::for_benchmark(BenchmarkName::Burgers, Mode::Both);
    if let Some(path) = std::env::args().nth(1) {
        config.apply_file(path)?;
    }
    for (key, value) in config.effective() {
        println!("{key:>15} = {value}");
    }
    let report = run_experiment(&config)?;
    println!(
        "\ntrue equation: {}",
        report.true_equation.as_deref().unwrap_or("unknown")
    );
    for stats in &report.stats {
        println!(
            "{:<6} mean {:.4e}  variance {:.4e}  recovered {}/{}",
            stats.mode.as_str(),
            stats.mean,
            stats.variance,
            stats.recovered(),
            stats.runs.len()
        );
        for run in &stats.runs {
            println!("    seed {:<3} {}", run.seed, run.canonical);
        }
    }
    Ok(())
}
