use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eqsearch::harness::{
    brute_force_oracle, discover, run_experiment, Dataset, ExperimentConfig, Mode, RunSettings, Sidecar,
};
use eqsearch::operators::OperatorConfig;
use eqsearch::optimizers::write_trace_csv;
use eqsearch::regression::DEFAULT_LAMBDA;
use eqsearch::representation::TokenPool;
use eqsearch::synthetic::{BenchmarkCase, BenchmarkName, DEFAULT_NODES};
use eqsearch::{Error, Result};

#[derive(Parser)]
#[command(name = "eqsearch", version, about = "Evolutionary PDE discovery from gridded data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark field as CSV plus a JSON sidecar.
    Generate {
        #[arg(long)]
        case: BenchmarkName,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nt: usize,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nx: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one optimizer on a field file.
    Discover {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "single")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        #[arg(long, default_value_t = 8)]
        pop: usize,
        /// Defaults to 64 (single) or 8 (multi).
        #[arg(long)]
        iters: Option<usize>,
        /// Token pool, e.g. "u,du/dt,du/dx;factors=2;terms=3".
        #[arg(long)]
        pool: Option<String>,
        /// Write the optimization trace to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Repeated seeded runs with statistics and report files.
    Experiment {
        /// Key-value config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        case: Option<BenchmarkName>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        base_seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra `key=value` overrides.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Exhaustive search over a small pool.
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        pool: Option<String>,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
    },
}

fn generate(case: BenchmarkName, nt: usize, nx: usize, out: PathBuf) -> Result<()> {
    let bench = BenchmarkCase::generate(case, nt, nx)?;
    fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let data = out.join(format!("{case}.csv"));
    bench.field.save(&data)?;
    Sidecar::for_case(&bench)?.save(&Sidecar::path_for(&data))?;
    println!("wrote {}", data.display());
    println!("true equation: {}", bench.true_equation_string());
    Ok(())
}

fn experiment_config(
    config: Option<PathBuf>,
    overrides: Vec<(&'static str, Option<String>)>,
    set: Vec<String>,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = config {
        cfg.apply_file(path)?;
    }
    cfg.apply_overrides(overrides.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))))?;
    for pair in &set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{pair}`")))?;
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { case, nt, nx, out } => generate(case, nt, nx, out),
        Command::Discover {
            data,
            mode,
            seed,
            lambda,
            pop,
            iters,
            pool,
            trace,
        } => {
            if mode == Mode::Both {
                return Err(Error::Config("discover runs one mode: single or multi".into()));
            }
            let pool = pool.as_deref().map(TokenPool::parse).transpose()?;
            let dataset = Dataset::from_file(&data, pool)?;
            let settings = RunSettings {
                mode,
                population: pop,
                iterations: iters.unwrap_or(mode.default_iterations()),
                lambda,
                operators: OperatorConfig::default(),
                seed,
            };
            let d = discover(&dataset.table, &dataset.pool, &settings)?;
            println!("best: {}", d.best.canonical());
            println!("q_op: {:e}", d.best.q_op());
            println!("complexity: {}", d.best.complexity());
            println!("evaluations: {}", d.evaluations);
            if mode == Mode::Multi {
                let mut front = d.front.clone();
                front.sort_by_key(|i| i.complexity());
                println!("pareto front:");
                for ind in &front {
                    println!(
                        "  C={:<3} q_op={:<12.4e} {}",
                        ind.complexity(),
                        ind.q_op(),
                        ind.canonical()
                    );
                }
            }
            if let Some(path) = trace {
                write_trace_csv(&d.trace, path)?;
            }
            Ok(())
        }
        Command::Experiment {
            config,
            case,
            data,
            mode,
            runs,
            base_seed,
            out,
            set,
        } => {
            let cfg = experiment_config(
                config,
                vec![
                    ("case", case.map(|c| c.to_string())),
                    ("data", data.map(|p| p.display().to_string())),
                    ("mode", mode.map(|m| m.to_string())),
                    ("runs", runs.map(|r| r.to_string())),
                    ("base_seed", base_seed.map(|s| s.to_string())),
                    ("out", out.map(|p| p.display().to_string())),
                ],
                set,
            )?;
            let report = run_experiment(&cfg)?;
            for s in &report.stats {
                println!(
                    "{:<6} mean = {:.6e}  variance = {:.6e}  recovered = {}/{}",
                    s.mode,
                    s.mean,
                    s.variance,
                    s.recovered(),
                    s.runs.len()
                );
            }
            if let Some(dir) = &cfg.out_dir {
                println!("reports in {}", dir.display());
            }
            Ok(())
        }
        Command::Oracle { data, pool, lambda } => {
            let pool = pool.as_deref().map(TokenPool::parse).transpose()?;
            let dataset = Dataset::from_file(&data, pool)?;
            let r = brute_force_oracle(&dataset.table, &dataset.pool, lambda)?;
            println!("best: {}", r.best.canonical());
            println!("q_op: {:e}", r.best.q_op());
            println!("complexity: {}", r.best.complexity());
            println!("candidate terms: {}", r.terms);
            println!("equations enumerated: {}", r.enumerated);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
