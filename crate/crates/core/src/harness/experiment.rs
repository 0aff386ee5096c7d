use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derivatives::{build_table, DerivativeTable};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::objectives::Individual;
use crate::operators::OperatorConfig;
use crate::optimizers::{run_moeadd, run_single_objective, MoeaddConfig, SingleObjectiveConfig, TraceRow};
use crate::representation::{Equation, TokenPool};
use crate::synthetic::BenchmarkCase;

use super::config::{DataSource, ExperimentConfig, Mode};
use super::report::{emit_reports, ExperimentReport, RunRecord, RunStats};

/// Significant digits used when comparing a result with the true equation.
pub const RECOVERY_DIGITS: usize = 2;

/// Metadata written next to a generated data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub case: String,
    /// Canonical form of the governing equation.
    pub true_equation: String,
    /// Canonical form at the recovery-comparison precision.
    pub true_equation_rounded: String,
    /// Token pool in the compact textual syntax.
    pub pool: String,
    pub nt: usize,
    pub nx: usize,
}

impl Sidecar {
    pub fn for_case(case: &BenchmarkCase) -> Result<Self> {
        let canon = case.true_equation.canonical_form()?;
        let (nt, nx) = case.grid.shape();
        Ok(Self {
            case: case.name.to_string(),
            true_equation: canon.to_string(),
            true_equation_rounded: canon.render(RECOVERY_DIGITS),
            pool: case.pool.to_string(),
            nt,
            nx,
        })
    }

    /// `data.csv` → `data.json`.
    pub fn path_for(data: &Path) -> PathBuf {
        data.with_extension("json")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// A derivative table ready for search, with its pool and (when known) the
/// equation that generated it.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub label: String,
    pub table: DerivativeTable,
    pub pool: TokenPool,
    /// Rounded canonical form of the governing equation.
    pub truth: Option<String>,
}

fn rounded(eq: &Equation) -> Result<String> {
    Ok(eq.canonical_form()?.render(RECOVERY_DIGITS))
}

impl Dataset {
    pub fn from_case(case: &BenchmarkCase, pool: Option<TokenPool>, analytic: bool) -> Result<Self> {
        let pool = pool.unwrap_or_else(|| case.pool.clone());
        let mut probe = case.clone();
        probe.pool = pool.clone();
        Ok(Self {
            label: case.name.to_string(),
            table: probe.table(analytic)?,
            pool,
            truth: Some(rounded(&case.true_equation)?),
        })
    }

    /// Loads a field file, reading pool and true equation from its sidecar
    /// when present. An explicit `pool` takes precedence.
    pub fn from_file(path: &Path, pool: Option<TokenPool>) -> Result<Self> {
        let field = Field::load(path)?;
        let sidecar_path = Sidecar::path_for(path);
        let sidecar = if sidecar_path.exists() {
            Some(Sidecar::load(&sidecar_path)?)
        } else {
            None
        };
        let pool = match (pool, &sidecar) {
            (Some(p), _) => p,
            (None, Some(s)) => TokenPool::parse(&s.pool)?,
            (None, None) => {
                return Err(Error::config(format!(
                    "no token pool given and no sidecar {} found",
                    sidecar_path.display()
                )))
            }
        };
        let table = build_table(&field, &pool.required_specs())?;
        Ok(Self {
            label: path.display().to_string(),
            table,
            pool,
            truth: sidecar.map(|s| s.true_equation_rounded),
        })
    }

    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let pool = config.pool.as_deref().map(TokenPool::parse).transpose()?;
        match &config.source {
            DataSource::Benchmark(name) => {
                let case = BenchmarkCase::generate(*name, config.nt, config.nx)?;
                Self::from_case(&case, pool, config.analytic)
            }
            DataSource::File(path) => Self::from_file(path, pool),
        }
    }

    /// Whether `ind` matches the governing equation at the comparison
    /// precision.
    pub fn recovers(&self, ind: &Individual) -> bool {
        match (&self.truth, ind.equation.canonical_form()) {
            (Some(t), Ok(c)) => c.render(RECOVERY_DIGITS) == *t,
            _ => false,
        }
    }
}

/// Settings of one optimizer run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub mode: Mode,
    pub population: usize,
    pub iterations: usize,
    pub lambda: f64,
    pub operators: OperatorConfig,
    pub seed: u64,
}

/// Result of one optimizer run.
#[derive(Debug, Clone)]
pub struct Discovery {
    /// The run's reported equation: lowest discrepancy found.
    pub best: Individual,
    /// Non-dominated equations found.
    pub front: Vec<Individual>,
    pub trace: Vec<TraceRow>,
    pub evaluations: usize,
}

/// Runs one optimizer on a table.
pub fn discover(table: &DerivativeTable, pool: &TokenPool, settings: &RunSettings) -> Result<Discovery> {
    match settings.mode {
        Mode::Single => {
            let r = run_single_objective(
                table,
                pool,
                &SingleObjectiveConfig {
                    population: settings.population,
                    iterations: settings.iterations,
                    operators: settings.operators,
                    lambda: settings.lambda,
                    seed: settings.seed,
                    ..Default::default()
                },
            )?;
            Ok(Discovery {
                best: r.best,
                front: r.archive.individuals().to_vec(),
                trace: r.trace,
                evaluations: r.evaluations,
            })
        }
        Mode::Multi => {
            let r = run_moeadd(
                table,
                pool,
                &MoeaddConfig {
                    population: settings.population,
                    iterations: settings.iterations,
                    operators: settings.operators,
                    lambda: settings.lambda,
                    seed: settings.seed,
                    ..Default::default()
                },
            )?;
            let best = multi_run_representative(r.archive.individuals())
                .cloned()
                .ok_or(Error::NonFinite("every equation in the run was degenerate"))?;
            Ok(Discovery {
                best,
                front: r.archive.individuals().to_vec(),
                trace: r.trace,
                evaluations: r.evaluations,
            })
        }
        Mode::Both => Err(Error::config("a single run needs mode single or multi")),
    }
}

/// The archive member reported as a multi-objective run's result: the one
/// with the smallest discrepancy.
pub fn multi_run_representative(archive: &[Individual]) -> Option<&Individual> {
    archive
        .iter()
        .min_by(|a, b| a.q_op().total_cmp(&b.q_op()).then(a.complexity().cmp(&b.complexity())))
}

fn record(data: &Dataset, mode: Mode, seed: u64, d: &Discovery) -> RunRecord {
    // a multi-objective run recovers the structure if any archived equation matches
    let recovered = match mode {
        Mode::Multi => d.front.iter().any(|i| data.recovers(i)),
        _ => data.recovers(&d.best),
    };
    RunRecord {
        seed,
        q_op: d.best.q_op(),
        complexity: d.best.complexity(),
        canonical: d.best.canonical(),
        recovered,
        evaluations: d.evaluations,
    }
}

/// Runs every configured mode over every seed (in parallel) and writes the
/// reports when an output directory is configured.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let data = Dataset::from_config(config)?;
    run_experiment_on(config, &data)
}

/// [`run_experiment`] on an already loaded dataset.
pub fn run_experiment_on(config: &ExperimentConfig, data: &Dataset) -> Result<ExperimentReport> {
    config.validate()?;
    let seeds = config.seed_list();
    let mut stats = Vec::new();
    for mode in config.mode.expand() {
        let records: Vec<RunRecord> = seeds
            .par_iter()
            .map(|&seed| {
                let settings = RunSettings {
                    mode,
                    population: config.population,
                    iterations: config.iterations_for(mode),
                    lambda: config.lambda,
                    operators: config.operators,
                    seed,
                };
                let d = discover(&data.table, &data.pool, &settings)?;
                log::info!(
                    "{mode} seed {seed}: q_op = {:.3e}, {}",
                    d.best.q_op(),
                    d.best.canonical()
                );
                Ok(record(data, mode, seed, &d))
            })
            .collect::<Result<_>>()?;
        stats.push(RunStats::from_runs(mode, records)?);
    }
    let report = ExperimentReport {
        config: config.effective(),
        true_equation: data.truth.clone(),
        stats,
    };
    if let Some(dir) = &config.out_dir {
        emit_reports(&report, dir)?;
    }
    Ok(report)
}
