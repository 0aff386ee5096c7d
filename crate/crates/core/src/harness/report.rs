use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

use super::config::Mode;

/// Outcome of one seeded optimization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Per-run quality value (best discrepancy).
    pub q_op: f64,
    pub complexity: usize,
    pub canonical: String,
    pub recovered: bool,
    pub evaluations: usize,
}

/// Statistics of the runs of one optimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub mode: Mode,
    pub runs: Vec<RunRecord>,
    pub mean: f64,
    /// Sample variance (`n − 1` denominator, 0 for a single run).
    pub variance: f64,
    pub recovery_rate: f64,
}

/// Mean and sample variance.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

impl RunStats {
    pub fn from_runs(mode: Mode, runs: Vec<RunRecord>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::config("statistics need at least one run"));
        }
        let q: Vec<f64> = runs.iter().map(|r| r.q_op).collect();
        let (mean, variance) = mean_variance(&q);
        let recovery_rate = runs.iter().filter(|r| r.recovered).count() as f64 / runs.len() as f64;
        Ok(Self {
            mode,
            runs,
            mean,
            variance,
            recovery_rate,
        })
    }

    pub fn q_values(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.q_op).collect()
    }

    pub fn recovered(&self) -> usize {
        self.runs.iter().filter(|r| r.recovered).count()
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: BTreeMap<&'static str, String>,
    pub true_equation: Option<String>,
    pub stats: Vec<RunStats>,
}

impl ExperimentReport {
    pub fn mode(&self, mode: Mode) -> Option<&RunStats> {
        self.stats.iter().find(|s| s.mode == mode)
    }
}

#[derive(Serialize)]
struct ModeSummary<'a> {
    mean: f64,
    variance: f64,
    recovery_rate: f64,
    q_op: Vec<f64>,
    canonical: Vec<&'a str>,
}

#[derive(Serialize)]
struct StatsFile<'a> {
    config: &'a BTreeMap<&'static str, String>,
    true_equation: &'a Option<String>,
    modes: BTreeMap<&'static str, ModeSummary<'a>>,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Serialization(format!("{}: {e}", path.display()))
}

/// Writes `stats.json`, `runs.csv` and `boxplot.csv` into `out_dir`.
/// Output depends only on `report`.
pub fn emit_reports(report: &ExperimentReport, out_dir: impl AsRef<Path>) -> Result<()> {
    let dir = out_dir.as_ref();
    if report.stats.is_empty() || report.stats.iter().any(|s| s.runs.is_empty()) {
        return Err(Error::config("cannot report an experiment without runs"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let modes = report
        .stats
        .iter()
        .map(|s| {
            (
                s.mode.as_str(),
                ModeSummary {
                    mean: s.mean,
                    variance: s.variance,
                    recovery_rate: s.recovery_rate,
                    q_op: s.q_values(),
                    canonical: s.runs.iter().map(|r| r.canonical.as_str()).collect(),
                },
            )
        })
        .collect();
    let json = serde_json::to_string_pretty(&StatsFile {
        config: &report.config,
        true_equation: &report.true_equation,
        modes,
    })
    .map_err(|e| Error::Serialization(e.to_string()))?;
    let path = dir.join("stats.json");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;

    let path = dir.join("runs.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
    w.write_record([
        "mode",
        "run",
        "seed",
        "q_op",
        "complexity",
        "evaluations",
        "recovered",
        "canonical",
    ])
    .map_err(|e| csv_err(&path, e))?;
    for s in &report.stats {
        for (i, r) in s.runs.iter().enumerate() {
            w.write_record([
                s.mode.as_str().to_string(),
                i.to_string(),
                r.seed.to_string(),
                format!("{:.16e}", r.q_op),
                r.complexity.to_string(),
                r.evaluations.to_string(),
                r.recovered.to_string(),
                r.canonical.clone(),
            ])
            .map_err(|e| csv_err(&path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("boxplot.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
    w.write_record(report.stats.iter().map(|s| s.mode.as_str()))
        .map_err(|e| csv_err(&path, e))?;
    let rows = report.stats.iter().map(|s| s.runs.len()).max().unwrap_or(0);
    for i in 0..rows {
        w.write_record(
            report
                .stats
                .iter()
                .map(|s| s.runs.get(i).map(|r| format!("{:.16e}", r.q_op)).unwrap_or_default()),
        )
        .map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_variance() {
        assert_eq!(mean_variance(&[1.0, 2.0, 3.0]), (2.0, 1.0));
        assert_eq!(mean_variance(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn empty_runs_rejected() {
        assert!(RunStats::from_runs(Mode::Single, vec![]).is_err());
        let report = ExperimentReport {
            config: BTreeMap::new(),
            true_equation: None,
            stats: vec![],
        };
        assert!(emit_reports(&report, std::env::temp_dir()).is_err());
    }
}
