use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::OperatorConfig;
use crate::regression::DEFAULT_LAMBDA;
use crate::synthetic::{BenchmarkName, DEFAULT_NODES};

/// Which optimizer(s) an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Multi,
    Both,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Multi => "multi",
            Mode::Both => "both",
        }
    }

    /// The concrete optimizers this mode expands to.
    pub fn expand(self) -> Vec<Mode> {
        match self {
            Mode::Both => vec![Mode::Single, Mode::Multi],
            m => vec![m],
        }
    }

    /// Iteration count used when none is configured.
    pub fn default_iterations(self) -> usize {
        match self {
            Mode::Single => 64,
            _ => 8,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "single" => Ok(Mode::Single),
            "multi" => Ok(Mode::Multi),
            "both" => Ok(Mode::Both),
            other => Err(Error::config(format!(
                "unknown mode `{other}` (expected single, multi or both)"
            ))),
        }
    }
}

/// Where the data of an experiment comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Benchmark(BenchmarkName),
    File(PathBuf),
}

/// Settings of a batch of seeded runs.
///
/// Built from defaults, then an optional key-value file, then command-line
/// overrides, each layer replacing the keys it mentions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub mode: Mode,
    pub runs: usize,
    pub base_seed: u64,
    /// Explicit seeds; when empty, seeds are `base_seed + i`.
    pub seeds: Vec<u64>,
    pub population: usize,
    /// `None` selects the per-mode default.
    pub iterations: Option<usize>,
    pub lambda: f64,
    pub operators: OperatorConfig,
    /// Pool in the compact textual syntax; `None` uses the benchmark pool.
    pub pool: Option<String>,
    pub nt: usize,
    pub nx: usize,
    /// Use closed-form derivatives when the benchmark provides them.
    pub analytic: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Benchmark(BenchmarkName::Wave),
            mode: Mode::Both,
            runs: 10,
            base_seed: 0,
            seeds: Vec::new(),
            population: 8,
            iterations: None,
            lambda: DEFAULT_LAMBDA,
            operators: OperatorConfig::default(),
            pool: None,
            nt: DEFAULT_NODES,
            nx: DEFAULT_NODES,
            analytic: true,
            out_dir: None,
        }
    }
}

/// Keys understood by [`ExperimentConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "case",
    "data",
    "mode",
    "runs",
    "base_seed",
    "seeds",
    "population",
    "iterations",
    "lambda",
    "crossover_rate",
    "mutation_rate",
    "param_sigma",
    "pool",
    "nt",
    "nx",
    "analytic",
    "out",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid value `{value}` for `{key}`")))
}

impl ExperimentConfig {
    pub fn for_benchmark(name: BenchmarkName, mode: Mode) -> Self {
        Self {
            source: DataSource::Benchmark(name),
            mode,
            ..Self::default()
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "case" => self.source = DataSource::Benchmark(value.parse()?),
            "data" => self.source = DataSource::File(PathBuf::from(value)),
            "mode" => self.mode = value.parse()?,
            "runs" => self.runs = parse_num(key, value)?,
            "base_seed" => self.base_seed = parse_num(key, value)?,
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?
            }
            "population" => self.population = parse_num(key, value)?,
            "iterations" => self.iterations = Some(parse_num(key, value)?),
            "lambda" => self.lambda = parse_num(key, value)?,
            "crossover_rate" => self.operators.crossover_rate = parse_num(key, value)?,
            "mutation_rate" => self.operators.mutation_rate = parse_num(key, value)?,
            "param_sigma" => self.operators.param_sigma = parse_num(key, value)?,
            "pool" => self.pool = Some(value.to_string()),
            "nt" => self.nt = parse_num(key, value)?,
            "nx" => self.nx = parse_num(key, value)?,
            "analytic" => self.analytic = parse_num(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            other => {
                return Err(Error::config(format!(
                    "unknown config key `{other}` (known: {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// Applies overrides in order.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, String)>) -> Result<()> {
        for (k, v) in pairs {
            self.set(k, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if !self.seeds.is_empty() && self.seeds.len() != self.runs {
            return Err(Error::config(format!(
                "{} seeds given for {} runs",
                self.seeds.len(),
                self.runs
            )));
        }
        if self.population < 2 {
            return Err(Error::config("population must be at least 2"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda must be a non-negative number"));
        }
        self.operators.validate()
    }

    pub fn seed_list(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            (0..self.runs as u64).map(|i| self.base_seed.wrapping_add(i)).collect()
        } else {
            self.seeds.clone()
        }
    }

    pub fn iterations_for(&self, mode: Mode) -> usize {
        self.iterations.unwrap_or_else(|| mode.default_iterations())
    }

    /// The effective configuration as ordered key-value pairs.
    pub fn effective(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        match &self.source {
            DataSource::Benchmark(b) => m.insert("case", b.to_string()),
            DataSource::File(p) => m.insert("data", p.display().to_string()),
        };
        m.insert("mode", self.mode.to_string());
        m.insert("runs", self.runs.to_string());
        m.insert("base_seed", self.base_seed.to_string());
        m.insert(
            "seeds",
            self.seed_list()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("population", self.population.to_string());
        for mode in self.mode.expand() {
            let key = if mode == Mode::Single {
                "iterations_single"
            } else {
                "iterations_multi"
            };
            m.insert(key, self.iterations_for(mode).to_string());
        }
        m.insert("lambda", self.lambda.to_string());
        m.insert("crossover_rate", self.operators.crossover_rate.to_string());
        m.insert("mutation_rate", self.operators.mutation_rate.to_string());
        m.insert("param_sigma", self.operators.param_sigma.to_string());
        m.insert("pool", self.pool.clone().unwrap_or_else(|| "default".into()));
        m.insert("nt", self.nt.to_string());
        m.insert("nx", self.nx.to_string());
        m.insert("analytic", self.analytic.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = ExperimentConfig::default();
        c.apply_text("# experiment\ncase = burgers\nruns = 3\nlambda=0.1\n\nmode = single # inline")
            .unwrap();
        c.apply_overrides([("runs", "5".to_string())]).unwrap();
        assert_eq!(c.source, DataSource::Benchmark(BenchmarkName::Burgers));
        assert_eq!(c.runs, 5);
        assert_eq!(c.lambda, 0.1);
        assert_eq!(c.mode, Mode::Single);
        assert_eq!(c.iterations_for(Mode::Single), 64);
        assert_eq!(c.iterations_for(Mode::Multi), 8);
    }

    #[test]
    fn unknown_key_and_bad_value() {
        let mut c = ExperimentConfig::default();
        assert!(c.set("colour", "red").unwrap_err().is_config());
        assert!(c.set("runs", "many").unwrap_err().is_config());
        assert!(c.apply_text("runs 3").unwrap_err().is_config());
    }

    #[test]
    fn seeds() {
        let mut c = ExperimentConfig {
            base_seed: 40,
            runs: 3,
            ..Default::default()
        };
        assert_eq!(c.seed_list(), vec![40, 41, 42]);
        c.set("seeds", "7,9").unwrap();
        assert!(c.validate().is_err());
        c.runs = 2;
        assert_eq!(c.seed_list(), vec![7, 9]);
    }

    #[test]
    fn zero_runs_rejected() {
        let c = ExperimentConfig {
            runs: 0,
            ..Default::default()
        };
        assert!(c.validate().unwrap_err().is_config());
    }
}
