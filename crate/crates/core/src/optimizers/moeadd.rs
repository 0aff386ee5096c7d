//! Multi-objective EA based on dominance and decomposition.
//!
//! The objective plane (discrepancy, complexity) is split into sectors by a
//! uniform lattice of weight vectors. Each iteration visits every sector,
//! draws parents from its neighbourhood (probability `delta`) or from the
//! whole population, and inserts each offspring with a dominance-first
//! update: the worst non-domination front loses the member with the largest
//! PBI value inside the most crowded sector.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivatives::DerivativeTable;
use crate::error::{Error, Result};
use crate::objectives::{Evaluator, Individual};
use crate::operators::{crossover, mutate, OperatorConfig};
use crate::regression::DEFAULT_LAMBDA;
use crate::representation::TokenPool;

use super::{reference_point, sort_individuals, ParetoArchive, TraceRow};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MoeaddConfig {
    /// Population size; also the number of weight sectors.
    pub population: usize,
    pub iterations: usize,
    /// PBI penalty factor.
    pub theta: f64,
    /// Probability of drawing parents from the sector neighbourhood.
    pub delta: f64,
    /// Neighbourhood size (sectors, including the sector itself).
    pub neighbors: usize,
    /// Fraction of the population drawn as parents per sector.
    pub parent_fraction: f64,
    pub operators: OperatorConfig,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for MoeaddConfig {
    fn default() -> Self {
        Self {
            population: 8,
            iterations: 8,
            theta: 1.0,
            delta: 0.9,
            neighbors: 4,
            parent_fraction: 0.4,
            operators: OperatorConfig::default(),
            lambda: DEFAULT_LAMBDA,
            seed: 0,
        }
    }
}

impl MoeaddConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("population must be at least 2"));
        }
        if self.neighbors == 0 || self.neighbors > self.population {
            return Err(Error::config("neighbourhood size must be in 1..=population"));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::config("delta must lie in [0, 1]"));
        }
        if !(self.parent_fraction > 0.0 && self.parent_fraction <= 1.0) {
            return Err(Error::config("parent fraction must lie in (0, 1]"));
        }
        if self.theta.is_nan() || self.theta < 0.0 {
            return Err(Error::config("theta must be non-negative"));
        }
        self.operators.validate()
    }

    /// Parents drawn per sector visit.
    pub fn parents_per_sector(&self) -> usize {
        ((self.parent_fraction * self.population as f64).ceil() as usize).max(2)
    }
}

/// A weight direction and the indices of its nearest sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSector {
    pub weight: [f64; 2],
    pub neighbors: Vec<usize>,
}

/// `n` sectors with weights `(i/(n-1), 1 - i/(n-1))` and their `k` nearest
/// neighbours by Euclidean distance (self included).
pub fn sector_weights(n: usize, k: usize) -> Vec<WeightSector> {
    let weights: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = i as f64 / (n - 1).max(1) as f64;
            [a, 1.0 - a]
        })
        .collect();
    weights
        .iter()
        .map(|w| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| {
                let da = (weights[a][0] - w[0]).hypot(weights[a][1] - w[1]);
                let db = (weights[b][0] - w[0]).hypot(weights[b][1] - w[1]);
                da.total_cmp(&db).then(a.cmp(&b))
            });
            idx.truncate(k);
            WeightSector {
                weight: *w,
                neighbors: idx,
            }
        })
        .collect()
}

/// Penalty-based boundary intersection `d1 + θ·d2` of `f` relative to the
/// ideal point along `weight` (normalized internally).
pub fn pbi(f: [f64; 2], weight: [f64; 2], ideal: [f64; 2], theta: f64) -> f64 {
    let norm = weight[0].hypot(weight[1]);
    let (w0, w1) = (weight[0] / norm, weight[1] / norm);
    let (g0, g1) = (f[0] - ideal[0], f[1] - ideal[1]);
    let d1 = g0 * w0 + g1 * w1;
    let d2 = (g0 - d1 * w0).hypot(g1 - d1 * w1);
    d1 + theta * d2
}

/// Objectives rescaled to `[0, 1]` by the ideal point and the population's
/// finite nadir; infinite discrepancies stay infinite.
fn normalize(points: &[[f64; 2]], ideal: [f64; 2]) -> Vec<[f64; 2]> {
    let mut nadir = ideal;
    for p in points.iter().filter(|p| p[0].is_finite()) {
        nadir[0] = nadir[0].max(p[0]);
        nadir[1] = nadir[1].max(p[1]);
    }
    let span = |k: usize| {
        let s = nadir[k] - ideal[k];
        if s > 1e-300 {
            s
        } else {
            1.0
        }
    };
    let (s0, s1) = (span(0), span(1));
    points
        .iter()
        .map(|p| [(p[0] - ideal[0]) / s0, (p[1] - ideal[1]) / s1])
        .collect()
}

/// Sector index with the smallest PBI for each (normalized) point, and that
/// PBI value.
pub fn associate(points: &[[f64; 2]], sectors: &[WeightSector], theta: f64) -> Vec<(usize, f64)> {
    points
        .iter()
        .map(|p| {
            if !p[0].is_finite() {
                return (0, f64::INFINITY);
            }
            sectors
                .iter()
                .enumerate()
                .map(|(s, w)| (s, pbi(*p, w.weight, [0.0, 0.0], theta)))
                .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MoeaddResult {
    pub archive: ParetoArchive,
    pub population: Vec<Individual>,
    pub trace: Vec<TraceRow>,
    pub evaluations: usize,
}

struct State<'c> {
    population: Vec<Individual>,
    archive: ParetoArchive,
    sectors: Vec<WeightSector>,
    config: &'c MoeaddConfig,
}

impl State<'_> {
    fn vectors(pop: &[Individual]) -> Vec<[f64; 2]> {
        pop.iter().map(|i| i.objectives.as_vector()).collect()
    }

    fn associations(&self, pop: &[Individual]) -> Vec<(usize, f64)> {
        let ideal = self.archive.ideal().unwrap_or([0.0, 0.0]);
        let norm = normalize(&Self::vectors(pop), ideal);
        associate(&norm, &self.sectors, self.config.theta)
    }

    fn select_parents<R: Rng>(&self, sector: usize, rng: &mut R) -> Vec<usize> {
        let n = self.config.parents_per_sector();
        let assoc = self.associations(&self.population);
        let all: Vec<usize> = (0..self.population.len()).collect();
        let mut candidates = all.clone();
        if rng.random_bool(self.config.delta) {
            let hood = &self.sectors[sector].neighbors;
            let local: Vec<usize> = all.iter().copied().filter(|&i| hood.contains(&assoc[i].0)).collect();
            if local.len() >= 2 {
                candidates = local;
            }
        }
        if candidates.len() >= n {
            candidates.shuffle(rng);
            candidates.truncate(n);
            candidates
        } else {
            (0..n).map(|_| *candidates.choose(rng).unwrap()).collect()
        }
    }

    /// Inserts one offspring, keeping the population size fixed.
    fn update(&mut self, child: Individual) {
        self.archive.insert(&child);
        let canon = child.canonical();
        if self
            .population
            .iter()
            .any(|p| p.objectives == child.objectives && p.canonical() == canon)
        {
            return;
        }
        let mut union = self.population.clone();
        union.push(child);
        let fronts = sort_individuals(&union);
        let candidates: &[usize] = fronts.last().expect("non-empty union");
        let assoc = self.associations(&union);
        let mut niche = vec![0usize; self.sectors.len()];
        for &(s, _) in &assoc {
            niche[s] += 1;
        }
        // most crowded sector among the candidates, then the worst PBI in it
        let crowded = candidates
            .iter()
            .map(|&i| assoc[i].0)
            .max_by(|&a, &b| niche[a].cmp(&niche[b]).then(b.cmp(&a)))
            .expect("non-empty front");
        let evict = candidates
            .iter()
            .copied()
            .filter(|&i| assoc[i].0 == crowded)
            .max_by(|&a, &b| assoc[a].1.total_cmp(&assoc[b].1).then(a.cmp(&b)))
            .expect("sector has a candidate");
        union.remove(evict);
        self.population = union;
    }
}

/// Runs the multi-objective search and returns the archive of all
/// non-dominated equations found.
pub fn run_moeadd(table: &DerivativeTable, pool: &TokenPool, config: &MoeaddConfig) -> Result<MoeaddResult> {
    config.validate()?;
    pool.validate()?;
    let evaluator = Evaluator::new(table, config.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut state = State {
        population: Vec::with_capacity(config.population),
        archive: ParetoArchive::new(),
        sectors: sector_weights(config.population, config.neighbors),
        config,
    };
    for _ in 0..config.population {
        let eq = pool.random_equation(&mut rng)?;
        let ind = evaluator.evaluate(&eq)?;
        state.archive.insert(&ind);
        state.population.push(ind);
    }
    let reference = reference_point(&state.population, pool.max_terms * pool.max_factors);
    let row = |iteration: usize, state: &State, evals: usize| TraceRow {
        iteration,
        evaluations: evals,
        best_q_op: state.archive.best_q_op().map_or(f64::INFINITY, |b| b.q_op()),
        archive_size: state.archive.len(),
        hypervolume: state.archive.hypervolume(reference),
    };
    let mut trace = vec![row(0, &state, evaluator.evaluations())];

    for iteration in 1..=config.iterations {
        for sector in 0..state.sectors.len() {
            let parents = state.select_parents(sector, &mut rng);
            let mut produced = 0;
            for pair in parents.chunks(2) {
                let (a, b) = match pair {
                    [a, b] => (*a, *b),
                    [a] => (*a, parents[rng.random_range(0..parents.len())]),
                    _ => unreachable!(),
                };
                let pa = state.population[a].equation.clone();
                let pb = state.population[b].equation.clone();
                let (ca, cb) = crossover(&pa, &pb, &config.operators, &mut rng);
                for child in [ca, cb] {
                    if produced == parents.len() {
                        break;
                    }
                    let child = mutate(&child, pool, &config.operators, &mut rng);
                    let ind = evaluator.evaluate(&child)?;
                    state.update(ind);
                    produced += 1;
                }
            }
        }
        trace.push(row(iteration, &state, evaluator.evaluations()));
    }

    Ok(MoeaddResult {
        archive: state.archive,
        population: state.population,
        trace,
        evaluations: evaluator.evaluations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbi_on_axis() {
        assert!((pbi([3.0, 0.0], [1.0, 0.0], [0.0, 0.0], 1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pbi_on_diagonal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pbi([1.0, 1.0], [s, s], [0.0, 0.0], 1.0) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pbi_orthogonal() {
        assert!((pbi([1.0, 0.0], [0.0, 1.0], [0.0, 0.0], 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pbi_weight_scale_is_irrelevant() {
        let a = pbi([0.3, 0.7], [1.0, 2.0], [0.1, 0.0], 1.0);
        let b = pbi([0.3, 0.7], [3.0, 6.0], [0.1, 0.0], 1.0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sectors_and_neighbourhoods() {
        let s = sector_weights(8, 4);
        assert_eq!(s.len(), 8);
        assert_eq!(s[0].weight, [0.0, 1.0]);
        assert_eq!(s[7].weight, [1.0, 0.0]);
        assert!((s[3].weight[0] - 3.0 / 7.0).abs() < 1e-15);
        assert_eq!(s[0].neighbors, vec![0, 1, 2, 3]);
        assert_eq!(s[7].neighbors, vec![7, 6, 5, 4]);
        assert_eq!(s[3].neighbors.len(), 4);
        assert_eq!(s[3].neighbors[0], 3);
        for w in &s {
            assert!((w.weight[0] + w.weight[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn parents_per_sector_rounds_up() {
        assert_eq!(MoeaddConfig::default().parents_per_sector(), 4);
    }
}
