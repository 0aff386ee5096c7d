use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivatives::DerivativeTable;
use crate::error::{Error, Result};
use crate::objectives::{Evaluator, Individual};
use crate::operators::{crossover, mutate, OperatorConfig};
use crate::regression::DEFAULT_LAMBDA;
use crate::representation::TokenPool;

use super::{better, reference_point, ParetoArchive, TraceRow};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SingleObjectiveConfig {
    pub population: usize,
    pub iterations: usize,
    pub tournament_size: usize,
    pub operators: OperatorConfig,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for SingleObjectiveConfig {
    fn default() -> Self {
        Self {
            population: 8,
            iterations: 64,
            tournament_size: 2,
            operators: OperatorConfig::default(),
            lambda: DEFAULT_LAMBDA,
            seed: 0,
        }
    }
}

impl SingleObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("population must be at least 2"));
        }
        if self.tournament_size == 0 {
            return Err(Error::config("tournament size must be at least 1"));
        }
        self.operators.validate()
    }
}

#[derive(Debug, Clone)]
pub struct SingleObjectiveResult {
    /// Lowest-discrepancy individual ever evaluated.
    pub best: Individual,
    pub population: Vec<Individual>,
    /// Non-dominated set of everything evaluated, for comparison with the
    /// multi-objective search.
    pub archive: ParetoArchive,
    pub trace: Vec<TraceRow>,
    pub evaluations: usize,
}

fn tournament<'p, R: Rng>(pop: &'p [Individual], size: usize, rng: &mut R) -> &'p Individual {
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.random_range(0..pop.len())];
        if better(c, best) {
            best = c;
        }
    }
    best
}

fn best_of(pop: &[Individual]) -> &Individual {
    pop.iter()
        .reduce(|a, b| if better(b, a) { b } else { a })
        .expect("non-empty population")
}

/// Generational EA with tournament selection and single-individual elitism.
pub fn run_single_objective(
    table: &DerivativeTable,
    pool: &TokenPool,
    config: &SingleObjectiveConfig,
) -> Result<SingleObjectiveResult> {
    config.validate()?;
    pool.validate()?;
    let evaluator = Evaluator::new(table, config.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut archive = ParetoArchive::new();

    let mut population = Vec::with_capacity(config.population);
    for _ in 0..config.population {
        let eq = pool.random_equation(&mut rng)?;
        let ind = evaluator.evaluate(&eq)?;
        archive.insert(&ind);
        population.push(ind);
    }
    let reference = reference_point(&population, pool.max_terms * pool.max_factors);
    let mut best = best_of(&population).clone();
    let mut trace = vec![TraceRow {
        iteration: 0,
        evaluations: evaluator.evaluations(),
        best_q_op: best.q_op(),
        archive_size: archive.len(),
        hypervolume: archive.hypervolume(reference),
    }];

    for iteration in 1..=config.iterations {
        let elite = best_of(&population).clone();
        let mut next = Vec::with_capacity(config.population);
        next.push(elite);
        while next.len() < config.population {
            let pa = tournament(&population, config.tournament_size, &mut rng);
            let pb = tournament(&population, config.tournament_size, &mut rng);
            let (ca, cb) = crossover(&pa.equation, &pb.equation, &config.operators, &mut rng);
            for child in [ca, cb] {
                if next.len() == config.population {
                    break;
                }
                let child = mutate(&child, pool, &config.operators, &mut rng);
                let ind = evaluator.evaluate(&child)?;
                archive.insert(&ind);
                if better(&ind, &best) {
                    best = ind.clone();
                }
                next.push(ind);
            }
        }
        population = next;
        trace.push(TraceRow {
            iteration,
            evaluations: evaluator.evaluations(),
            best_q_op: best.q_op(),
            archive_size: archive.len(),
            hypervolume: archive.hypervolume(reference),
        });
    }

    Ok(SingleObjectiveResult {
        best,
        population,
        archive,
        trace,
        evaluations: evaluator.evaluations(),
    })
}
