//! Structure-changing evolutionary operators.
//!
//! Mutation acts per term: each term is touched with probability
//! `mutation_rate` and then replaced wholesale, has one token swapped, or
//! gets a Gaussian nudge on one parametric-token parameter. Crossover pairs
//! the terms of two parents into three groups:
//!
//! 1. terms identical in both parents, copied unchanged;
//! 2. terms that differ only in parametric-token parameters, whose
//!    parameters are redrawn from the interval between the parents' values;
//! 3. terms unique to one parent, randomly paired and swapped wholesale.
//!
//! Operators never touch the RHS marking or the coefficients; children come
//! back unfitted.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::representation::{Bounds, Equation, Parametric, Term, Token, TokenPool, MAX_RETRIES};

/// Operator probabilities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OperatorConfig {
    /// Probability that a crossover-eligible term pair is affected.
    pub crossover_rate: f64,
    /// Probability that a given term is mutated.
    pub mutation_rate: f64,
    /// Standard deviation of parameter jitter as a fraction of the
    /// parameter's range.
    pub param_sigma: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            crossover_rate: 0.3,
            mutation_rate: 0.6,
            param_sigma: 0.1,
        }
    }
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |p: f64| (0.0..=1.0).contains(&p);
        if !in_unit(self.crossover_rate) || !in_unit(self.mutation_rate) {
            return Err(Error::config("operator rates must lie in [0, 1]"));
        }
        if !(self.param_sigma > 0.0 && self.param_sigma.is_finite()) {
            return Err(Error::config("param_sigma must be positive"));
        }
        Ok(())
    }
}

/// `value + sigma * width(bounds) * z`, clamped to the bounds.
pub fn jitter(value: f64, bounds: Bounds, sigma: f64, z: f64) -> f64 {
    bounds.clamp(value + sigma * bounds.width() * z)
}

#[derive(Clone, Copy)]
enum Action {
    Replace,
    SwapToken,
    Jitter,
}

fn jitter_term<R: Rng + ?Sized>(term: &Term, pool: &TokenPool, sigma: f64, rng: &mut R) -> Option<Term> {
    let params: Vec<usize> = term
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.parametric().is_some())
        .map(|(i, _)| i)
        .collect();
    let &idx = params.as_slice().choose(rng)?;
    let p = *term.tokens()[idx].parametric()?;
    let mut choices = Vec::with_capacity(2);
    if pool.frequency.width() > 0.0 {
        choices.push(true);
    }
    if pool.phase.width() > 0.0 {
        choices.push(false);
    }
    let &freq = choices.as_slice().choose(rng)?;
    let z: f64 = StandardNormal.sample(rng);
    let np = if freq {
        Parametric::new(p.family, p.axis, jitter(p.frequency, pool.frequency, sigma, z), p.phase)
    } else {
        Parametric::new(p.family, p.axis, p.frequency, jitter(p.phase, pool.phase, sigma, z))
    };
    let mut tokens = term.tokens().to_vec();
    tokens[idx] = Token::Parametric(np);
    Term::new(tokens).ok()
}

fn mutate_term<R: Rng + ?Sized>(
    terms: &[Term],
    index: usize,
    pool: &TokenPool,
    config: &OperatorConfig,
    rng: &mut R,
) -> Option<Term> {
    let original = &terms[index];
    let mut actions = vec![Action::Replace, Action::SwapToken];
    if original.has_parametric() {
        actions.push(Action::Jitter);
    }
    for _ in 0..MAX_RETRIES {
        let candidate = match *actions.as_slice().choose(rng)? {
            Action::Replace => pool.random_term(rng).ok(),
            Action::SwapToken => {
                let mut tokens = original.tokens().to_vec();
                let k = rng.random_range(0..tokens.len());
                tokens[k] = pool.sample_token(rng);
                Term::new(tokens).ok()
            }
            Action::Jitter => jitter_term(original, pool, config.param_sigma, rng),
        };
        let Some(candidate) = candidate else { continue };
        if candidate != *original && pool.admits(&candidate) && !terms.contains(&candidate) {
            return Some(candidate);
        }
    }
    None
}

/// Mutates each term independently with probability `mutation_rate`.
///
/// The result keeps the RHS index and satisfies every equation invariant.
/// A term for which no valid replacement is found within the retry budget is
/// left as it was.
pub fn mutate<R: Rng + ?Sized>(
    equation: &Equation,
    pool: &TokenPool,
    config: &OperatorConfig,
    rng: &mut R,
) -> Equation {
    let mut terms = equation.terms().to_vec();
    for i in 0..terms.len() {
        if !rng.random_bool(config.mutation_rate) {
            continue;
        }
        match mutate_term(&terms, i, pool, config, rng) {
            Some(t) => terms[i] = t,
            None => log::warn!("mutation of term {} gave up after {MAX_RETRIES} attempts", terms[i]),
        }
    }
    Equation::new(terms, equation.rhs_index()).unwrap_or_else(|_| equation.clone().into_unfitted())
}

fn blend_parameters<R: Rng + ?Sized>(a: &Term, b: &Term, rng: &mut R) -> Option<Term> {
    let tokens = a
        .tokens()
        .iter()
        .zip(b.tokens())
        .map(|(ta, tb)| match (ta, tb) {
            (Token::Parametric(pa), Token::Parametric(pb)) => {
                let draw = |x: f64, y: f64, rng: &mut R| {
                    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                    if lo == hi {
                        lo
                    } else {
                        rng.random_range(lo..=hi)
                    }
                };
                let f = draw(pa.frequency, pb.frequency, rng);
                let p = draw(pa.phase, pb.phase, rng);
                Token::Parametric(Parametric::new(pa.family, pa.axis, f, p))
            }
            _ => *ta,
        })
        .collect();
    Term::new(tokens).ok()
}

fn replace_if_unique(terms: &mut [Term], index: usize, candidate: Term) {
    if !terms.iter().enumerate().any(|(i, t)| i != index && *t == candidate) {
        terms[index] = candidate;
    }
}

/// Term-level crossover of two parents. Children keep their parent's RHS
/// index.
pub fn crossover<R: Rng + ?Sized>(
    a: &Equation,
    b: &Equation,
    config: &OperatorConfig,
    rng: &mut R,
) -> (Equation, Equation) {
    let ta = a.terms();
    let tb = b.terms();
    let mut ca = ta.to_vec();
    let mut cb = tb.to_vec();

    // terms present in both parents stay put
    let mut unique_a: Vec<usize> = (0..ta.len()).filter(|&i| !tb.contains(&ta[i])).collect();
    let mut unique_b: Vec<usize> = (0..tb.len()).filter(|&j| !ta.contains(&tb[j])).collect();

    // same structure, different parameters
    let mut pairs = Vec::new();
    for &i in &unique_a {
        if !ta[i].has_parametric() {
            continue;
        }
        let shape = ta[i].shape();
        if let Some(&j) = unique_b
            .iter()
            .find(|&&j| !pairs.iter().any(|&(_, pj)| pj == j) && tb[j].shape() == shape)
        {
            pairs.push((i, j));
        }
    }
    for &(i, j) in &pairs {
        if rng.random_bool(config.crossover_rate) {
            if let Some(t) = blend_parameters(&ta[i], &tb[j], rng) {
                replace_if_unique(&mut ca, i, t);
            }
            if let Some(t) = blend_parameters(&tb[j], &ta[i], rng) {
                replace_if_unique(&mut cb, j, t);
            }
        }
    }
    unique_a.retain(|i| !pairs.iter().any(|(pi, _)| pi == i));
    unique_b.retain(|j| !pairs.iter().any(|(_, pj)| pj == j));

    // unique terms: random pairing, wholesale exchange
    unique_a.shuffle(rng);
    unique_b.shuffle(rng);
    for (&i, &j) in unique_a.iter().zip(&unique_b) {
        if !rng.random_bool(config.crossover_rate) {
            continue;
        }
        let into_a = tb[j].clone();
        let into_b = ta[i].clone();
        let ok_a = !ca.iter().enumerate().any(|(k, t)| k != i && *t == into_a);
        let ok_b = !cb.iter().enumerate().any(|(k, t)| k != j && *t == into_b);
        if ok_a && ok_b {
            ca[i] = into_a;
            cb[j] = into_b;
        }
    }

    let child_a = Equation::new(ca, a.rhs_index()).unwrap_or_else(|_| a.clone().into_unfitted());
    let child_b = Equation::new(cb, b.rhs_index()).unwrap_or_else(|_| b.clone().into_unfitted());
    (child_a, child_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivatives::DerivativeSpec;
    use crate::grid::Axis;
    use crate::representation::Family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool() -> TokenPool {
        TokenPool::from_derivatives(&[
            DerivativeSpec::FIELD,
            DerivativeSpec::t(1),
            DerivativeSpec::x(1),
            DerivativeSpec::x(2),
        ])
    }

    fn single(spec: DerivativeSpec) -> Term {
        Term::single(Token::d(spec))
    }

    #[test]
    fn zero_rate_is_identity() {
        let p = pool();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let eq = p.random_equation(&mut rng).unwrap();
        let cfg = OperatorConfig {
            mutation_rate: 0.0,
            ..Default::default()
        };
        assert_eq!(mutate(&eq, &p, &cfg, &mut rng), eq);
    }

    #[test]
    fn full_rate_changes_something() {
        let p = pool();
        let cfg = OperatorConfig {
            mutation_rate: 1.0,
            ..Default::default()
        };
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eq = p.random_equation(&mut rng).unwrap();
            let m = mutate(&eq, &p, &cfg, &mut rng);
            assert_ne!(m.terms(), eq.terms(), "seed {seed}");
            assert_eq!(m.rhs_index(), eq.rhs_index());
        }
    }

    #[test]
    fn jitter_arithmetic() {
        let b = Bounds::new(0.5, 4.0);
        assert!((jitter(2.0, b, 0.1, 1.0) - 2.35).abs() < 1e-12);
        assert!((jitter(2.0, b, 0.1, -0.5) - 1.825).abs() < 1e-12);
        assert_eq!(jitter(2.0, b, 0.1, 100.0), 4.0);
        assert_eq!(jitter(2.0, b, 0.1, -100.0), 0.5);
    }

    #[test]
    fn identical_parents_give_identical_children() {
        let p = pool();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eq = p.random_equation(&mut rng).unwrap();
        let cfg = OperatorConfig {
            crossover_rate: 1.0,
            ..Default::default()
        };
        let (a, b) = crossover(&eq, &eq, &cfg, &mut rng);
        assert_eq!(a, eq);
        assert_eq!(b, eq);
    }

    #[test]
    fn parameter_blend_stays_between_parents() {
        let mut pool = pool().with_parametric(Family::Sin, Axis::Time);
        pool.frequency = Bounds::new(0.5, 4.0);
        let cfg = OperatorConfig {
            crossover_rate: 1.0,
            ..Default::default()
        };
        let ux = single(DerivativeSpec::x(1));
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Equation::new(
                vec![ux.clone(), Term::new(vec![Token::U, Token::sin_t(1.0, 0.0)]).unwrap()],
                0,
            )
            .unwrap();
            let b = Equation::new(
                vec![ux.clone(), Term::new(vec![Token::U, Token::sin_t(2.0, 0.0)]).unwrap()],
                1,
            )
            .unwrap();
            let (ca, cb) = crossover(&a, &b, &cfg, &mut rng);
            for child in [&ca, &cb] {
                assert!(child.terms().contains(&ux));
                let f = child
                    .terms()
                    .iter()
                    .flat_map(|t| t.tokens())
                    .find_map(|t| t.parametric().map(|p| p.frequency))
                    .unwrap();
                assert!((1.0..=2.0).contains(&f), "{f}");
            }
        }
    }

    #[test]
    fn unique_terms_are_exchanged() {
        let cfg = OperatorConfig {
            crossover_rate: 1.0,
            ..Default::default()
        };
        let ut = single(DerivativeSpec::t(1));
        let uxx = single(DerivativeSpec::x(2));
        let uux = Term::new(vec![Token::U, Token::d(DerivativeSpec::x(1))]).unwrap();
        let a = Equation::new(vec![ut.clone(), uxx.clone()], 0).unwrap();
        let b = Equation::new(vec![ut.clone(), uux.clone()], 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (ca, cb) = crossover(&a, &b, &cfg, &mut rng);
        assert_eq!(ca.terms(), &[ut.clone(), uux]);
        assert_eq!(cb.terms(), &[ut, uxx]);
    }

    #[test]
    fn config_validation() {
        assert!(OperatorConfig::default().validate().is_ok());
        assert!(OperatorConfig {
            mutation_rate: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(OperatorConfig {
            param_sigma: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
