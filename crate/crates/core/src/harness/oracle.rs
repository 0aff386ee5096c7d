use itertools::Itertools;
use rayon::prelude::*;

use crate::derivatives::DerivativeTable;
use crate::error::{Error, Result};
use crate::objectives::{eval_complexity, Individual, Objectives};
use crate::regression::{apply_fit, fit_terms_ordered};
use crate::representation::{Equation, Term, TokenPool};

/// Largest number of candidate equations the oracle will fit.
pub const ORACLE_BUDGET: u128 = 1_000_000;

/// Best equation found by exhaustive search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best: Individual,
    /// Number of term subsets fitted.
    pub enumerated: u128,
    /// Number of distinct candidate terms.
    pub terms: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of equations with `2..=max_terms` distinct terms drawn from
/// `n_terms` candidates.
pub fn equation_count(n_terms: usize, max_terms: usize) -> u128 {
    (2..=max_terms as u128).map(|k| binomial(n_terms as u128, k)).sum()
}

/// Fits every equation expressible with the pool (parametric tokens on the
/// pool's lattice) and returns the one with the smallest discrepancy.
/// Ties go to lower complexity, then to enumeration order.
pub fn brute_force_oracle(table: &DerivativeTable, pool: &TokenPool, lambda: f64) -> Result<OracleResult> {
    pool.validate()?;
    let terms = pool.enumerate_terms();
    let count = equation_count(terms.len(), pool.max_terms);
    if count > ORACLE_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            limit: ORACLE_BUDGET,
        });
    }
    if count == 0 {
        return Err(Error::config("token pool admits fewer than two terms"));
    }
    let values: Vec<Vec<f64>> = terms.iter().map(|t| t.evaluate(table)).collect::<Result<_>>()?;

    let subsets: Vec<Vec<usize>> = (2..=pool.max_terms.min(terms.len()))
        .flat_map(|k| (0..terms.len()).combinations(k))
        .collect();
    let scored: Vec<(usize, f64, usize)> = subsets
        .par_iter()
        .enumerate()
        .map(|(i, subset)| -> Result<(usize, f64, usize)> {
            let ts: Vec<Term> = subset.iter().map(|&j| terms[j].clone()).collect();
            let vs: Vec<&[f64]> = subset.iter().map(|&j| values[j].as_slice()).collect();
            let fit = fit_terms_ordered(&ts, &vs, lambda)?;
            let eq = apply_fit(&Equation::new(ts, 0)?, &fit)?;
            Ok((i, fit.q_op, eval_complexity(&eq)))
        })
        .collect::<Result<_>>()?;
    let &(winner, _, _) = scored
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.cmp(&b.2)).then(a.0.cmp(&b.0)))
        .expect("at least one subset");

    let subset = &subsets[winner];
    let ts: Vec<Term> = subset.iter().map(|&j| terms[j].clone()).collect();
    let vs: Vec<&[f64]> = subset.iter().map(|&j| values[j].as_slice()).collect();
    let fit = fit_terms_ordered(&ts, &vs, lambda)?;
    let equation = apply_fit(&Equation::new(ts, 0)?, &fit)?;
    let complexity = eval_complexity(&equation);
    Ok(OracleResult {
        best: Individual {
            equation,
            objectives: Objectives {
                q_op: fit.q_op,
                complexity,
            },
        },
        enumerated: count,
        terms: terms.len(),
    })
}
