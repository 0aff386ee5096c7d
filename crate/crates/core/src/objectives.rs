//! Quality metrics of fitted equations: operator discrepancy and token
//! complexity, plus a caching evaluator used by the optimizers.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use crate::derivatives::DerivativeTable;
use crate::error::{Error, Result};
use crate::regression::{apply_fit, discrepancy, fit_terms_ordered, ZERO_TOLERANCE};
use crate::representation::{Equation, Term};

/// The two minimized objectives. `q_op` is `+∞` for degenerate equations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Objectives {
    pub q_op: f64,
    pub complexity: usize,
}

impl Objectives {
    pub fn as_vector(&self) -> [f64; 2] {
        [self.q_op, self.complexity as f64]
    }
}

/// A fitted equation with its objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub equation: Equation,
    pub objectives: Objectives,
}

impl Individual {
    pub fn q_op(&self) -> f64 {
        self.objectives.q_op
    }

    pub fn complexity(&self) -> usize {
        self.objectives.complexity
    }

    /// Canonical rendering at 6 significant digits.
    pub fn canonical(&self) -> String {
        self.equation
            .canonical_form()
            .map(|c| c.to_string())
            .unwrap_or_else(|_| "<unfitted>".into())
    }
}

/// RMS over the table mask of `Σ α_i T_i − T_rhs` for a fitted equation,
/// floored at [`Q_OP_FLOOR`](crate::regression::Q_OP_FLOOR).
pub fn eval_q_op(equation: &Equation, table: &DerivativeTable) -> Result<f64> {
    let coefs = equation.full_coefficients()?;
    if equation.is_degenerate() {
        return Ok(f64::INFINITY);
    }
    let owned: Vec<Vec<f64>> = equation
        .terms()
        .iter()
        .map(|t| t.evaluate(table))
        .collect::<Result<_>>()?;
    if owned.iter().all(|v| rms(v) <= ZERO_TOLERANCE) {
        return Ok(f64::INFINITY);
    }
    let values: Vec<&[f64]> = owned.iter().map(Vec::as_slice).collect();
    Ok(discrepancy(&values, &coefs))
}

/// Number of tokens in active terms: non-RHS terms count when their
/// coefficient is nonzero, the RHS term counts unless it is the zero tensor.
pub fn eval_complexity(equation: &Equation) -> usize {
    let (coefs, rhs_zero) = match equation.fit() {
        Some(f) => (Some(&f.coefficients), f.rhs_is_zero),
        None => (None, false),
    };
    let mut k = coefs.map(|c| c.iter());
    equation
        .terms()
        .iter()
        .enumerate()
        .map(|(i, term)| {
            let active = if i == equation.rhs_index() {
                !rhs_zero
            } else {
                k.as_mut().is_none_or(|it| *it.next().unwrap() != 0.0)
            };
            if active {
                term.len()
            } else {
                0
            }
        })
        .sum()
}

pub(crate) fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

const CACHE_LIMIT: usize = 512;

/// Fits and scores equations against one dataset, caching term values and
/// counting evaluations. One evaluator belongs to one optimization run.
pub struct Evaluator<'a> {
    table: &'a DerivativeTable,
    lambda: f64,
    cache: RefCell<HashMap<Term, Rc<Vec<f64>>>>,
    evaluations: Cell<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(table: &'a DerivativeTable, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be non-negative, got {lambda}")));
        }
        Ok(Self {
            table,
            lambda,
            cache: RefCell::new(HashMap::new()),
            evaluations: Cell::new(0),
        })
    }

    pub fn table(&self) -> &DerivativeTable {
        self.table
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of equations fitted so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }

    pub fn term_values(&self, term: &Term) -> Result<Rc<Vec<f64>>> {
        if let Some(v) = self.cache.borrow().get(term) {
            return Ok(v.clone());
        }
        let v = Rc::new(term.evaluate(self.table)?);
        let mut cache = self.cache.borrow_mut();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(term.clone(), v.clone());
        Ok(v)
    }

    /// Fits coefficients (choosing the RHS) and computes both objectives.
    pub fn evaluate(&self, equation: &Equation) -> Result<Individual> {
        let owned: Vec<Rc<Vec<f64>>> = equation
            .terms()
            .iter()
            .map(|t| self.term_values(t))
            .collect::<Result<_>>()?;
        let values: Vec<&[f64]> = owned.iter().map(|v| v.as_slice()).collect();
        let fit = fit_terms_ordered(equation.terms(), &values, self.lambda)?;
        self.evaluations.set(self.evaluations.get() + 1);
        let equation = apply_fit(equation, &fit)?;
        let complexity = eval_complexity(&equation);
        Ok(Individual {
            equation,
            objectives: Objectives {
                q_op: fit.q_op,
                complexity,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivatives::DerivativeSpec;
    use crate::representation::{Fit, Token};

    fn term(spec: DerivativeSpec) -> Term {
        Term::single(Token::d(spec))
    }

    #[test]
    fn kdv_complexity_is_six() {
        let eq = Equation::with_coefficients(
            vec![
                term(DerivativeSpec::t(1)),
                Term::new(vec![Token::U, Token::d(DerivativeSpec::x(1))]).unwrap(),
                term(DerivativeSpec::x(3)),
                Term::new(vec![Token::cos_t(1.0, 0.0), Token::sin_t(1.0, 0.0)]).unwrap(),
            ],
            0,
            vec![-6.0, -1.0, 1.0],
        )
        .unwrap();
        assert_eq!(eval_complexity(&eq), 6);
    }

    #[test]
    fn zero_coefficients_do_not_count() {
        let eq = Equation::with_coefficients(
            vec![
                term(DerivativeSpec::x(2)),
                term(DerivativeSpec::t(1)),
                term(DerivativeSpec::FIELD),
            ],
            0,
            vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(eval_complexity(&eq), 1);
    }

    #[test]
    fn empty_model_has_zero_complexity() {
        let eq = Equation::new(vec![term(DerivativeSpec::x(2)), term(DerivativeSpec::t(1))], 0)
            .unwrap()
            .fitted(Fit {
                coefficients: vec![0.0],
                rhs_is_zero: true,
                degenerate: true,
            });
        assert_eq!(eval_complexity(&eq), 0);
    }
}
