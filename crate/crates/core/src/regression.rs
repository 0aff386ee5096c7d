//! Coefficient fitting: LASSO term filtering followed by a least-squares
//! refit on the surviving terms.
//!
//! All solvers work on standardized data. Every feature column and the
//! target are scaled to unit root-mean-square, so `λ` is dimensionless and
//! comparable across terms whose magnitudes differ by orders of magnitude.
//! Coefficients are always reported in the original scale.
//!
//! The LASSO objective in standardized space is
//!
//! ```text
//! ‖F a − y‖² / (2N) + λ ‖a‖₁
//! ```
//!
//! minimized by cyclic coordinate descent with soft-thresholding.

use nalgebra::{DMatrix, DVector};

use crate::derivatives::DerivativeTable;
use crate::error::{Error, Result};
use crate::representation::{Equation, Fit, Term};

/// Default sparsity weight (standardized units).
pub const DEFAULT_LAMBDA: f64 = 0.05;
/// Coordinate-descent stops once no coefficient moves more than this.
pub const CD_TOLERANCE: f64 = 1e-9;
pub const CD_MAX_SWEEPS: usize = 10_000;
/// Diagonal jitter added to the standardized normal equations.
pub const RIDGE_JITTER: f64 = 1e-12;
/// A term whose RMS over the mask is at or below this is the zero tensor.
pub const ZERO_TOLERANCE: f64 = 1e-8;
/// Resolution of the discrepancy. Residuals below it are round-off from the
/// fit, so all exactly satisfied equations score the same and complexity
/// decides between them.
pub const Q_OP_FLOOR: f64 = 1e-10;

/// Least-squares problem `F α ≈ y` with an L1 weight.
#[derive(Debug, Clone)]
pub struct RegressionProblem<'a> {
    features: Vec<&'a [f64]>,
    target: &'a [f64],
    lambda: f64,
}

impl<'a> RegressionProblem<'a> {
    pub fn new(features: Vec<&'a [f64]>, target: &'a [f64], lambda: f64) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::config("regression needs at least one feature column"));
        }
        let n = target.len();
        if features.iter().any(|c| c.len() != n) {
            return Err(Error::config("feature columns and target differ in length"));
        }
        if n < features.len() {
            return Err(Error::config(format!(
                "{n} rows cannot determine {} coefficients",
                features.len()
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!(
                "lambda must be a finite non-negative number, got {lambda}"
            )));
        }
        if target
            .iter()
            .chain(features.iter().flat_map(|c| c.iter()))
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("regression data"));
        }
        Ok(Self {
            features,
            target,
            lambda,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn moments(&self) -> Moments {
        let mut cols = self.features.clone();
        cols.push(self.target);
        Moments::from_columns(&cols)
    }

    /// `‖F α − y‖₂` in the original scale.
    pub fn residual_norm(&self, coefficients: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n_rows() {
            let pred: f64 = self.features.iter().zip(coefficients).map(|(c, a)| a * c[i]).sum();
            let r = pred - self.target[i];
            total += r * r;
        }
        total.sqrt()
    }
}

/// Raw cross products of a set of columns plus their RMS scales.
#[derive(Debug, Clone)]
struct Moments {
    n: usize,
    dim: usize,
    dots: Vec<f64>,
    scale: Vec<f64>,
}

impl Moments {
    fn from_columns(cols: &[&[f64]]) -> Self {
        let dim = cols.len();
        let n = cols[0].len();
        let mut dots = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in a..dim {
                let d: f64 = cols[a].iter().zip(cols[b]).map(|(x, y)| x * y).sum();
                dots[a * dim + b] = d;
                dots[b * dim + a] = d;
            }
        }
        let scale = (0..dim).map(|a| (dots[a * dim + a] / n as f64).sqrt()).collect();
        Self { n, dim, dots, scale }
    }

    fn is_zero(&self, col: usize) -> bool {
        self.scale[col] <= ZERO_TOLERANCE
    }

    /// Standardized Gram block and target correlations for `features`
    /// regressed on `target`.
    fn standardized(&self, features: &[usize], target: usize) -> (Vec<f64>, Vec<f64>) {
        let p = features.len();
        let nf = self.n as f64;
        let mut gram = vec![0.0; p * p];
        let mut corr = vec![0.0; p];
        for (a, &i) in features.iter().enumerate() {
            for (b, &j) in features.iter().enumerate() {
                gram[a * p + b] = self.dots[i * self.dim + j] / (nf * self.scale[i] * self.scale[j]);
            }
            corr[a] = self.dots[i * self.dim + target] / (nf * self.scale[i] * self.scale[target]);
        }
        (gram, corr)
    }
}

/// Coordinate-descent result in standardized coordinates.
#[derive(Debug, Clone)]
pub struct LassoTrace {
    pub sweeps: usize,
    /// Objective value after each sweep.
    pub objective: Vec<f64>,
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn lasso_objective(gram: &[f64], corr: &[f64], a: &[f64], lambda: f64) -> f64 {
    let p = a.len();
    let mut quad = 0.0;
    for i in 0..p {
        for j in 0..p {
            quad += a[i] * gram[i * p + j] * a[j];
        }
    }
    let lin: f64 = a.iter().zip(corr).map(|(x, c)| x * c).sum();
    let l1: f64 = a.iter().map(|x| x.abs()).sum();
    0.5 * (1.0 - 2.0 * lin + quad) + lambda * l1
}

fn coordinate_descent(gram: &[f64], corr: &[f64], lambda: f64) -> (Vec<f64>, LassoTrace) {
    let p = corr.len();
    let mut a = vec![0.0; p];
    let mut objective = Vec::new();
    let mut prev = lasso_objective(gram, corr, &a, lambda);
    let mut sweeps = 0;
    while sweeps < CD_MAX_SWEEPS {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            let g = gram[j * p + j];
            if g <= 0.0 {
                continue;
            }
            let partial: f64 = (0..p).filter(|&k| k != j).map(|k| gram[j * p + k] * a[k]).sum();
            let new = soft_threshold(corr[j] - partial, lambda) / g;
            max_change = max_change.max((new - a[j]).abs());
            a[j] = new;
        }
        let obj = lasso_objective(gram, corr, &a, lambda);
        debug_assert!(obj <= prev + 1e-12 * prev.abs().max(1.0), "LASSO objective increased");
        prev = obj;
        objective.push(obj);
        if max_change < CD_TOLERANCE {
            break;
        }
    }
    (a, LassoTrace { sweeps, objective })
}

fn least_squares(gram: &[f64], corr: &[f64], active: &[usize]) -> Vec<f64> {
    let p = corr.len();
    let mut a = vec![0.0; p];
    if active.is_empty() {
        return a;
    }
    let k = active.len();
    let m = DMatrix::from_fn(k, k, |r, c| {
        gram[active[r] * p + active[c]] + if r == c { RIDGE_JITTER } else { 0.0 }
    });
    let rhs = DVector::from_fn(k, |r, _| corr[active[r]]);
    let sol = match m.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => m.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(k)),
    };
    for (r, &j) in active.iter().enumerate() {
        a[j] = sol[r];
    }
    a
}

fn destandardize(moments: &Moments, features: &[usize], target: usize, a: &[f64]) -> Vec<f64> {
    features
        .iter()
        .zip(a)
        .map(|(&j, &aj)| {
            if aj == 0.0 {
                0.0
            } else {
                aj * moments.scale[target] / moments.scale[j]
            }
        })
        .collect()
}

/// LASSO coefficients (original scale) plus the coordinate-descent trace.
pub fn lasso_solve(problem: &RegressionProblem) -> (Vec<f64>, LassoTrace) {
    let m = problem.moments();
    let target = problem.n_features();
    let usable: Vec<usize> = (0..target).filter(|&j| !m.is_zero(j)).collect();
    let mut coef = vec![0.0; target];
    if m.is_zero(target) || usable.is_empty() {
        return (
            coef,
            LassoTrace {
                sweeps: 0,
                objective: Vec::new(),
            },
        );
    }
    let (gram, corr) = m.standardized(&usable, target);
    let (a, trace) = coordinate_descent(&gram, &corr, problem.lambda);
    for (&j, v) in usable.iter().zip(destandardize(&m, &usable, target, &a)) {
        coef[j] = v;
    }
    (coef, trace)
}

/// Minimizes the LASSO objective by coordinate descent on standardized
/// columns. In the original scale the objective is
///
/// ```text
/// ‖y − F α‖² / (2 n s_y²)  +  λ Σ_j (s_j / s_y) |α_j|
/// ```
///
/// where `s` denotes the RMS of a column. Zero-norm columns receive a zero
/// coefficient.
pub fn lasso_fit(problem: &RegressionProblem) -> Vec<f64> {
    lasso_solve(problem).0
}

/// Ordinary least squares restricted to `active` columns; every other
/// coefficient is exactly zero.
pub fn ols_refit(problem: &RegressionProblem, active: &[usize]) -> Result<Vec<f64>> {
    let p = problem.n_features();
    if let Some(&bad) = active.iter().find(|&&j| j >= p) {
        return Err(Error::config(format!("active index {bad} out of range")));
    }
    let m = problem.moments();
    let mut coef = vec![0.0; p];
    if m.is_zero(p) {
        return Ok(coef);
    }
    let usable: Vec<usize> = active.iter().copied().filter(|&j| !m.is_zero(j)).collect();
    if usable.is_empty() {
        return Ok(coef);
    }
    let (gram, corr) = m.standardized(&usable, p);
    let all: Vec<usize> = (0..usable.len()).collect();
    let a = least_squares(&gram, &corr, &all);
    for (&j, v) in usable.iter().zip(destandardize(&m, &usable, p, &a)) {
        coef[j] = v;
    }
    Ok(coef)
}

/// Result of fitting a set of term value vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TermFit {
    pub rhs_index: usize,
    /// Coefficients of the non-RHS terms in order.
    pub coefficients: Vec<f64>,
    /// RMS operator discrepancy of the committed RHS choice.
    pub q_op: f64,
    pub rhs_is_zero: bool,
    pub degenerate: bool,
}

/// RMS of `Σ c_i T_i` over the value vectors.
pub fn residual_rms(values: &[&[f64]], coefficients: &[f64]) -> f64 {
    let n = values[0].len();
    let mut total = 0.0;
    for i in 0..n {
        let r: f64 = values.iter().zip(coefficients).map(|(v, c)| c * v[i]).sum();
        total += r * r;
    }
    (total / n as f64).sqrt()
}

/// [`residual_rms`] raised to [`Q_OP_FLOOR`].
pub fn discrepancy(values: &[&[f64]], coefficients: &[f64]) -> f64 {
    residual_rms(values, coefficients).max(Q_OP_FLOOR)
}

/// Fits every possible RHS choice (LASSO, then least-squares refit on the
/// LASSO support) and commits the one with the smallest discrepancy.
///
/// Zero-valued terms are never used as the RHS. Ties go to the lower index.
pub fn fit_term_values(values: &[&[f64]], lambda: f64) -> Result<TermFit> {
    let m = values.len();
    if m < 2 {
        return Err(Error::config("need at least two terms to fit"));
    }
    if values.iter().flat_map(|v| v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("term values"));
    }
    let moments = Moments::from_columns(values);
    let mut best: Option<TermFit> = None;
    for r in 0..m {
        if moments.is_zero(r) {
            continue;
        }
        let others: Vec<usize> = (0..m).filter(|&j| j != r).collect();
        let usable: Vec<usize> = others.iter().copied().filter(|&j| !moments.is_zero(j)).collect();
        let mut coef = vec![0.0; m - 1];
        if !usable.is_empty() {
            let (gram, corr) = moments.standardized(&usable, r);
            let (a, _) = coordinate_descent(&gram, &corr, lambda);
            let active: Vec<usize> = (0..usable.len()).filter(|&k| a[k] != 0.0).collect();
            let refit = least_squares(&gram, &corr, &active);
            let alpha = destandardize(&moments, &usable, r, &refit);
            for (&j, v) in usable.iter().zip(alpha) {
                let slot = if j < r { j } else { j - 1 };
                coef[slot] = v;
            }
        }
        let mut full: Vec<f64> = Vec::with_capacity(m);
        let mut it = coef.iter();
        for j in 0..m {
            full.push(if j == r { -1.0 } else { *it.next().unwrap() });
        }
        let q = discrepancy(values, &full);
        if best.as_ref().is_none_or(|b| q < b.q_op) {
            best = Some(TermFit {
                rhs_index: r,
                coefficients: coef,
                q_op: q,
                rhs_is_zero: false,
                degenerate: false,
            });
        }
    }
    Ok(best.unwrap_or(TermFit {
        rhs_index: 0,
        coefficients: vec![0.0; m - 1],
        q_op: f64::INFINITY,
        rhs_is_zero: true,
        degenerate: true,
    }))
}

/// Fits `terms` given their values, processing them in canonical term order
/// so that the outcome does not depend on how the list is arranged.
pub(crate) fn fit_terms_ordered(terms: &[Term], values: &[&[f64]], lambda: f64) -> Result<TermFit> {
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[a].cmp(&terms[b]));
    let sorted: Vec<&[f64]> = order.iter().map(|&i| values[i]).collect();
    let fit = fit_term_values(&sorted, lambda)?;
    let mut sorted_full = Vec::with_capacity(terms.len());
    let mut it = fit.coefficients.iter();
    for k in 0..terms.len() {
        sorted_full.push(if k == fit.rhs_index { -1.0 } else { *it.next().unwrap() });
    }
    let rhs_index = order[fit.rhs_index];
    let mut full = vec![0.0; terms.len()];
    for (k, &i) in order.iter().enumerate() {
        full[i] = sorted_full[k];
    }
    let coefficients = full
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != rhs_index)
        .map(|(_, c)| *c)
        .collect();
    Ok(TermFit {
        rhs_index,
        coefficients,
        ..fit
    })
}

/// Attaches a fit to an equation given precomputed term values.
pub(crate) fn apply_fit(equation: &Equation, fit: &TermFit) -> Result<Equation> {
    let eq = equation.with_rhs(fit.rhs_index)?;
    Ok(eq.fitted(Fit {
        coefficients: fit.coefficients.clone(),
        rhs_is_zero: fit.rhs_is_zero,
        degenerate: fit.degenerate,
    }))
}

/// Fits `equation` on the data in `table`, choosing the RHS term that gives
/// the smallest operator discrepancy. Returns the fitted equation and its
/// RMS discrepancy (`+∞` if every term is the zero tensor).
pub fn fit_equation(equation: &Equation, table: &DerivativeTable, lambda: f64) -> Result<(Equation, f64)> {
    let owned: Vec<Vec<f64>> = equation
        .terms()
        .iter()
        .map(|t| t.evaluate(table))
        .collect::<Result<_>>()?;
    let values: Vec<&[f64]> = owned.iter().map(Vec::as_slice).collect();
    let fit = fit_terms_ordered(equation.terms(), &values, lambda)?;
    Ok((apply_fit(equation, &fit)?, fit.q_op))
}
