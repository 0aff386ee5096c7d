//! Sparse regression of one term on the others along a range of penalties.
//!
//! The wave field obeys `u_tt = 0.04 u_xx`; adding `u` as a decoy feature
//! shows the penalty pruning it while the true coefficient survives.

use eqsearch::derivatives::DerivativeSpec;
use eqsearch::regression::{lasso_solve, ols_refit, RegressionProblem};
use eqsearch::representation::{Term, Token};
use eqsearch::synthetic::{BenchmarkCase, BenchmarkName};

fn main() -> eqsearch::Result<()> {
    let case = BenchmarkCase::generate(BenchmarkName::Wave, 101, 101)?;
    let table = case.table(true)?;
    let eval = |spec| Term::single(Token::d(spec)).evaluate(&table);
    let target = eval(DerivativeSpec::t(2))?;
    let u_xx = eval(DerivativeSpec::x(2))?;
    let u = eval(DerivativeSpec::FIELD)?;

    println!("target d2u/dt2, features [d2u/dx2, u]");
    println!(
        "{:>8} {:>12} {:>12} {:>7} {:>12} {:>12}",
        "lambda", "lasso xx", "lasso u", "sweeps", "refit xx", "refit u"
    );
    for lambda in [0.0, 0.001, 0.01, 0.05, 0.2, 0.5, 1.0] {
        let problem = RegressionProblem::new(vec![&u_xx, &u], &target, lambda)?;
        let (coef, trace) = lasso_solve(&problem);
        let active: Vec<usize> = (0..coef.len()).filter(|&j| coef[j] != 0.0).collect();
        let refit = ols_refit(&problem, &active)?;
        println!(
            "{lambda:>8} {:>12.6} {:>12.6} {:>7} {:>12.6} {:>12.6}",
            coef[0], coef[1], trace.sweeps, refit[0], refit[1]
        );
    }
    Ok(())
}
