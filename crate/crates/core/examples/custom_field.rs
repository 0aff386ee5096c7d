//! Discovery on a field that is not one of the built-in benchmarks: the heat
//! equation `u_t = 0.5 u_xx`, sampled from a two-mode exact solution.
//!
//! With closed-form derivatives both optimizers recover the equation. The
//! second half repeats the search on finite differences, where the
//! discrepancy metric has two blind spots worth knowing about. The square of
//! the true equation leaves a residual equal to the squared differencing
//! error. And since the differencing error of each sine mode is proportional
//! to the mode itself, `u` can be rebuilt from the near-cancelling
//! combination `u_t - 0.5 u_xx` with very large coefficients.

use std::sync::Arc;

use eqsearch::derivatives::{
    analytic_table, build_table, AnalyticDerivatives, ClosedForm, DerivativeSpec, DerivativeTable,
};
use eqsearch::grid::{Axis, Field, Grid};
use eqsearch::harness::{discover, Mode, RunSettings};
use eqsearch::operators::OperatorConfig;
use eqsearch::regression::DEFAULT_LAMBDA;
use eqsearch::representation::TokenPool;

/// A derivative of `amp · e^{-k² t/2} sin(kx)`.
fn mode(k: f64, amp: f64, spec: DerivativeSpec) -> ClosedForm {
    let rate = -0.5 * k * k;
    let n = spec.order() as i32;
    match spec.axis() {
        Axis::Time => Arc::new(move |t, x| amp * rate.powi(n) * (rate * t).exp() * (k * x).sin()),
        Axis::Space => {
            let shift = n as f64 * std::f64::consts::FRAC_PI_2;
            Arc::new(move |t, x| amp * k.powi(n) * (rate * t).exp() * (k * x + shift).sin())
        }
    }
}

fn main() -> eqsearch::Result<()> {
    let grid = Arc::new(Grid::uniform([0.0, 1.0], [0.0, std::f64::consts::PI], 81, 81)?);
    let pool = TokenPool::parse("u,du/dt,du/dx,d2u/dx2;factors=2;terms=4")?;

    let mut formulas = AnalyticDerivatives::new();
    for spec in pool.required_specs() {
        let (a, b) = (mode(1.0, 1.0, spec), mode(2.0, 0.3, spec));
        formulas.insert(spec, Arc::new(move |t, x| a(t, x) + b(t, x)) as ClosedForm);
    }
    let exact = analytic_table(&formulas, &pool.required_specs(), grid.clone())?;
    println!("closed-form derivatives");
    search(&exact, &pool)?;

    let u = formulas[&DerivativeSpec::FIELD].clone();
    let field = Field::from_fn(grid, |t, x| u(t, x))?;
    for spec in [
        "u,du/dt,du/dx,d2u/dx2;factors=2;terms=4",
        "u,du/dt,du/dx,d2u/dx2;factors=1;terms=4",
    ] {
        let pool = TokenPool::parse(spec)?;
        let table = build_table(&field, &pool.required_specs())?;
        println!("finite differences, pool {spec}");
        search(&table, &pool)?;
    }
    Ok(())
}

fn search(table: &DerivativeTable, pool: &TokenPool) -> eqsearch::Result<()> {
    for mode in [Mode::Single, Mode::Multi] {
        let settings = RunSettings {
            mode,
            population: 8,
            iterations: mode.default_iterations(),
            lambda: DEFAULT_LAMBDA,
            operators: OperatorConfig::default(),
            seed: 1,
        };
        let found = discover(table, pool, &settings)?;
        println!(
            "  {:<6} {} (q_op {:.2e})",
            mode.as_str(),
            found.best.canonical(),
            found.best.q_op()
        );
    }
    Ok(())
}
