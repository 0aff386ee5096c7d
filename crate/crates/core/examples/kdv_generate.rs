//! Forced Korteweg-de Vries data from the leapfrog solver, saved as CSV with
//! a sidecar, and the residual of the known equation on numerical derivatives.

use std::path::PathBuf;

use eqsearch::harness::Sidecar;
use eqsearch::objectives::eval_q_op;
use eqsearch::regression::fit_equation;
use eqsearch::synthetic::{gen_kdv, kdv_grid, KdvScheme, KDV_MIN_NODES};

fn main() -> eqsearch::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let grid = kdv_grid(101, 128)?;
    let case = gen_kdv(&grid, &|x| 0.5 * x.cos() + 0.25 * (2.0 * x).sin())?;

    let scheme = KdvScheme {
        nodes: KDV_MIN_NODES,
        length: 2.0 * std::f64::consts::PI,
        forced: true,
    };
    println!(
        "solver spacing {:.4}, stable step for |u| <= 1.5: {:.3e}",
        scheme.dx(),
        scheme.stability_bound(1.5)
    );

    let table = case.table(false)?;
    let exact = eval_q_op(&case.true_equation, &table)?;
    let (refit, q) = fit_equation(&case.true_equation.clone().into_unfitted(), &table, 0.05)?;
    println!("true equation:   {}", case.true_equation_string());
    println!("residual (exact coefficients): {exact:.3e}");
    println!("refit:           {} (q_op {q:.3e})", refit.canonical_form()?.render(4));

    let path = out.join("kdv.csv");
    case.field.save(&path)?;
    Sidecar::for_case(&case)?.save(&Sidecar::path_for(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}
