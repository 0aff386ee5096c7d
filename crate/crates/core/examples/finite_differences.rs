//! Numerical differentiation on a uniform grid and its observed order of
//! accuracy, measured on `u = sin(x + t)` where every derivative is known.

use std::sync::Arc;

use eqsearch::derivatives::{finite_diff, DerivativeSpec};
use eqsearch::grid::{Field, Grid};

fn max_error(n: usize, spec: DerivativeSpec) -> eqsearch::Result<f64> {
    let grid = Arc::new(Grid::uniform([0.0, 1.0], [0.0, 2.0], n, n)?);
    let field = Field::from_fn(grid.clone(), |t, x| (x + t).sin())?;
    let approx = finite_diff(&field, spec)?;
    // d^k/dx^k sin(x + t) = sin(x + t + k·π/2), and the same for t
    let shift = spec.order() as f64 * std::f64::consts::FRAC_PI_2;
    let mut worst: f64 = 0.0;
    for (i, &t) in grid.t_axis().iter().enumerate() {
        for (j, &x) in grid.x_axis().iter().enumerate() {
            worst = worst.max((approx.get(i, j) - (x + t + shift).sin()).abs());
        }
    }
    Ok(worst)
}

fn main() -> eqsearch::Result<()> {
    let specs = [
        DerivativeSpec::t(1),
        DerivativeSpec::t(2),
        DerivativeSpec::x(1),
        DerivativeSpec::x(2),
        DerivativeSpec::x(3),
    ];
    println!("{:<10} {:>12} {:>12} {:>8}", "operator", "n = 41", "n = 81", "order");
    for spec in specs {
        let coarse = max_error(41, spec)?;
        let fine = max_error(81, spec)?;
        println!(
            "{:<10} {coarse:>12.3e} {fine:>12.3e} {:>8.2}",
            spec.to_string(),
            (coarse / fine).log2()
        );
    }
    Ok(())
}
