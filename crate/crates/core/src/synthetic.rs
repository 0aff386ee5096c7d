//! Benchmark datasets with known governing equations.
//!
//! * [`gen_wave`]: a two-mode standing wave solving `u_tt = 0.04 u_xx`.
//! * [`gen_burgers`]: a smooth inviscid Burgers solution built from
//!   characteristics, `u_t + u u_x = 0`.
//! * [`gen_kdv`]: the forced Korteweg-de Vries equation
//!   `u_t + 6 u u_x + u_xxx = cos t sin t`, integrated numerically with the
//!   Zabusky-Kruskal leapfrog scheme on a periodic domain.
//!
//! Wave and Burgers carry closed-form derivative evaluators so that
//! discovery can run on exact derivative tables.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::Array2;

use crate::derivatives::{
    analytic_table, build_table, AnalyticDerivatives, ClosedForm, DerivativeSpec, DerivativeTable,
};
use crate::error::{Error, Result};
use crate::grid::{Axis, Field, Grid};
use crate::representation::{Bounds, Equation, Family, Term, Token, TokenPool};

/// The three benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkName {
    Wave,
    Burgers,
    Kdv,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 3] = [BenchmarkName::Wave, BenchmarkName::Burgers, BenchmarkName::Kdv];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkName::Wave => "wave",
            BenchmarkName::Burgers => "burgers",
            BenchmarkName::Kdv => "kdv",
        }
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wave" => Ok(BenchmarkName::Wave),
            "burgers" => Ok(BenchmarkName::Burgers),
            "kdv" => Ok(BenchmarkName::Kdv),
            other => Err(Error::config(format!(
                "unknown benchmark `{other}` (expected wave, burgers or kdv)"
            ))),
        }
    }
}

/// A dataset together with the equation it satisfies and the token pool a
/// search should use on it.
#[derive(Clone)]
pub struct BenchmarkCase {
    pub name: BenchmarkName,
    pub grid: Arc<Grid>,
    pub field: Field,
    pub analytic: Option<AnalyticDerivatives>,
    /// The governing equation with its exact coefficients.
    pub true_equation: Equation,
    pub pool: TokenPool,
}

impl fmt::Debug for BenchmarkCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkCase")
            .field("name", &self.name)
            .field("shape", &self.grid.shape())
            .field("analytic", &self.analytic.is_some())
            .field("true_equation", &self.true_equation_string())
            .field("pool", &self.pool.to_string())
            .finish()
    }
}

impl BenchmarkCase {
    /// Canonical rendering of the governing equation.
    pub fn true_equation_string(&self) -> String {
        self.true_equation
            .canonical_form()
            .map(|c| c.to_string())
            .unwrap_or_default()
    }

    /// Derivative table for the pool: closed forms when available and
    /// requested, finite differences otherwise.
    pub fn table(&self, prefer_analytic: bool) -> Result<DerivativeTable> {
        let specs = self.pool.required_specs();
        match (&self.analytic, prefer_analytic) {
            (Some(formulas), true) => analytic_table(formulas, &specs, self.grid.clone()),
            _ => build_table(&self.field, &specs),
        }
    }

    /// Generates a benchmark by name on its default domain with `nt × nx`
    /// nodes.
    pub fn generate(name: BenchmarkName, nt: usize, nx: usize) -> Result<Self> {
        match name {
            BenchmarkName::Wave => gen_wave(&Grid::uniform([0.0, 1.0], [0.0, 1.0], nt, nx)?),
            BenchmarkName::Burgers => gen_burgers(&Grid::uniform([0.0, 1.0], [0.0, 1.0], nt, nx)?),
            BenchmarkName::Kdv => gen_kdv(&kdv_grid(nt, nx)?, &|x: f64| 0.5 * x.cos()),
        }
    }
}

/// Default side length of the benchmark grids.
pub const DEFAULT_NODES: usize = 101;

fn closed(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> ClosedForm {
    Arc::new(f)
}

fn d(spec: DerivativeSpec) -> Term {
    Term::single(Token::d(spec))
}

fn product(a: Token, b: Token) -> Term {
    Term::new(vec![a, b]).expect("two distinct non-parametric tokens form a valid term")
}

fn covers_unit_square(grid: &Grid) -> Result<()> {
    let (t, x) = (grid.t_axis(), grid.x_axis());
    if t[0] < 0.0 || x[0] < 0.0 || t[t.len() - 1] > 1.0 + 1e-12 || x[x.len() - 1] > 1.0 + 1e-12 {
        return Err(Error::InvalidGrid(
            "benchmark grid must lie inside [0, 1] x [0, 1]".into(),
        ));
    }
    Ok(())
}

/// Standing wave `sin(πx)cos(0.2πt) + 0.5 sin(2πx)cos(0.4πt)`.
///
/// Both modes travel at speed 0.2, so `u_tt = 0.04 u_xx` holds exactly. The
/// second mode keeps `u`, `u_xx` and `u_tt` linearly independent.
pub fn gen_wave(grid: &Grid) -> Result<BenchmarkCase> {
    covers_unit_square(grid)?;
    let grid = Arc::new(grid.clone());
    let w = 0.2 * PI;
    let mut analytic = AnalyticDerivatives::new();
    analytic.insert(
        DerivativeSpec::FIELD,
        closed(move |t, x| (PI * x).sin() * (w * t).cos() + 0.5 * (2.0 * PI * x).sin() * (2.0 * w * t).cos()),
    );
    analytic.insert(
        DerivativeSpec::t(1),
        closed(move |t, x| -w * (PI * x).sin() * (w * t).sin() - w * (2.0 * PI * x).sin() * (2.0 * w * t).sin()),
    );
    analytic.insert(
        DerivativeSpec::t(2),
        closed(move |t, x| {
            -w * w * (PI * x).sin() * (w * t).cos() - 2.0 * w * w * (2.0 * PI * x).sin() * (2.0 * w * t).cos()
        }),
    );
    analytic.insert(
        DerivativeSpec::x(1),
        closed(move |t, x| PI * (PI * x).cos() * (w * t).cos() + PI * (2.0 * PI * x).cos() * (2.0 * w * t).cos()),
    );
    analytic.insert(
        DerivativeSpec::x(2),
        closed(move |t, x| {
            -PI * PI * (PI * x).sin() * (w * t).cos() - 2.0 * PI * PI * (2.0 * PI * x).sin() * (2.0 * w * t).cos()
        }),
    );
    let u = analytic[&DerivativeSpec::FIELD].clone();
    let field = Field::from_fn(grid.clone(), |t, x| u(t, x))?;
    let true_equation =
        Equation::with_coefficients(vec![d(DerivativeSpec::x(2)), d(DerivativeSpec::t(2))], 1, vec![0.04])?;
    Ok(BenchmarkCase {
        name: BenchmarkName::Wave,
        grid,
        field,
        analytic: Some(analytic),
        true_equation,
        pool: TokenPool::from_derivatives(&standard_specs()),
    })
}

fn standard_specs() -> [DerivativeSpec; 5] {
    [
        DerivativeSpec::FIELD,
        DerivativeSpec::t(1),
        DerivativeSpec::t(2),
        DerivativeSpec::x(1),
        DerivativeSpec::x(2),
    ]
}

const BURGERS_EPS: f64 = 0.5;

/// Foot of the characteristic through `(t, x)` for the initial profile
/// `f(ξ) = ξ(1 + ε(ξ − 0.2))`: the positive root of `εt ξ² + (1 + t(1 − 0.2ε)) ξ = x`.
fn burgers_foot(t: f64, x: f64) -> f64 {
    let a = BURGERS_EPS * t;
    let b = 1.0 + t * (1.0 - 0.2 * BURGERS_EPS);
    2.0 * x / (b + (b * b + 4.0 * a * x).sqrt())
}

fn burgers_parts(t: f64, x: f64) -> (f64, f64, f64) {
    let xi = burgers_foot(t, x);
    let f = xi * (1.0 + BURGERS_EPS * (xi - 0.2));
    let fp = 1.0 - 0.2 * BURGERS_EPS + 2.0 * BURGERS_EPS * xi;
    let fpp = 2.0 * BURGERS_EPS;
    let inv = 1.0 / (1.0 + t * fp);
    let u_x = fp * inv;
    let u_xx = fpp * inv * inv * inv;
    (f, u_x, u_xx)
}

/// Smooth inviscid Burgers solution `u = f(ξ)`, `ξ + t f(ξ) = x`, with a
/// quadratic initial profile. Characteristics do not cross on
/// `[0, 1] × [0, 1]`, and `u(1, 0.4) = 0.2`.
pub fn gen_burgers(grid: &Grid) -> Result<BenchmarkCase> {
    covers_unit_square(grid)?;
    let grid = Arc::new(grid.clone());
    let mut analytic = AnalyticDerivatives::new();
    analytic.insert(DerivativeSpec::FIELD, closed(|t, x| burgers_parts(t, x).0));
    analytic.insert(DerivativeSpec::x(1), closed(|t, x| burgers_parts(t, x).1));
    analytic.insert(DerivativeSpec::x(2), closed(|t, x| burgers_parts(t, x).2));
    analytic.insert(
        DerivativeSpec::t(1),
        closed(|t, x| {
            let (u, ux, _) = burgers_parts(t, x);
            -u * ux
        }),
    );
    analytic.insert(
        DerivativeSpec::t(2),
        closed(|t, x| {
            let (u, ux, uxx) = burgers_parts(t, x);
            2.0 * u * ux * ux + u * u * uxx
        }),
    );
    let field = Field::from_fn(grid.clone(), |t, x| burgers_parts(t, x).0)?;
    let true_equation = Equation::with_coefficients(
        vec![
            d(DerivativeSpec::t(1)),
            product(Token::U, Token::d(DerivativeSpec::x(1))),
        ],
        0,
        vec![-1.0],
    )?;
    Ok(BenchmarkCase {
        name: BenchmarkName::Burgers,
        grid,
        field,
        analytic: Some(analytic),
        true_equation,
        pool: TokenPool::from_derivatives(&standard_specs()),
    })
}

/// Output grid for the KdV benchmark: `t ∈ [0, 1]`, `x` covering the
/// periodic interval `[0, 2π)` without its right endpoint.
pub fn kdv_grid(nt: usize, nx: usize) -> Result<Grid> {
    let l = 2.0 * PI;
    Grid::uniform([0.0, 1.0], [0.0, l - l / nx as f64], nt, nx)
}

/// Internal spatial resolution of the KdV solver, at least this many nodes.
pub const KDV_MIN_NODES: usize = 128;

/// Largest linear growth factor of the discrete dispersion operator,
/// `max |2 sin k − sin 2k| = 3√3/2`.
const DISPERSION_PEAK: f64 = 2.598_076_211_353_316;

/// Zabusky-Kruskal discretization of `u_t + 6 u u_x + u_xxx = g(t)` on a
/// periodic grid of `nodes` points over a domain of length `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdvScheme {
    pub nodes: usize,
    pub length: f64,
    /// Adds the spatially uniform source `cos t · sin t`.
    pub forced: bool,
}

impl KdvScheme {
    pub fn dx(&self) -> f64 {
        self.length / self.nodes as f64
    }

    /// Largest stable step for solutions bounded by `u_max`.
    pub fn stability_bound(&self, u_max: f64) -> f64 {
        let h = self.dx();
        1.0 / (6.0 * u_max.abs() / h + DISPERSION_PEAK / (h * h * h))
    }

    fn tendency(&self, u: &[f64], t: f64, out: &mut [f64]) {
        let n = u.len();
        let h = self.dx();
        let source = if self.forced { t.cos() * t.sin() } else { 0.0 };
        for i in 0..n {
            let m2 = u[(i + n - 2) % n];
            let m1 = u[(i + n - 1) % n];
            let p1 = u[(i + 1) % n];
            let p2 = u[(i + 2) % n];
            let advection = 6.0 * (p1 + u[i] + m1) / 3.0 * (p1 - m1) / (2.0 * h);
            let dispersion = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
            out[i] = source - advection - dispersion;
        }
    }

    /// Integrates from `u0` for `steps` steps of size `dt` and returns the
    /// state after every `record_every` steps, starting with `u0`.
    ///
    /// `u_max` is the amplitude the solution is expected to stay below; the
    /// step is checked against the stability bound for it.
    pub fn integrate(
        &self,
        u0: &[f64],
        dt: f64,
        steps: usize,
        record_every: usize,
        u_max: f64,
    ) -> Result<Vec<Vec<f64>>> {
        if u0.len() != self.nodes || self.nodes < 5 {
            return Err(Error::InvalidField(format!(
                "initial state has {} values, scheme expects {} (at least 5)",
                u0.len(),
                self.nodes
            )));
        }
        if record_every == 0 {
            return Err(Error::config("record interval must be positive"));
        }
        let bound = self.stability_bound(u_max);
        if !(dt > 0.0 && dt <= bound) {
            return Err(Error::Unstable { dt, bound });
        }
        let n = self.nodes;
        let mut snapshots = vec![u0.to_vec()];
        let mut prev = u0.to_vec();
        let mut rate = vec![0.0; n];
        self.tendency(&prev, 0.0, &mut rate);
        let mut cur: Vec<f64> = prev.iter().zip(&rate).map(|(u, r)| u + dt * r).collect();
        if steps >= 1 && record_every == 1 {
            snapshots.push(cur.clone());
        }
        for step in 1..steps {
            self.tendency(&cur, step as f64 * dt, &mut rate);
            for i in 0..n {
                prev[i] += 2.0 * dt * rate[i];
            }
            std::mem::swap(&mut prev, &mut cur);
            if cur.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("KdV integration"));
            }
            if (step + 1) % record_every == 0 {
                snapshots.push(cur.clone());
            }
        }
        if steps == 0 {
            snapshots.truncate(1);
        }
        Ok(snapshots)
    }
}

/// Forced KdV data on `grid` (see [`kdv_grid`]) from the periodic initial
/// profile `initial(x)`.
///
/// The solver runs on a refinement of the output spatial grid with at least
/// [`KDV_MIN_NODES`] nodes and a time step that divides the output time
/// spacing; the solution is sampled back onto `grid`.
pub fn gen_kdv(grid: &Grid, initial: &dyn Fn(f64) -> f64) -> Result<BenchmarkCase> {
    let nx = grid.nx();
    let x0 = grid.x_axis()[0];
    let length = grid.dx() * nx as f64;
    let t0 = grid.t_axis()[0];
    if t0.abs() > 1e-12 {
        return Err(Error::InvalidGrid("KdV time axis must start at 0".into()));
    }
    let end = initial(x0);
    let wrap = initial(x0 + length);
    if (end - wrap).abs() > 1e-8 * (1.0 + end.abs()) {
        return Err(Error::InvalidField(format!(
            "initial profile is not periodic: u(x0) = {end}, u(x0 + L) = {wrap}"
        )));
    }
    let refine = KDV_MIN_NODES.div_ceil(nx);
    let scheme = KdvScheme {
        nodes: nx * refine,
        length,
        forced: true,
    };
    let h = scheme.dx();
    let u0: Vec<f64> = (0..scheme.nodes).map(|i| initial(x0 + i as f64 * h)).collect();
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("KdV initial profile"));
    }
    // the forcing moves the mean by at most 1/2; allow headroom for steepening
    let u_max = 2.0 * u0.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 0.5;
    let bound = scheme.stability_bound(u_max);
    let interval = grid.dt();
    let per_output = (interval / (0.9 * bound)).ceil().max(1.0) as usize;
    let dt = interval / per_output as f64;
    let steps = per_output * (grid.nt() - 1);
    let snaps = scheme.integrate(&u0, dt, steps, per_output, u_max)?;
    let mut values = Array2::zeros(grid.shape());
    for (it, snap) in snaps.iter().enumerate() {
        for ix in 0..nx {
            values[[it, ix]] = snap[ix * refine];
        }
    }
    let grid = Arc::new(grid.clone());
    let field = Field::new(grid.clone(), values)?;

    let forcing = Term::new(vec![Token::cos_t(1.0, 0.0), Token::sin_t(1.0, 0.0)])?;
    let true_equation = Equation::with_coefficients(
        vec![
            d(DerivativeSpec::t(1)),
            product(Token::U, Token::d(DerivativeSpec::x(1))),
            d(DerivativeSpec::x(3)),
            forcing,
        ],
        0,
        vec![-6.0, -1.0, 1.0],
    )?;
    let mut pool = TokenPool::from_derivatives(&[
        DerivativeSpec::FIELD,
        DerivativeSpec::t(1),
        DerivativeSpec::x(1),
        DerivativeSpec::x(2),
        DerivativeSpec::x(3),
    ])
    .with_parametric(Family::Sin, Axis::Time)
    .with_parametric(Family::Cos, Axis::Time);
    // free frequencies let near-equal sinusoids cancel each other, so the
    // default pool pins them to the forcing's
    pool.frequency = Bounds::new(1.0, 1.0);
    pool.phase = Bounds::new(0.0, 0.0);
    pool.frequency_lattice = vec![1.0];
    pool.phase_lattice = vec![0.0];
    Ok(BenchmarkCase {
        name: BenchmarkName::Kdv,
        grid,
        field,
        analytic: None,
        true_equation,
        pool,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::eval_q_op;
    use crate::regression::fit_equation;

    fn unit(n: usize) -> Grid {
        Grid::uniform([0.0, 1.0], [0.0, 1.0], n, n).unwrap()
    }

    #[test]
    fn wave_point_values() {
        let case = gen_wave(&unit(101)).unwrap();
        let a = case.analytic.as_ref().unwrap();
        assert!((a[&DerivativeSpec::FIELD](0.0, 0.5) - 1.0).abs() < 1e-15);
        let w = 0.2 * PI;
        assert!((a[&DerivativeSpec::t(2)](0.0, 0.5) + w * w).abs() < 1e-12);
        assert_eq!(case.grid.shape(), (101, 101));
    }

    #[test]
    fn wave_residual_vanishes() {
        let case = gen_wave(&unit(41)).unwrap();
        let a = case.analytic.as_ref().unwrap();
        for &(t, x) in &[(0.1, 0.2), (0.7, 0.9), (1.0, 0.33)] {
            let r = a[&DerivativeSpec::t(2)](t, x) - 0.04 * a[&DerivativeSpec::x(2)](t, x);
            assert!(r.abs() <= 1e-12);
        }
    }

    #[test]
    fn burgers_point_value_and_residual() {
        assert!((burgers_parts(1.0, 0.4).0 - 0.2).abs() < 1e-15);
        let case = gen_burgers(&unit(41)).unwrap();
        let a = case.analytic.as_ref().unwrap();
        for &(t, x) in &[(0.0, 0.5), (0.3, 0.1), (1.0, 1.0)] {
            let r = a[&DerivativeSpec::t(1)](t, x) + a[&DerivativeSpec::FIELD](t, x) * a[&DerivativeSpec::x(1)](t, x);
            assert!(r.abs() <= 1e-12);
        }
    }

    #[test]
    fn burgers_closed_forms_match_differences() {
        let h = 1e-5;
        for &(t, x) in &[(0.2, 0.3), (0.8, 0.7)] {
            let (u, ux, uxx) = burgers_parts(t, x);
            let fd_x = (burgers_parts(t, x + h).0 - burgers_parts(t, x - h).0) / (2.0 * h);
            let fd_xx = (burgers_parts(t, x + h).1 - burgers_parts(t, x - h).1) / (2.0 * h);
            let fd_t = (burgers_parts(t + h, x).0 - burgers_parts(t - h, x).0) / (2.0 * h);
            assert!((fd_x - ux).abs() < 1e-8);
            assert!((fd_xx - uxx).abs() < 1e-6);
            assert!((fd_t + u * ux).abs() < 1e-8);
        }
    }

    #[test]
    fn true_equations_render() {
        let g = unit(11);
        assert_eq!(
            gen_wave(&g).unwrap().true_equation_string(),
            "d2u/dt2 - 0.04*d2u/dx2 = 0"
        );
        assert_eq!(gen_burgers(&g).unwrap().true_equation_string(), "du/dt + u*du/dx = 0");
    }

    #[test]
    fn analytic_cases_satisfy_their_equations() {
        for case in [gen_wave(&unit(41)).unwrap(), gen_burgers(&unit(41)).unwrap()] {
            let table = case.table(true).unwrap();
            let q = eval_q_op(&case.true_equation, &table).unwrap();
            assert!(q <= 1e-8, "{}: {q}", case.name);
            let (_, refit) = fit_equation(&case.true_equation.clone().into_unfitted(), &table, 0.0).unwrap();
            assert!(refit <= 1e-8);
        }
    }

    #[test]
    fn rejects_out_of_domain_grid() {
        let g = Grid::uniform([0.0, 2.0], [0.0, 1.0], 11, 11).unwrap();
        assert!(gen_wave(&g).is_err());
    }

    #[test]
    fn kdv_rejects_non_periodic_initial() {
        let g = kdv_grid(11, 32).unwrap();
        assert!(matches!(gen_kdv(&g, &|x: f64| x), Err(Error::InvalidField(_))));
    }

    #[test]
    fn kdv_rejects_unstable_step() {
        let s = KdvScheme {
            nodes: 64,
            length: 2.0 * PI,
            forced: false,
        };
        let u0 = vec![0.0; 64];
        let dt = 2.0 * s.stability_bound(1.0);
        assert!(matches!(s.integrate(&u0, dt, 10, 1, 1.0), Err(Error::Unstable { .. })));
    }

    #[test]
    fn kdv_true_equation_renders() {
        let case = gen_kdv(&kdv_grid(6, 32).unwrap(), &|_| 0.0).unwrap();
        assert_eq!(
            case.true_equation_string(),
            "du/dt + 6*u*du/dx + d3u/dx3 - cos(t)*sin(t) = 0"
        );
    }
}
