//! Finite-difference and closed-form derivative tables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, Axis as NdAxis, Zip};

use crate::error::{Error, Result};
use crate::grid::{Axis, Field, Grid};

pub const MAX_TIME_ORDER: u8 = 2;
pub const MAX_SPACE_ORDER: u8 = 3;

/// A partial derivative `∂ⁿu/∂axisⁿ`. Order zero is the field itself and is
/// always stored with [`Axis::Time`] so that there is a single representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct DerivativeSpec {
    axis: Axis,
    order: u8,
}

impl DerivativeSpec {
    pub const FIELD: DerivativeSpec = DerivativeSpec {
        axis: Axis::Time,
        order: 0,
    };

    pub fn new(axis: Axis, order: u8) -> Result<Self> {
        let spec = Self::unchecked(axis, order);
        let max = match axis {
            Axis::Time => MAX_TIME_ORDER,
            Axis::Space => MAX_SPACE_ORDER,
        };
        if order > max {
            return Err(Error::UnsupportedDerivative(spec));
        }
        Ok(spec)
    }

    pub(crate) const fn unchecked(axis: Axis, order: u8) -> Self {
        if order == 0 {
            Self::FIELD
        } else {
            Self { axis, order }
        }
    }

    pub const fn t(order: u8) -> Self {
        Self::unchecked(Axis::Time, order)
    }

    pub const fn x(order: u8) -> Self {
        Self::unchecked(Axis::Space, order)
    }

    pub fn axis(self) -> Axis {
        self.axis
    }

    pub fn order(self) -> u8 {
        self.order
    }

    pub fn is_field(self) -> bool {
        self.order == 0
    }

    /// Parses the rendered form: `u`, `du/dt`, `d2u/dx2`, ...
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "u" {
            return Ok(Self::FIELD);
        }
        let bad = || Error::config(format!("unrecognized derivative `{s}`"));
        let rest = s.strip_prefix('d').ok_or_else(bad)?;
        let (num, rest) = rest.split_once("u/d").ok_or_else(bad)?;
        let order: u8 = if num.is_empty() {
            1
        } else {
            num.parse().map_err(|_| bad())?
        };
        let mut chars = rest.chars();
        let axis = match chars.next() {
            Some('t') => Axis::Time,
            Some('x') => Axis::Space,
            _ => return Err(bad()),
        };
        let tail: String = chars.collect();
        let expected = if order == 1 { String::new() } else { order.to_string() };
        if tail != expected || order == 0 {
            return Err(bad());
        }
        Self::new(axis, order)
    }
}

impl fmt::Display for DerivativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            0 => write!(f, "u"),
            1 => write!(f, "du/d{}", self.axis.symbol()),
            n => write!(f, "d{n}u/d{}{n}", self.axis.symbol()),
        }
    }
}

/// Differentiates `field` along the spec's axis.
///
/// Interior nodes use second-order central stencils (five points for the
/// third derivative); nodes too close to the edge use second-order one-sided
/// stencils.
pub fn finite_diff(field: &Field, spec: DerivativeSpec) -> Result<Field> {
    let spec = DerivativeSpec::new(spec.axis, spec.order)?;
    if spec.is_field() {
        return Ok(field.clone());
    }
    let grid = field.grid();
    let nd_axis = match spec.axis {
        Axis::Time => NdAxis(0),
        Axis::Space => NdAxis(1),
    };
    let n = field.values().len_of(nd_axis);
    if n < spec.order as usize + 2 {
        return Err(Error::InvalidGrid(format!(
            "{} needs at least {} points along {}, grid has {n}",
            spec,
            spec.order + 2,
            spec.axis.symbol()
        )));
    }
    let h = grid.spacing(spec.axis);
    let mut out = Array2::<f64>::zeros(field.values().dim());
    Zip::from(out.lanes_mut(nd_axis))
        .and(field.values().lanes(nd_axis))
        .for_each(|mut dst, src| {
            let d = diff_1d(src, spec.order, h);
            dst.assign(&d);
        });
    Field::new(grid.clone(), out)
}

fn diff_1d(u: ArrayView1<f64>, order: u8, h: f64) -> Array1<f64> {
    let n = u.len();
    let mut d = Array1::zeros(n);
    match order {
        1 => {
            let c = 1.0 / (2.0 * h);
            for i in 1..n - 1 {
                d[i] = (u[i + 1] - u[i - 1]) * c;
            }
            d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * c;
            d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * c;
        }
        2 => {
            let c = 1.0 / (h * h);
            for i in 1..n - 1 {
                d[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * c;
            }
            d[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * c;
            d[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) * c;
        }
        3 => {
            let c = 1.0 / (2.0 * h * h * h);
            for i in 2..n - 2 {
                d[i] = (u[i + 2] - 2.0 * u[i + 1] + 2.0 * u[i - 1] - u[i - 2]) * c;
            }
            for i in [0, 1] {
                d[i] = (-5.0 * u[i] + 18.0 * u[i + 1] - 24.0 * u[i + 2] + 14.0 * u[i + 3] - 3.0 * u[i + 4]) * c;
            }
            for i in [n - 2, n - 1] {
                d[i] = (5.0 * u[i] - 18.0 * u[i - 1] + 24.0 * u[i - 2] - 14.0 * u[i - 3] + 3.0 * u[i - 4]) * c;
            }
        }
        _ => unreachable!("order validated by DerivativeSpec::new"),
    }
    d
}

/// Rectangular index region on which every table entry is trusted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteriorMask {
    pub t: Range<usize>,
    pub x: Range<usize>,
}

impl InteriorMask {
    pub fn full(grid: &Grid) -> Self {
        Self {
            t: 0..grid.nt(),
            x: 0..grid.nx(),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len() * self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.t.clone().flat_map(move |i| self.x.clone().map(move |j| (i, j)))
    }

    /// Extracts the masked values of a full-grid matrix in row-major order.
    pub fn flatten(&self, values: &Array2<f64>) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in self.t.clone() {
            let row = values.row(i);
            out.extend(self.x.clone().map(|j| row[j]));
        }
        out
    }
}

/// Derivative fields of one dataset, keyed by spec.
#[derive(Debug, Clone)]
pub struct DerivativeTable {
    grid: Arc<Grid>,
    entries: BTreeMap<DerivativeSpec, Field>,
    mask: InteriorMask,
}

impl DerivativeTable {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn mask(&self) -> &InteriorMask {
        &self.mask
    }

    pub fn get(&self, spec: DerivativeSpec) -> Result<&Field> {
        self.entries.get(&spec).ok_or(Error::MissingDerivative(spec))
    }

    pub fn contains(&self, spec: DerivativeSpec) -> bool {
        self.entries.contains_key(&spec)
    }

    pub fn specs(&self) -> impl Iterator<Item = DerivativeSpec> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Replaces the evaluation region, e.g. to compare closed-form and
    /// finite-difference tables on the same nodes.
    pub fn with_mask(mut self, mask: InteriorMask) -> Result<Self> {
        if mask.t.end > self.grid.nt() || mask.x.end > self.grid.nx() || mask.is_empty() {
            return Err(Error::config("mask does not fit the grid"));
        }
        self.mask = mask;
        Ok(self)
    }
}

fn dedup_with_field(specs: &[DerivativeSpec]) -> Result<Vec<DerivativeSpec>> {
    if specs.is_empty() {
        return Err(Error::config("no derivative specs requested"));
    }
    let mut all: Vec<DerivativeSpec> = specs
        .iter()
        .map(|s| DerivativeSpec::new(s.axis, s.order))
        .collect::<Result<_>>()?;
    all.push(DerivativeSpec::FIELD);
    all.sort();
    all.dedup();
    Ok(all)
}

/// Margin trimmed from each side of an axis: highest requested order along
/// that axis plus one, or nothing when the axis is not differentiated.
pub fn mask_margin(specs: &[DerivativeSpec], axis: Axis) -> usize {
    specs
        .iter()
        .filter(|s| !s.is_field() && s.axis == axis)
        .map(|s| s.order as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Differentiates `field` for every spec (plus the field itself).
pub fn build_table(field: &Field, specs: &[DerivativeSpec]) -> Result<DerivativeTable> {
    let specs = dedup_with_field(specs)?;
    let grid = field.grid().clone();
    let mt = mask_margin(&specs, Axis::Time);
    let mx = mask_margin(&specs, Axis::Space);
    if 2 * mt >= grid.nt() || 2 * mx >= grid.nx() {
        return Err(Error::InvalidGrid(format!(
            "grid {:?} too small for an interior margin of ({mt}, {mx})",
            grid.shape()
        )));
    }
    let mask = InteriorMask {
        t: mt..grid.nt() - mt,
        x: mx..grid.nx() - mx,
    };
    let entries = specs
        .iter()
        .map(|&s| Ok((s, finite_diff(field, s)?)))
        .collect::<Result<_>>()?;
    Ok(DerivativeTable { grid, entries, mask })
}

/// A closed-form evaluator `(t, x) -> value`.
pub type ClosedForm = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Closed-form evaluators keyed by derivative.
pub type AnalyticDerivatives = BTreeMap<DerivativeSpec, ClosedForm>;

/// Fills a table by pointwise evaluation; the mask is the whole grid.
pub fn analytic_table(
    formulas: &AnalyticDerivatives,
    specs: &[DerivativeSpec],
    grid: Arc<Grid>,
) -> Result<DerivativeTable> {
    let specs = dedup_with_field(specs)?;
    let mut entries = BTreeMap::new();
    for s in specs {
        let f = formulas.get(&s).ok_or(Error::MissingDerivative(s))?;
        entries.insert(s, Field::from_fn(grid.clone(), |t, x| f(t, x))?);
    }
    let mask = InteriorMask::full(&grid);
    Ok(DerivativeTable { grid, entries, mask })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_field(n: usize, h: f64, f: impl Fn(f64) -> f64) -> Field {
        let g = Arc::new(Grid::uniform([0.0, 1.0], [0.0, h * (n - 1) as f64], 5, n).unwrap());
        Field::from_fn(g, |_, x| f(x)).unwrap()
    }

    fn max_interior_err(d: &Field, exact: impl Fn(f64) -> f64, margin: usize) -> f64 {
        let xs = d.grid().x_axis();
        (margin..xs.len() - margin)
            .map(|j| (d.get(2, j) - exact(xs[j])).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn spec_parse_and_display() {
        for s in ["u", "du/dt", "d2u/dt2", "du/dx", "d2u/dx2", "d3u/dx3"] {
            assert_eq!(DerivativeSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(DerivativeSpec::parse("d3u/dt3").is_err());
        assert!(DerivativeSpec::parse("d2u/dx3").is_err());
        assert!(DerivativeSpec::parse("v").is_err());
    }

    #[test]
    fn order_limits() {
        assert!(DerivativeSpec::new(Axis::Time, 3).is_err());
        assert!(DerivativeSpec::new(Axis::Space, 4).is_err());
        assert_eq!(DerivativeSpec::new(Axis::Space, 0).unwrap(), DerivativeSpec::FIELD);
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let f = space_field(11, 0.1, |_| 3.25);
        for spec in [
            DerivativeSpec::t(1),
            DerivativeSpec::t(2),
            DerivativeSpec::x(1),
            DerivativeSpec::x(2),
            DerivativeSpec::x(3),
        ] {
            let d = finite_diff(&f, spec).unwrap();
            assert!(d.values().iter().all(|v| v.abs() < 1e-9), "{spec}");
        }
    }

    #[test]
    fn quadratic_first_derivative_is_exact_inside() {
        let f = space_field(21, 0.1, |x| x * x);
        let d = finite_diff(&f, DerivativeSpec::x(1)).unwrap();
        assert!(max_interior_err(&d, |x| 2.0 * x, 1) < 1e-12);
        // one-sided stencils are also exact on quadratics
        assert!(max_interior_err(&d, |x| 2.0 * x, 0) < 1e-12);
    }

    #[test]
    fn sine_first_derivative_error_bound() {
        let f = space_field(301, 0.01, f64::sin);
        let d = finite_diff(&f, DerivativeSpec::x(1)).unwrap();
        let err = max_interior_err(&d, f64::cos, 1);
        assert!(err <= 2e-5, "{err}");
    }

    #[test]
    fn cubic_third_derivative() {
        let f = space_field(30, 0.05, |x| x * x * x - 2.0 * x);
        let d = finite_diff(&f, DerivativeSpec::x(3)).unwrap();
        assert!(max_interior_err(&d, |_| 6.0, 0) < 1e-6);
    }

    #[test]
    fn second_derivative_boundary_stencil_is_second_order() {
        let errs: Vec<f64> = [0.02, 0.01]
            .iter()
            .map(|&h| {
                let n = (1.0 / h) as usize + 1;
                let f = space_field(n, h, f64::sin);
                let d = finite_diff(&f, DerivativeSpec::x(2)).unwrap();
                (d.get(0, 0) + 0.0f64.sin())
                    .abs()
                    .max((d.get(0, n - 1) + (h * (n - 1) as f64).sin()).abs())
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn table_contents_and_mask() {
        let g = Arc::new(Grid::uniform([0.0, 1.0], [0.0, 1.0], 101, 101).unwrap());
        let f = Field::from_fn(g, |t, x| t * x).unwrap();
        let tab = build_table(&f, &[DerivativeSpec::t(1), DerivativeSpec::x(2)]).unwrap();
        assert_eq!(tab.len(), 3);
        assert_eq!(tab.mask().t, 2..99);
        assert_eq!(tab.mask().x, 3..98);

        let tab = build_table(&f, &[DerivativeSpec::x(3)]).unwrap();
        assert_eq!(tab.mask().x, 4..97);
        assert_eq!(tab.mask().t, 0..101);
    }

    #[test]
    fn table_requires_specs() {
        let g = Arc::new(Grid::uniform([0.0, 1.0], [0.0, 1.0], 5, 5).unwrap());
        let f = Field::from_fn(g, |t, x| t * x).unwrap();
        assert!(build_table(&f, &[]).is_err());
    }

    #[test]
    fn analytic_table_missing_evaluator() {
        let g = Arc::new(Grid::uniform([0.0, 1.0], [0.0, 1.0], 5, 5).unwrap());
        let mut forms: AnalyticDerivatives = BTreeMap::new();
        forms.insert(DerivativeSpec::FIELD, Arc::new(|t, x| t + x));
        let err = analytic_table(&forms, &[DerivativeSpec::t(1)], g).unwrap_err();
        assert!(matches!(err, Error::MissingDerivative(s) if s == DerivativeSpec::t(1)));
    }
}
