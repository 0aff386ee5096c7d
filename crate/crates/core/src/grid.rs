//! Uniform space-time grids and scalar fields sampled on them.
//!
//! A [`Field`] stores `u(t, x)` as a matrix with one row per time level and
//! one column per spatial node. Fields serialize to a plain CSV layout:
//!
//! ```text
//! t\x,x_0,x_1,...
//! t_0,u(t_0,x_0),u(t_0,x_1),...
//! t_1,...
//! ```
//!
//! Every number is written with 17 significant digits so that a save/load
//! cycle reproduces the `f64` values bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Minimum number of nodes per axis; the 5-point third-derivative stencil
/// needs this many.
pub const MIN_POINTS: usize = 5;

const UNIFORM_TOL: f64 = 1e-12;

/// The two grid directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Time,
    Space,
}

impl Axis {
    pub fn symbol(self) -> &'static str {
        match self {
            Axis::Time => "t",
            Axis::Space => "x",
        }
    }
}

/// A uniform rectangular mesh over `t` and `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    t_axis: Vec<f64>,
    x_axis: Vec<f64>,
    dt: f64,
    dx: f64,
}

impl Grid {
    /// Builds a uniform grid covering the closed ranges, endpoints included.
    pub fn uniform(t_range: [f64; 2], x_range: [f64; 2], nt: usize, nx: usize) -> Result<Self> {
        let t_axis = linspace(t_range, nt, "t")?;
        let x_axis = linspace(x_range, nx, "x")?;
        Self::from_axes(t_axis, x_axis)
    }

    /// Wraps explicit axis coordinates, checking that both are strictly
    /// increasing, uniformly spaced and long enough.
    pub fn from_axes(t_axis: Vec<f64>, x_axis: Vec<f64>) -> Result<Self> {
        let dt = check_axis(&t_axis, "t")?;
        let dx = check_axis(&x_axis, "x")?;
        Ok(Self { t_axis, x_axis, dt, dx })
    }

    pub fn t_axis(&self) -> &[f64] {
        &self.t_axis
    }

    pub fn x_axis(&self) -> &[f64] {
        &self.x_axis
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nt(&self) -> usize {
        self.t_axis.len()
    }

    pub fn nx(&self) -> usize {
        self.x_axis.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nt(), self.nx())
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Time => self.dt,
            Axis::Space => self.dx,
        }
    }

    pub fn axis(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::Time => &self.t_axis,
            Axis::Space => &self.x_axis,
        }
    }
}

fn linspace(range: [f64; 2], n: usize, name: &str) -> Result<Vec<f64>> {
    let [lo, hi] = range;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} range must be finite")));
    }
    if hi <= lo {
        return Err(Error::InvalidGrid(format!(
            "{name} range [{lo}, {hi}] is empty or reversed"
        )));
    }
    if n < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "n{name} = {n} is below the minimum of {MIN_POINTS} points"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut axis: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    axis[n - 1] = hi;
    Ok(axis)
}

fn check_axis(axis: &[f64], name: &str) -> Result<f64> {
    if axis.len() < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{name} axis has {} points, minimum is {MIN_POINTS}",
            axis.len()
        )));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} axis has non-finite coordinates")));
    }
    let n = axis.len();
    let step = (axis[n - 1] - axis[0]) / (n - 1) as f64;
    if step <= 0.0 {
        return Err(Error::InvalidGrid(format!("{name} axis is not increasing")));
    }
    for (i, pair) in axis.windows(2).enumerate() {
        let d = pair[1] - pair[0];
        if d <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "{name} axis is not strictly increasing at index {}",
                i + 1
            )));
        }
        if ((d - step) / step).abs() > UNIFORM_TOL.max(64.0 * f64::EPSILON * pair[1].abs() / step) {
            return Err(Error::InvalidGrid(format!(
                "non-uniform {name} axis: spacing {d} at index {} differs from {step}",
                i + 1
            )));
        }
    }
    Ok(step)
}

/// Scalar field `u(t, x)`; rows are time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Array2<f64>,
    grid: Arc<Grid>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::InvalidField(format!(
                "values have shape {:?} but the grid is {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Self { values, grid })
    }

    /// Samples `f(t, x)` at every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(i, j)| f(grid.t_axis[i], grid.x_axis[j]));
        Self::new(grid, values)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn get(&self, it: usize, ix: usize) -> f64 {
        self.values[[it, ix]]
    }

    /// Serializes to the CSV text layout.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 25);
        out.push_str("t\\x");
        for x in &self.grid.x_axis {
            out.push(',');
            push_number(&mut out, *x);
        }
        out.push('\n');
        for (i, row) in self.values.outer_iter().enumerate() {
            push_number(&mut out, self.grid.t_axis[i]);
            for v in row {
                out.push(',');
                push_number(&mut out, *v);
            }
            out.push('\n');
        }
        out
    }

    /// Parses the CSV text layout. `origin` names the source in error messages.
    pub fn from_csv_str(text: &str, origin: &str) -> Result<Self> {
        let parse_err = |row: usize, column: usize, message: String| Error::Parse {
            path: origin.to_string(),
            row,
            column,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty file".into()))?;
        let mut cells = header.split(',');
        if cells.next().map(str::trim) != Some("t\\x") {
            return Err(parse_err(1, 1, "header must start with the cell `t\\x`".into()));
        }
        let x_axis = cells
            .enumerate()
            .map(|(j, c)| parse_cell(c).map_err(|m| parse_err(1, j + 2, m)))
            .collect::<Result<Vec<f64>>>()?;
        if x_axis.is_empty() {
            return Err(parse_err(1, 2, "header has no x coordinates".into()));
        }
        let nx = x_axis.len();

        let mut t_axis = Vec::new();
        let mut values = Vec::new();
        for (line_no, line) in lines {
            let row = line_no + 1;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != nx + 1 {
                return Err(parse_err(
                    row,
                    cells.len().min(nx + 1),
                    format!("expected {} cells, found {}", nx + 1, cells.len()),
                ));
            }
            for (j, c) in cells.iter().enumerate() {
                let v = parse_cell(c).map_err(|m| parse_err(row, j + 1, m))?;
                if j == 0 {
                    t_axis.push(v);
                } else {
                    values.push(v);
                }
            }
        }
        let nt = t_axis.len();
        let grid = Arc::new(Grid::from_axes(t_axis, x_axis)?);
        let values = Array2::from_shape_vec((nt, nx), values).map_err(|e| Error::InvalidField(e.to_string()))?;
        Field::new(grid, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }
}

fn push_number(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

fn parse_cell(cell: &str) -> std::result::Result<f64, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Err("missing value".into());
    }
    let v: f64 = cell.parse().map_err(|_| format!("`{cell}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{cell}` is not finite"));
    }
    Ok(v)
}
