use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::derivatives::{DerivativeSpec, DerivativeTable};
use crate::error::{Error, Result};
use crate::grid::Axis;

/// Elementary function family of a parametric token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cos,
    Sin,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cos => "cos",
            Family::Sin => "sin",
        }
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Family::Cos => v.cos(),
            Family::Sin => v.sin(),
        }
    }
}

/// `family(frequency * coordinate + phase)` along one axis.
#[derive(Debug, Clone, Copy)]
pub struct Parametric {
    pub family: Family,
    pub axis: Axis,
    pub frequency: f64,
    pub phase: f64,
}

impl Parametric {
    pub fn new(family: Family, axis: Axis, frequency: f64, phase: f64) -> Self {
        // +0.0 and -0.0 must compare and hash alike
        Self {
            family,
            axis,
            frequency: frequency + 0.0,
            phase: phase + 0.0,
        }
    }

    fn key(&self) -> (Axis, Family, u64, u64) {
        (self.axis, self.family, self.frequency.to_bits(), self.phase.to_bits())
    }

    pub fn same_shape(&self, other: &Parametric) -> bool {
        self.family == other.family && self.axis == other.axis
    }
}

impl PartialEq for Parametric {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Parametric {}

impl Hash for Parametric {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl Ord for Parametric {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.axis, self.family)
            .cmp(&(other.axis, other.family))
            .then(self.frequency.total_cmp(&other.frequency))
            .then(self.phase.total_cmp(&other.phase))
    }
}

impl PartialOrd for Parametric {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An elementary factor of a term.
///
/// The derived ordering (derivatives, then powers, then parametric tokens,
/// with the plain field first among derivatives) drives canonical rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Derivative(DerivativeSpec),
    Power { spec: DerivativeSpec, exponent: u8 },
    Parametric(Parametric),
}

impl Token {
    pub const U: Token = Token::Derivative(DerivativeSpec::FIELD);

    pub fn d(spec: DerivativeSpec) -> Self {
        Token::Derivative(spec)
    }

    pub fn power(spec: DerivativeSpec, exponent: u8) -> Result<Self> {
        if !(2..=3).contains(&exponent) {
            return Err(Error::config(format!("power exponent {exponent} not in 2..=3")));
        }
        Ok(Token::Power { spec, exponent })
    }

    pub fn sin_t(frequency: f64, phase: f64) -> Self {
        Token::Parametric(Parametric::new(Family::Sin, Axis::Time, frequency, phase))
    }

    pub fn cos_t(frequency: f64, phase: f64) -> Self {
        Token::Parametric(Parametric::new(Family::Cos, Axis::Time, frequency, phase))
    }

    /// The derivative this token reads from the table, if any.
    pub fn spec(&self) -> Option<DerivativeSpec> {
        match *self {
            Token::Derivative(s) | Token::Power { spec: s, .. } => Some(s),
            Token::Parametric(_) => None,
        }
    }

    /// A derivative (or power of one) of order at least one.
    pub fn is_differential(&self) -> bool {
        self.spec().is_some_and(|s| !s.is_field())
    }

    pub fn parametric(&self) -> Option<&Parametric> {
        match self {
            Token::Parametric(p) => Some(p),
            _ => None,
        }
    }

    /// Same token with parametric parameters erased.
    pub fn shape(&self) -> TokenShape {
        match *self {
            Token::Derivative(s) => TokenShape::Derivative(s),
            Token::Power { spec, exponent } => TokenShape::Power(spec, exponent),
            Token::Parametric(p) => TokenShape::Parametric(p.family, p.axis),
        }
    }

    /// Values over the table's interior mask, row-major.
    pub fn evaluate(&self, table: &DerivativeTable) -> Result<Vec<f64>> {
        let mask = table.mask();
        match *self {
            Token::Derivative(spec) => Ok(mask.flatten(table.get(spec)?.values())),
            Token::Power { spec, exponent } => {
                let mut v = mask.flatten(table.get(spec)?.values());
                v.iter_mut().for_each(|x| *x = x.powi(exponent as i32));
                Ok(v)
            }
            Token::Parametric(p) => {
                let grid = table.grid();
                let coords = grid.axis(p.axis);
                Ok(mask
                    .indices()
                    .map(|(i, j)| {
                        let c = match p.axis {
                            Axis::Time => coords[i],
                            Axis::Space => coords[j],
                        };
                        p.family.apply(p.frequency * c + p.phase)
                    })
                    .collect())
            }
        }
    }
}

/// Token identity without continuous parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenShape {
    Derivative(DerivativeSpec),
    Power(DerivativeSpec, u8),
    Parametric(Family, Axis),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Derivative(s) => write!(f, "{s}"),
            Token::Power { spec, exponent } if spec.is_field() => write!(f, "u^{exponent}"),
            Token::Power { spec, exponent } => write!(f, "({spec})^{exponent}"),
            Token::Parametric(p) => {
                let var = p.axis.symbol();
                let arg = if format_sig(p.frequency, 6) == "1" {
                    var.to_string()
                } else {
                    format!("{}*{var}", format_sig(p.frequency, 6))
                };
                let phase = format_sig(p.phase, 6);
                if phase == "0" {
                    write!(f, "{}({arg})", p.family.name())
                } else if p.phase < 0.0 {
                    write!(f, "{}({arg}-{})", p.family.name(), format_sig(-p.phase, 6))
                } else {
                    write!(f, "{}({arg}+{phase})", p.family.name())
                }
            }
        }
    }
}

/// Rounds to `sig` significant digits and prints the shortest text for the
/// rounded value.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v == 0.0 {
            "0".into()
        } else {
            format!("{v}")
        };
    }
    let rounded: f64 = format!("{:.*e}", sig.max(1) - 1, v).parse().unwrap_or(v);
    let a = rounded.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}
