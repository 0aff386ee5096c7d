use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::derivatives::DerivativeSpec;
use crate::error::{Error, Result};
use crate::grid::Axis;

use super::equation::Equation;
use super::term::Term;
use super::token::{format_sig, Family, Parametric, Token};

/// Attempts made before giving up on drawing a valid term or equation.
pub const MAX_RETRIES: usize = 64;

/// Inclusive parameter range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.width() == 0.0 {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

/// A parametric family that the search may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametricSlot {
    pub family: Family,
    pub axis: Axis,
}

/// The building blocks available to the search and the size caps on terms
/// and equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenPool {
    pub derivatives: Vec<DerivativeSpec>,
    #[serde(default)]
    pub powers: Vec<(DerivativeSpec, u8)>,
    #[serde(default)]
    pub parametric: Vec<ParametricSlot>,
    pub frequency: Bounds,
    pub phase: Bounds,
    /// Discrete parameter values used when enumerating parametric tokens.
    pub frequency_lattice: Vec<f64>,
    pub phase_lattice: Vec<f64>,
    pub max_factors: usize,
    pub max_terms: usize,
    /// Optionally restrict terms to a single derivative factor of order ≥ 1.
    #[serde(default)]
    pub single_derivative_per_term: bool,
}

impl TokenPool {
    pub const DEFAULT_MAX_FACTORS: usize = 2;
    pub const DEFAULT_MAX_TERMS: usize = 5;

    /// Derivative-only pool with default caps.
    pub fn from_derivatives(specs: &[DerivativeSpec]) -> Self {
        Self {
            derivatives: specs.to_vec(),
            powers: Vec::new(),
            parametric: Vec::new(),
            frequency: Bounds::new(0.5, 4.0),
            phase: Bounds::new(0.0, 0.0),
            frequency_lattice: vec![1.0],
            phase_lattice: vec![0.0],
            max_factors: Self::DEFAULT_MAX_FACTORS,
            max_terms: Self::DEFAULT_MAX_TERMS,
            single_derivative_per_term: false,
        }
    }

    pub fn with_caps(mut self, max_factors: usize, max_terms: usize) -> Self {
        self.max_factors = max_factors;
        self.max_terms = max_terms;
        self
    }

    pub fn with_parametric(mut self, family: Family, axis: Axis) -> Self {
        self.parametric.push(ParametricSlot { family, axis });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.derivatives.is_empty() {
            return Err(Error::config("token pool needs at least one derivative token"));
        }
        for s in &self.derivatives {
            DerivativeSpec::new(s.axis(), s.order())?;
        }
        for (s, e) in &self.powers {
            Token::power(*s, *e)?;
        }
        if self.max_factors == 0 {
            return Err(Error::config("max_factors must be at least 1"));
        }
        if self.max_terms < 2 {
            return Err(Error::config("max_terms must be at least 2"));
        }
        if !self.parametric.is_empty() {
            let f = self.frequency;
            if !(f.lo > 0.0 && f.lo <= f.hi && f.hi.is_finite()) {
                return Err(Error::config("frequency bounds must satisfy 0 < lo <= hi"));
            }
            if self.phase.lo.is_nan() || self.phase.hi.is_nan() || self.phase.lo > self.phase.hi {
                return Err(Error::config("phase bounds are reversed"));
            }
        }
        Ok(())
    }

    /// Every derivative the pool's tokens read.
    pub fn required_specs(&self) -> Vec<DerivativeSpec> {
        let set: BTreeSet<DerivativeSpec> = self
            .derivatives
            .iter()
            .copied()
            .chain(self.powers.iter().map(|(s, _)| *s))
            .chain(std::iter::once(DerivativeSpec::FIELD))
            .collect();
        set.into_iter().collect()
    }

    fn slot_count(&self) -> usize {
        self.derivatives.len() + self.powers.len() + self.parametric.len()
    }

    pub fn sample_token<R: Rng + ?Sized>(&self, rng: &mut R) -> Token {
        let mut k = rng.random_range(0..self.slot_count());
        if k < self.derivatives.len() {
            return Token::Derivative(self.derivatives[k]);
        }
        k -= self.derivatives.len();
        if k < self.powers.len() {
            let (spec, exponent) = self.powers[k];
            return Token::Power { spec, exponent };
        }
        k -= self.powers.len();
        let slot = self.parametric[k];
        Token::Parametric(Parametric::new(
            slot.family,
            slot.axis,
            self.frequency.sample(rng),
            self.phase.sample(rng),
        ))
    }

    /// Whether `term` respects this pool's caps and restrictions.
    pub fn admits(&self, term: &Term) -> bool {
        term.len() <= self.max_factors && (!self.single_derivative_per_term || term.differential_count() <= 1)
    }

    /// Draws a term of 1..=max_factors tokens.
    pub fn random_term<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Term> {
        for _ in 0..MAX_RETRIES {
            let n = rng.random_range(1..=self.max_factors);
            let tokens = (0..n).map(|_| self.sample_token(rng)).collect();
            if let Ok(term) = Term::new(tokens) {
                if self.admits(&term) {
                    return Ok(term);
                }
            }
        }
        Err(Error::config("could not draw a valid term from the pool"))
    }

    /// Draws a random equation with 2..=max_terms distinct terms and a
    /// uniformly chosen RHS.
    pub fn random_equation<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Equation> {
        self.validate()?;
        let n_terms = rng.random_range(2..=self.max_terms);
        let mut terms: Vec<Term> = Vec::with_capacity(n_terms);
        let mut failures = 0;
        while terms.len() < n_terms {
            let term = self.random_term(rng)?;
            if terms.contains(&term) {
                failures += 1;
                if failures >= MAX_RETRIES {
                    return Err(Error::config(format!(
                        "token pool too small to build {n_terms} distinct terms"
                    )));
                }
                continue;
            }
            terms.push(term);
        }
        let rhs = rng.random_range(0..terms.len());
        Equation::new(terms, rhs)
    }

    /// All tokens with parametric families expanded over the parameter lattice.
    pub fn lattice_tokens(&self) -> Vec<Token> {
        let mut out: Vec<Token> = self.derivatives.iter().map(|s| Token::Derivative(*s)).collect();
        out.extend(
            self.powers
                .iter()
                .map(|&(spec, exponent)| Token::Power { spec, exponent }),
        );
        for slot in &self.parametric {
            for &f in &self.frequency_lattice {
                for &p in &self.phase_lattice {
                    out.push(Token::Parametric(Parametric::new(slot.family, slot.axis, f, p)));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Every admissible term over the lattice tokens: multisets of
    /// 1..=max_factors tokens.
    pub fn enumerate_terms(&self) -> Vec<Term> {
        let tokens = self.lattice_tokens();
        let mut terms = Vec::new();
        for k in 1..=self.max_factors {
            for combo in tokens.iter().copied().combinations_with_replacement(k) {
                if let Ok(term) = Term::new(combo) {
                    if self.admits(&term) {
                        terms.push(term);
                    }
                }
            }
        }
        terms.sort();
        terms
    }

    /// Parses the compact pool syntax used on the command line:
    ///
    /// `u,du/dt,d2u/dx2,u^2,sin(t),cos(t);factors=2;terms=5;freq=0.5:4;phase=0:0`
    ///
    /// Options after the token list are optional.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(';');
        let token_list = parts.next().unwrap_or_default();
        let mut pool = Self::from_derivatives(&[]);
        for raw in token_list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some((fam, rest)) = raw.split_once('(') {
                let family = match fam {
                    "sin" => Family::Sin,
                    "cos" => Family::Cos,
                    _ => return Err(Error::config(format!("unknown token `{raw}`"))),
                };
                let axis = match rest {
                    "t)" => Axis::Time,
                    "x)" => Axis::Space,
                    _ => return Err(Error::config(format!("unknown token `{raw}`"))),
                };
                pool.parametric.push(ParametricSlot { family, axis });
            } else if let Some((base, exp)) = raw.rsplit_once('^') {
                let base = base.trim_start_matches('(').trim_end_matches(')');
                let exponent: u8 = exp
                    .parse()
                    .map_err(|_| Error::config(format!("bad exponent in `{raw}`")))?;
                let spec = DerivativeSpec::parse(base)?;
                Token::power(spec, exponent)?;
                pool.powers.push((spec, exponent));
            } else {
                pool.derivatives.push(DerivativeSpec::parse(raw)?);
            }
        }
        for opt in parts.map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| Error::config(format!("pool option `{opt}` is not key=value")))?;
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse()
                    .map_err(|_| Error::config(format!("bad number `{v}` in pool option `{key}`")))
            };
            let range = |v: &str| -> Result<Bounds> {
                let (lo, hi) = v
                    .split_once(':')
                    .ok_or_else(|| Error::config(format!("pool option `{key}` expects lo:hi")))?;
                Ok(Bounds::new(num(lo)?, num(hi)?))
            };
            let list = |v: &str| -> Result<Vec<f64>> { v.split('|').map(num).collect() };
            match key.trim() {
                "factors" => pool.max_factors = num(value)? as usize,
                "terms" => pool.max_terms = num(value)? as usize,
                "freq" => pool.frequency = range(value)?,
                "phase" => pool.phase = range(value)?,
                "freq_lattice" => pool.frequency_lattice = list(value)?,
                "phase_lattice" => pool.phase_lattice = list(value)?,
                "single_derivative" => pool.single_derivative_per_term = value.trim() == "true",
                other => return Err(Error::config(format!("unknown pool option `{other}`"))),
            }
        }
        pool.validate()?;
        Ok(pool)
    }
}

/// Renders the compact syntax accepted by [`TokenPool::parse`].
impl fmt::Display for TokenPool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut toks: Vec<String> = self.derivatives.iter().map(|s| s.to_string()).collect();
        toks.extend(
            self.powers
                .iter()
                .map(|&(spec, exponent)| Token::Power { spec, exponent }.to_string()),
        );
        toks.extend(
            self.parametric
                .iter()
                .map(|s| format!("{}({})", s.family.name(), s.axis.symbol())),
        );
        let lat = |v: &[f64]| v.iter().map(|x| format_sig(*x, 17)).join("|");
        write!(
            f,
            "{};factors={};terms={}",
            toks.join(","),
            self.max_factors,
            self.max_terms
        )?;
        if !self.parametric.is_empty() {
            write!(
                f,
                ";freq={}:{};phase={}:{};freq_lattice={};phase_lattice={}",
                format_sig(self.frequency.lo, 17),
                format_sig(self.frequency.hi, 17),
                format_sig(self.phase.lo, 17),
                format_sig(self.phase.hi, 17),
                lat(&self.frequency_lattice),
                lat(&self.phase_lattice)
            )?;
        }
        if self.single_derivative_per_term {
            write!(f, ";single_derivative=true")?;
        }
        Ok(())
    }
}
