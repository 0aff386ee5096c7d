use std::fmt;

use crate::error::{Error, Result};

use super::term::Term;
use super::token::format_sig;

/// Outcome of coefficient fitting attached to an [`Equation`].
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    /// One coefficient per non-RHS term, in term order.
    pub coefficients: Vec<f64>,
    /// The RHS term evaluates to the zero tensor on the data.
    pub rhs_is_zero: bool,
    /// Every term evaluates to the zero tensor.
    pub degenerate: bool,
}

/// `Σ α_i T_i = T_rhs`: a list of distinct terms, one of them marked as the
/// right-hand side, plus fitted coefficients for the others.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    terms: Vec<Term>,
    rhs_index: usize,
    fit: Option<Fit>,
}

impl Equation {
    pub fn new(terms: Vec<Term>, rhs_index: usize) -> Result<Self> {
        if terms.len() < 2 {
            return Err(Error::config("an equation needs at least two terms"));
        }
        if rhs_index >= terms.len() {
            return Err(Error::config(format!(
                "rhs index {rhs_index} out of range for {} terms",
                terms.len()
            )));
        }
        for (i, a) in terms.iter().enumerate() {
            if terms[i + 1..].contains(a) {
                return Err(Error::config(format!("duplicate term {a}")));
            }
        }
        Ok(Self {
            terms,
            rhs_index,
            fit: None,
        })
    }

    /// Builds an equation with known coefficients, e.g. a reference
    /// equation. `coefficients` has one entry per non-RHS term.
    pub fn with_coefficients(terms: Vec<Term>, rhs_index: usize, coefficients: Vec<f64>) -> Result<Self> {
        let eq = Self::new(terms, rhs_index)?;
        if coefficients.len() != eq.terms.len() - 1 {
            return Err(Error::config("coefficient count must equal term count minus one"));
        }
        Ok(eq.fitted(Fit {
            coefficients,
            rhs_is_zero: false,
            degenerate: false,
        }))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn rhs_index(&self) -> usize {
        self.rhs_index
    }

    pub fn rhs(&self) -> &Term {
        &self.terms[self.rhs_index]
    }

    pub fn fit(&self) -> Option<&Fit> {
        self.fit.as_ref()
    }

    pub fn is_fitted(&self) -> bool {
        self.fit.is_some()
    }

    pub fn is_degenerate(&self) -> bool {
        self.fit.as_ref().is_some_and(|f| f.degenerate)
    }

    pub(crate) fn fitted(mut self, fit: Fit) -> Self {
        debug_assert_eq!(fit.coefficients.len(), self.terms.len() - 1);
        self.fit = Some(fit);
        self
    }

    /// Returns the equation with a different RHS marking and no fit.
    pub fn with_rhs(&self, rhs_index: usize) -> Result<Self> {
        Self::new(self.terms.clone(), rhs_index)
    }

    /// Drops the fit, e.g. after a structural change.
    pub fn into_unfitted(mut self) -> Self {
        self.fit = None;
        self
    }

    /// Left-hand-side coefficients for all terms: the fitted `α_i` and `-1`
    /// at the RHS slot, so that `Σ c_i T_i = 0`.
    pub fn full_coefficients(&self) -> Result<Vec<f64>> {
        let fit = self
            .fit
            .as_ref()
            .ok_or_else(|| Error::config("equation is not fitted"))?;
        let mut it = fit.coefficients.iter();
        Ok((0..self.terms.len())
            .map(|i| if i == self.rhs_index { -1.0 } else { *it.next().unwrap() })
            .collect())
    }

    /// Normalized, deterministically ordered form used to compare fitted
    /// equations regardless of RHS choice, scaling or term order.
    ///
    /// Zero-coefficient terms are dropped, the remaining terms are sorted by
    /// the term ordering, and all coefficients are divided by the leading
    /// one.
    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        let coefs = self.full_coefficients()?;
        let mut pairs: Vec<(Term, f64)> = self
            .terms
            .iter()
            .cloned()
            .zip(coefs)
            .filter(|(_, c)| *c != 0.0)
            .collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let lead = pairs[0].1;
        pairs.iter_mut().for_each(|(_, c)| *c /= lead);
        Ok(CanonicalForm { terms: pairs })
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fit.as_ref() {
            None => {
                let lhs: Vec<String> = self
                    .terms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != self.rhs_index)
                    .map(|(_, t)| format!("?*{t}"))
                    .collect();
                write!(f, "{} = {}", lhs.join(" + "), self.rhs())
            }
            Some(_) => match self.canonical_form() {
                Ok(c) => write!(f, "{c}"),
                Err(_) => write!(f, "<invalid>"),
            },
        }
    }
}

/// Sorted `(term, coefficient)` pairs with the leading coefficient equal to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    terms: Vec<(Term, f64)>,
}

impl CanonicalForm {
    pub fn terms(&self) -> &[(Term, f64)] {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|(_, c)| *c).collect()
    }

    pub fn coefficient_of(&self, term: &Term) -> Option<f64> {
        self.terms.iter().find(|(t, _)| t == term).map(|(_, c)| *c)
    }

    /// Renders `<coef>*<term> ± ... = 0` with coefficients rounded to `sig`
    /// significant digits; unit coefficients are omitted.
    pub fn render(&self, sig: usize) -> String {
        let mut out = String::new();
        for (i, (term, c)) in self.terms.iter().enumerate() {
            let mag = format_sig(c.abs(), sig);
            let sign = if *c < 0.0 { "-" } else { "+" };
            if i == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push(' ');
                out.push_str(sign);
                out.push(' ');
            }
            if mag != "1" {
                out.push_str(&mag);
                out.push('*');
            }
            out.push_str(&term.to_string());
        }
        out.push_str(" = 0");
        out
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(6))
    }
}
