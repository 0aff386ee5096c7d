use std::cmp::Ordering;
use std::fmt;

use crate::derivatives::DerivativeTable;
use crate::error::{Error, Result};

use super::token::{Token, TokenShape};

/// Product of tokens, stored as a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    tokens: Vec<Token>,
}

impl Term {
    /// Builds a term; token order is irrelevant. Fails on an empty product or
    /// on two parametric tokens with identical parameters.
    pub fn new(mut tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::config("a term needs at least one token"));
        }
        tokens.sort();
        let dup_param = tokens
            .windows(2)
            .any(|w| w[0] == w[1] && matches!(w[0], Token::Parametric(_)));
        if dup_param {
            return Err(Error::config("duplicate parametric token in term"));
        }
        Ok(Self { tokens })
    }

    pub fn single(token: Token) -> Self {
        Self { tokens: vec![token] }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Token count `k_i`.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn differential_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_differential()).count()
    }

    pub fn has_parametric(&self) -> bool {
        self.tokens.iter().any(|t| t.parametric().is_some())
    }

    /// Token shapes with parameters erased, sorted.
    pub fn shape(&self) -> Vec<TokenShape> {
        let mut s: Vec<TokenShape> = self.tokens.iter().map(Token::shape).collect();
        s.sort();
        s
    }

    pub fn evaluate(&self, table: &DerivativeTable) -> Result<Vec<f64>> {
        let mut iter = self.tokens.iter();
        let mut acc = iter.next().expect("non-empty term").evaluate(table)?;
        for tok in iter {
            let v = tok.evaluate(table)?;
            acc.iter_mut().zip(&v).for_each(|(a, b)| *a *= b);
        }
        Ok(acc)
    }
}

/// Terms compare by their tokens taken from the highest-ranked down, so
/// `du/dt` sorts before `u*du/dx` and time derivatives before space ones.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tokens.iter().rev().cmp(other.tokens.iter().rev())
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}
