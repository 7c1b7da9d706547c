//! Canonical text and JSON forms.
//!
//! Text: `6*c12^3 + 9*c12`, terms from the lexicographically largest
//! monomial down, coefficients as `p/q`, unit coefficients omitted.
//! JSON: `[{"coeff": "p/q", "exps": {"c12": 3}}, ...]` in the same order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Monomial, Polynomial, Var};
use crate::error::ParseError;
use crate::rational::ExactRational;

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl FromStr for Polynomial {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| ParseError::Polynomial(format!("{why} in `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty input"));
        }
        // split into signed terms
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && !current.ends_with('/') {
                if i == 0 {
                    negative = ch == '-';
                    continue;
                }
                if current.is_empty() {
                    return Err(bad("dangling sign"));
                }
                pieces.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(bad("dangling sign"));
        }
        pieces.push((negative, current));

        let mut poly = Polynomial::zero();
        for (neg, body) in pieces {
            let mut coeff = ExactRational::one();
            let mut vars = Vec::new();
            for (fi, factor) in body.split('*').enumerate() {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                if factor.starts_with('c') {
                    let (name, exp) = match factor.split_once('^') {
                        Some((n, e)) => {
                            if !e.bytes().all(|b| b.is_ascii_digit()) || e.is_empty() {
                                return Err(bad("bad exponent"));
                            }
                            (n, e.parse::<u32>().map_err(|_| bad("bad exponent"))?)
                        }
                        None => (factor, 1),
                    };
                    vars.push((name.parse::<Var>()?, exp));
                } else if fi == 0 {
                    coeff = factor.parse::<ExactRational>()?;
                } else {
                    return Err(bad("coefficient must lead the term"));
                }
            }
            if neg {
                coeff = -coeff;
            }
            poly.add_term(Monomial::from_pairs(vars), &coeff);
        }
        Ok(poly)
    }
}

/// One term of the JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: String,
    pub exps: BTreeMap<String, u32>,
}

impl Polynomial {
    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.terms()
            .map(|(m, c)| PolyTerm {
                coeff: c.to_string(),
                exps: m.iter().map(|(v, e)| (v.to_string(), e)).collect(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[PolyTerm]) -> Result<Polynomial, ParseError> {
        let mut p = Polynomial::zero();
        for t in terms {
            let c: ExactRational = t.coeff.parse()?;
            let mut pairs = Vec::with_capacity(t.exps.len());
            for (name, &e) in &t.exps {
                if e == 0 {
                    return Err(ParseError::Polynomial(format!("zero exponent for {name}")));
                }
                pairs.push((name.parse::<Var>()?, e));
            }
            p.add_term(Monomial::from_pairs(pairs), &c);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_terms()).expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> Result<Polynomial, ParseError> {
        let terms: Vec<PolyTerm> =
            serde_json::from_str(s).map_err(|e| ParseError::Polynomial(e.to_string()))?;
        Self::from_json_terms(&terms)
    }
}
