use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::ParseError;

/// The correlation symbol `c_ij` with `1 <= i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    i: u16,
    j: u16,
}

impl Var {
    /// Creates `c_ij`; the pair is reordered so that `i < j`. Panics if `i == j` or
    /// either index is zero.
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i != j && i >= 1 && j >= 1, "invalid correlation symbol c{i}{j}");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Var { i: i as u16, j: j as u16 }
    }

    /// 1-based coordinate pair.
    pub fn pair(self) -> (usize, usize) {
        (self.i as usize, self.j as usize)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.i <= 9 && self.j <= 9 {
            write!(f, "c{}{}", self.i, self.j)
        } else {
            write!(f, "c{}_{}", self.i, self.j)
        }
    }
}

impl FromStr for Var {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Variable(s.to_string());
        let body = s.strip_prefix('c').ok_or_else(bad)?;
        let (i, j) = match body.split_once('_') {
            Some((a, b)) => (a, b),
            None if body.len() == 2 => body.split_at(1),
            None => return Err(bad()),
        };
        let parse = |t: &str| -> Result<usize, ParseError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) || t.starts_with('0') {
                return Err(bad());
            }
            t.parse::<u16>().map(usize::from).map_err(|_| bad())
        };
        let (i, j) = (parse(i)?, parse(j)?);
        // two-digit indices must use the underscore form so the text stays unambiguous
        if i >= j || (body.contains('_') && i <= 9 && j <= 9) {
            return Err(bad());
        }
        Ok(Var::new(i, j))
    }
}

/// A power product of correlation symbols. Zero exponents are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: SmallVec<[(Var, u32); 3]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Self::from_pairs([(v, 1)])
    }

    /// Builds a monomial from `(variable, exponent)` pairs; repeated variables
    /// accumulate and zero exponents vanish.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut exps: SmallVec<[(Var, u32); 3]> = SmallVec::new();
        for (v, e) in pairs {
            match exps.binary_search_by(|(w, _)| w.cmp(&v)) {
                Ok(pos) => exps[pos].1 += e,
                Err(pos) => exps.insert(pos, (v, e)),
            }
        }
        exps.retain(|(_, e)| *e > 0);
        Monomial { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.exps
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|pos| self.exps[pos].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.exps.iter().copied()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: SmallVec<[(Var, u32); 3]> = SmallVec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (self.exps.iter().peekable(), other.exps.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&x)) => {
                    out.push(x);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { exps: out }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.exps.clone();
        for (v, e) in other.iter() {
            let pos = out.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
            if out[pos].1 < e {
                return None;
            }
            out[pos].1 -= e;
        }
        out.retain(|(_, e)| *e > 0);
        Some(Monomial { exps: out })
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.iter().map(|(v, e)| (f(v), e)))
    }
}

/// Lexicographic order on exponent vectors with `c12` most significant, then
/// `c13`, and so on. Terms print from the largest monomial down.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.exps.iter(), other.exps.iter());
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        // the side holding the smaller variable has a positive exponent where the other has 0
                        return if va < vb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: usize, j: usize) -> Var {
        Var::new(i, j)
    }

    #[test]
    fn var_text() {
        assert_eq!(c(1, 2).to_string(), "c12");
        assert_eq!(c(3, 10).to_string(), "c3_10");
        assert_eq!("c23".parse::<Var>().unwrap(), c(2, 3));
        assert_eq!("c3_10".parse::<Var>().unwrap(), c(3, 10));
        for bad in ["c21", "c11", "c1_2", "c123", "x12", "c", "c0_3", "c01"] {
            assert!(bad.parse::<Var>().is_err(), "{bad}");
        }
    }

    #[test]
    fn lex_order() {
        let c12 = Monomial::var(c(1, 2));
        let c12_3 = Monomial::from_pairs([(c(1, 2), 3)]);
        let c13c23 = Monomial::from_pairs([(c(1, 3), 1), (c(2, 3), 1)]);
        assert!(c12_3 > c12);
        assert!(c12 > c13c23);
        assert!(c13c23 > Monomial::one());
        assert!(Monomial::var(c(1, 3)) > Monomial::from_pairs([(c(2, 3), 5)]));
    }

    #[test]
    fn mul_div() {
        let a = Monomial::from_pairs([(c(1, 2), 2), (c(2, 3), 1)]);
        let b = Monomial::from_pairs([(c(1, 3), 1), (c(2, 3), 2)]);
        let p = a.mul(&b);
        assert_eq!(p.to_string(), "c12^2*c13*c23^3");
        assert_eq!(p.div(&b), Some(a.clone()));
        assert_eq!(a.div(&b), None);
        assert!(Monomial::from_pairs([(c(1, 2), 0)]).is_one());
    }
}
