//! Sparse multivariate polynomials over [`ExactRational`] in the correlation
//! symbols `c_ij`.

mod format;
mod monomial;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use format::PolyTerm;
pub use monomial::{Monomial, Var};

use crate::error::{Error, Result};
use crate::rational::{gcd_big, ExactRational};

/// A polynomial in canonical form: no zero coefficients, so structural
/// equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, ExactRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Self::constant(ExactRational::one())
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn from_int(v: i64) -> Self {
        Self::constant(ExactRational::from_i64(v))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), ExactRational::one())
    }

    pub fn term(m: Monomial, c: ExactRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    /// Collects terms, merging repeated monomials.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, ExactRational)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the largest monomial down (the canonical print order).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactRational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> ExactRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<ExactRational> {
        self.is_constant().then(|| self.coeff(&Monomial::one()))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &ExactRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v)).collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: &ExactRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * m * other`.
    pub fn add_scaled(&mut self, other: &Polynomial, m: &Monomial, c: &ExactRational) {
        if c.is_zero() {
            return;
        }
        for (om, oc) in &other.terms {
            let coeff = if c.is_one() { oc.clone() } else { oc * c };
            let mono = if m.is_one() { om.clone() } else { om.mul(m) };
            self.add_term(mono, &coeff);
        }
    }

    pub fn scale(&self, c: &ExactRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn scale_int(&self, k: &BigInt) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul_int(k))).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &ExactRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(om, v)| (om.mul(m), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at an assignment covering every variable that occurs.
    pub fn eval(&self, assignment: &HashMap<Var, ExactRational>) -> Result<ExactRational> {
        let mut powers: HashMap<(Var, u32), ExactRational> = HashMap::new();
        let mut total = ExactRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.iter() {
                let base = assignment.get(&v).ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                let p = powers.entry((v, e)).or_insert_with(|| base.pow(e));
                t *= p;
            }
            total += &t;
        }
        Ok(total)
    }

    /// Replaces some variables by values, keeping the rest symbolic.
    pub fn substitute(&self, assignment: &HashMap<Var, ExactRational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m.iter() {
                match assignment.get(&v) {
                    Some(val) => coeff *= &val.pow(e),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), &coeff);
        }
        out
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading_term()?;
        if d.len() == 1 {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.div(dm)?, c / dc);
            }
            return Some(Polynomial { terms });
        }
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            rem.add_scaled(d, &qm, &-&qc);
            quot.add_term(qm, &qc);
        }
        Some(quot)
    }

    /// Positive rational `g` such that `self / g` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn content(&self) -> ExactRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = gcd_big(&num, c.numer());
            let g = gcd_big(&den, c.denom());
            den = &den / &g * c.denom();
        }
        if num.is_zero() {
            return ExactRational::zero();
        }
        ExactRational::new(num, den)
    }

    /// Sign-normalised primitive part: integer coefficients with gcd 1 and a
    /// positive leading coefficient.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut g = self.content();
        if self.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            g = -g;
        }
        self.scale(&g.recip())
    }

    /// Maps each coefficient through `f`, dropping those that become zero.
    pub fn map_coeffs(&self, f: impl Fn(&ExactRational) -> ExactRational) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

/// Greatest common divisor of polynomials in at most one (shared) variable,
/// normalised by [`Polynomial::primitive`]. Returns `None` for genuinely
/// multivariate input.
pub fn gcd_univariate(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let vars: BTreeSet<Var> = a.variables().union(&b.variables()).copied().collect();
    if vars.len() > 1 {
        return None;
    }
    let var = vars.into_iter().next();
    let to_dense = |p: &Polynomial| -> Vec<ExactRational> {
        let deg = p.total_degree() as usize;
        let mut v = vec![ExactRational::zero(); deg + 1];
        for (m, c) in p.terms() {
            v[m.degree() as usize] = c.clone();
        }
        v
    };
    let mut x = to_dense(a);
    let mut y = to_dense(b);
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = dense_rem(&x, &y);
        x = y;
        y = r;
    }
    let g = Polynomial::from_terms(x.into_iter().enumerate().map(|(d, c)| {
        let m = match var {
            Some(v) => Monomial::from_pairs([(v, d as u32)]),
            None => Monomial::one(),
        };
        (m, c)
    }));
    Some(g.primitive())
}

fn trim(v: &mut Vec<ExactRational>) {
    while v.last().is_some_and(ExactRational::is_zero) {
        v.pop();
    }
}

fn dense_rem(a: &[ExactRational], b: &[ExactRational]) -> Vec<ExactRational> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let q = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            let t = bc * &q;
            r[shift + i] -= &t;
        }
        r.pop();
        trim(&mut r);
    }
    // keep coefficients small
    if let Some(l) = r.last().cloned() {
        for c in r.iter_mut() {
            *c = &*c / &l;
        }
    }
    r
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let (small, big) = if self.len() <= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = Polynomial::zero();
        for (m, c) in &small.terms {
            out.add_scaled(big, m, c);
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += &rhs;
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= &rhs;
        self
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c);
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.clone().neg()
    }
}

impl From<ExactRational> for Polynomial {
    fn from(c: ExactRational) -> Self {
        Polynomial::constant(c)
    }
}
