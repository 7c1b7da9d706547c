//! Pure recurrences along one coordinate direction.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::error::{ParseError, Result};
use crate::poly::Polynomial;
use crate::rational::ExactRational;

use super::linalg::normalize_polys;

/// `Σ_{t=0..order} coeffs[t](n) · M(n − t·step) = 0` for every `n` of the
/// sequence's parity with `n ≥ offset + order·step`, where
/// `coeffs[t](n) = Σ_d coeffs[t][d] · n^d` and `M(n)` is the moment at
/// `fixed` with coordinate `direction` set to `n`.
///
/// Coefficient entries are polynomials in the symbolic covariance entries
/// (constants when the covariance is numeric).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub k: usize,
    /// 0-based coordinate.
    pub direction: usize,
    pub step: u32,
    pub order: usize,
    pub offset: u32,
    /// The frozen coordinates; the `direction` slot holds 0.
    pub fixed: MultiIndex,
    pub cov: CovarianceSpec,
    pub coeffs: Vec<Vec<Polynomial>>,
    /// Largest `n` at which the relation was imposed while fitting.
    pub fit_end: u32,
}

impl Recurrence {
    /// Degree in `n`: the longest coefficient list, minus one.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Parity of the indices the recurrence runs over.
    pub fn parity(&self) -> u32 {
        self.offset % 2
    }

    /// First index at which the relation may be solved for `M(n)`.
    pub fn first_application(&self) -> u32 {
        self.offset + self.step * self.order as u32
    }

    /// The multi-index with the running coordinate set to `n`.
    pub fn index(&self, n: u32) -> MultiIndex {
        self.fixed.with(self.direction, n)
    }

    /// `coeffs[t](n)` as a polynomial in the covariance symbols.
    pub fn coefficient_at(&self, t: usize, n: u32) -> Polynomial {
        let n = BigInt::from(n);
        let mut acc = Polynomial::zero();
        for c in self.coeffs[t].iter().rev() {
            acc = acc.scale_int(&n);
            acc += c;
        }
        acc
    }

    /// Left-hand side of the relation at `n`.
    pub fn residual(&self, n: u32, mut value: impl FnMut(u32) -> Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for t in 0..=self.order {
            let c = self.coefficient_at(t, n);
            if !c.is_zero() {
                acc += &(&c * &value(n - self.step * t as u32));
            }
        }
        acc
    }

    /// Drops vanishing outer coefficients and rescales to the canonical
    /// representative (coprime integer content, positive lead, common
    /// polynomial factor removed when there is at most one symbol).
    pub fn canonicalize(&mut self) {
        while self.order > 0 && self.coeffs[self.order].iter().all(Polynomial::is_zero) {
            self.coeffs.pop();
            self.order -= 1;
        }
        let lead_zero = self.coeffs.iter().take_while(|c| c.iter().all(Polynomial::is_zero)).count();
        if lead_zero > 0 && lead_zero <= self.order {
            let h = self.step * lead_zero as u32;
            self.coeffs = self.coeffs[lead_zero..].iter().map(|c| shift(c, h)).collect();
            self.order -= lead_zero;
            self.fit_end -= h;
        }
        let width = self
            .coeffs
            .iter()
            .map(|c| c.iter().rposition(|p| !p.is_zero()).map_or(0, |d| d + 1))
            .max()
            .unwrap_or(0)
            .max(1);
        for c in &mut self.coeffs {
            c.resize(width, Polynomial::zero());
        }
        let mut flat: Vec<Polynomial> = self.coeffs.iter().flatten().cloned().collect();
        // the sign is fixed by the highest power of n in the lead coefficient
        let lead_first: Vec<usize> = (0..width).rev().collect();
        let mut reordered: Vec<Polynomial> = lead_first.iter().map(|&d| flat[d].clone()).collect();
        reordered.extend(flat.drain(width..));
        normalize_polys(&mut reordered);
        let mut it = reordered.into_iter();
        let mut lead = vec![Polynomial::zero(); width];
        for &d in &lead_first {
            lead[d] = it.next().unwrap();
        }
        self.coeffs[0] = lead;
        for t in 1..=self.order {
            for d in 0..width {
                self.coeffs[t][d] = it.next().unwrap();
            }
        }
    }

    /// The same relation with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: &ExactRational) -> Recurrence {
        let mut r = self.clone();
        for c in r.coeffs.iter_mut().flatten() {
            *c = c.scale(s);
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RecurrenceJson::from(self)).expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> Result<Recurrence> {
        let j: RecurrenceJson = serde_json::from_str(s)?;
        Ok(j.try_into()?)
    }
}

/// `p(n + h)` for a coefficient list in powers of `n`.
fn shift(c: &[Polynomial], h: u32) -> Vec<Polynomial> {
    let h = BigInt::from(h);
    let mut out = vec![Polynomial::zero(); c.len()];
    for (d, a) in c.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        // (n + h)^d = Σ_e C(d, e) h^(d-e) n^e
        let mut binom = BigInt::one();
        for e in (0..=d).rev() {
            let f = &binom * num_traits::pow(h.clone(), d - e);
            out[e] += &a.scale_int(&f);
            binom = binom * e / (d - e + 1);
        }
    }
    out
}

/// Checks the relation at `points` consecutive indices after the fitting
/// window, reading sequence values from `oracle`.
pub fn verify(rec: &Recurrence, mut oracle: impl FnMut(u32) -> Polynomial, points: usize) -> bool {
    let mut memo: HashMap<u32, Polynomial> = HashMap::new();
    (1..=points as u32).all(|i| {
        let n = rec.fit_end + rec.step * i;
        rec.residual(n, |j| memo.entry(j).or_insert_with(|| oracle(j)).clone()).is_zero()
    })
}

#[derive(Serialize, Deserialize)]
struct RecurrenceJson {
    k: usize,
    direction: usize,
    step: u32,
    order: usize,
    offset: u32,
    fixed: MultiIndex,
    covariance: String,
    coeffs: Vec<Vec<String>>,
    fit_end: u32,
}

impl From<&Recurrence> for RecurrenceJson {
    fn from(r: &Recurrence) -> Self {
        RecurrenceJson {
            k: r.k,
            direction: r.direction + 1,
            step: r.step,
            order: r.order,
            offset: r.offset,
            fixed: r.fixed.clone(),
            covariance: r.cov.to_string(),
            coeffs: r.coeffs.iter().map(|c| c.iter().map(Polynomial::to_string).collect()).collect(),
            fit_end: r.fit_end,
        }
    }
}

impl TryFrom<RecurrenceJson> for Recurrence {
    type Error = ParseError;

    fn try_from(j: RecurrenceJson) -> Result<Self, ParseError> {
        let bad = |s: &str| ParseError::Recurrence(s.to_string());
        if j.direction == 0 || j.direction > j.k {
            return Err(bad("direction out of range"));
        }
        if j.fixed.len() != j.k {
            return Err(bad("fixed has the wrong length"));
        }
        if j.coeffs.len() != j.order + 1 {
            return Err(bad("coefficient count does not match order"));
        }
        if j.step == 0 {
            return Err(bad("step must be positive"));
        }
        let cov = CovarianceSpec::parse(j.k, &j.covariance)?;
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| c.iter().map(|s| s.parse::<Polynomial>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs[0].iter().all(Polynomial::is_zero) {
            return Err(bad("leading coefficient is zero"));
        }
        Ok(Recurrence {
            k: j.k,
            direction: j.direction - 1,
            step: j.step,
            order: j.order,
            offset: j.offset,
            fixed: j.fixed.with(j.direction - 1, 0),
            cov,
            coeffs,
            fit_end: j.fit_end,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::univariate_moment;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    /// `M(n) − (n − 1)·M(n − 2) = 0` on even n.
    pub(crate) fn double_factorial_rec() -> Recurrence {
        Recurrence {
            k: 1,
            direction: 0,
            step: 2,
            order: 1,
            offset: 0,
            fixed: MultiIndex::zeros(1),
            cov: CovarianceSpec::symbolic(1),
            coeffs: vec![vec![p("1"), p("0")], vec![p("1"), p("-1")]],
            fit_end: 2,
        }
    }

    fn univariate(n: u32) -> Polynomial {
        Polynomial::constant(univariate_moment(n))
    }

    #[test]
    fn double_factorial_verifies() {
        let rec = double_factorial_rec();
        assert!(verify(&rec, univariate, 10));
        let mut bad = rec.clone();
        bad.coeffs[1][0] += &Polynomial::one();
        assert!(!verify(&bad, univariate, 10));
    }

    #[test]
    fn scaling_keeps_verdict() {
        let rec = double_factorial_rec();
        let s = ExactRational::from_ratio(-7, 3);
        assert!(verify(&rec.scaled(&s), univariate, 10));
        let mut bad = rec.clone();
        bad.coeffs[0][0] = p("2");
        assert!(!verify(&bad.scaled(&s), univariate, 10));
    }

    #[test]
    fn canonical_form() {
        let mut rec = double_factorial_rec().scaled(&ExactRational::from_ratio(-3, 2));
        rec.coeffs.iter_mut().for_each(|c| c.push(Polynomial::zero()));
        rec.canonicalize();
        assert_eq!(rec, double_factorial_rec());
    }

    #[test]
    fn leading_zero_coefficient_is_shifted_away() {
        let base = double_factorial_rec();
        let mut rec = base.clone();
        rec.coeffs.insert(0, vec![Polynomial::zero(), Polynomial::zero()]);
        rec.order = 2;
        // M(n-2) - (n-3) M(n-4) = 0 becomes the base relation
        rec.coeffs[2] = vec![p("3"), p("-1")];
        rec.fit_end = 4;
        rec.canonicalize();
        assert_eq!(rec, base);
    }

    #[test]
    fn json_round_trip() {
        let mut rec = double_factorial_rec();
        rec.k = 2;
        rec.cov = CovarianceSpec::symbolic(2);
        rec.fixed = MultiIndex::new([0, 2]);
        rec.coeffs[1][1] = p("-1 - c12^2");
        let js = rec.to_json();
        assert_eq!(Recurrence::from_json(&js).unwrap(), rec);
        assert!(js.contains("\"direction\": 1"));
        assert!(Recurrence::from_json(&js.replace("\"order\": 1", "\"order\": 2")).is_err());
    }
}
