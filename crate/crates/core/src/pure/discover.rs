//! Guess-and-verify search for pure recurrences.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::ExactRational;
use crate::stein::{self, sequence_indices, Pivot, ScaledAlgebra};
use crate::wick::enumerate_pairing_types;

use super::evaluate::{horner, scaled_coefficients};
use super::linalg::{nullspace_budgeted, BudgetExceeded};
use super::modular::{integer_nullspace, reduce, ModularNullspace};
use super::recurrence::Recurrence;

/// Held-out points every accepted recurrence must satisfy.
pub const HELD_OUT: usize = 16;

/// Bounds on the recurrence search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_order: usize,
    /// Degree of the coefficients in the running index.
    pub max_degree: usize,
    /// Primes tried per candidate before giving up on reconstruction.
    pub max_primes: usize,
    /// Term count allowed in any elimination entry when the coefficient
    /// field has two or more symbols.
    pub max_terms: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_order: 8, max_degree: 12, max_primes: 2000, max_terms: 4000 }
    }
}

impl SearchLimits {
    pub fn new(max_order: usize, max_degree: usize) -> Self {
        SearchLimits { max_order, max_degree, ..Default::default() }
    }

    /// Sequence values consumed by the candidate `(order, degree)` fitted
    /// from value index `skip`.
    fn values_needed(order: usize, degree: usize, skip: usize) -> usize {
        skip + order + (order + 1) * (degree + 1) + 2 * HELD_OUT
    }
}

/// Values of the sequence `n ↦ M(fixed with direction := n)` on one parity
/// class, starting at the smallest index of that class.
#[derive(Clone, Debug)]
pub(crate) enum SeedValues {
    /// `q^{|m|/2} M` for an all-numeric covariance.
    Scaled { q: BigInt, values: Vec<BigInt> },
    Symbolic(Vec<Polynomial>),
}

impl SeedValues {
    pub(crate) fn compute(cov: &CovarianceSpec, direction: usize, fixed: &MultiIndex, count: usize) -> SeedValues {
        let p0 = fixed.total() % 2;
        match cov.scaled_integer_matrix() {
            Some((q, w)) => {
                let targets = sequence_indices(direction, fixed, p0, count, 2);
                let values = stein::sweep(&ScaledAlgebra { w }, &targets, Pivot::Prefer(direction));
                SeedValues::Scaled { q, values }
            }
            None => SeedValues::Symbolic(
                stein::seed_sequence(cov, direction, fixed, p0, count, 2).expect("arguments checked by caller"),
            ),
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            SeedValues::Scaled { values, .. } => values.len(),
            SeedValues::Symbolic(v) => v.len(),
        }
    }

    /// The moment at value index `i` (index `p0 + 2i`).
    pub(crate) fn moment(&self, i: usize, base: u32) -> Polynomial {
        match self {
            SeedValues::Scaled { q, values } => {
                let total = base + (base % 2) + 2 * i as u32;
                Polynomial::constant(stein::unscale(values[i].clone(), q, total))
            }
            SeedValues::Symbolic(v) => v[i].clone(),
        }
    }
}

/// Finds and verifies a pure recurrence in `direction` (0-based) for the
/// moments at `fixed` (whose `direction` entry is ignored).
pub fn discover(
    cov: &CovarianceSpec,
    direction: usize,
    fixed: &MultiIndex,
    limits: &SearchLimits,
) -> Result<Recurrence> {
    discover_with_values(cov, direction, fixed, limits).map(|(r, _)| r)
}

pub(crate) fn discover_with_values(
    cov: &CovarianceSpec,
    direction: usize,
    fixed: &MultiIndex,
    limits: &SearchLimits,
) -> Result<(Recurrence, SeedValues)> {
    stein::check_seed_args(cov, direction, fixed, 1, 2)?;
    if limits.max_order == 0 || limits.max_primes == 0 {
        return Err(Error::InvalidArgument("search limits must be positive".into()));
    }
    let fixed = fixed.with(direction, 0);
    let multi_symbol = cov.symbols().len() >= 2;
    let mut values: Option<SeedValues> = None;
    let mut tried = (0, 0);
    let mut reason = None;
    let top = SearchLimits::values_needed(limits.max_order, limits.max_degree, limits.max_order);
    for s in 1..=(limits.max_order + limits.max_degree) {
        for order in 1..=limits.max_order.min(s) {
            let degree = s - order;
            if degree > limits.max_degree {
                continue;
            }
            tried = (order, degree);
            for skip in [0, order] {
                let need = SearchLimits::values_needed(order, degree, skip);
                let have = values.as_ref().map_or(0, SeedValues::len);
                if have < need {
                    let grow = (need.max(have + have / 2)).min(top.max(need));
                    if multi_symbol {
                        // monomials of the top seed are bounded by its pairing types
                        let top_index = fixed.with(direction, fixed.total() % 2 + 2 * (grow as u32 - 1));
                        if enumerate_pairing_types(&top_index).take(limits.max_terms + 1).count() > limits.max_terms {
                            reason = Some("seed values exceed the term budget".to_string());
                            return Err(not_found(limits, tried, reason));
                        }
                    }
                    values = Some(SeedValues::compute(cov, direction, &fixed, grow));
                }
                let vals = values.as_ref().unwrap();
                let cand = Candidate { cov, direction, fixed: &fixed, order, degree, skip };
                let found = match vals {
                    SeedValues::Scaled { q, values } => cand.fit_scaled(q, values, limits.max_primes),
                    SeedValues::Symbolic(v) => {
                        let budget = if multi_symbol { limits.max_terms } else { usize::MAX };
                        match cand.fit_symbolic(v, budget) {
                            Ok(r) => r,
                            Err(BudgetExceeded) => {
                                reason = Some("elimination exceeded the term budget".to_string());
                                return Err(not_found(limits, tried, reason));
                            }
                        }
                    }
                };
                match found {
                    Fit::Found(rec) => return Ok((rec, values.unwrap())),
                    Fit::Undetermined => reason = Some("rational reconstruction did not stabilise".into()),
                    Fit::None => {}
                }
            }
        }
    }
    Err(not_found(limits, tried, reason))
}

fn not_found(limits: &SearchLimits, tried: (usize, usize), reason: Option<String>) -> Error {
    Error::NotFound {
        max_order: limits.max_order,
        max_degree: limits.max_degree,
        tried_order: tried.0,
        tried_degree: tried.1,
        reason,
    }
}

enum Fit {
    Found(Recurrence),
    None,
    Undetermined,
}

struct Candidate<'a> {
    cov: &'a CovarianceSpec,
    direction: usize,
    fixed: &'a MultiIndex,
    order: usize,
    degree: usize,
    /// Value index of the offset.
    skip: usize,
}

impl Candidate<'_> {
    fn unknowns(&self) -> usize {
        (self.order + 1) * (self.degree + 1)
    }

    fn p0(&self) -> u32 {
        self.fixed.total() % 2
    }

    /// Value index of the `r`-th fitting row (held-out rows continue on).
    fn row_index(&self, r: usize) -> usize {
        self.skip + self.order + r
    }

    fn n_of(&self, i: usize) -> u32 {
        self.p0() + 2 * i as u32
    }

    fn fit_rows(&self) -> usize {
        self.unknowns() + HELD_OUT
    }

    fn recurrence(&self, coeffs: Vec<Vec<Polynomial>>) -> Recurrence {
        let mut rec = Recurrence {
            k: self.cov.k(),
            direction: self.direction,
            step: 2,
            order: self.order,
            offset: self.n_of(self.skip),
            fixed: self.fixed.clone(),
            cov: self.cov.clone(),
            coeffs,
            fit_end: self.n_of(self.row_index(self.fit_rows() - 1)),
        };
        rec.canonicalize();
        rec
    }

    fn fit_scaled(&self, q: &BigInt, values: &[BigInt], max_primes: usize) -> Fit {
        let (o, d1) = (self.order, self.degree + 1);
        let rows = self.fit_rows();
        let lo = self.skip;
        let hi = self.row_index(rows - 1);
        let reduce_rows = |p: u64| -> Vec<Vec<u64>> {
            let vm: Vec<u64> = values[lo..=hi].iter().map(|v| reduce(v, p)).collect();
            (0..rows)
                .map(|r| {
                    let i = self.row_index(r);
                    let n = self.n_of(i) as u64 % p;
                    let mut row = Vec::with_capacity((o + 1) * d1);
                    for t in 0..=o {
                        let mut x = vm[i - t - lo];
                        for _ in 0..d1 {
                            row.push(x);
                            x = ((x as u128 * n as u128) % p as u128) as u64;
                        }
                    }
                    row
                })
                .collect()
        };
        let residual = |y: &[BigInt], i: usize| -> BigInt {
            let n = BigInt::from(self.n_of(i));
            (0..=o).map(|t| horner(&y[t * d1..(t + 1) * d1], &n) * &values[i - t]).sum()
        };
        let check = |y: &[BigInt]| (0..rows).all(|r| residual(y, self.row_index(r)).is_zero());
        let basis = match integer_nullspace(self.unknowns(), max_primes, reduce_rows, check) {
            ModularNullspace::Trivial => return Fit::None,
            ModularNullspace::Undetermined => return Fit::Undetermined,
            ModularNullspace::Basis(b) => b,
        };
        for y in basis {
            // back from the scaled sequence: x_t = y_t / q^t
            let mut qt = BigInt::one();
            let mut coeffs = Vec::with_capacity(o + 1);
            for t in 0..=o {
                coeffs.push(
                    y[t * d1..(t + 1) * d1]
                        .iter()
                        .map(|v| Polynomial::constant(ExactRational::new(v.clone(), qt.clone())))
                        .collect(),
                );
                qt *= q;
            }
            let rec = self.recurrence(coeffs);
            let yc = scaled_coefficients(&rec, q).expect("numeric coefficients");
            let held_out = (1..=HELD_OUT).all(|h| {
                let n = BigInt::from(rec.fit_end + 2 * h as u32);
                let i = ((rec.fit_end - self.p0()) / 2) as usize + h;
                (0..=rec.order).map(|t| horner(&yc[t], &n) * &values[i - t]).sum::<BigInt>().is_zero()
            });
            if held_out {
                return Fit::Found(rec);
            }
        }
        Fit::None
    }

    fn fit_symbolic(&self, values: &[Polynomial], budget: usize) -> Result<Fit, BudgetExceeded> {
        let (o, d1) = (self.order, self.degree + 1);
        let row = |r: usize| -> Vec<Polynomial> {
            let i = self.row_index(r);
            let n = BigInt::from(self.n_of(i));
            let mut out = Vec::with_capacity((o + 1) * d1);
            for t in 0..=o {
                let mut x = values[i - t].clone();
                for _ in 0..d1 {
                    out.push(x.clone());
                    x = x.scale_int(&n);
                }
            }
            out
        };
        let all = self.fit_rows();
        let residual_zero = |x: &[Polynomial], r: usize| -> bool {
            let mut acc = Polynomial::zero();
            for (a, b) in row(r).iter().zip(x) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc.is_zero()
        };
        let last = self.row_index(all - 1);
        if values[..=last].iter().any(|v| v.len() > budget) {
            return Err(BudgetExceeded);
        }
        let mut used = (self.unknowns() + 2).min(all);
        let basis = loop {
            let rows: Vec<Vec<Polynomial>> = (0..used).map(row).collect();
            let basis = nullspace_budgeted(&rows, budget)?;
            if basis.is_empty() {
                return Ok(Fit::None);
            }
            if used == all || basis.iter().all(|x| (used..all).all(|r| residual_zero(x, r))) {
                break basis;
            }
            used = all;
        };
        for x in basis {
            let coeffs: Vec<Vec<Polynomial>> = x.chunks(d1).map(<[Polynomial]>::to_vec).collect();
            let rec = self.recurrence(coeffs);
            let base = self.p0();
            let value = |n: u32| values[((n - base) / 2) as usize].clone();
            if super::recurrence::verify(&rec, value, HELD_OUT) {
                return Ok(Fit::Found(rec));
            }
        }
        Ok(Fit::None)
    }
}
