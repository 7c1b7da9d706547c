//! The mixed recurrence from Gaussian integration by parts.
//!
//! For any coordinate `i` with `m_i >= 1`:
//!
//! ```text
//! M(m) = Σ_j c_ij · (m_j - [j = i]) · M(m - e_i - e_j),   c_ii = 1
//! ```
//!
//! with `M(0) = 1`. Every dependency sits exactly two levels (in total
//! order) below its parent, so the down-set of the targets is evaluated one
//! level at a time, bottom-up, keeping only two levels of values alive.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::covariance::{CovarianceSpec, Entry, MultiIndex};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, Var};
use crate::rational::ExactRational;

/// Which coordinate a multi-index is unwound along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    /// The largest remaining order, lowest index on ties.
    Largest,
    /// The given coordinate while it is positive, then [`Pivot::Largest`].
    Prefer(usize),
}

impl Pivot {
    fn choose(self, m: &MultiIndex) -> usize {
        match self {
            Pivot::Prefer(d) if m[d] > 0 => d,
            _ => m.argmax(),
        }
    }
}

/// Value ring the recurrence runs in.
pub(crate) trait MomentAlgebra {
    type Value: Clone;
    fn one(&self) -> Self::Value;
    fn zero(&self) -> Self::Value;
    /// `acc += c_ij * mult * v`
    fn add_weighted(&self, acc: &mut Self::Value, i: usize, j: usize, mult: u64, v: &Self::Value);
}

/// Numeric covariance scaled to integers: values are `q^{|m|/2} M(m)`.
pub(crate) struct ScaledAlgebra {
    pub w: Vec<Vec<BigInt>>,
}

impl MomentAlgebra for ScaledAlgebra {
    type Value = BigInt;

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn add_weighted(&self, acc: &mut BigInt, i: usize, j: usize, mult: u64, v: &BigInt) {
        let w = &self.w[i][j];
        if w.is_zero() || v.is_zero() {
            return;
        }
        let factor = w * mult;
        *acc += v * factor;
    }
}

/// General covariance: values are polynomials in the symbolic entries.
pub(crate) struct PolyAlgebra {
    weights: Vec<Vec<(Monomial, ExactRational)>>,
}

impl PolyAlgebra {
    pub fn new(cov: &CovarianceSpec) -> Self {
        let k = cov.k();
        let weights = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { (Monomial::one(), ExactRational::one()) } else { cov.weight_power(i, j, 1) })
                    .collect()
            })
            .collect();
        PolyAlgebra { weights }
    }
}

impl MomentAlgebra for PolyAlgebra {
    type Value = Polynomial;

    fn one(&self) -> Polynomial {
        Polynomial::one()
    }

    fn zero(&self) -> Polynomial {
        Polynomial::zero()
    }

    fn add_weighted(&self, acc: &mut Polynomial, i: usize, j: usize, mult: u64, v: &Polynomial) {
        let (m, c) = &self.weights[i][j];
        let c = c.mul_int(&BigInt::from(mult));
        acc.add_scaled(v, m, &c);
    }
}

/// Symbolic covariance with integer-scaled coefficients: values are
/// `q^{|m|/2} M(m)` stored as term lists sorted by exponent vectors packed
/// into a `u128`, one bit field per symbol.
pub(crate) struct PackedAlgebra {
    q: BigInt,
    bits: u32,
    symbols: Vec<Var>,
    shift: Vec<Vec<u128>>,
    scalar: Vec<Vec<BigInt>>,
}

pub(crate) type Packed = Vec<(u128, BigInt)>;

impl PackedAlgebra {
    /// `None` when the exponents reachable at total order `max_total` do not
    /// fit the bit fields.
    pub fn new(cov: &CovarianceSpec, max_total: u32) -> Option<Self> {
        let symbols = cov.symbols();
        let bits = 128 / symbols.len().max(1) as u32;
        if bits < 64 && (max_total / 2) as u128 >= 1u128 << bits {
            return None;
        }
        let k = cov.k();
        let mut q = BigInt::one();
        for e in cov.entries() {
            if let Entry::Numeric(v) = e {
                q = num_integer::Integer::lcm(&q, v.denom());
            }
        }
        let mut shift = vec![vec![0u128; k]; k];
        let mut scalar = vec![vec![q.clone(); k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let (sh, sc) = match cov.entry(i, j) {
                    Entry::Symbolic => {
                        let pos = symbols.iter().position(|v| *v == Var::new(i + 1, j + 1)).unwrap();
                        (1u128 << (pos as u32 * bits), q.clone())
                    }
                    Entry::Numeric(v) => (0, v.numer() * (&q / v.denom())),
                };
                shift[i][j] = sh;
                shift[j][i] = sh;
                scalar[i][j] = sc.clone();
                scalar[j][i] = sc;
            }
        }
        Some(PackedAlgebra { q, bits, symbols, shift, scalar })
    }

    pub fn unpack(&self, v: Packed, total: u32) -> Polynomial {
        let den = num_traits::pow(self.q.clone(), (total / 2) as usize);
        let mask = if self.bits >= 128 { u128::MAX } else { (1u128 << self.bits) - 1 };
        Polynomial::from_terms(v.into_iter().map(|(key, c)| {
            let m = Monomial::from_pairs(
                self.symbols
                    .iter()
                    .enumerate()
                    .map(|(p, s)| (*s, ((key >> (p as u32 * self.bits)) & mask) as u32))
                    .filter(|(_, e)| *e > 0),
            );
            (m, ExactRational::new(c, den.clone()))
        }))
    }
}

impl MomentAlgebra for PackedAlgebra {
    type Value = Packed;

    fn one(&self) -> Packed {
        vec![(0, BigInt::one())]
    }

    fn zero(&self) -> Packed {
        Vec::new()
    }

    fn add_weighted(&self, acc: &mut Packed, i: usize, j: usize, mult: u64, v: &Packed) {
        let s = &self.scalar[i][j] * mult;
        if s.is_zero() || v.is_empty() {
            return;
        }
        let sh = self.shift[i][j];
        let old = std::mem::take(acc);
        let mut out = Vec::with_capacity(old.len() + v.len());
        let mut a = old.into_iter().peekable();
        for (key, c) in v {
            let key = key + sh;
            while let Some((ak, _)) = a.peek() {
                if *ak >= key {
                    break;
                }
                out.push(a.next().unwrap());
            }
            let mut c = c * &s;
            if a.peek().is_some_and(|(ak, _)| *ak == key) {
                c += a.next().unwrap().1;
                if c.is_zero() {
                    continue;
                }
            }
            out.push((key, c));
        }
        out.extend(a);
        *acc = out;
    }
}

type Deps = SmallVec<[(usize, u64, MultiIndex); 4]>;

/// The pivot and the nonvanishing terms of the recurrence at `m` (|m| > 0).
fn dependencies(m: &MultiIndex, pivot: Pivot) -> (usize, Deps) {
    let i = pivot.choose(m);
    let mut deps = Deps::new();
    for j in 0..m.len() {
        let mult = if j == i { m[j].saturating_sub(1) } else { m[j] } as u64;
        if mult == 0 {
            continue;
        }
        let mut d = m.clone();
        d.0[i] -= 1;
        d.0[j] -= 1;
        deps.push((j, mult, d));
    }
    (i, deps)
}

/// Evaluates every target, sharing one table of intermediate values.
pub(crate) fn sweep<A: MomentAlgebra>(alg: &A, targets: &[MultiIndex], pivot: Pivot) -> Vec<A::Value> {
    let mut levels: BTreeMap<u32, HashSet<MultiIndex>> = BTreeMap::new();
    for t in targets {
        if t.total() % 2 == 0 {
            levels.entry(t.total()).or_default().insert(t.clone());
        }
    }
    // top-down: collect the down-set level by level
    let mut order: Vec<(u32, Vec<MultiIndex>)> = Vec::new();
    while let Some((level, set)) = levels.pop_last() {
        if level > 0 {
            let below = levels.entry(level - 2).or_default();
            for m in &set {
                for (_, _, d) in dependencies(m, pivot).1 {
                    below.insert(d);
                }
            }
        }
        order.push((level, set.into_iter().collect()));
    }
    order.reverse();

    let mut wanted: HashMap<&MultiIndex, Vec<usize>> = HashMap::new();
    for (pos, t) in targets.iter().enumerate() {
        wanted.entry(t).or_default().push(pos);
    }
    let mut out: Vec<Option<A::Value>> = vec![None; targets.len()];

    let mut prev: HashMap<MultiIndex, A::Value> = HashMap::new();
    for (level, indices) in order {
        let mut cur: HashMap<MultiIndex, A::Value> = HashMap::with_capacity(indices.len());
        for m in indices {
            let value = if level == 0 {
                alg.one()
            } else {
                let (i, deps) = dependencies(&m, pivot);
                let mut acc = alg.zero();
                for (j, mult, d) in &deps {
                    alg.add_weighted(&mut acc, i, *j, *mult, &prev[d]);
                }
                acc
            };
            if let Some(slots) = wanted.get(&m) {
                for &s in slots {
                    out[s] = Some(value.clone());
                }
            }
            cur.insert(m, value);
        }
        prev = cur;
    }
    out.into_iter().map(|v| v.unwrap_or_else(|| alg.zero())).collect()
}

fn check_dims(cov: &CovarianceSpec, m: &MultiIndex) -> Result<()> {
    if cov.k() != m.len() {
        return Err(Error::DimensionMismatch { expected: cov.k(), got: m.len() });
    }
    Ok(())
}

/// Evaluates targets with the representation suited to the covariance and
/// returns plain polynomials.
fn evaluate(cov: &CovarianceSpec, targets: &[MultiIndex], pivot: Pivot) -> Vec<Polynomial> {
    match cov.scaled_integer_matrix() {
        Some((q, w)) => {
            let scaled = sweep(&ScaledAlgebra { w }, targets, pivot);
            scaled
                .into_iter()
                .zip(targets)
                .map(|(n, t)| Polynomial::constant(unscale(n, &q, t.total())))
                .collect()
        }
        None => {
            let max_total = targets.iter().map(MultiIndex::total).max().unwrap_or(0);
            match PackedAlgebra::new(cov, max_total) {
                Some(alg) => sweep(&alg, targets, pivot)
                    .into_iter()
                    .zip(targets)
                    .map(|(v, t)| alg.unpack(v, t.total()))
                    .collect(),
                None => sweep(&PolyAlgebra::new(cov), targets, pivot),
            }
        }
    }
}

/// `n / q^{total/2}` in lowest terms.
pub(crate) fn unscale(n: BigInt, q: &BigInt, total: u32) -> ExactRational {
    if n.is_zero() {
        return ExactRational::zero();
    }
    ExactRational::new(n, num_traits::pow(q.clone(), (total / 2) as usize))
}

/// `M_C(m)` by the memoised mixed recurrence, unwinding along the largest
/// remaining coordinate.
pub fn moment_stein(cov: &CovarianceSpec, m: &MultiIndex) -> Result<Polynomial> {
    moment_stein_with_pivot(cov, m, Pivot::Largest)
}

pub fn moment_stein_with_pivot(cov: &CovarianceSpec, m: &MultiIndex, pivot: Pivot) -> Result<Polynomial> {
    check_dims(cov, m)?;
    if let Pivot::Prefer(d) = pivot {
        if d >= m.len() {
            return Err(Error::InvalidArgument(format!("pivot coordinate {d} out of range")));
        }
    }
    Ok(evaluate(cov, std::slice::from_ref(m), pivot).pop().unwrap())
}

/// Indices `fixed` with the `direction` coordinate replaced by
/// `start + t·step`, `t = 0..count`.
pub fn sequence_indices(direction: usize, fixed: &MultiIndex, start: u32, count: usize, step: u32) -> Vec<MultiIndex> {
    (0..count).map(|t| fixed.with(direction, start + t as u32 * step)).collect()
}

/// `[M(fixed with hole := start + t·step) for t in 0..count]`, computed in
/// one shared sweep that unwinds the hole direction first.
pub fn seed_sequence(
    cov: &CovarianceSpec,
    direction: usize,
    fixed: &MultiIndex,
    start: u32,
    count: usize,
    step: u32,
) -> Result<Vec<Polynomial>> {
    check_seed_args(cov, direction, fixed, count, step)?;
    let targets = sequence_indices(direction, fixed, start, count, step);
    Ok(evaluate(cov, &targets, Pivot::Prefer(direction)))
}

pub(crate) fn check_seed_args(
    cov: &CovarianceSpec,
    direction: usize,
    fixed: &MultiIndex,
    count: usize,
    step: u32,
) -> Result<()> {
    check_dims(cov, fixed)?;
    if direction >= cov.k() {
        return Err(Error::InvalidArgument(format!("direction {} out of range for k={}", direction + 1, cov.k())));
    }
    if count == 0 || !(1..=2).contains(&step) {
        return Err(Error::InvalidArgument("seed sequences need count >= 1 and step 1 or 2".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::moment_wick;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.iter().copied())
    }

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    /// Plain recursion without a table.
    fn naive(cov: &CovarianceSpec, m: &MultiIndex) -> Polynomial {
        if m.total() % 2 == 1 {
            return Polynomial::zero();
        }
        if m.total() == 0 {
            return Polynomial::one();
        }
        let (i, deps) = dependencies(m, Pivot::Largest);
        let mut acc = Polynomial::zero();
        for (j, mult, d) in deps {
            acc += &(&cov.weight(i, j) * &naive(cov, &d)).scale(&ExactRational::from_i64(mult as i64));
        }
        acc
    }

    #[test]
    fn examples() {
        let s2 = CovarianceSpec::symbolic(2);
        assert_eq!(moment_stein(&s2, &mi(&[2, 2])).unwrap(), p("1 + 2*c12^2"));
        assert_eq!(moment_stein(&s2, &mi(&[1, 1])).unwrap(), p("c12"));
        assert!(moment_stein(&s2, &mi(&[1, 2])).unwrap().is_zero());
        assert_eq!(moment_stein(&s2, &mi(&[0, 0])).unwrap(), Polynomial::one());
    }

    #[test]
    fn matches_wick_on_10_10_10() {
        let s3 = CovarianceSpec::symbolic(3);
        let m = mi(&[10, 10, 10]);
        assert_eq!(moment_stein(&s3, &m).unwrap(), moment_wick(&s3, &m).unwrap());
    }

    #[test]
    fn seed_examples() {
        let s2 = CovarianceSpec::symbolic(2);
        let seq = seed_sequence(&s2, 0, &mi(&[0, 2]), 0, 3, 2).unwrap();
        assert_eq!(seq, vec![Polynomial::one(), p("1 + 2*c12^2"), p("3 + 12*c12^2")]);
        let seq = seed_sequence(&s2, 0, &mi(&[0, 0]), 0, 1, 2).unwrap();
        assert_eq!(seq, vec![Polynomial::one()]);
        let seq = seed_sequence(&s2, 0, &mi(&[0, 1]), 1, 2, 2).unwrap();
        assert_eq!(seq, vec![p("c12"), p("3*c12")]);
        assert!(seed_sequence(&s2, 0, &mi(&[0, 1]), 1, 0, 2).is_err());
        assert!(seed_sequence(&s2, 0, &mi(&[0, 1]), 1, 2, 3).is_err());
        assert!(seed_sequence(&s2, 2, &mi(&[0, 1]), 1, 2, 2).is_err());
    }

    #[test]
    fn memo_is_transparent() {
        let s3 = CovarianceSpec::symbolic(3);
        for m in [[3, 2, 1], [4, 4, 2], [2, 5, 3], [6, 0, 2]] {
            let m = mi(&m);
            assert_eq!(moment_stein(&s3, &m).unwrap(), naive(&s3, &m), "{m:?}");
        }
    }

    #[test]
    fn pivot_independence() {
        let s3 = CovarianceSpec::symbolic(3);
        let num = CovarianceSpec::parse(3, "1/2,-2/3,1/5").unwrap();
        for m in [[3, 3, 2], [5, 1, 4], [2, 2, 6]] {
            let m = mi(&m);
            for cov in [&s3, &num] {
                let base = moment_stein(cov, &m).unwrap();
                for d in 0..3 {
                    assert_eq!(moment_stein_with_pivot(cov, &m, Pivot::Prefer(d)).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn packed_and_generic_algebras_agree() {
        let mixed = CovarianceSpec::parse(3, "c12,-2/3,c23").unwrap();
        for cov in [CovarianceSpec::symbolic(3), mixed] {
            let targets: Vec<MultiIndex> = [[4, 3, 3], [2, 6, 4], [5, 5, 0]].iter().map(|m| mi(m)).collect();
            let packed = PackedAlgebra::new(&cov, 12).unwrap();
            let a: Vec<Polynomial> = sweep(&packed, &targets, Pivot::Largest)
                .into_iter()
                .zip(&targets)
                .map(|(v, t)| packed.unpack(v, t.total()))
                .collect();
            let b = sweep(&PolyAlgebra::new(&cov), &targets, Pivot::Largest);
            assert_eq!(a, b);
        }
        let wide = CovarianceSpec::symbolic(7);
        assert!(PackedAlgebra::new(&wide, 200).is_none());
        assert!(PackedAlgebra::new(&wide, 100).is_some());
    }

    #[test]
    fn numeric_path_agrees_with_symbolic_evaluation() {
        let num = CovarianceSpec::parse(3, "1/2,1/3,1/4").unwrap();
        let s3 = CovarianceSpec::symbolic(3);
        let m = mi(&[6, 4, 4]);
        let expect = moment_stein(&s3, &m).unwrap().eval(&num.numeric_assignment()).unwrap();
        assert_eq!(moment_stein(&num, &m).unwrap().as_constant().unwrap(), expect);
    }
}
