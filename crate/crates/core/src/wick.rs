//! Moments from the moment generating function `exp(½ tᵀCt)`.
//!
//! Expanding the exponential and reading off the coefficient of
//! `t^m / m!` groups the perfect matchings of the multiset
//! `{1^m_1, …, k^m_k}` by their *pairing type*: `a_ij` cross pairs between
//! coordinates i and j and `b_i` pairs inside coordinate i. A type occurs
//! `∏ m_i! / (∏ a_ij! ∏ 2^{b_i} b_i!)` times and contributes `∏ c_ij^{a_ij}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::covariance::{pair_count, pairs, CovarianceSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::rational::ExactRational;

/// Largest total order accepted by [`moment_bruteforce`].
pub const BRUTEFORCE_LIMIT: u32 = 16;

/// `E[x^r]` for a standard normal: 0 for odd `r`, `(r-1)!!` otherwise.
pub fn univariate_moment(r: u32) -> ExactRational {
    if r % 2 == 1 {
        return ExactRational::zero();
    }
    ExactRational::from_integer(double_factorial(r.saturating_sub(1)))
}

/// `n!!`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut i = n;
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

/// Aggregate shape of a perfect matching: cross-pair counts `a` (one per
/// coordinate pair, in covariance storage order) and same-coordinate pair
/// counts `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairingType {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

/// Factorials and `2^b b!` values, grown on demand. One cache lives for one
/// computation.
#[derive(Default)]
pub struct FactorialCache {
    fact: Vec<BigInt>,
    half: Vec<BigInt>,
}

impl FactorialCache {
    pub fn new() -> Self {
        FactorialCache { fact: vec![BigInt::one()], half: vec![BigInt::one()] }
    }

    pub fn factorial(&mut self, n: u32) -> &BigInt {
        while self.fact.len() <= n as usize {
            let next = self.fact.last().unwrap() * self.fact.len();
            self.fact.push(next);
        }
        &self.fact[n as usize]
    }

    /// `2^b · b!`
    pub fn half_pairs(&mut self, b: u32) -> &BigInt {
        while self.half.len() <= b as usize {
            let next = self.half.last().unwrap() * (2 * self.half.len());
            self.half.push(next);
        }
        &self.half[b as usize]
    }
}

/// Number of perfect matchings of the multiset with the given type.
pub fn pairing_count(m: &MultiIndex, t: &PairingType, cache: &mut FactorialCache) -> BigInt {
    let mut num = BigInt::one();
    for &mi in m.as_slice() {
        num *= cache.factorial(mi);
    }
    let mut den = BigInt::one();
    for &a in &t.a {
        den *= cache.factorial(a);
    }
    for &b in &t.b {
        den *= cache.half_pairs(b);
    }
    num / den
}

/// Streams every pairing type of `m` exactly once, odometer order (the last
/// coordinate pair varies fastest). Branches are cut as soon as a row sum
/// exceeds `m_i` or a finished coordinate is left with an odd remainder.
pub fn enumerate_pairing_types(m: &MultiIndex) -> PairingTypes {
    PairingTypes::new(m)
}

pub struct PairingTypes {
    pairs: Vec<(usize, usize)>,
    closing: Vec<Vec<usize>>,
    rem: Vec<u32>,
    a: Vec<u32>,
    next_val: Vec<u32>,
    level: usize,
    finished: bool,
}

impl PairingTypes {
    fn new(m: &MultiIndex) -> Self {
        let k = m.len();
        let pairs: Vec<(usize, usize)> = pairs(k).into_iter().map(|(i, j)| (i - 1, j - 1)).collect();
        let mut closing = vec![Vec::new(); pairs.len()];
        for c in 0..k {
            if let Some(last) = pairs.iter().rposition(|&(i, j)| i == c || j == c) {
                closing[last].push(c);
            }
        }
        PairingTypes {
            a: vec![0; pairs.len()],
            next_val: vec![0; pairs.len()],
            pairs,
            closing,
            rem: m.as_slice().to_vec(),
            level: 0,
            finished: false,
        }
    }

    fn emit(&self) -> PairingType {
        PairingType { a: self.a.clone(), b: self.rem.iter().map(|r| r / 2).collect() }
    }
}

impl Iterator for PairingTypes {
    type Item = PairingType;

    fn next(&mut self) -> Option<PairingType> {
        if self.finished {
            return None;
        }
        if self.pairs.is_empty() {
            self.finished = true;
            return self.rem.iter().all(|r| r % 2 == 0).then(|| self.emit());
        }
        loop {
            let level = self.level;
            let (i, j) = self.pairs[level];
            let v = self.next_val[level];
            if v > self.rem[i].min(self.rem[j]) {
                if level == 0 {
                    self.finished = true;
                    return None;
                }
                self.level -= 1;
                let prev = self.level;
                let (pi, pj) = self.pairs[prev];
                let pa = self.a[prev];
                self.rem[pi] += pa;
                self.rem[pj] += pa;
                self.a[prev] = 0;
                self.next_val[prev] = pa + 1;
                continue;
            }
            self.a[level] = v;
            self.rem[i] -= v;
            self.rem[j] -= v;
            if self.closing[level].iter().any(|&c| self.rem[c] % 2 == 1) {
                self.rem[i] += v;
                self.rem[j] += v;
                self.a[level] = 0;
                self.next_val[level] = v + 1;
                continue;
            }
            if level + 1 == self.pairs.len() {
                let out = self.emit();
                self.rem[i] += v;
                self.rem[j] += v;
                self.a[level] = 0;
                self.next_val[level] = v + 1;
                return Some(out);
            }
            self.level += 1;
            self.next_val[self.level] = 0;
        }
    }
}

fn check_dims(cov: &CovarianceSpec, m: &MultiIndex) -> Result<()> {
    if cov.k() != m.len() {
        return Err(Error::DimensionMismatch { expected: cov.k(), got: m.len() });
    }
    Ok(())
}

/// `M_C(m)` by summing over pairing types. Numeric entries are substituted,
/// so an all-numeric covariance yields a constant polynomial.
pub fn moment_wick(cov: &CovarianceSpec, m: &MultiIndex) -> Result<Polynomial> {
    check_dims(cov, m)?;
    if m.total() % 2 == 1 {
        return Ok(Polynomial::zero());
    }
    if let Some((q, w)) = cov.scaled_integer_matrix() {
        let scaled = wick_scaled_integer(&q, &w, m);
        let den = num_traits::pow(q, (m.total() / 2) as usize);
        return Ok(Polynomial::constant(ExactRational::new(scaled, den)));
    }
    let k = cov.k();
    let pair_list: Vec<(usize, usize)> = pairs(k).into_iter().map(|(i, j)| (i - 1, j - 1)).collect();
    let mut cache = FactorialCache::new();
    let mut powers: HashMap<(usize, u32), (Monomial, ExactRational)> = HashMap::new();
    let mut out = Polynomial::zero();
    for t in enumerate_pairing_types(m) {
        let count = pairing_count(m, &t, &mut cache);
        let mut mono = Monomial::one();
        let mut coeff = ExactRational::from_integer(count);
        for (p, &a) in t.a.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let (i, j) = pair_list[p];
            let (pm, pc) = powers.entry((p, a)).or_insert_with(|| cov.weight_power(i, j, a));
            mono = mono.mul(pm);
            if !pc.is_one() {
                coeff *= &*pc;
            }
        }
        out.add_term(mono, &coeff);
    }
    Ok(out)
}

/// `q^{|m|/2} · M_C(m)` for an all-numeric covariance, given `q` and the
/// integer matrix `w = q·C`. Every summand is an integer, so the sum is
/// accumulated without any rational arithmetic. The last coordinate pair is
/// swept incrementally; the other pairs are enumerated directly.
pub(crate) fn wick_scaled_integer(q: &BigInt, w: &[Vec<BigInt>], m: &MultiIndex) -> BigInt {
    let k = m.len();
    if m.total() % 2 == 1 {
        return BigInt::zero();
    }
    if k == 1 {
        let b = m[0] / 2;
        return double_factorial(m[0].saturating_sub(1)) * num_traits::pow(q.clone(), b as usize);
    }
    let pair_list: Vec<(usize, usize)> = pairs(k).into_iter().map(|(i, j)| (i - 1, j - 1)).collect();
    let mut ctx = ScaledWick {
        q,
        w,
        pairs: &pair_list,
        cache: FactorialCache::new(),
        mfact: BigInt::one(),
        a: vec![0; pair_count(k)],
        rem: m.as_slice().to_vec(),
        sum: BigInt::zero(),
    };
    for &mi in m.as_slice() {
        ctx.mfact *= ctx.cache.factorial(mi);
    }
    ctx.descend(0);
    ctx.sum
}

struct ScaledWick<'a> {
    q: &'a BigInt,
    w: &'a [Vec<BigInt>],
    pairs: &'a [(usize, usize)],
    cache: FactorialCache,
    mfact: BigInt,
    a: Vec<u32>,
    rem: Vec<u32>,
    sum: BigInt,
}

impl ScaledWick<'_> {
    fn descend(&mut self, level: usize) {
        let (i, j) = self.pairs[level];
        let last = level + 1 == self.pairs.len();
        if last {
            self.sweep_last(i, j);
            return;
        }
        let cap = if self.w[i][j].is_zero() { 0 } else { self.rem[i].min(self.rem[j]) };
        for v in 0..=cap {
            self.rem[i] -= v;
            self.rem[j] -= v;
            let closes_odd = (0..self.rem.len()).any(|c| {
                self.rem[c] % 2 == 1 && self.pairs[level + 1..].iter().all(|&(x, y)| x != c && y != c)
            });
            if !closes_odd {
                self.a[level] = v;
                self.descend(level + 1);
            }
            self.rem[i] += v;
            self.rem[j] += v;
        }
        self.a[level] = 0;
    }

    fn sweep_last(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.rem[i], self.rem[j]);
        if ri % 2 != rj % 2 {
            return;
        }
        let p = self.pairs.len() - 1;
        let w = &self.w[i][j];
        let cap = if w.is_zero() { 0 } else { ri.min(rj) };
        let start = ri % 2;
        if start > cap {
            return;
        }
        // direct evaluation of the first term
        self.a[p] = start;
        let mut den = BigInt::one();
        for &a in &self.a {
            den *= self.cache.factorial(a);
        }
        let b: Vec<u32> = self
            .rem
            .iter()
            .enumerate()
            .map(|(c, &r)| if c == i || c == j { (r - start) / 2 } else { r / 2 })
            .collect();
        for &bc in &b {
            den *= self.cache.half_pairs(bc);
        }
        let mut term = &self.mfact / den;
        for (pp, &a) in self.a.iter().enumerate() {
            if a > 0 {
                let (x, y) = self.pairs[pp];
                term *= num_traits::pow(self.w[x][y].clone(), a as usize);
            }
        }
        let bsum: u32 = b.iter().sum();
        term *= num_traits::pow(self.q.clone(), bsum as usize);
        self.sum += &term;

        let w2 = w * w;
        let q2 = self.q * self.q;
        let (mut bi, mut bj) = (b[i], b[j]);
        let mut a = start;
        while a + 2 <= cap {
            let up = &w2 * (4u64 * bi as u64 * bj as u64);
            let down = &q2 * ((a as u64 + 1) * (a as u64 + 2));
            term *= up;
            term = term.div_floor(&down);
            self.sum += &term;
            a += 2;
            bi -= 1;
            bj -= 1;
        }
        self.a[p] = 0;
    }
}

/// Independent oracle: enumerates every perfect matching of the
/// `Σ m_i` labelled points and adds up the products of pair weights.
pub fn moment_bruteforce(cov: &CovarianceSpec, m: &MultiIndex) -> Result<Polynomial> {
    check_dims(cov, m)?;
    let total = m.total();
    if total % 2 == 1 {
        return Ok(Polynomial::zero());
    }
    if total > BRUTEFORCE_LIMIT {
        return Err(Error::SizeGuard { limit: BRUTEFORCE_LIMIT, total });
    }
    let k = cov.k();
    let labels: Vec<usize> = (0..k).flat_map(|c| std::iter::repeat_n(c, m[c] as usize)).collect();
    let mut used = vec![false; labels.len()];
    let mut counts = vec![vec![0u32; k]; k];
    let mut tally: HashMap<Vec<u32>, u64> = HashMap::new();
    match_rest(&labels, &mut used, &mut counts, &mut tally);

    let mut out = Polynomial::zero();
    for (cross, n) in tally {
        let mut mono = Monomial::one();
        let mut coeff = ExactRational::from_integer(BigInt::from(n));
        for (idx, (i, j)) in pairs(k).into_iter().enumerate() {
            let e = cross[idx];
            if e > 0 {
                let (pm, pc) = cov.weight_power(i - 1, j - 1, e);
                mono = mono.mul(&pm);
                coeff *= &pc;
            }
        }
        out.add_term(mono, &coeff);
    }
    Ok(out)
}

fn match_rest(labels: &[usize], used: &mut [bool], counts: &mut [Vec<u32>], tally: &mut HashMap<Vec<u32>, u64>) {
    let Some(first) = used.iter().position(|u| !u) else {
        let k = counts.len();
        let key: Vec<u32> = pairs(k).into_iter().map(|(i, j)| counts[i - 1][j - 1]).collect();
        *tally.entry(key).or_insert(0) += 1;
        return;
    };
    used[first] = true;
    for other in first + 1..labels.len() {
        if used[other] {
            continue;
        }
        used[other] = true;
        let (x, y) = (labels[first].min(labels[other]), labels[first].max(labels[other]));
        counts[x][y] += 1;
        match_rest(labels, used, counts, tally);
        counts[x][y] -= 1;
        used[other] = false;
    }
    used[first] = false;
}
