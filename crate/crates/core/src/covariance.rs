//! Covariance matrices with unit diagonal and multi-indices of moment orders.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::ParseError;
use crate::poly::{Monomial, Polynomial, Var};
use crate::rational::ExactRational;

/// One off-diagonal correlation: the free symbol `c_ij` or a fixed value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Symbolic,
    Numeric(ExactRational),
}

/// A k×k symmetric covariance matrix with ones on the diagonal. Only the
/// entries above the diagonal are stored, in the order (1,2), (1,3), …,
/// (1,k), (2,3), …, (k-1,k).
///
/// Positive-definiteness is not checked; every engine works with the entries
/// as formal quantities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CovarianceSpec {
    k: usize,
    entries: Vec<Entry>,
}

impl CovarianceSpec {
    pub fn symbolic(k: usize) -> Self {
        CovarianceSpec { k, entries: vec![Entry::Symbolic; pair_count(k)] }
    }

    /// Numeric covariance from the upper-triangle values in pair order.
    pub fn numeric(k: usize, values: Vec<ExactRational>) -> Result<Self, ParseError> {
        Self::from_entries(k, values.into_iter().map(Entry::Numeric).collect())
    }

    pub fn from_entries(k: usize, entries: Vec<Entry>) -> Result<Self, ParseError> {
        if k == 0 {
            return Err(ParseError::Covariance("dimension must be at least 1".into()));
        }
        if entries.len() != pair_count(k) {
            return Err(ParseError::Covariance(format!(
                "k={k} needs {} off-diagonal entries, got {}",
                pair_count(k),
                entries.len()
            )));
        }
        Ok(CovarianceSpec { k, entries })
    }

    /// Parses the command-line form: `symbolic`, or a comma list with one item
    /// per pair where each item is a rational `p/q` or the symbol name itself
    /// (e.g. `1/2,c13,1/4`).
    pub fn parse(k: usize, s: &str) -> Result<Self, ParseError> {
        if s == "symbolic" {
            if k == 0 {
                return Err(ParseError::Covariance("dimension must be at least 1".into()));
            }
            return Ok(Self::symbolic(k));
        }
        if k == 1 && s.is_empty() {
            return Self::from_entries(1, Vec::new());
        }
        let pairs = pairs(k);
        let items: Vec<&str> = s.split(',').collect();
        if items.len() != pairs.len() {
            return Err(ParseError::Covariance(format!(
                "k={k} needs {} comma-separated entries, got {}",
                pairs.len(),
                items.len()
            )));
        }
        let mut entries = Vec::with_capacity(items.len());
        for (item, &(i, j)) in items.iter().zip(&pairs) {
            if item.starts_with('c') {
                let v: Var = item.parse()?;
                if v != Var::new(i, j) {
                    return Err(ParseError::Covariance(format!("expected c{i}{j} or a rational, got {item}")));
                }
                entries.push(Entry::Symbolic);
            } else {
                entries.push(Entry::Numeric(item.parse()?));
            }
        }
        Self::from_entries(k, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Entry for the 0-based coordinate pair (i, j), i != j.
    pub fn entry(&self, i: usize, j: usize) -> &Entry {
        &self.entries[pair_index(self.k, i, j)]
    }

    pub fn is_numeric(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, Entry::Numeric(_)))
    }

    pub fn symbols(&self) -> Vec<Var> {
        pairs(self.k)
            .into_iter()
            .zip(&self.entries)
            .filter(|(_, e)| matches!(e, Entry::Symbolic))
            .map(|((i, j), _)| Var::new(i, j))
            .collect()
    }

    /// The (i, j) covariance as a polynomial; 0-based indices, diagonal is 1.
    pub fn weight(&self, i: usize, j: usize) -> Polynomial {
        if i == j {
            return Polynomial::one();
        }
        match self.entry(i, j) {
            Entry::Symbolic => Polynomial::var(Var::new(i + 1, j + 1)),
            Entry::Numeric(v) => Polynomial::constant(v.clone()),
        }
    }

    /// `c_ij^e` as (monomial, coefficient); 0-based indices.
    pub fn weight_power(&self, i: usize, j: usize, e: u32) -> (Monomial, ExactRational) {
        match self.entry(i, j) {
            Entry::Symbolic => (Monomial::from_pairs([(Var::new(i + 1, j + 1), e)]), ExactRational::one()),
            Entry::Numeric(v) => (Monomial::one(), v.pow(e)),
        }
    }

    /// Values of the numeric entries keyed by symbol, for evaluation.
    pub fn numeric_assignment(&self) -> HashMap<Var, ExactRational> {
        pairs(self.k)
            .into_iter()
            .zip(&self.entries)
            .filter_map(|((i, j), e)| match e {
                Entry::Numeric(v) => Some((Var::new(i, j), v.clone())),
                Entry::Symbolic => None,
            })
            .collect()
    }

    /// For an all-numeric covariance: the common denominator `q` and the
    /// integer matrix `q * C` (diagonal `q`), 0-based.
    pub fn scaled_integer_matrix(&self) -> Option<(BigInt, Vec<Vec<BigInt>>)> {
        let mut q = BigInt::one();
        for e in &self.entries {
            match e {
                Entry::Numeric(v) => q = q.lcm(v.denom()),
                Entry::Symbolic => return None,
            }
        }
        let mut w = vec![vec![BigInt::default(); self.k]; self.k];
        for i in 0..self.k {
            for j in 0..self.k {
                w[i][j] = if i == j {
                    q.clone()
                } else {
                    match self.entry(i, j) {
                        Entry::Numeric(v) => v.numer() * (&q / v.denom()),
                        Entry::Symbolic => unreachable!(),
                    }
                };
            }
        }
        Some((q, w))
    }

    /// Stable identifier used as a cache key component.
    pub fn fingerprint(&self) -> String {
        if self.entries.iter().all(|e| matches!(e, Entry::Symbolic)) && self.k > 1 {
            return format!("k{}:symbolic", self.k);
        }
        format!("k{}:{}", self.k, self)
    }

    /// Applies a coordinate permutation: new coordinate `perm[i]` takes old
    /// coordinate `i` (0-based). Symbolic entries stay symbolic.
    pub fn permuted(&self, perm: &[usize]) -> CovarianceSpec {
        let mut entries = vec![Entry::Symbolic; self.entries.len()];
        for i in 0..self.k {
            for j in (i + 1)..self.k {
                entries[pair_index(self.k, perm[i], perm[j])] = self.entry(i, j).clone();
            }
        }
        CovarianceSpec { k: self.k, entries }
    }
}

impl fmt::Display for CovarianceSpec {
    /// The command-line form accepted by [`CovarianceSpec::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k > 1 && self.entries.iter().all(|e| matches!(e, Entry::Symbolic)) {
            return write!(f, "symbolic");
        }
        let items: Vec<String> = pairs(self.k)
            .into_iter()
            .zip(&self.entries)
            .map(|((i, j), e)| match e {
                Entry::Symbolic => Var::new(i, j).to_string(),
                Entry::Numeric(v) => v.to_string(),
            })
            .collect();
        write!(f, "{}", items.join(","))
    }
}

impl Serialize for CovarianceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            k: usize,
            entries: String,
        }
        Repr { k: self.k, entries: self.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CovarianceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            k: usize,
            entries: String,
        }
        let r = Repr::deserialize(d)?;
        CovarianceSpec::parse(r.k, &r.entries).map_err(serde::de::Error::custom)
    }
}

pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// 1-based pairs (i, j), i < j, in storage order.
pub fn pairs(k: usize) -> Vec<(usize, usize)> {
    (1..=k).flat_map(|i| ((i + 1)..=k).map(move |j| (i, j))).collect()
}

/// Storage position of the 0-based pair {i, j}.
pub fn pair_index(k: usize, i: usize, j: usize) -> usize {
    assert!(i != j && i < k && j < k);
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    // rows before i hold (k-1) + (k-2) + ... + (k-i) pairs
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

/// Moment orders `(m_1, …, m_k)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn new(v: impl IntoIterator<Item = u32>) -> Self {
        MultiIndex(v.into_iter().collect())
    }

    pub fn zeros(k: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Index of the largest order, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate() {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub fn with(&self, pos: usize, value: u32) -> MultiIndex {
        let mut out = self.clone();
        out.0[pos] = value;
        out
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for MultiIndex {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let items: Result<SmallVec<[u32; 4]>, _> = s
            .split(',')
            .map(|t| {
                if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseError::MultiIndex(s.to_string()));
                }
                t.parse::<u32>().map_err(|_| ParseError::MultiIndex(s.to_string()))
            })
            .collect();
        Ok(MultiIndex(items?))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(MultiIndex::new(Vec::<u32>::deserialize(d)?))
    }
}
