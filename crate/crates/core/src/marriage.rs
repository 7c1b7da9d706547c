//! Counting complete pairings of a society with `k` groups.
//!
//! With `m_i` members in group `i`, the coefficient of
//! `∏ c_ij^{a_ij}` in the symbolic moment `M(m)` is the number of ways to pair
//! everyone off with exactly `a_ij` pairs between groups `i` and `j`; the
//! remaining members of each group pair among themselves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::covariance::{pair_index, pairs, CovarianceSpec, MultiIndex};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::poly::{Polynomial, Var};
use crate::pure::moment_pure;
use crate::stein::moment_stein;
use crate::wick::{moment_wick, pairing_count, FactorialCache, PairingType};

/// The pairing type with cross counts `cross` (absent pairs count 0), or
/// `None` if some group cannot pair off its remainder.
pub fn pairing_type(m: &MultiIndex, cross: &BTreeMap<Var, u32>) -> Result<Option<PairingType>> {
    let k = m.len();
    let mut a = vec![0u32; pairs(k).len()];
    for (v, &e) in cross {
        let (i, j) = v.pair();
        if j > k {
            return Err(Error::InvalidArgument(format!("{v} does not exist for k={k}")));
        }
        a[pair_index(k, i - 1, j - 1)] = e;
    }
    let mut b = Vec::with_capacity(k);
    for i in 0..k {
        let used: u64 = (0..k)
            .filter(|&j| j != i)
            .map(|j| a[pair_index(k, i.min(j), i.max(j))] as u64)
            .sum();
        let left = m[i] as u64;
        if used > left || (left - used) % 2 == 1 {
            return Ok(None);
        }
        b.push(((left - used) / 2) as u32);
    }
    Ok(Some(PairingType { a, b }))
}

/// Number of complete pairings of `m` with the given cross-group counts:
/// `∏ m_i! / (∏ a_ij! · ∏ 2^{b_i} b_i!)`, or 0 when the demand is infeasible.
pub fn count_marriages(m: &MultiIndex, cross: &BTreeMap<Var, u32>) -> Result<BigInt> {
    Ok(match pairing_type(m, cross)? {
        Some(t) => pairing_count(m, &t, &mut FactorialCache::new()),
        None => BigInt::zero(),
    })
}

/// Parses `c12=9,c13=7,c23=5`.
pub fn parse_cross(s: &str) -> Result<BTreeMap<Var, u32>> {
    let mut out = BTreeMap::new();
    if s.trim().is_empty() {
        return Ok(out);
    }
    for item in s.split(',') {
        let (name, val) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected cij=count, got `{item}`")))?;
        let v: Var = name.trim().parse()?;
        let e: u32 = val
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad count in `{item}`")))?;
        if out.insert(v, e).is_some() {
            return Err(Error::InvalidArgument(format!("{v} given twice")));
        }
    }
    Ok(out)
}

/// The full symbolic moment of `m`, whose coefficients are the counts above.
pub fn marriage_polynomial(m: &MultiIndex, engine: Engine) -> Result<Polynomial> {
    let cov = CovarianceSpec::symbolic(m.len());
    match engine {
        Engine::Wick => moment_wick(&cov, m),
        Engine::Stein => moment_stein(&cov, m),
        Engine::Pure => moment_pure(&cov, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use crate::wick::double_factorial;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.iter().copied())
    }

    #[test]
    fn examples() {
        let c = |s: &str| parse_cross(s).unwrap();
        assert_eq!(count_marriages(&mi(&[1, 1]), &c("c12=1")).unwrap(), BigInt::from(1));
        assert_eq!(count_marriages(&mi(&[3, 3]), &c("c12=1")).unwrap(), BigInt::from(9));
        assert_eq!(count_marriages(&mi(&[2, 2]), &c("c12=1")).unwrap(), BigInt::zero());
        assert_eq!(count_marriages(&mi(&[2, 2]), &c("c12=3")).unwrap(), BigInt::zero());
        assert_eq!(
            count_marriages(&mi(&[20, 20, 20]), &c("c12=9,c13=7,c23=5")).unwrap().to_string(),
            "444975998773143505634352562176000000000"
        );
        assert!(count_marriages(&mi(&[2, 2]), &c("c13=1")).is_err());
        assert!(parse_cross("c12=1,c12=2").is_err());
        assert!(parse_cross("c12").is_err());
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(marriage_polynomial(&mi(&[3, 3]), Engine::Wick).unwrap(), "9*c12 + 6*c12^3".parse().unwrap());
        assert!(marriage_polynomial(&mi(&[1, 2]), Engine::Stein).unwrap().is_zero());
    }

    #[test]
    fn k2_closed_form() {
        // C(m1,r) C(m2,r) r! (m1-r-1)!! (m2-r-1)!!
        let binom = |n: u32, r: u32| -> BigInt {
            (0..r).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
        };
        let fact = |n: u32| -> BigInt { (1..=n).fold(BigInt::from(1), |acc, i| acc * i) };
        for m1 in 0..=8u32 {
            for m2 in 0..=8u32 {
                let poly = marriage_polynomial(&mi(&[m1, m2]), Engine::Wick).unwrap();
                for r in 0..=m1.min(m2) {
                    let got = count_marriages(&mi(&[m1, m2]), &parse_cross(&format!("c12={r}")).unwrap()).unwrap();
                    let expect = if (m1 - r) % 2 == 0 && (m2 - r) % 2 == 0 {
                        binom(m1, r)
                            * binom(m2, r)
                            * fact(r)
                            * double_factorial((m1 - r).saturating_sub(1))
                            * double_factorial((m2 - r).saturating_sub(1))
                    } else {
                        BigInt::zero()
                    };
                    assert_eq!(got, expect, "({m1},{m2}) r={r}");
                    let mono = Monomial::from_pairs([(Var::new(1, 2), r)]);
                    assert_eq!(poly.coeff(&mono).numer(), &got);
                }
            }
        }
    }
}
