//! Nullspaces of integer matrices by reduction modulo word-size primes,
//! Chinese remaindering and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::ExactRational;

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, descending.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) + 1;
    std::iter::from_fn(move || {
        loop {
            n -= 2;
            if is_prime(n) {
                return Some(n);
            }
        }
    })
}

pub(crate) fn reduce(v: &BigInt, p: u64) -> u64 {
    let r = (v % p).to_i128().expect("remainder fits");
    if r < 0 {
        (r + p as i128) as u64
    } else {
        r as u64
    }
}

/// Reduced row echelon form mod `p`; returns the pivot columns and the
/// nullspace basis with each free coordinate set to 1 in turn.
pub(crate) fn nullspace_mod(rows: &mut [Vec<u64>], cols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, i);
        let inv = invmod(rows[r][c], p);
        for v in rows[r][c..].iter_mut() {
            *v = mulmod(*v, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - mulmod(f, pivot_row[j], p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0u64; cols];
        x[f] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = (p - rows[i][f]) % p;
        }
        basis.push(x);
    }
    (pivots, basis)
}

/// Smallest `a/b ≡ u (mod m)` with `|a|, b ≤ sqrt(m/2)`, if one exists.
pub(crate) fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<ExactRational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(ExactRational::new(r1, t1))
}

/// Outcome of [`integer_nullspace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ModularNullspace {
    Trivial,
    /// Integer basis vectors (each cleared of denominators), all verified.
    Basis(Vec<Vec<BigInt>>),
    /// No stable, verified reconstruction within the prime budget.
    Undetermined,
}

/// Nullspace of an integer matrix given through `reduce_rows(p)`, which must
/// return the matrix modulo `p`. Candidate vectors are accepted once two
/// successive primes reconstruct the same rationals and `check` confirms the
/// integer vector exactly.
pub(crate) fn integer_nullspace(
    cols: usize,
    max_primes: usize,
    mut reduce_rows: impl FnMut(u64) -> Vec<Vec<u64>>,
    mut check: impl FnMut(&[BigInt]) -> bool,
) -> ModularNullspace {
    let mut modulus = BigInt::one();
    let mut pattern: Option<Vec<usize>> = None;
    let mut residues: Vec<Vec<BigInt>> = Vec::new();
    let mut last: Option<Vec<Vec<ExactRational>>> = None;
    for p in primes().take(max_primes) {
        let mut rows = reduce_rows(p);
        let (pivots, basis) = nullspace_mod(&mut rows, cols, p);
        if basis.is_empty() {
            return ModularNullspace::Trivial;
        }
        match &pattern {
            Some(old) if *old == pivots => {}
            Some(old) if old.len() > pivots.len() => continue,
            _ => {
                // first prime, or the earlier ones were unlucky
                pattern = Some(pivots);
                modulus = BigInt::one();
                residues = vec![vec![BigInt::zero(); cols]; basis.len()];
                last = None;
            }
        }
        let pb = BigInt::from(p);
        let inv = BigInt::from(invmod(reduce(&modulus, p), p));
        for (res, b) in residues.iter_mut().zip(&basis) {
            for (r, &v) in res.iter_mut().zip(b) {
                let diff = (BigInt::from(v) - reduce(r, p) + &pb) % &pb;
                let t = diff * &inv % &pb;
                *r += t * &modulus;
            }
        }
        modulus *= &pb;

        let rec: Option<Vec<Vec<ExactRational>>> = residues
            .iter()
            .map(|res| res.iter().map(|r| rational_reconstruct(r, &modulus)).collect())
            .collect();
        if rec.is_some() && rec == last {
            let ints: Vec<Vec<BigInt>> = rec.as_ref().unwrap().iter().map(|v| clear_denominators(v)).collect();
            if ints.iter().all(|v| check(v)) {
                return ModularNullspace::Basis(ints);
            }
        }
        last = rec;
    }
    ModularNullspace::Undetermined
}

fn clear_denominators(v: &[ExactRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_prime() {
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        let ps: Vec<u64> = primes().take(3).collect();
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps[0] < 1 << 62);
    }

    #[test]
    fn reconstruction_round_trip() {
        let m = BigInt::from(primes().next().unwrap()) * BigInt::from(primes().nth(1).unwrap());
        for (a, b) in [(3i64, 7i64), (-22, 15), (0, 1), (123456789, 1000003)] {
            let x = ExactRational::from_ratio(a, b);
            let inv = mod_inverse(&BigInt::from(b), &m);
            let u = (BigInt::from(a) * inv).mod_floor(&m);
            assert_eq!(rational_reconstruct(&u, &m), Some(x));
        }
    }

    fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
        let e = a.extended_gcd(m);
        e.x.mod_floor(m)
    }

    #[test]
    fn integer_nullspace_of_small_system() {
        let a: Vec<Vec<BigInt>> =
            [[1i64, 2, 3], [2, 4, 6], [1, 0, 1]].iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let out = integer_nullspace(
            3,
            8,
            |p| a.iter().map(|r| r.iter().map(|v| reduce(v, p)).collect()).collect(),
            |x| a.iter().all(|r| r.iter().zip(x).map(|(u, v)| u * v).sum::<BigInt>().is_zero()),
        );
        let ModularNullspace::Basis(b) = out else { panic!("{out:?}") };
        assert_eq!(b.len(), 1);
        let v: Vec<i64> = b[0].iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(v == vec![-1, -1, 1] || v == vec![1, 1, -1]);
        let id: Vec<Vec<BigInt>> = (0..2).map(|i| (0..2).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
        let out = integer_nullspace(2, 4, |p| id.iter().map(|r| r.iter().map(|v| reduce(v, p)).collect()).collect(), |_| true);
        assert_eq!(out, ModularNullspace::Trivial);
    }
}
