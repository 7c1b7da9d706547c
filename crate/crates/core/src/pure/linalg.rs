//! Exact right nullspaces by fraction-free (Bareiss) elimination.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::{gcd_univariate, Polynomial, Var};
use crate::rational::{gcd_big, ExactRational};

/// An integral domain whose exact quotients we can compute.
pub trait Domain: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / other` when the division is exact.
    fn div_exact(&self, other: &Self) -> Option<Self>;
    /// Rough storage size, for work budgets.
    fn size(&self) -> usize {
        1
    }
    /// Rescales a nonzero vector to a canonical representative of its span.
    fn normalize(v: &mut [Self]);
}

impl Domain for ExactRational {
    fn zero() -> Self {
        ExactRational::zero()
    }
    fn one() -> Self {
        ExactRational::one()
    }
    fn is_zero(&self) -> bool {
        ExactRational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
    fn normalize(v: &mut [Self]) {
        normalize_rationals(v);
    }
}

impl Domain for Polynomial {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn one() -> Self {
        Polynomial::one()
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        Polynomial::div_exact(self, other)
    }
    fn size(&self) -> usize {
        self.len()
    }
    fn normalize(v: &mut [Self]) {
        normalize_polys(v);
    }
}

/// Integer entries with gcd 1, first nonzero entry positive.
pub fn normalize_rationals(v: &mut [ExactRational]) {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for x in v.iter() {
        num = gcd_big(&num, x.numer());
        let g = gcd_big(&den, x.denom());
        den = &den / &g * x.denom();
    }
    if num.is_zero() {
        return;
    }
    let mut scale = ExactRational::new(den, num);
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        scale = -scale;
    }
    for x in v.iter_mut() {
        *x = &*x * &scale;
    }
}

/// Divides out the common polynomial factor when at most one symbol occurs,
/// then the rational content; the leading coefficient of the first nonzero
/// entry ends up positive.
pub fn normalize_polys(v: &mut [Polynomial]) {
    let vars: BTreeSet<Var> = v.iter().flat_map(|p| p.variables()).collect();
    if vars.len() == 1 {
        let mut g: Option<Polynomial> = None;
        for p in v.iter().filter(|p| !p.is_zero()) {
            g = Some(match g {
                None => p.primitive(),
                Some(g) => gcd_univariate(&g, p).expect("single symbol"),
            });
        }
        if let Some(g) = g.filter(|g| !g.is_constant()) {
            for p in v.iter_mut() {
                *p = p.div_exact(&g).expect("gcd divides every entry");
            }
        }
    }
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for p in v.iter() {
        let c = p.content();
        if c.is_zero() {
            continue;
        }
        num = gcd_big(&num, c.numer());
        let g = gcd_big(&den, c.denom());
        den = &den / &g * c.denom();
    }
    if num.is_zero() {
        return;
    }
    let mut scale = ExactRational::new(den, num);
    let first = v.iter().find(|p| !p.is_zero()).and_then(|p| p.leading_term().map(|(_, c)| c.is_negative()));
    if first == Some(true) {
        scale = -scale;
    }
    for p in v.iter_mut() {
        *p = p.scale(&scale);
    }
}

/// Raised when an entry grows past the allowed size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Basis of `{x : A x = 0}`, each vector normalised by [`Domain::normalize`].
/// Empty iff the nullspace is trivial.
pub fn nullspace<T: Domain>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    nullspace_budgeted(rows, usize::MAX).expect("unbounded budget")
}

/// As [`nullspace`], giving up once any entry exceeds `max_size`.
pub fn nullspace_budgeted<T: Domain>(rows: &[Vec<T>], max_size: usize) -> Result<Vec<Vec<T>>, BudgetExceeded> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut prev = T::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = std::mem::replace(&mut row[c], T::zero());
            for j in (c + 1)..cols {
                let v = pivot_row[c].mul(&row[j]).sub(&lead.mul(&pivot_row[j]));
                let v = v.div_exact(&prev).expect("Bareiss quotient is exact");
                if v.size() > max_size {
                    return Err(BudgetExceeded);
                }
                row[j] = v;
            }
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![T::zero(); cols];
        x[f] = T::one();
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let mut s = T::zero();
            for j in (pc + 1)..cols {
                if !x[j].is_zero() && !a[i][j].is_zero() {
                    s = s.add(&a[i][j].mul(&x[j]));
                }
            }
            if s.is_zero() {
                continue;
            }
            for v in x.iter_mut() {
                if !v.is_zero() {
                    *v = v.mul(&a[i][pc]);
                }
            }
            x[pc] = s.neg();
            T::normalize(&mut x);
        }
        T::normalize(&mut x);
        basis.push(x);
    }
    Ok(basis)
}
