//! Arbitrary-precision rationals kept in lowest terms.
//!
//! The arithmetic takes fast paths for integer operands and for gcds where
//! one side fits in a machine word, which is the common shape of the
//! numbers that show up in moment computations (huge numerators, small or
//! unit denominators).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Greatest common divisor of two magnitudes.
///
/// Runs Euclidean steps while the operands differ a lot in size (or one of
/// them fits in a `u64`) and falls back to the binary algorithm otherwise.
pub fn gcd_uint(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = if a >= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        if b.is_zero() {
            return a;
        }
        if let Some(small) = b.to_u64() {
            let r = (&a % small).to_u64().unwrap_or(0);
            return BigUint::from(gcd_u64(small, r));
        }
        if a.bits() > b.bits() + 16 {
            let r = &a % &b;
            a = b;
            b = r;
            continue;
        }
        return a.gcd(&b);
    }
}

pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from_biguint(Sign::Plus, gcd_uint(a.magnitude(), b.magnitude()))
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// An exact rational number `num / den` with `den > 0` and `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRational {
    num: BigInt,
    den: BigInt,
}

impl ExactRational {
    /// Builds `num / den` in lowest terms. Panics on a zero denominator.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        if den.is_one() {
            return ExactRational { num, den };
        }
        if num.is_zero() {
            return Self::zero();
        }
        let g = gcd_big(&num, &den);
        if g.is_one() {
            ExactRational { num, den }
        } else {
            ExactRational { num: num / &g, den: den / &g }
        }
    }

    pub fn from_integer(num: BigInt) -> Self {
        ExactRational { num, den: BigInt::one() }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_integer(BigInt::from(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Self {
        Self::from_integer(BigInt::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(BigInt::one())
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn into_parts(self) -> (BigInt, BigInt) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<&BigInt> {
        self.is_integer().then_some(&self.num)
    }

    pub fn abs(&self) -> Self {
        ExactRational { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, exp: u32) -> Self {
        ExactRational {
            num: num_traits::pow(self.num.clone(), exp as usize),
            den: num_traits::pow(self.den.clone(), exp as usize),
        }
    }

    /// Multiplies by an integer.
    pub fn mul_int(&self, k: &BigInt) -> Self {
        if self.den.is_one() {
            return Self::from_integer(&self.num * k);
        }
        let g = gcd_big(k, &self.den);
        if g.is_one() {
            ExactRational { num: &self.num * k, den: self.den.clone() }
        } else {
            ExactRational { num: &self.num * (k / &g), den: &self.den / g }
        }
    }

    /// Divides by a nonzero integer.
    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let g = gcd_big(&self.num, k);
        let (num, k) = if g.is_one() { (self.num.clone(), k.clone()) } else { (&self.num / &g, k / &g) };
        let (num, k) = if k.is_negative() { (-num, -k) } else { (num, k) };
        ExactRational { num, den: &self.den * k }
    }

    /// Number of decimal digits of the absolute numerator.
    pub fn numer_digits(&self) -> usize {
        let s = self.num.magnitude().to_str_radix(10);
        s.len()
    }
}

impl Default for ExactRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_i64(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = ParseError;

    /// Parses `p` or `p/q` with no surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Rational(s.to_string());
        let parse_int = |t: &str| -> Result<BigInt, ParseError> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Self::from_integer(parse_int(s)?)),
            Some((p, q)) => {
                let den = parse_int(q)?;
                if den.is_zero() || q.starts_with('-') {
                    return Err(bad());
                }
                Ok(Self::new(parse_int(p)?, den))
            }
        }
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

fn add_impl(a: &ExactRational, b: &ExactRational, negate_b: bool) -> ExactRational {
    let bn = if negate_b { -&b.num } else { b.num.clone() };
    if a.den.is_one() && b.den.is_one() {
        return ExactRational::from_integer(&a.num + bn);
    }
    if a.den == b.den {
        return ExactRational::new(&a.num + bn, a.den.clone());
    }
    if b.den.is_one() {
        return ExactRational { num: &a.num + bn * &a.den, den: a.den.clone() };
    }
    if a.den.is_one() {
        return ExactRational { num: &a.num * &b.den + bn, den: b.den.clone() };
    }
    // Henrici: share the gcd of the denominators.
    let g = gcd_big(&a.den, &b.den);
    if g.is_one() {
        return ExactRational { num: &a.num * &b.den + bn * &a.den, den: &a.den * &b.den };
    }
    let ad = &a.den / &g;
    let bd = &b.den / &g;
    let t = &a.num * &bd + bn * &ad;
    let g2 = gcd_big(&t, &g);
    if g2.is_one() {
        ExactRational { num: t, den: ad * &b.den }
    } else {
        ExactRational { num: t / &g2, den: ad * (&b.den / g2) }
    }
}

fn mul_impl(a: &ExactRational, b: &ExactRational) -> ExactRational {
    if a.den.is_one() && b.den.is_one() {
        return ExactRational::from_integer(&a.num * &b.num);
    }
    if a.is_zero() || b.is_zero() {
        return ExactRational::zero();
    }
    let g1 = gcd_big(&a.num, &b.den);
    let g2 = gcd_big(&b.num, &a.den);
    let an = if g1.is_one() { a.num.clone() } else { &a.num / &g1 };
    let bd = if g1.is_one() { b.den.clone() } else { &b.den / &g1 };
    let bn = if g2.is_one() { b.num.clone() } else { &b.num / &g2 };
    let ad = if g2.is_one() { a.den.clone() } else { &a.den / &g2 };
    ExactRational { num: an * bn, den: ad * bd }
}

impl<'a> Add<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &'a ExactRational) -> ExactRational {
        add_impl(self, rhs, false)
    }
}

impl<'a> Sub<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: &'a ExactRational) -> ExactRational {
        add_impl(self, rhs, true)
    }
}

impl<'a> Mul<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &'a ExactRational) -> ExactRational {
        mul_impl(self, rhs)
    }
}

impl<'a> Div<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'a ExactRational) -> ExactRational {
        assert!(!rhs.is_zero(), "division by zero");
        if rhs.den.is_one() {
            return self.div_int(&rhs.num);
        }
        mul_impl(self, &rhs.recip())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        if self.den.is_one() && rhs.den.is_one() {
            self.num += &rhs.num;
        } else {
            *self = add_impl(self, rhs, false);
        }
    }
}

impl SubAssign<&ExactRational> for ExactRational {
    fn sub_assign(&mut self, rhs: &ExactRational) {
        if self.den.is_one() && rhs.den.is_one() {
            self.num -= &rhs.num;
        } else {
            *self = add_impl(self, rhs, true);
        }
    }
}

impl MulAssign<&ExactRational> for ExactRational {
    fn mul_assign(&mut self, rhs: &ExactRational) {
        if self.den.is_one() && rhs.den.is_one() {
            self.num *= &rhs.num;
        } else {
            *self = mul_impl(self, rhs);
        }
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational { num: -self.num, den: self.den }
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational { num: -&self.num, den: self.den.clone() }
    }
}
