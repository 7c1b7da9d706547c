//! Sliding-window evaluation of a pure recurrence.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::ExactRational;
use crate::stein::unscale;

use super::recurrence::Recurrence;

/// Instrumentation collected while running a recurrence forward.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Recurrence applications (window shifts).
    pub steps: u64,
    /// Largest number of sequence values held at once.
    pub max_live: usize,
    /// Indices whose value came from the bridge instead of the recurrence.
    pub bridged: Vec<u32>,
}

/// Window of sequence values with a high-water mark.
struct Window<V> {
    values: VecDeque<V>,
    cap: usize,
    max_live: usize,
}

impl<V> Window<V> {
    fn new(seeds: Vec<V>) -> Self {
        let cap = seeds.len();
        let values: VecDeque<V> = seeds.into();
        let max_live = values.len();
        Window { values, cap, max_live }
    }

    /// `t`-th most recent value, `t >= 1`.
    fn back(&self, t: usize) -> &V {
        &self.values[self.values.len() - t]
    }

    fn push(&mut self, v: V) {
        if self.values.len() == self.cap {
            self.values.pop_front();
        }
        self.values.push_back(v);
        self.max_live = self.max_live.max(self.values.len());
    }
}

/// Runs `rec` forward from `seeds` (the `order` consecutive values starting
/// at the index given with the first seed) to `target`.
pub fn evaluate(rec: &Recurrence, seeds: &[(u32, Polynomial)], target: u32) -> Result<Polynomial> {
    evaluate_with_stats(rec, seeds, target).map(|(v, _)| v)
}

pub fn evaluate_with_stats(
    rec: &Recurrence,
    seeds: &[(u32, Polynomial)],
    target: u32,
) -> Result<(Polynomial, EvalStats)> {
    evaluate_bridged(rec, seeds, target, &mut |n| Err(Error::SingularLeadingCoefficient(n as i64)))
}

/// As [`evaluate_with_stats`], asking `bridge` for the value at any index
/// where the leading coefficient vanishes.
pub fn evaluate_bridged(
    rec: &Recurrence,
    seeds: &[(u32, Polynomial)],
    target: u32,
    bridge: &mut dyn FnMut(u32) -> Result<Polynomial>,
) -> Result<(Polynomial, EvalStats)> {
    let step = rec.step;
    if seeds.len() != rec.order {
        return Err(Error::InvalidArgument(format!("need {} seeds, got {}", rec.order, seeds.len())));
    }
    let start = seeds[0].0;
    if seeds.iter().enumerate().any(|(i, (n, _))| *n != start + step * i as u32) {
        return Err(Error::InvalidArgument("seed indices must be consecutive on the lattice".into()));
    }
    if start < rec.offset || start % step != rec.offset % step {
        return Err(Error::InvalidArgument(format!("seeds must start at or after offset {}", rec.offset)));
    }
    if target < start || !(target - start).is_multiple_of(step) {
        return Err(Error::InvalidArgument(format!("target {target} is not reachable from seed {start}")));
    }
    let last = start + step * (rec.order as u32 - 1);
    if target <= last {
        let v = seeds[((target - start) / step) as usize].1.clone();
        return Ok((v, EvalStats { steps: 0, max_live: seeds.len(), bridged: vec![] }));
    }
    match rec.cov.scaled_integer_matrix() {
        Some((q, _)) => scaled_run(rec, &q, seeds, last, target, bridge),
        None => generic_run(rec, seeds, last, target, bridge),
    }
}

fn generic_run(
    rec: &Recurrence,
    seeds: &[(u32, Polynomial)],
    last: u32,
    target: u32,
    bridge: &mut dyn FnMut(u32) -> Result<Polynomial>,
) -> Result<(Polynomial, EvalStats)> {
    let mut w = Window::new(seeds.iter().map(|(_, v)| v.clone()).collect());
    let mut stats = EvalStats::default();
    let mut n = last;
    while n < target {
        n += rec.step;
        let lead = rec.coefficient_at(0, n);
        let v = if lead.is_zero() {
            stats.bridged.push(n);
            bridge(n)?
        } else {
            let mut s = Polynomial::zero();
            for t in 1..=rec.order {
                let c = rec.coefficient_at(t, n);
                if !c.is_zero() {
                    s += &(&c * w.back(t));
                }
            }
            (-s).div_exact(&lead).ok_or(Error::InexactStep(n as i64))?
        };
        w.push(v);
        stats.steps += 1;
    }
    stats.max_live = w.max_live;
    Ok((w.back(1).clone(), stats))
}

/// Integer coefficients of the relation on `q^{|m|/2} M`: the coefficient of
/// the `t`-th lagged value gains a factor `q^t`.
pub(crate) fn scaled_coefficients(rec: &Recurrence, q: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let mut qt = BigInt::from(1);
    let mut out = Vec::with_capacity(rec.order + 1);
    for c in &rec.coeffs {
        let mut row = Vec::with_capacity(c.len());
        for p in c {
            let v = if p.is_zero() { ExactRational::zero() } else { p.as_constant()? };
            row.push(v.mul_int(&qt).to_integer()?.clone());
        }
        out.push(row);
        qt *= q;
    }
    Some(out)
}

pub(crate) fn horner(c: &[BigInt], n: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for a in c.iter().rev() {
        acc = acc * n + a;
    }
    acc
}

fn scaled_run(
    rec: &Recurrence,
    q: &BigInt,
    seeds: &[(u32, Polynomial)],
    last: u32,
    target: u32,
    bridge: &mut dyn FnMut(u32) -> Result<Polynomial>,
) -> Result<(Polynomial, EvalStats)> {
    let base = rec.fixed.total();
    let scale = |n: u32, v: &Polynomial| -> Result<BigInt> {
        let x = if v.is_zero() { ExactRational::zero() } else {
            v.as_constant().ok_or_else(|| Error::InvalidArgument("numeric recurrence needs constant seeds".into()))?
        };
        x.mul_int(&num_traits::pow(q.clone(), ((base + n) / 2) as usize))
            .to_integer()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("seed at {n} is not a moment of this covariance")))
    };
    let y = scaled_coefficients(rec, q)
        .ok_or_else(|| Error::InvalidArgument("numeric recurrence needs integer constant coefficients".into()))?;
    let mut w = Window::new(seeds.iter().map(|(n, v)| scale(*n, v)).collect::<Result<Vec<_>>>()?);
    let mut stats = EvalStats::default();
    let mut n = last;
    while n < target {
        n += rec.step;
        let nb = BigInt::from(n);
        let lead = horner(&y[0], &nb);
        let v = if lead.is_zero() {
            stats.bridged.push(n);
            scale(n, &bridge(n)?)?
        } else {
            let mut s = BigInt::zero();
            for t in 1..=rec.order {
                let c = horner(&y[t], &nb);
                if !c.is_zero() {
                    s += c * w.back(t);
                }
            }
            let (quo, rem) = (-s).div_rem(&lead);
            if !rem.is_zero() {
                return Err(Error::InexactStep(n as i64));
            }
            quo
        };
        w.push(v);
        stats.steps += 1;
    }
    stats.max_live = w.max_live;
    let top = w.back(1).clone();
    Ok((Polynomial::constant(unscale(top, q, base + target)), stats))
}
