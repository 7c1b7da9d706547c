//! Pure single-direction recurrences: discovery by exact fitting, and
//! evaluation with a window of `order` values.
//!
//! For a target `m`, the direction is the largest coordinate (lowest index on
//! ties) and the other coordinates are frozen. The sequence along that
//! direction vanishes on one parity class, so recurrences run with step 2 on
//! the other.

mod cache;
mod discover;
mod evaluate;
pub mod linalg;
mod modular;
mod recurrence;

pub use cache::{cache_key, RecurrenceCache};
pub use discover::{discover, SearchLimits, HELD_OUT};
pub use evaluate::{evaluate, evaluate_bridged, evaluate_with_stats, EvalStats};
pub use recurrence::{verify, Recurrence};

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::stein::{moment_stein, seed_sequence};

use discover::discover_with_values;

/// How [`moment_pure_with`] produced its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Odd total order: zero without further work.
    Parity,
    /// The target lies among the values any fit would sample; taken from the
    /// seed computation directly.
    SeedWindow,
    /// Run forward with a recurrence.
    Recurrence,
    /// Discovery failed; computed by the mixed recurrence instead.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PureOptions {
    pub limits: SearchLimits,
    /// Use the mixed recurrence when discovery fails instead of erroring.
    pub fallback: bool,
    /// Serve targets inside the smallest fitting window from the seeds.
    pub seed_window: bool,
}

impl Default for PureOptions {
    fn default() -> Self {
        PureOptions { limits: SearchLimits::default(), fallback: true, seed_window: true }
    }
}

#[derive(Clone, Debug)]
pub struct PureOutcome {
    pub value: Polynomial,
    pub route: Route,
    /// `(order, degree)` of the recurrence used, if any.
    pub recurrence: Option<(usize, usize)>,
    pub fallback_used: bool,
    pub stats: Option<EvalStats>,
}

/// `M_C(m)` through a pure recurrence along the largest coordinate, using
/// the process-wide recurrence cache and falling back to the mixed
/// recurrence if no recurrence is found.
pub fn moment_pure(cov: &CovarianceSpec, m: &MultiIndex) -> Result<Polynomial> {
    moment_pure_with(cov, m, &PureOptions::default(), RecurrenceCache::global()).map(|o| o.value)
}

/// Largest index served from the seeds when `seed_window` is on.
fn window_top(parity: u32) -> u32 {
    parity + 2 * (1 + 2 + 2 * HELD_OUT as u32 - 1)
}

pub fn moment_pure_with(
    cov: &CovarianceSpec,
    m: &MultiIndex,
    opts: &PureOptions,
    cache: &RecurrenceCache,
) -> Result<PureOutcome> {
    if cov.k() != m.len() {
        return Err(Error::DimensionMismatch { expected: cov.k(), got: m.len() });
    }
    let outcome = |value, route| PureOutcome { value, route, recurrence: None, fallback_used: false, stats: None };
    if m.total() % 2 == 1 {
        return Ok(outcome(Polynomial::zero(), Route::Parity));
    }
    let direction = m.argmax();
    let target = m[direction];
    let fixed = m.with(direction, 0);
    let parity = target % 2;
    if opts.seed_window && target <= window_top(parity) {
        return Ok(outcome(moment_stein(cov, m)?, Route::SeedWindow));
    }

    let mut bridge = |n: u32| moment_stein(cov, &fixed.with(direction, n));
    let run = |rec: &Recurrence, seeds: Vec<(u32, Polynomial)>, bridge: &mut dyn FnMut(u32) -> Result<Polynomial>| {
        let (value, stats) = evaluate_bridged(rec, &seeds, target, bridge)?;
        Ok::<_, Error>(PureOutcome {
            value,
            route: Route::Recurrence,
            recurrence: Some((rec.order, rec.degree())),
            fallback_used: false,
            stats: Some(stats),
        })
    };

    if let Some(rec) = cache.get(cov, direction, &fixed) {
        let seeds = seed_sequence(cov, direction, &fixed, rec.offset, rec.order, rec.step)?;
        let seeds = seeds.into_iter().enumerate().map(|(i, v)| (rec.offset + rec.step * i as u32, v)).collect();
        return run(&rec, seeds, &mut bridge);
    }
    match discover_with_values(cov, direction, &fixed, &opts.limits) {
        Ok((rec, values)) => {
            cache.insert(&rec)?;
            let base = fixed.total();
            let have = values.len();
            let idx = ((target - parity) / 2) as usize;
            if idx < have {
                let mut o = outcome(values.moment(idx, base), Route::SeedWindow);
                o.recurrence = Some((rec.order, rec.degree()));
                return Ok(o);
            }
            let seeds = (have - rec.order..have).map(|i| (parity + 2 * i as u32, values.moment(i, base))).collect();
            drop(values);
            run(&rec, seeds, &mut bridge)
        }
        Err(e @ Error::NotFound { .. }) => {
            if !opts.fallback {
                return Err(e);
            }
            let mut o = outcome(moment_stein(cov, m)?, Route::Fallback);
            o.fallback_used = true;
            Ok(o)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::moment_wick;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.iter().copied())
    }

    fn forced() -> PureOptions {
        PureOptions { seed_window: false, fallback: false, ..Default::default() }
    }

    #[test]
    fn examples() {
        let s2 = CovarianceSpec::symbolic(2);
        assert_eq!(moment_pure(&s2, &mi(&[3, 3])).unwrap(), "9*c12 + 6*c12^3".parse().unwrap());
        let s3 = CovarianceSpec::symbolic(3);
        assert!(moment_pure(&s3, &mi(&[1, 1, 1])).unwrap().is_zero());
    }

    #[test]
    fn forced_recurrence_k2_symbolic() {
        let s2 = CovarianceSpec::symbolic(2);
        let cache = RecurrenceCache::new();
        for m in [[3, 3], [6, 2], [2, 6], [8, 8]] {
            let m = mi(&m);
            let out = moment_pure_with(&s2, &m, &forced(), &cache).unwrap();
            assert_eq!(out.value, moment_wick(&s2, &m).unwrap(), "{m}");
        }
    }

    #[test]
    fn runs_past_the_seeds() {
        let cov = CovarianceSpec::parse(2, "1/3").unwrap();
        let cache = RecurrenceCache::new();
        let m = mi(&[3, 201]);
        let out = moment_pure_with(&cov, &m, &PureOptions::default(), &cache).unwrap();
        assert_eq!(out.route, Route::Recurrence);
        assert_eq!(out.value, moment_wick(&cov, &m).unwrap());
        // the second call reuses the cached recurrence and fresh low seeds
        let m = mi(&[3, 251]);
        let out = moment_pure_with(&cov, &m, &PureOptions::default(), &cache).unwrap();
        assert_eq!(out.route, Route::Recurrence);
        assert_eq!(out.value, moment_wick(&cov, &m).unwrap());
    }

    #[test]
    fn fallback_is_flagged() {
        let cov = CovarianceSpec::parse(2, "1/3").unwrap();
        let opts = PureOptions { limits: SearchLimits::new(1, 0), seed_window: false, fallback: true };
        let m = mi(&[9, 1]);
        let out = moment_pure_with(&cov, &m, &opts, &RecurrenceCache::new()).unwrap();
        assert!(out.fallback_used);
        assert_eq!(out.value, moment_wick(&cov, &m).unwrap());
        let strict = PureOptions { fallback: false, ..opts };
        assert!(matches!(
            moment_pure_with(&cov, &m, &strict, &RecurrenceCache::new()),
            Err(Error::NotFound { .. })
        ));
    }
}
