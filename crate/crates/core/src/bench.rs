//! Wall-clock comparison of the pure and wick engines on two fixed cases.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::pure::{moment_pure_with, PureOptions, RecurrenceCache};
use crate::wick::moment_wick;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchCase {
    /// `(570, 560, 750)` at `c = (1/2, 1/3, 1/4)`.
    NumericBig,
    /// `(100, 50, 40)` with symbolic covariance.
    SymbolicMid,
}

impl BenchCase {
    pub fn name(self) -> &'static str {
        match self {
            BenchCase::NumericBig => "numeric-big",
            BenchCase::SymbolicMid => "symbolic-mid",
        }
    }

    pub fn inputs(self) -> (CovarianceSpec, MultiIndex) {
        match self {
            BenchCase::NumericBig => {
                (CovarianceSpec::parse(3, "1/2,1/3,1/4").unwrap(), MultiIndex::new([570, 560, 750]))
            }
            BenchCase::SymbolicMid => (CovarianceSpec::symbolic(3), MultiIndex::new([100, 50, 40])),
        }
    }
}

impl fmt::Display for BenchCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric-big" => Ok(BenchCase::NumericBig),
            "symbolic-mid" => Ok(BenchCase::SymbolicMid),
            _ => Err(Error::InvalidArgument(format!("unknown bench case `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub case: BenchCase,
    pub k: usize,
    pub m: MultiIndex,
    pub cov: String,
    pub repeat: usize,
    pub pure_seconds: Vec<f64>,
    pub wick_seconds: Vec<f64>,
    pub pure_median: f64,
    pub wick_median: f64,
    /// `wick_median / pure_median`.
    pub speedup: f64,
    pub agree: bool,
    pub fallback_used: bool,
    pub recurrence_order: Option<usize>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Runs both engines `repeat` times. Every pure run starts from an empty
/// recurrence cache, so discovery is part of its time.
pub fn run_bench(case: BenchCase, repeat: usize) -> Result<BenchReport> {
    if repeat == 0 {
        return Err(Error::InvalidArgument("repeat must be at least 1".into()));
    }
    let (cov, m) = case.inputs();
    let mut pure_seconds = Vec::with_capacity(repeat);
    let mut wick_seconds = Vec::with_capacity(repeat);
    let mut agree = true;
    let mut fallback_used = false;
    let mut recurrence_order = None;
    for _ in 0..repeat {
        let t = Instant::now();
        let out = moment_pure_with(&cov, &m, &PureOptions::default(), &RecurrenceCache::new())?;
        pure_seconds.push(t.elapsed().as_secs_f64());
        let t = Instant::now();
        let w = moment_wick(&cov, &m)?;
        wick_seconds.push(t.elapsed().as_secs_f64());
        agree &= out.value == w;
        fallback_used |= out.fallback_used;
        recurrence_order = out.recurrence.map(|r| r.0);
    }
    let pure_median = median(&pure_seconds);
    let wick_median = median(&wick_seconds);
    Ok(BenchReport {
        case,
        k: cov.k(),
        m,
        cov: cov.to_string(),
        repeat,
        pure_seconds,
        wick_seconds,
        pure_median,
        wick_median,
        speedup: wick_median / pure_median,
        agree,
        fallback_used,
        recurrence_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn case_names() {
        for c in [BenchCase::NumericBig, BenchCase::SymbolicMid] {
            assert_eq!(c.name().parse::<BenchCase>().unwrap(), c);
        }
        let (cov, m) = BenchCase::NumericBig.inputs();
        assert_eq!(cov.k(), m.len());
    }
}
