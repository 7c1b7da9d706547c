//! Engine selection and the tagged result shared by the command line and the
//! browser demo.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::poly::{PolyTerm, Polynomial};
use crate::pure::{moment_pure_with, PureOptions, RecurrenceCache, Route};
use crate::stein::moment_stein;
use crate::wick::moment_wick;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Wick,
    Stein,
    Pure,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Wick, Engine::Stein, Engine::Pure];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Wick => "wick",
            Engine::Stein => "stein",
            Engine::Pure => "pure",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wick" => Ok(Engine::Wick),
            "stein" => Ok(Engine::Stein),
            "pure" => Ok(Engine::Pure),
            _ => Err(Error::InvalidArgument(format!("unknown engine `{s}` (expected wick, stein or pure)"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub fallback_used: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence_degree: Option<usize>,
    /// How the pure engine obtained the value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<&'static str>,
}

/// A moment together with where it came from.
#[derive(Clone, Debug)]
pub struct MomentResult {
    pub engine: Engine,
    pub cov: CovarianceSpec,
    pub m: MultiIndex,
    pub value: Polynomial,
    pub metadata: Metadata,
}

#[derive(Serialize)]
struct MomentJson<'a> {
    engine: Engine,
    k: usize,
    m: &'a MultiIndex,
    cov: String,
    result: Vec<PolyTerm>,
    metadata: &'a Metadata,
}

impl MomentResult {
    pub fn to_json(&self) -> String {
        let j = MomentJson {
            engine: self.engine,
            k: self.cov.k(),
            m: &self.m,
            cov: self.cov.to_string(),
            result: self.value.to_json_terms(),
            metadata: &self.metadata,
        };
        serde_json::to_string(&j).expect("plain data serialises")
    }
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Parity => "parity",
        Route::SeedWindow => "seed-window",
        Route::Recurrence => "recurrence",
        Route::Fallback => "fallback",
    }
}

/// `M_C(m)` by the chosen engine. `opts` and `cache` only matter for
/// [`Engine::Pure`].
pub fn compute_moment(
    cov: &CovarianceSpec,
    m: &MultiIndex,
    engine: Engine,
    opts: &PureOptions,
    cache: &RecurrenceCache,
) -> Result<MomentResult> {
    let mut metadata = Metadata::default();
    let value = match engine {
        Engine::Wick => moment_wick(cov, m)?,
        Engine::Stein => moment_stein(cov, m)?,
        Engine::Pure => {
            let out = moment_pure_with(cov, m, opts, cache)?;
            metadata.fallback_used = out.fallback_used;
            metadata.recurrence_order = out.recurrence.map(|r| r.0);
            metadata.recurrence_degree = out.recurrence.map(|r| r.1);
            metadata.route = Some(route_name(out.route));
            out.value
        }
    };
    Ok(MomentResult { engine, cov: cov.clone(), m: m.clone(), value, metadata })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Engine::ALL {
            assert_eq!(e.to_string().parse::<Engine>().unwrap(), e);
        }
        assert!("maple".parse::<Engine>().is_err());
    }

    #[test]
    fn json_is_tagged() {
        let cov = CovarianceSpec::symbolic(2);
        let m = MultiIndex::new([3, 3]);
        for e in Engine::ALL {
            let r = compute_moment(&cov, &m, e, &PureOptions::default(), &RecurrenceCache::new()).unwrap();
            let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(v["engine"], e.name());
            assert_eq!(v["k"], 2);
            assert_eq!(v["m"], serde_json::json!([3, 3]));
            assert_eq!(v["metadata"]["fallback_used"], false);
            assert_eq!(v["result"].as_array().unwrap().len(), 2);
            assert_eq!(v["metadata"].get("route").is_some(), e == Engine::Pure);
        }
    }
}
