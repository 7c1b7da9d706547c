//! Discovered recurrences keyed by what they were fitted against, optionally
//! persisted as JSON files.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::error::Result;

use super::recurrence::Recurrence;

#[derive(Debug, Default)]
pub struct RecurrenceCache {
    dir: Option<PathBuf>,
    map: Mutex<HashMap<String, Recurrence>>,
}

/// `{covariance fingerprint}|d{direction}|{fixed}` with the hole written as `_`.
pub fn cache_key(cov: &CovarianceSpec, direction: usize, fixed: &MultiIndex) -> String {
    let f: Vec<String> =
        fixed.as_slice().iter().enumerate().map(|(i, v)| if i == direction { "_".into() } else { v.to_string() }).collect();
    format!("{}|d{}|{}", cov.fingerprint(), direction + 1, f.join(","))
}

impl RecurrenceCache {
    /// In-memory only.
    pub fn new() -> Self {
        Self::default()
    }

    /// Backed by JSON files in `dir` (created on first write).
    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        RecurrenceCache { dir: Some(dir.into()), map: Mutex::default() }
    }

    /// The process-wide in-memory cache used by [`super::moment_pure`].
    pub fn global() -> &'static RecurrenceCache {
        static CACHE: OnceLock<RecurrenceCache> = OnceLock::new();
        CACHE.get_or_init(RecurrenceCache::new)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn file_for(&self, key: &str) -> Option<PathBuf> {
        let name: String =
            key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
        // distinct keys can sanitise alike, so add a short hash
        let h = key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        self.dir.as_ref().map(|d| d.join(format!("{name}-{h:016x}.json")))
    }

    pub fn get(&self, cov: &CovarianceSpec, direction: usize, fixed: &MultiIndex) -> Option<Recurrence> {
        let key = cache_key(cov, direction, fixed);
        if let Some(r) = self.map.lock().unwrap().get(&key) {
            return Some(r.clone());
        }
        let path = self.file_for(&key)?;
        let text = std::fs::read_to_string(path).ok()?;
        let rec = Recurrence::from_json(&text).ok()?;
        let fits = rec.cov == *cov && rec.direction == direction && rec.fixed == fixed.with(direction, 0);
        if !fits {
            return None;
        }
        self.map.lock().unwrap().insert(key, rec.clone());
        Some(rec)
    }

    /// Stores `rec`; a later insert under the same key replaces it.
    pub fn insert(&self, rec: &Recurrence) -> Result<()> {
        let key = cache_key(&rec.cov, rec.direction, &rec.fixed);
        if let Some(path) = self.file_for(&key) {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            let tmp = path.with_extension("json.tmp");
            std::fs::write(&tmp, rec.to_json())?;
            std::fs::rename(tmp, path)?;
        }
        self.map.lock().unwrap().insert(key, rec.clone());
        Ok(())
    }

    pub fn get_or_try_insert(
        &self,
        cov: &CovarianceSpec,
        direction: usize,
        fixed: &MultiIndex,
        compute: impl FnOnce() -> Result<Recurrence>,
    ) -> Result<Recurrence> {
        if let Some(r) = self.get(cov, direction, fixed) {
            return Ok(r);
        }
        let rec = compute()?;
        self.insert(&rec)?;
        Ok(rec)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn rec() -> Recurrence {
        let p = |s: &str| s.parse::<Polynomial>().unwrap();
        Recurrence {
            k: 2,
            direction: 0,
            step: 2,
            order: 1,
            offset: 0,
            fixed: MultiIndex::new([0, 0]),
            cov: CovarianceSpec::parse(2, "1/2").unwrap(),
            coeffs: vec![vec![p("1"), p("0")], vec![p("1"), p("-1")]],
            fit_end: 40,
        }
    }

    #[test]
    fn persists_across_instances() {
        let dir = tempfile::tempdir().unwrap();
        let r = rec();
        let a = RecurrenceCache::with_dir(dir.path());
        assert!(a.get(&r.cov, 0, &r.fixed).is_none());
        a.insert(&r).unwrap();
        let b = RecurrenceCache::with_dir(dir.path());
        assert_eq!(b.get(&r.cov, 0, &r.fixed), Some(r.clone()));
        let other = CovarianceSpec::parse(2, "1/3").unwrap();
        assert!(b.get(&other, 0, &r.fixed).is_none());
    }

    #[test]
    fn keys_ignore_the_hole() {
        let cov = CovarianceSpec::symbolic(3);
        assert_eq!(cache_key(&cov, 2, &MultiIndex::new([1, 2, 9])), cache_key(&cov, 2, &MultiIndex::new([1, 2, 0])));
        assert_ne!(cache_key(&cov, 1, &MultiIndex::new([1, 0, 2])), cache_key(&cov, 2, &MultiIndex::new([1, 2, 0])));
    }
}
