//! Text tables of moments, one record per line: `m1,m2,m3<TAB><polynomial>`.

use std::io::Write;

use crate::covariance::{CovarianceSpec, MultiIndex};
use crate::engine::{compute_moment, Engine};
use crate::error::{Error, Result};
use crate::pure::{PureOptions, RecurrenceCache};

/// Which indices a table covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableShape {
    /// Every `m` with `1 ≤ m_i ≤ n`, last coordinate fastest.
    Grid(u32),
    /// `(2t, …, 2t)` for `t = 1..=n`.
    Diagonal(u32),
}

impl TableShape {
    pub fn indices(self, k: usize) -> Vec<MultiIndex> {
        match self {
            TableShape::Grid(n) => {
                let mut out = Vec::new();
                if n == 0 || k == 0 {
                    return out;
                }
                let mut cur = vec![1u32; k];
                loop {
                    out.push(MultiIndex::new(cur.iter().copied()));
                    let mut pos = k;
                    loop {
                        if pos == 0 {
                            return out;
                        }
                        pos -= 1;
                        if cur[pos] < n {
                            cur[pos] += 1;
                            break;
                        }
                        cur[pos] = 1;
                    }
                }
            }
            TableShape::Diagonal(n) => (1..=n).map(|t| MultiIndex::new(vec![2 * t; k])).collect(),
        }
    }
}

/// One table record, without the trailing newline.
pub fn record(m: &MultiIndex, value: &crate::poly::Polynomial) -> String {
    format!("{m}\t{value}")
}

/// Writes the symbolic-covariance table for `k` and `shape` to `out`.
pub fn write_table(out: &mut dyn Write, k: usize, shape: TableShape, engine: Engine) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let cov = CovarianceSpec::symbolic(k);
    let opts = PureOptions::default();
    let cache = RecurrenceCache::new();
    for m in shape.indices(k) {
        let r = compute_moment(&cov, &m, engine, &opts, &cache)?;
        writeln!(out, "{}", record(&m, &r.value))?;
    }
    out.flush()?;
    Ok(())
}

/// The table as a string.
pub fn table_string(k: usize, shape: TableShape, engine: Engine) -> Result<String> {
    let mut buf = Vec::new();
    write_table(&mut buf, k, shape, engine)?;
    Ok(String::from_utf8(buf).expect("table text is ascii"))
}
