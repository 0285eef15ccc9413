//! Memoized correlator storage shared by the three coefficient
//! recursions, with line-based disk persistence.
//!
//! Concurrency contract: `get_or_compute` evaluates each key at most
//! once (per-key `OnceLock`); concurrent callers of the same key block
//! until the single computation finishes. Recursive dependencies are
//! safe because every recursion descends in a well-founded order, so a
//! computation never re-enters its own key.
//!
//! Cache file format: one record per line,
//!     <provenance> <genus> <ks as comma list or "-"> <value "p/q">
//! Example: `WK 1 1 1/24`. Malformed lines are rejected with their
//! line number, never skipped.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multiset::{canonical, sum};
use crate::rational::{fmt_rat, parse_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Wk,
    Cbgw,
    Nbi,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Wk => "WK",
            Provenance::Cbgw => "cBGW",
            Provenance::Nbi => "NBI",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        match s {
            "WK" => Some(Provenance::Wk),
            "cBGW" => Some(Provenance::Cbgw),
            "NBI" => Some(Provenance::Nbi),
            _ => None,
        }
    }
}

/// (genus, canonically sorted index multiset).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub g: u32,
    pub ks: Vec<u32>,
}

impl CorrelatorKey {
    /// Canonicalizes the index order.
    pub fn new(g: u32, ks: &[u32]) -> Self {
        CorrelatorKey { g, ks: canonical(ks) }
    }
}

type Slot = Arc<OnceLock<Rat>>;

#[derive(Default)]
pub struct CorrelatorTable {
    maps: [Mutex<HashMap<CorrelatorKey, Slot>>; 3],
}

fn lane(p: Provenance) -> usize {
    match p {
        Provenance::Wk => 0,
        Provenance::Cbgw => 1,
        Provenance::Nbi => 2,
    }
}

impl CorrelatorTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Memoized lookup; `compute` runs at most once per key.
    pub fn get_or_compute<F>(&self, p: Provenance, key: CorrelatorKey, compute: F) -> Rat
    where
        F: FnOnce() -> Rat,
    {
        let slot = {
            let mut map = self.maps[lane(p)].lock().unwrap();
            map.entry(key).or_insert_with(|| Arc::new(OnceLock::new())).clone()
        };
        slot.get_or_init(compute).clone()
    }

    /// Snapshot of all completed entries, sorted for deterministic output.
    pub fn snapshot(&self) -> Vec<(Provenance, CorrelatorKey, Rat)> {
        let mut out = Vec::new();
        for p in [Provenance::Wk, Provenance::Cbgw, Provenance::Nbi] {
            let map = self.maps[lane(p)].lock().unwrap();
            for (k, slot) in map.iter() {
                if let Some(v) = slot.get() {
                    out.push((p, k.clone(), v.clone()));
                }
            }
        }
        out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        for (p, key, v) in self.snapshot() {
            let ks = if key.ks.is_empty() {
                "-".to_string()
            } else {
                key.ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            };
            writeln!(file, "{} {} {} {}", p.tag(), key.g, ks, fmt_rat(&v))?;
        }
        Ok(())
    }

    /// Loads records, validating each line. A malformed line is an
    /// error naming its line number; a well-formed record is trusted.
    pub fn load(&self, path: &Path) -> Result<usize> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut loaded = 0usize;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Cache { line: lineno, msg: format!("expected 4 fields, got {}", fields.len()) });
            }
            let p = Provenance::from_tag(fields[0])
                .ok_or_else(|| Error::Cache { line: lineno, msg: format!("unknown provenance '{}'", fields[0]) })?;
            let g: u32 = fields[1]
                .parse()
                .map_err(|_| Error::Cache { line: lineno, msg: format!("bad genus '{}'", fields[1]) })?;
            let ks: Vec<u32> = if fields[2] == "-" {
                Vec::new()
            } else {
                fields[2]
                    .split(',')
                    .map(|s| s.parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Cache { line: lineno, msg: format!("bad index list '{}'", fields[2]) })?
            };
            if !ks.windows(2).all(|w| w[0] <= w[1]) {
                return Err(Error::Cache { line: lineno, msg: "index list not sorted".into() });
            }
            let v = parse_rat(fields[3])
                .ok_or_else(|| Error::Cache { line: lineno, msg: format!("bad rational '{}'", fields[3]) })?;
            // Dimension constraint for WK entries.
            if p == Provenance::Wk && !v.is_zero() {
                let n = ks.len() as i64;
                if sum(&ks) as i64 != 3 * g as i64 - 3 + n {
                    return Err(Error::Cache {
                        line: lineno,
                        msg: "nonzero WK value violates the dimension constraint".into(),
                    });
                }
            }
            let key = CorrelatorKey { g, ks };
            let slot = {
                let mut map = self.maps[lane(p)].lock().unwrap();
                map.entry(key).or_insert_with(|| Arc::new(OnceLock::new())).clone()
            };
            let _ = slot.set(v);
            loaded += 1;
        }
        Ok(loaded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn compute_once_and_round_trip() {
        let table = CorrelatorTable::new();
        let key = CorrelatorKey::new(1, &[1]);
        let mut calls = 0;
        let v = table.get_or_compute(Provenance::Wk, key.clone(), || {
            calls += 1;
            rat(1, 24)
        });
        assert_eq!(v, rat(1, 24));
        let v2 = table.get_or_compute(Provenance::Wk, key, || unreachable!("must be memoized"));
        assert_eq!(v2, rat(1, 24));
        assert_eq!(calls, 1);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.txt");
        table.save(&path).unwrap();
        let fresh = CorrelatorTable::new();
        assert_eq!(fresh.load(&path).unwrap(), 1);
        let v3 = fresh.get_or_compute(Provenance::Wk, CorrelatorKey::new(1, &[1]), || unreachable!());
        assert_eq!(v3, rat(1, 24));
    }

    #[test]
    fn key_canonicalization() {
        assert_eq!(CorrelatorKey::new(0, &[2, 0, 1]), CorrelatorKey::new(0, &[0, 1, 2]));
    }

    #[test]
    fn rejects_corrupt_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.txt");
        std::fs::write(&path, "WK 1 1 1/24\nXX 0 0 1/2\n").unwrap();
        let table = CorrelatorTable::new();
        match table.load(&path) {
            Err(Error::Cache { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected cache error, got {other:?}"),
        }
        // dimension violation
        std::fs::write(&path, "WK 1 2 5/7\n").unwrap();
        assert!(matches!(table.load(&path), Err(Error::Cache { line: 1, .. })));
        // zero denominator
        std::fs::write(&path, "NBI 0 0,0,0 1/0\n").unwrap();
        assert!(matches!(table.load(&path), Err(Error::Cache { line: 1, .. })));
    }
}
