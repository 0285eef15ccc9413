//! Structured pass/fail records for identity verification. Every
//! check is an exact rational (or Laurent-polynomial) equality; a
//! record stores both sides verbatim so failures are inspectable.
//!
//! `render_lines` is deterministic and golden-file stable; wall time
//! is tracked separately and never serialized into the record stream.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    /// coefficient location, e.g. "g=1 ks=0,2"
    pub location: String,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub identity: String,
    /// parameter ranges the suite ran over
    pub params: String,
    /// documentation lines (e.g. the derived exactness window)
    pub header: Vec<String>,
    pub records: Vec<CheckRecord>,
    /// wall time; informational only, excluded from serialization
    pub wall_ms: u128,
}

impl VerificationReport {
    pub fn new(identity: impl Into<String>, params: impl Into<String>) -> Self {
        VerificationReport {
            identity: identity.into(),
            params: params.into(),
            header: Vec::new(),
            records: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn check(&mut self, location: impl Into<String>, lhs: String, rhs: String) {
        let ok = lhs == rhs;
        self.records.push(CheckRecord { location: location.into(), lhs, rhs, ok });
    }

    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.ok).count()
    }

    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }

    pub fn all_ok(&self) -> bool {
        self.records.iter().all(|r| r.ok)
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.records.iter().find(|r| !r.ok)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for line in other.header {
            self.header.push(format!("[{}] {}", other.identity, line));
        }
        for mut r in other.records {
            r.location = format!("{}: {}", other.identity, r.location);
            self.records.push(r);
        }
        self.wall_ms += other.wall_ms;
    }

    /// One deterministic line per record:
    /// `<identity> <location> lhs=<..> rhs=<..> ok=<..>`.
    pub fn render_lines(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.records.len() + self.header.len() + 1);
        out.push(format!("# identity={} params={}", self.identity, self.params));
        for h in &self.header {
            out.push(format!("# {h}"));
        }
        for r in &self.records {
            let mut line = String::new();
            let _ = write!(
                line,
                "{} {} lhs={} rhs={} ok={}",
                self.identity, r.location, r.lhs, r.rhs, r.ok
            );
            out.push(line);
        }
        out
    }
}
