//! Structured verification reports: one claim per line, stable field
//! names, renderable as key/value text or as a single JSON document.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportItem {
    pub claim: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub time_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub items: Vec<ReportItem>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn record(&mut self, claim: impl Into<String>, ok: bool, witness: Option<String>) {
        self.items.push(ReportItem {
            claim: claim.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness,
            time_ms: 0,
        });
    }

    /// Runs a check, timing it; an `Err` is recorded as a failure with the
    /// error text as witness.
    pub fn check<F>(&mut self, claim: impl Into<String>, f: F)
    where
        F: FnOnce() -> crate::Result<(bool, Option<String>)>,
    {
        let start = Instant::now();
        let (status, witness) = match f() {
            Ok((true, w)) => (Status::Pass, w),
            Ok((false, w)) => (Status::Fail, w),
            Err(e) => (Status::Fail, Some(e.to_string())),
        };
        self.items.push(ReportItem {
            claim: claim.into(),
            status,
            witness,
            time_ms: start.elapsed().as_millis(),
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.items.extend(other.items);
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            write!(f, "claim={} status={}", item.claim, item.status)?;
            if let Some(w) = &item.witness {
                write!(f, " witness={w}")?;
            }
            writeln!(f, " time_ms={}", item.time_ms)?;
        }
        Ok(())
    }
}
