//! Check results and output records shared by the verification suites and
//! the command-line front end.
//!
//! Every verification produces `CheckResult`s; every computation query
//! produces `QueryResult`s.  Both carry the same four fields the machine
//! format emits, so the human and machine renderings are two views of one
//! record stream.

use serde_json::json;

/// Outcome of a single named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    /// Stable identifier, e.g. `axiom-III` or `rank/degree=4/twist=0`.
    pub check: String,
    /// What was checked: a space, bundle, manifold, or pair.
    pub subject: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn pass(check: impl Into<String>, subject: impl Into<String>, detail: impl Into<String>) -> CheckResult {
        CheckResult {
            check: check.into(),
            subject: subject.into(),
            pass: true,
            detail: detail.into(),
        }
    }

    pub fn fail(check: impl Into<String>, subject: impl Into<String>, detail: impl Into<String>) -> CheckResult {
        CheckResult {
            check: check.into(),
            subject: subject.into(),
            pass: false,
            detail: detail.into(),
        }
    }

    pub fn of(
        check: impl Into<String>,
        subject: impl Into<String>,
        pass: bool,
        detail: impl Into<String>,
    ) -> CheckResult {
        CheckResult {
            check: check.into(),
            subject: subject.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// One line of command output: either a verification check or a computed
/// answer to a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Record {
    Check(CheckResult),
    Query {
        query: String,
        subject: String,
        result: String,
        detail: String,
    },
}

impl Record {
    pub fn query(
        query: impl Into<String>,
        subject: impl Into<String>,
        result: impl Into<String>,
        detail: impl Into<String>,
    ) -> Record {
        Record::Query {
            query: query.into(),
            subject: subject.into(),
            result: result.into(),
            detail: detail.into(),
        }
    }

    /// Sort key for deterministic aggregation.
    pub fn key(&self) -> (String, String) {
        match self {
            Record::Check(c) => (c.check.clone(), c.subject.clone()),
            Record::Query { query, subject, .. } => (query.clone(), subject.clone()),
        }
    }

    /// One JSON object per line for `--machine` output.
    pub fn machine_line(&self) -> String {
        let value = match self {
            Record::Check(c) => json!({
                "check": c.check,
                "subject": c.subject,
                "result": if c.pass { "pass" } else { "fail" },
                "detail": c.detail,
            }),
            Record::Query {
                query,
                subject,
                result,
                detail,
            } => json!({
                "query": query,
                "subject": subject,
                "result": result,
                "detail": detail,
            }),
        };
        value.to_string()
    }

    /// Human rendering of the same facts.  Axiom checks use the
    /// `AXIOM <id> <subject> PASS|FAIL <detail>` line format; other checks
    /// the generic `CHECK` format.
    pub fn human_line(&self) -> String {
        match self {
            Record::Check(c) => {
                let status = if c.pass { "PASS" } else { "FAIL" };
                if let Some(id) = c.check.strip_prefix("axiom-") {
                    format!("AXIOM {} {} {} {}", id, c.subject, status, c.detail)
                } else {
                    format!("CHECK {} {} {} {}", c.check, c.subject, status, c.detail)
                }
            }
            Record::Query {
                subject,
                result,
                detail,
                ..
            } => {
                if detail.is_empty() {
                    format!("{}: {}", subject, result)
                } else {
                    format!("{} [{}]: {}", subject, detail, result)
                }
            }
        }
    }
}
