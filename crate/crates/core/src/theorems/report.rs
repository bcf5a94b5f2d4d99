//! Machine-readable verification reports.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::gluing::Parity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// What a check expects to observe.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Expected {
    Count(usize),
    AtLeast(usize),
    AtMost(usize),
    Parity(Parity),
    /// Equal as multisets.
    Multiset(Vec<i64>),
    Below(f64),
    Near { target: f64, tol: f64 },
    Truth,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Observed {
    Count(usize),
    Multiset(Vec<i64>),
    Real(f64),
    Truth(bool),
    /// The quantity could not be computed.
    Error(String),
}

impl Expected {
    pub fn accepts(&self, o: &Observed) -> bool {
        match (self, o) {
            (Expected::Count(e), Observed::Count(n)) => n == e,
            (Expected::AtLeast(e), Observed::Count(n)) => n >= e,
            (Expected::AtMost(e), Observed::Count(n)) => n <= e,
            (Expected::Parity(p), Observed::Count(n)) => Parity::of(*n) == *p,
            (Expected::Multiset(e), Observed::Multiset(v)) => {
                let mut a = e.clone();
                let mut b = v.clone();
                a.sort_unstable();
                b.sort_unstable();
                a == b
            }
            (Expected::Below(b), Observed::Real(x)) => *x < *b,
            (Expected::Near { target, tol }, Observed::Real(x)) => (x - target).abs() <= *tol,
            (Expected::Truth, Observed::Truth(t)) => *t,
            _ => false,
        }
    }

    pub fn tolerance(&self) -> Option<f64> {
        match self {
            Expected::Below(b) => Some(*b),
            Expected::Near { tol, .. } => Some(*tol),
            _ => None,
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Count(n) => write!(f, "= {n}"),
            Expected::AtLeast(n) => write!(f, ">= {n}"),
            Expected::AtMost(n) => write!(f, "<= {n}"),
            Expected::Parity(Parity::Even) => f.write_str("even"),
            Expected::Parity(Parity::Odd) => f.write_str("odd"),
            Expected::Multiset(v) => write!(f, "{v:?}"),
            Expected::Below(b) => write!(f, "< {b:e}"),
            Expected::Near { target, tol } => write!(f, "{target} ± {tol:e}"),
            Expected::Truth => f.write_str("true"),
        }
    }
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Count(n) => write!(f, "{n}"),
            Observed::Multiset(v) => {
                let mut v = v.clone();
                v.sort_unstable();
                write!(f, "{v:?}")
            }
            Observed::Real(x) => write!(f, "{x:e}"),
            Observed::Truth(t) => write!(f, "{t}"),
            Observed::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub expected: Expected,
    pub observed: Observed,
    pub tolerance: Option<f64>,
    pub status: Status,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: Expected, observed: Observed) -> Check {
        let status = if expected.accepts(&observed) { Status::Pass } else { Status::Fail };
        Check { name: name.into(), tolerance: expected.tolerance(), expected, observed, status }
    }

    pub fn skipped(name: impl Into<String>, expected: Expected, reason: impl fmt::Display) -> Check {
        Check {
            name: name.into(),
            tolerance: expected.tolerance(),
            expected,
            observed: Observed::Error(reason.to_string()),
            status: Status::Skipped,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        write!(f, "{tag} {}: expected {}, observed {}", self.name, self.expected, self.observed)
    }
}

/// Checks sorted by name.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        let i = self.checks.partition_point(|c| c.name <= check.name);
        self.checks.insert(i, check);
    }

    pub fn check(&mut self, name: impl Into<String>, expected: Expected, observed: Observed) {
        self.push(Check::new(name, expected, observed));
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "{} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_stay_sorted() {
        let mut r = VerificationReport::new();
        r.check("b", Expected::Count(1), Observed::Count(1));
        r.check("a", Expected::AtLeast(3), Observed::Count(2));
        r.push(Check::skipped("c", Expected::Truth, "non-generic"));
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert!(!r.passed());
        assert_eq!(r.count(Status::Skipped), 1);
    }

    #[test]
    fn expectations() {
        assert!(Expected::Multiset(alloc::vec![1, 2, 2]).accepts(&Observed::Multiset(alloc::vec![2, 1, 2])));
        assert!(Expected::Parity(Parity::Odd).accepts(&Observed::Count(3)));
        assert!(!Expected::Below(1.0).accepts(&Observed::Real(f64::NAN)));
        assert!(!Expected::Count(0).accepts(&Observed::Error("x".into())));
        assert!(Expected::Near { target: -1.0, tol: 1e-3 }.accepts(&Observed::Real(-0.9995)));
    }
}
