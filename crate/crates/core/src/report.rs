//! Verified inequality instances and the tolerance policy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Where the expected outcome of a check comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    /// A value or inequality stated in the source.
    Paper,
    /// Follows directly from the definitions.
    Trivial,
    /// Computed by an independent oracle.
    Derived,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Paper => "[PAPER]",
            Provenance::Trivial => "[TRIVIAL]",
            Provenance::Derived => "[DERIVED]",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Row sums, stationary masses, exact identities.
    pub structural: f64,
    /// Spectral and variational comparisons.
    pub spectral: f64,
    /// Slack on verified inequalities.
    pub inequality: f64,
    /// Common-stationarity certification.
    pub stationary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { structural: 1e-12, spectral: 1e-9, inequality: 1e-10, stationary: 1e-10 }
    }
}

/// One inequality instance, normalized to `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub id: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative means violated before tolerance.
    pub margin: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub provenance: Provenance,
}

impl BoundReport {
    pub fn new(
        id: impl Into<String>,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        BoundReport {
            id: id.into(),
            instance: instance.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            // NaN on either side is a failure, never a pass
            pass: lhs <= rhs + tolerance,
            tolerance,
            provenance,
        }
    }

    /// Like [`BoundReport::new`], deciding `pass` in the scalar's own
    /// arithmetic; exact scalars ignore the tolerance.
    pub fn from_scalars<S: Scalar>(
        id: impl Into<String>,
        instance: impl Into<String>,
        lhs: &S,
        rhs: &S,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        let mut r = Self::new(id, instance, lhs.to_f64_lossy(), rhs.to_f64_lossy(), tolerance, provenance);
        if S::is_exact() {
            r.pass = lhs <= rhs;
            r.tolerance = 0.0;
        } else {
            r.pass = *lhs <= rhs.clone() + S::from_f64_lossy(tolerance);
        }
        r
    }
}

/// Running count of instances of one inequality with the tightest one kept.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub instances: usize,
    pub violations: usize,
    pub worst: Option<BoundReport>,
}

impl Tally {
    pub fn record(&mut self, r: BoundReport) {
        self.instances += 1;
        if !r.pass {
            self.violations += 1;
        }
        let replace = match &self.worst {
            None => true,
            // a failing instance always displaces a passing one
            Some(w) => (w.pass && !r.pass) || (w.pass == r.pass && r.margin < w.margin),
        };
        if replace {
            self.worst = Some(r);
        }
    }

    /// Records `lhs ≤ rhs + tolerance` without building a report unless
    /// the instance is the new worst; for hot loops.
    pub fn observe(
        &mut self,
        id: &str,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        provenance: Provenance,
        instance: impl FnOnce() -> String,
    ) {
        let pass = lhs <= rhs + tolerance;
        let margin = rhs - lhs;
        self.instances += 1;
        if !pass {
            self.violations += 1;
        }
        let replace = match &self.worst {
            None => true,
            Some(w) => (w.pass && !pass) || (w.pass == pass && margin < w.margin),
        };
        if replace {
            self.worst = Some(BoundReport::new(id, instance(), lhs, rhs, tolerance, provenance));
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.instances += other.instances - other.worst.is_some() as usize;
        self.violations += other.violations - other.worst.as_ref().is_some_and(|w| !w.pass) as usize;
        if let Some(w) = other.worst {
            self.record(w);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.violations == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn direction_and_tolerance() {
        let r = BoundReport::new("x", "i", 1.0, 1.0 - 1e-12, 1e-10, Provenance::Derived);
        assert!(r.pass);
        assert!(r.margin < 0.0);
        assert!(!BoundReport::new("x", "i", f64::NAN, 1.0, 1e-10, Provenance::Derived).pass);
        let a = BigRational::ratio(1, 3);
        let b = BigRational::ratio(1, 3);
        assert!(BoundReport::from_scalars("x", "i", &a, &b, 0.5, Provenance::Paper).pass);
        let c = BigRational::ratio(1, 4);
        assert!(!BoundReport::from_scalars("x", "i", &a, &c, 0.5, Provenance::Paper).pass);
    }

    #[test]
    fn tally_keeps_the_tightest() {
        let mut t = Tally::default();
        for (lhs, rhs) in [(0.0, 1.0), (0.9, 1.0), (2.0, 1.0), (0.0, 3.0)] {
            t.record(BoundReport::new("x", format!("{lhs}"), lhs, rhs, 0.0, Provenance::Derived));
        }
        assert_eq!(t.instances, 4);
        assert_eq!(t.violations, 1);
        assert_eq!(t.worst.as_ref().unwrap().lhs, 2.0);

        let mut a = Tally::default();
        a.record(BoundReport::new("x", "a", 0.5, 1.0, 0.0, Provenance::Derived));
        let mut b = Tally::default();
        b.record(BoundReport::new("x", "b", 0.8, 1.0, 0.0, Provenance::Derived));
        b.record(BoundReport::new("x", "c", 0.1, 1.0, 0.0, Provenance::Derived));
        a.merge(b);
        assert_eq!(a.instances, 3);
        assert_eq!(a.worst.unwrap().instance, "b");
    }

    #[test]
    fn tolerances_from_partial_json() {
        let t: Tolerances = serde_json::from_str(r#"{"inequality":1e-8}"#).unwrap();
        assert_eq!(t.inequality, 1e-8);
        assert_eq!(t.spectral, 1e-9);
        assert!(serde_json::from_str::<Tolerances>(r#"{"bogus":1}"#).is_err());
    }
}
