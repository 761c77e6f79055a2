//! Report rows and their CSV form.
//!
//! Every suite writes three files: `<suite>-bounds.csv` (one row per
//! inequality tally), `<suite>-measures.csv` (scalar measurements, keyed by
//! size for scaling fits) and `<suite>-checks.csv` (acceptance decisions).
//! Each file starts with one `#` comment line holding the generation time;
//! everything after it is deterministic given the config.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dynwalk::{BoundReport, Provenance, Tally};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub suite: String,
    pub id: String,
    /// Tightest instance of the tally.
    pub instance: String,
    pub schedule: String,
    pub seed: u64,
    pub instances: usize,
    pub violations: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub provenance: Provenance,
}

impl BoundRow {
    pub fn from_report(suite: &str, r: &BoundReport, schedule: &str, seed: u64) -> Self {
        BoundRow {
            suite: suite.to_string(),
            id: r.id.clone(),
            instance: r.instance.clone(),
            schedule: schedule.to_string(),
            seed,
            instances: 1,
            violations: usize::from(!r.pass),
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            pass: r.pass,
            tolerance: r.tolerance,
            provenance: r.provenance,
        }
    }

    /// `None` for an empty tally.
    pub fn from_tally(suite: &str, t: &Tally, schedule: &str, seed: u64) -> Option<Self> {
        let w = t.worst.as_ref()?;
        let mut row = Self::from_report(suite, w, schedule, seed);
        row.instances = t.instances;
        row.violations = t.violations;
        row.pass = t.violations == 0;
        Some(row)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub suite: String,
    pub quantity: String,
    pub family: String,
    pub n: usize,
    pub value: f64,
    pub stderr: Option<f64>,
    pub schedule: String,
    pub seed: u64,
    pub provenance: Provenance,
}

impl MeasureRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        suite: &str,
        quantity: &str,
        family: &str,
        n: usize,
        value: f64,
        stderr: Option<f64>,
        schedule: &str,
        seed: u64,
        provenance: Provenance,
    ) -> Self {
        MeasureRow {
            suite: suite.into(),
            quantity: quantity.into(),
            family: family.into(),
            n,
            value,
            stderr,
            schedule: schedule.into(),
            seed,
            provenance,
        }
    }
}

/// One acceptance decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(criterion: u8, name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { criterion, name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub suite: String,
    pub bounds: Vec<BoundRow>,
    pub measures: Vec<MeasureRow>,
    pub checks: Vec<Check>,
}

fn csv_body<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub const BOUND_COLUMNS: [&str; 13] = [
    "suite",
    "id",
    "instance",
    "schedule",
    "seed",
    "instances",
    "violations",
    "lhs",
    "rhs",
    "margin",
    "pass",
    "tolerance",
    "provenance",
];
pub const MEASURE_COLUMNS: [&str; 9] =
    ["suite", "quantity", "family", "n", "value", "stderr", "schedule", "seed", "provenance"];
pub const CHECK_COLUMNS: [&str; 4] = ["criterion", "name", "pass", "detail"];

impl SuiteOutput {
    pub fn new(suite: &str) -> Self {
        SuiteOutput { suite: suite.to_string(), ..Default::default() }
    }

    pub fn all_pass(&self) -> bool {
        self.bounds.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn bound(&mut self, r: &BoundReport, schedule: &str, seed: u64) {
        self.bounds.push(BoundRow::from_report(&self.suite, r, schedule, seed));
    }

    pub fn tally(&mut self, t: &Tally, schedule: &str, seed: u64) {
        if let Some(row) = BoundRow::from_tally(&self.suite, t, schedule, seed) {
            self.bounds.push(row);
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn measure(
        &mut self,
        quantity: &str,
        family: &str,
        n: usize,
        value: f64,
        stderr: Option<f64>,
        schedule: &str,
        seed: u64,
        provenance: Provenance,
    ) {
        let suite = self.suite.clone();
        self.measures.push(MeasureRow::new(&suite, quantity, family, n, value, stderr, schedule, seed, provenance));
    }

    pub fn check(&mut self, criterion: u8, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(criterion, name, pass, detail));
    }

    /// CSV bodies (without the timestamp line) of the three reports.
    pub fn bodies(&self) -> Result<[(String, String); 3]> {
        Ok([
            (format!("{}-bounds.csv", self.suite), csv_body(&self.bounds, &BOUND_COLUMNS)?),
            (format!("{}-measures.csv", self.suite), csv_body(&self.measures, &MEASURE_COLUMNS)?),
            (format!("{}-checks.csv", self.suite), csv_body(&self.checks, &CHECK_COLUMNS)?),
        ])
    }

    /// Writes the reports into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        let mut paths = Vec::new();
        for (name, body) in self.bodies()? {
            let path = dir.join(name);
            fs::write(&path, format!("# dynwalk suite={} generated={stamp}\n{body}", self.suite))
                .with_context(|| format!("writing {}", path.display()))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Strips the leading `#` lines of a report file; returns the body and
/// the number of lines removed.
pub fn strip_comments(text: &str) -> (&str, usize) {
    let mut rest = text;
    let mut skipped = 0;
    while rest.starts_with('#') {
        rest = rest.split_once('\n').map_or("", |(_, r)| r);
        skipped += 1;
    }
    (rest, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_is_stable_and_header_is_fixed() {
        let mut out = SuiteOutput::new("demo");
        let r = BoundReport::new("x", "a, b", 0.5, 1.0, 1e-10, Provenance::Derived);
        out.bound(&r, "abc", 7);
        out.measure("t_hit", "cycle", 8, 12.5, None, "abc", 7, Provenance::Derived);
        let [(name, bounds), (_, measures), _] = out.bodies().unwrap();
        assert_eq!(name, "demo-bounds.csv");
        assert_eq!(
            bounds,
            "suite,id,instance,schedule,seed,instances,violations,lhs,rhs,margin,pass,tolerance,provenance\n\
             demo,x,\"a, b\",abc,7,1,0,0.5,1.0,0.5,true,1e-10,DERIVED\n"
        );
        assert!(measures.ends_with("demo,t_hit,cycle,8,12.5,,abc,7,DERIVED\n"));
    }

    #[test]
    fn comment_stripping() {
        assert_eq!(strip_comments("# a\n# b\nx,y\n"), ("x,y\n", 2));
        assert_eq!(strip_comments("x\n"), ("x\n", 0));
    }
}
