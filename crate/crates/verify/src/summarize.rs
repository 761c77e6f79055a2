//! Digest of report files: pass/fail counts, worst margins, offenders and
//! log-log scaling slopes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};

use crate::report::{strip_comments, BoundRow, Check, MeasureRow, BOUND_COLUMNS, CHECK_COLUMNS, MEASURE_COLUMNS};

/// Least-squares fit of `ln value = a + slope · ln n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub sizes: usize,
}

/// `None` with fewer than three distinct sizes or a non-positive value.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<SlopeFit> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 || points.iter().any(|&(n, v)| n == 0 || !(v > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Some(SlopeFit { slope, stderr, sizes: sizes.len() })
}

#[derive(Debug, Default)]
pub struct Digest {
    pub bounds: Vec<BoundRow>,
    pub measures: Vec<MeasureRow>,
    pub checks: Vec<Check>,
}

fn parse_rows<T: serde::de::DeserializeOwned>(name: &str, body: &str, offset: usize, out: &mut Vec<T>) -> Result<()> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    for rec in rd.deserialize() {
        let row: T = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize + offset);
            anyhow!("{name}: parse error at line {line}: {e}")
        })?;
        out.push(row);
    }
    Ok(())
}

impl Digest {
    /// Adds one report file; the kind is detected from its column header.
    pub fn add(&mut self, name: &str, text: &str) -> Result<()> {
        let (body, skipped) = strip_comments(text);
        let header: Vec<&str> = body.lines().next().unwrap_or("").split(',').collect();
        if header == BOUND_COLUMNS {
            parse_rows(name, body, skipped, &mut self.bounds)
        } else if header == MEASURE_COLUMNS {
            parse_rows(name, body, skipped, &mut self.measures)
        } else if header == CHECK_COLUMNS {
            parse_rows(name, body, skipped, &mut self.checks)
        } else {
            bail!("{name}: parse error at line {}: unrecognised report header", skipped + 1)
        }
    }

    pub fn all_pass(&self) -> bool {
        self.bounds.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut groups: BTreeMap<(&str, &str), (usize, usize, f64, &BoundRow)> = BTreeMap::new();
        for r in &self.bounds {
            let e = groups.entry((&r.suite, &r.id)).or_insert((0, 0, f64::INFINITY, r));
            e.0 += r.instances;
            e.1 += r.violations;
            if r.margin < e.2 {
                e.2 = r.margin;
                e.3 = r;
            }
        }
        if !groups.is_empty() {
            s.push_str("bounds:\n");
        }
        for ((suite, id), (instances, violations, margin, worst)) in &groups {
            let verdict = if *violations == 0 { "ok" } else { "FAIL" };
            let _ = writeln!(
                s,
                "  {suite}/{id}: {verdict} {instances} instances, {violations} violations, worst margin {margin:e} ({})",
                worst.instance
            );
        }
        let offenders: Vec<&BoundRow> = self.bounds.iter().filter(|r| !r.pass).collect();
        if !offenders.is_empty() {
            s.push_str("offenders:\n");
            for r in offenders {
                let _ = writeln!(
                    s,
                    "  {}/{} {}: lhs={:e} rhs={:e} margin={:e} schedule={} seed={}",
                    r.suite, r.id, r.instance, r.lhs, r.rhs, r.margin, r.schedule, r.seed
                );
            }
        }
        let mut series: BTreeMap<(&str, &str, &str), Vec<(usize, f64)>> = BTreeMap::new();
        for m in &self.measures {
            series.entry((&m.suite, &m.quantity, &m.family)).or_default().push((m.n, m.value));
        }
        let fits: Vec<_> = series.iter().filter_map(|(k, pts)| loglog_slope(pts).map(|f| (k, f))).collect();
        if !fits.is_empty() {
            s.push_str("scaling (log-log least squares):\n");
        }
        for ((suite, quantity, family), f) in fits {
            let _ = writeln!(
                s,
                "  {suite}/{quantity} [{family}]: slope {:.4} ± {:.4} over {} sizes",
                f.slope, f.stderr, f.sizes
            );
        }
        if !self.checks.is_empty() {
            s.push_str("checks:\n");
        }
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "  {verdict} criterion {} {}: {}", c.criterion, c.name, c.detail);
        }
        let _ = writeln!(s, "overall: {}", if self.all_pass() { "PASS" } else { "FAIL" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(usize, f64)> = [8usize, 16, 32, 64].iter().map(|&n| (n, 3.0 * (n as f64).powi(2))).collect();
        let f = loglog_slope(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.stderr < 1e-9);
        assert_eq!(loglog_slope(&pts[..2]), None);
        assert_eq!(loglog_slope(&[(8, 1.0), (8, 2.0), (16, 3.0), (16, 4.0)]), None);
    }

    #[test]
    fn slope_stderr_against_hand_fit() {
        // n = 1, 2, 4 and ln value = 0, 1, 3: slope 1.5/ln 2, residuals
        // 1/6, -1/3, 1/6
        let ln2 = 2f64.ln();
        let pts = [(1usize, 1.0), (2, 1f64.exp()), (4, 3f64.exp())];
        let f = loglog_slope(&pts).unwrap();
        assert!((f.slope - 1.5 / ln2).abs() < 1e-12);
        let ssr = 1.0 / 6.0;
        let expected = (ssr / 1.0 / (2.0 * ln2 * ln2)).sqrt();
        assert!((f.stderr - expected).abs() < 1e-12, "{} vs {expected}", f.stderr);
    }

    #[test]
    fn malformed_row_reports_its_line() {
        let text = "# dynwalk suite=x generated=now\ncriterion,name,pass,detail\n1,a,true,ok\n2,b,maybe,bad\n";
        let err = Digest::default().add("x-checks.csv", text).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        let err = Digest::default().add("junk.csv", "a,b\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }
}
