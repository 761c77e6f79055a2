//! One PASS/FAIL line per acceptance criterion; exits nonzero on any
//! failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dynwalk_verify::suites::{criteria, run, SUITES};
use dynwalk_verify::{ExperimentConfig, SuiteOutput};

/// Wall-clock budgets, by criterion.
const BUDGETS: [(u8, Duration); 2] = [(1, Duration::from_secs(120)), (6, Duration::from_secs(600))];

fn main() -> ExitCode {
    let mut outputs: Vec<(SuiteOutput, Duration)> = Vec::new();
    for suite in SUITES {
        let start = Instant::now();
        match run(&ExperimentConfig::new(suite)) {
            Ok(out) => outputs.push((out, start.elapsed())),
            Err(e) => {
                println!("FAIL suite {suite}: {e:#}");
                let mut empty = SuiteOutput::new(suite);
                empty.check(0, "suite aborted", false, e.to_string());
                outputs.push((empty, start.elapsed()));
            }
        }
    }

    let mut verdicts: BTreeMap<u8, (bool, Vec<String>)> = BTreeMap::new();
    for (out, elapsed) in &outputs {
        let bounds_ok = out.bounds.iter().all(|r| r.pass);
        for &c in criteria(&out.suite) {
            let checks: Vec<_> = out.checks.iter().filter(|k| k.criterion == c).collect();
            let mut pass = !checks.is_empty() && checks.iter().all(|k| k.pass) && bounds_ok;
            let mut notes: Vec<String> =
                checks.iter().map(|k| format!("{} {}: {}", if k.pass { "ok" } else { "FAILED" }, k.name, k.detail)).collect();
            if !bounds_ok {
                notes.push(format!("suite {} has failing bound rows", out.suite));
            }
            if let Some((_, budget)) = BUDGETS.iter().find(|(k, _)| *k == c) {
                pass &= elapsed <= budget;
                notes.push(format!("runtime {:.1}s (budget {}s)", elapsed.as_secs_f64(), budget.as_secs()));
            }
            verdicts.insert(c, (pass, notes));
        }
    }

    // determinism: a second run must give byte-identical CSV bodies
    let mut same = true;
    let mut notes = Vec::new();
    for (first, _) in &outputs {
        let again = run(&ExperimentConfig::new(&first.suite));
        let identical = match (&again, first.bodies()) {
            (Ok(a), Ok(b)) => a.bodies().ok().as_ref() == Some(&b),
            _ => false,
        };
        same &= identical;
        notes.push(format!("{} {}", first.suite, if identical { "identical" } else { "DIFFERS" }));
    }
    verdicts.insert(15, (same, notes));

    let mut failed = false;
    for c in 1..=15u8 {
        let (pass, notes) = verdicts.remove(&c).unwrap_or((false, vec!["not run".into()]));
        failed |= !pass;
        println!("{} criterion {c}: {}", if pass { "PASS" } else { "FAIL" }, notes.join("; "));
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
