use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dynwalk(args: &[&str], env: Option<(&str, &Path)>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dynwalk"));
    cmd.args(args);
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_then_hit_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("nohitting.json");
    let s = sched.to_str().unwrap();
    let o = dynwalk(&["gen", "nohitting", "--n", "8", "--out", s], None);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = dynwalk(&["hit", "--schedule", s, "--from", "0", "--to", "4"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    let t: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((t - 41.1664).abs() < 1e-3, "{line}");
    assert!(line.contains("exact-to-tolerance"));

    for id in ["eq-mihai", "lemma-imp", "thm-average"] {
        let o = dynwalk(&["verify", id, "--schedule", s, "--from", "1", "--tmax", "30"], None);
        assert!(o.status.success(), "{id}: {}", stderr(&o));
        assert!(stdout(&o).starts_with("suite,id,instance"), "{id}");
    }
    let o = dynwalk(&["verify", "lemma-inftoell2", "--schedule", s, "--from", "0", "--to", "5", "--t1", "2", "--t2", "9"], None);
    assert_eq!(o.status.code(), Some(2), "non-uniform pi has no exact form here");
    let o = dynwalk(&["verify", "nonsense", "--schedule", s], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_accepts_extra_params() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("torus.json");
    let s = sched.to_str().unwrap();
    let o = dynwalk(&["gen", "torus-schedule", "--param", "dim=2", "--param", "side=5", "--seed", "3", "--out", s], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = dynwalk(&["mix", "--schedule", s], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("t_mix "));
    let o = dynwalk(&["verify", "lemma-inftoell2", "--schedule", s, "--from", "0", "--to", "7", "--t1", "1", "--t2", "6"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("lemma-inftoell2"));
    let o = dynwalk(&["cover", "--schedule", s, "--trials", "20"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = dynwalk(&["gen", "torus-schedule", "--param", "dim=2"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn commute_on_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path.txt");
    fs::write(&g, "5 4\n0 1\n1 2\n2 3\n3 4\n").unwrap();
    let o = dynwalk(&["commute", "--graph", g.to_str().unwrap(), "--s", "0", "--t", "4"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let exact: f64 = row[2].parse().unwrap();
    assert!((exact - 64.0).abs() < 1e-9, "{text}");
    assert!((row[5].parse::<f64>().unwrap() - 64.0).abs() < 1e-9);

    fs::write(&g, "3 2\n0 1\n1 x\n").unwrap();
    let o = dynwalk(&["commute", "--graph", g.to_str().unwrap(), "--s", "0", "--t", "1"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn suite_writes_reports_and_summarize_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"suite": "midpoint", "instances": 25, "seed": 5}"#).unwrap();
    let o = dynwalk(&["suite", "midpoint", "--config", cfg.to_str().unwrap()], Some(("DYNWALK_OUT_DIR", dir.path())));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("PASS criterion 4"));
    let bounds = dir.path().join("midpoint-bounds.csv");
    let text = fs::read_to_string(&bounds).unwrap();
    assert!(text.starts_with("# dynwalk suite=midpoint generated="));
    assert_eq!(text.lines().count(), 2 + 25);

    let files: Vec<String> = ["bounds", "measures", "checks"]
        .iter()
        .map(|k| dir.path().join(format!("midpoint-{k}.csv")).to_str().unwrap().to_string())
        .collect();
    let args: Vec<&str> = std::iter::once("summarize").chain(files.iter().map(String::as_str)).collect();
    let o = dynwalk(&args, None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("midpoint/lemma-inftoell2: ok 25 instances, 0 violations"), "{}", stdout(&o));

    // flip one row to a violation: nonzero exit and the offender is printed
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[2] = lines[2].replacen(",true,", ",false,", 1).replacen(",1,0,", ",1,1,", 1);
    fs::write(&bounds, lines.join("\n") + "\n").unwrap();
    let o = dynwalk(&["summarize", &files[0]], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("offenders:"), "{}", stdout(&o));

    lines[3] = "midpoint,x,y".into();
    fs::write(&bounds, lines.join("\n") + "\n").unwrap();
    let o = dynwalk(&["summarize", &files[0]], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn suite_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"suite": "midpoint", "instancez": 3}"#).unwrap();
    let o = dynwalk(&["suite", "midpoint", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("instancez"), "{}", stderr(&o));
    fs::write(&cfg, r#"{"suite": "torus"}"#).unwrap();
    let o = dynwalk(&["suite", "midpoint", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_config_gives_identical_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let t = fs::read_to_string(p).unwrap();
        t.split_once('\n').unwrap().1.to_string()
    };
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = dynwalk(&["suite", "torus", "--seed", "11", "--out", out.to_str().unwrap()], None);
        assert!(o.status.success(), "{}", stderr(&o));
        bodies.push((strip(&out.join("torus-measures.csv")), strip(&out.join("torus-checks.csv"))));
    }
    assert_eq!(bodies[0], bodies[1]);
}
