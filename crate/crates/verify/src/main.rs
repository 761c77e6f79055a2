use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dynwalk::commute::{
    connectivity_bound, cut_sum_upper, distance_cutsets, exact_commute, nash_williams_lower, profile_bound,
};
use dynwalk::constructions::ConstructionSpec;
use dynwalk::decay::{check_variance_decay, check_window_average};
use dynwalk::schedule::validate_common_stationary;
use dynwalk::walk::{
    default_hit_horizon, exact_hitting, measure_mixing, monte_carlo, point_mass, verify_midpoint_bound, StopRule,
    DEFAULT_HIT_EPS, MIX_THRESHOLD,
};
use dynwalk::{BigRational, Distribution, ExactDistribution, GraphSchedule, StaticGraph, Tolerances};
use dynwalk_verify::report::{BoundRow, BOUND_COLUMNS};
use dynwalk_verify::summarize::Digest;
use dynwalk_verify::{suites, ExperimentConfig, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "dynwalk", version, about = "Lazy random walks on evolving graph sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScheduleArg {
    /// Schedule JSON written by `gen`.
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named construction and write its schedule JSON.
    Gen {
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra construction parameter, `key=value`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mixing time from every point start.
    Mix {
        #[command(flatten)]
        schedule: ScheduleArg,
        #[arg(long)]
        tmax: Option<usize>,
    },
    /// Hitting time `from -> to`; exact, plus Monte Carlo with `--trials`.
    Hit {
        #[command(flatten)]
        schedule: ScheduleArg,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tmax: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_HIT_EPS)]
        eps: f64,
    },
    /// Monte Carlo cover time.
    Cover {
        #[command(flatten)]
        schedule: ScheduleArg,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tmax: Option<usize>,
    },
    /// Check one inequality on a schedule and print its report rows.
    Verify {
        /// eq-mihai, lemma-imp, thm-average or lemma-inftoell2.
        id: String,
        #[command(flatten)]
        schedule: ScheduleArg,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long, default_value_t = 0)]
        to: usize,
        /// Window start (thm-average) or first time (lemma-inftoell2).
        #[arg(long, default_value_t = 0)]
        t1: usize,
        /// Window width (thm-average) or second time (lemma-inftoell2).
        #[arg(long, default_value_t = 4)]
        t2: usize,
        /// Steps traced for eq-mihai and lemma-imp.
        #[arg(long, default_value_t = 100)]
        tmax: usize,
    },
    /// Exact commute time and its bounds for one pair.
    Commute {
        /// Graph text (`n m` then edges) or a schedule JSON (its first step).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
    },
    /// Run a named suite and write its reports.
    Suite {
        name: String,
        /// JSON experiment config; its `suite` must match `name`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report directory; defaults to $DYNWALK_OUT_DIR, then ./reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Digest of report CSV files.
    Summarize { files: Vec<PathBuf> },
}

fn load_schedule(path: &Path) -> Result<GraphSchedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GraphSchedule::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn stationary(s: &GraphSchedule) -> Result<Distribution> {
    let horizon = s.period().unwrap_or(s.listed_len().max(1));
    validate_common_stationary(s, horizon, None).context("schedule has no certified common stationary distribution")
}

fn param_value(raw: &str) -> serde_json::Value {
    serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()))
}

fn gen(name: &str, n: Option<usize>, seed: u64, params: &[String]) -> Result<GraphSchedule> {
    let mut map = serde_json::Map::new();
    if let Some(n) = n {
        map.insert("n".into(), n.into());
    }
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("--param expects key=value, got {p:?}"))?;
        map.insert(k.to_string(), param_value(v));
    }
    let spec = serde_json::json!({ "name": name.replace('-', "_"), "params": map, "seed": seed });
    let spec: ConstructionSpec = serde_json::from_value(spec).with_context(|| format!("construction {name:?}"))?;
    Ok(spec.build()?)
}

fn print_rows(rows: &[BoundRow]) -> Result<bool> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(std::io::stdout());
    w.write_record(BOUND_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows.iter().all(|r| r.pass))
}

/// Exact copy of `pi` when it is uniform or proportional to the degrees of
/// the first step.
fn exact_stationary(s: &GraphSchedule, pi: &Distribution) -> Result<ExactDistribution> {
    let n = s.n();
    let candidate = if pi.as_slice().iter().all(|&p| (p * n as f64 - 1.0).abs() < 1e-12) {
        ExactDistribution::uniform(n)
    } else {
        ExactDistribution::from_degrees(&*s.step(1)?)?
    };
    let close = candidate.to_f64().as_slice().iter().zip(pi.as_slice()).all(|(a, b)| (a - b).abs() < 1e-12);
    if !close {
        bail!("exact check needs a uniform or degree-proportional stationary distribution");
    }
    Ok(candidate)
}

fn verify(id: &str, s: &GraphSchedule, from: usize, to: usize, t1: usize, t2: usize, steps: usize) -> Result<bool> {
    let tol = Tolerances::default();
    let n = s.n();
    let hash = s.short_hash();
    let label = format!("schedule={hash} u={from}");
    match id {
        "eq-mihai" | "lemma-imp" => {
            let pi = stationary(s)?;
            let t = check_variance_decay(s, &pi, &point_mass(n, from), steps, tol.inequality, &label)?;
            let tallies = if id == "eq-mihai" { vec![&t.one_step] } else { vec![&t.local_energy, &t.displacement] };
            let rows: Vec<BoundRow> = tallies.iter().filter_map(|t| BoundRow::from_tally("verify", t, &hash, 0)).collect();
            print_rows(&rows)
        }
        "thm-average" => {
            let pi = stationary(s)?;
            let c = check_window_average(s, &pi, &point_mass(n, from), t1, t2, &tol, &label)?;
            print_rows(&[&c.drop, &c.normalized].map(|r| BoundRow::from_report("verify", r, &hash, 0)))
        }
        "lemma-inftoell2" => {
            let pi = stationary(s)?;
            let exact = exact_stationary(s, &pi)?;
            let c = verify_midpoint_bound::<BigRational>(s, &exact, from, to, t1, t2, 0.0)?;
            print_rows(&[BoundRow::from_report("verify", &c.report, &hash, 0)])
        }
        other => bail!("unknown inequality id {other:?}; expected eq-mihai, lemma-imp, thm-average or lemma-inftoell2"),
    }
}

fn load_graph(path: &Path) -> Result<StaticGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        Ok(GraphSchedule::from_json(&text)?.step(1)?.as_ref().clone())
    } else {
        Ok(StaticGraph::from_text(&text)?)
    }
}

fn commute(g: &StaticGraph, s: usize, t: usize) -> Result<()> {
    let exact = exact_commute(g, s, t)?;
    let nw = nash_williams_lower(g, s, t, &distance_cutsets(g, s, t)?)?;
    let cut = cut_sum_upper(g, s, t)?;
    let profile = profile_bound(g).map_or(String::new(), |v| v.to_string());
    let conn = connectivity_bound(g)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record([
        "s",
        "t",
        "exact",
        "nw_lower_flow",
        "nw_lower_literal",
        "cutsum_upper_flow",
        "cutsum_upper_literal",
        "cutsum_reversed_flow",
        "profile_bound",
        "connectivity_bound",
        "tight_ratio",
    ])?;
    w.write_record([
        s.to_string(),
        t.to_string(),
        exact.to_string(),
        nw.flow.to_string(),
        nw.literal.to_string(),
        cut.flow.to_string(),
        cut.literal.to_string(),
        cut.reversed_flow.to_string(),
        profile,
        conn.to_string(),
        (cut.flow / exact).to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

fn suite(name: &str, config: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>) -> Result<bool> {
    let mut cfg = match config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => ExperimentConfig::new(name),
    };
    if cfg.suite != name {
        bail!("config is for suite {:?}, not {name:?}", cfg.suite);
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let dir = out
        .or_else(|| cfg.out.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    let output = suites::run(&cfg)?;
    for path in output.write(&dir)? {
        eprintln!("wrote {}", path.display());
    }
    for c in &output.checks {
        println!("{} criterion {} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.criterion, c.name, c.detail);
    }
    Ok(output.all_pass())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { name, n, seed, params, out } => {
            let json = gen(&name, n, seed, &params)?.to_json_pretty();
            match out {
                Some(p) => fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{json}"),
            }
            Ok(true)
        }
        Command::Mix { schedule, tmax } => {
            let s = load_schedule(&schedule.schedule)?;
            let pi = stationary(&s)?;
            let t = measure_mixing(&s, &pi, MIX_THRESHOLD, tmax.unwrap_or_else(|| default_hit_horizon(s.n())))?;
            println!("t_mix {t}");
            Ok(true)
        }
        Command::Hit { schedule, from, to, trials, seed, tmax, eps } => {
            let s = load_schedule(&schedule.schedule)?;
            let tmax = tmax.unwrap_or_else(|| default_hit_horizon(s.n()));
            let h = exact_hitting(&s, from, to, tmax, eps)?;
            println!("t_hit {} residual {:e} steps {} status {}", h.lower, h.residual, h.steps, h.status.as_str());
            if let Some(trials) = trials {
                let mc = monte_carlo(&s, from, seed, trials, StopRule::Hit(to), tmax)?;
                println!("monte_carlo {} ± {} over {} trials, {} censored", mc.mean, mc.stderr, mc.trials, mc.censored);
            }
            Ok(true)
        }
        Command::Cover { schedule, from, trials, seed, tmax } => {
            let s = load_schedule(&schedule.schedule)?;
            let tmax = tmax.unwrap_or_else(|| 100 * default_hit_horizon(s.n()));
            let mc = monte_carlo(&s, from, seed, trials, StopRule::Cover, tmax)?;
            println!("t_cover {} ± {} over {} trials, {} censored", mc.mean, mc.stderr, mc.trials, mc.censored);
            Ok(mc.censored == 0)
        }
        Command::Verify { id, schedule, from, to, t1, t2, tmax } => {
            let s = load_schedule(&schedule.schedule)?;
            verify(&id, &s, from, to, t1, t2, tmax)
        }
        Command::Commute { graph, s, t } => {
            commute(&load_graph(&graph)?, s, t)?;
            Ok(true)
        }
        Command::Suite { name, config, seed, out } => suite(&name, config.as_deref(), seed, out),
        Command::Summarize { files } => {
            if files.is_empty() {
                bail!("no report files given");
            }
            let mut digest = Digest::default();
            for f in &files {
                let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
                digest.add(&f.display().to_string(), &text)?;
            }
            print!("{}", digest.render());
            Ok(digest.all_pass())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
