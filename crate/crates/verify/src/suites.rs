//! Named experiment suites. Each returns its report rows and the
//! acceptance decisions derived from them.

use anyhow::{anyhow, Result};
use dynwalk::catalog::connected_graphs_up_to;
use dynwalk::chain::{lazy_matrix, step_distribution};
use dynwalk::commute::{
    connected_labelling, connectivity_bound, cut_sum_upper, distance_cutsets, eigen_sum, exact_commute, max_commute,
    nash_williams_lower, profile_bound, solve_voltage, LabellingMethod,
};
use dynwalk::conductance::conductance;
use dynwalk::constructions::{
    bucket, build_complete_then_cycle, build_expander_matching, build_nohitting, build_nohitting_doubled,
    build_nomixing, build_torus_schedule,
};
use dynwalk::decay::{check_variance_decay, check_window_average};
use dynwalk::generate::{generate, torus, Family, DEFAULT_EXPANDER_GAP};
use dynwalk::schedule::{
    derive_seed, first_non_ergodic_window, min_window_gap, validate_common_stationary, StepSource,
};
use dynwalk::spectral::spectral_gap;
use dynwalk::walk::{
    default_hit_horizon, exact_hitting, max_hitting, max_over, measure_mixing, monte_carlo, point_mass, propagate,
    verify_midpoint_bound, StopRule, DEFAULT_HIT_EPS, MIX_THRESHOLD,
};
use dynwalk::{
    BigRational, BoundReport, Distribution, Scalar, ExactDistribution, GraphSchedule, Provenance, StaticGraph, Tally,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::SuiteOutput;

pub const SUITES: [&str; 9] = [
    "variance-decay",
    "window-average",
    "midpoint",
    "cheeger-ballsize",
    "worst-case",
    "torus",
    "counterexamples",
    "commute-bounds",
    "cover-gap",
];

/// Acceptance criteria covered by each suite.
pub fn criteria(suite: &str) -> &'static [u8] {
    match suite {
        "variance-decay" => &[1, 2],
        "window-average" => &[3],
        "midpoint" => &[4],
        "cheeger-ballsize" => &[5],
        "worst-case" => &[6],
        "torus" => &[7],
        "counterexamples" => &[8, 9],
        "commute-bounds" => &[10, 11, 12, 13],
        "cover-gap" => &[14],
        _ => &[],
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    cfg.validate()?;
    match cfg.suite.as_str() {
        "variance-decay" => variance_decay(cfg),
        "window-average" => window_average(cfg),
        "midpoint" => midpoint(cfg),
        "cheeger-ballsize" => cheeger_ballsize(cfg),
        "worst-case" => worst_case(cfg),
        "torus" => torus_scaling(cfg),
        "counterexamples" => counterexamples(cfg),
        "commute-bounds" => commute_bounds(cfg),
        "cover-gap" => cover_gap(cfg),
        other => Err(anyhow!("unknown suite {other:?}")),
    }
}

fn graph_hash(g: &StaticGraph) -> String {
    GraphSchedule::constant(g.clone()).short_hash()
}

fn sum_tally<'a>(tallies: impl IntoIterator<Item = &'a Tally>) -> Tally {
    let mut acc = Tally::default();
    for t in tallies {
        acc.merge(t.clone());
    }
    acc
}

fn tally_detail(t: &Tally) -> String {
    let worst = t.worst.as_ref().map_or(String::from("none"), |w| format!("{:e} at {}", w.margin, w.instance));
    format!("instances={} violations={} worst_margin={worst}", t.instances, t.violations)
}

/// Merges `t` into `acc`, remembering which schedule supplied the worst.
fn merge_tracked(acc: &mut (Tally, String), t: &Tally, schedule: &str) {
    let before = acc.0.worst.clone();
    acc.0.merge(t.clone());
    if acc.0.worst != before {
        acc.1 = schedule.to_string();
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn variance_decay(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let sizes = cfg.sizes_or(&[32]);
    let count = cfg.instances.unwrap_or(100);
    let steps = cfg.tmax.unwrap_or(200);
    let tol = cfg.tolerances.inequality;
    let runs = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let n = sizes[i % sizes.len()];
            let mut d = 3 + i % 2;
            if (n * d) % 2 == 1 {
                d += 1;
            }
            let s = GraphSchedule::generator(StepSource::Sample(Family::RandomRegular { n, d, connected: false }), seed);
            let u = (seed % n as u64) as usize;
            let label = format!("n={n} d={d} u={u}");
            let t = check_variance_decay(&s, &Distribution::uniform(n), &point_mass(n, u), steps, tol, &label)?;
            Ok((s.short_hash(), seed, t))
        })
        .collect::<Result<Vec<_>>>()?;
    for (hash, seed, t) in &runs {
        for tally in [&t.one_step, &t.monotone, &t.local_energy, &t.displacement] {
            out.tally(tally, hash, *seed);
        }
    }
    let one = sum_tally(runs.iter().map(|r| &r.2.one_step));
    let local = sum_tally(runs.iter().map(|r| &r.2.local_energy));
    let disp = sum_tally(runs.iter().map(|r| &r.2.displacement));
    out.check(1, "one-step Dirichlet decay", one.instances > 0 && one.all_pass(), tally_detail(&one));
    out.check(
        2,
        "windowed displacement bound",
        disp.instances > 0 && disp.all_pass() && local.all_pass(),
        format!("{}; local energy: {}", tally_detail(&disp), tally_detail(&local)),
    );
    Ok(out)
}

fn window_average(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let count = cfg.instances.unwrap_or(100);
    let sizes = cfg.sizes_or(&[16, 24, 32]);
    let tols = cfg.tolerances;
    let runs = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let n = sizes[(seed >> 8) as usize % sizes.len()];
            let (family, s) = match i % 4 {
                0 => ("expander-matching", build_expander_matching(n, DEFAULT_EXPANDER_GAP, seed)?),
                1 => ("random-2-regular", sample(Family::RandomRegular { n, d: 2, connected: false }, seed)),
                2 => ("random-matching", sample(Family::RandomMatching { n }, seed)),
                _ => ("random-3-regular", sample(Family::RandomRegular { n, d: 3, connected: false }, seed)),
            };
            let w = [1, 2, 4, 8, 16][i % 5];
            let t1 = ((seed >> 16) % 10) as usize;
            let u = (seed % n as u64) as usize;
            let label = format!("{family} n={n} u={u}");
            let c = check_window_average(&s, &Distribution::uniform(n), &point_mass(n, u), t1, w, &tols, &label)?;
            Ok((s.short_hash(), seed, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut drop = Tally::default();
    let mut normalized = Tally::default();
    for (hash, seed, c) in &runs {
        out.bound(&c.drop, hash, *seed);
        out.bound(&c.normalized, hash, *seed);
        drop.record(c.drop.clone());
        normalized.record(c.normalized.clone());
    }
    let n = 64;
    let s = build_expander_matching(n, DEFAULT_EXPANDER_GAP, cfg.seed)?;
    let gap = min_window_gap(&s, &Distribution::uniform(n), 2, 8)?;
    out.measure("window-gap-w2", "expander-matching", n, gap, None, &s.short_hash(), cfg.seed, Provenance::Derived);
    out.check(
        3,
        "window-average variance drop",
        drop.all_pass() && normalized.all_pass() && gap > 0.0,
        format!("{}; normalized: {}; expander/matching n=64 width-2 gap={gap}", tally_detail(&drop), tally_detail(&normalized)),
    );
    Ok(out)
}

fn sample(f: Family, seed: u64) -> GraphSchedule {
    GraphSchedule::generator(StepSource::Sample(f), seed)
}

fn midpoint(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let n = cfg.sizes_or(&[16])[0];
    let count = cfg.instances.unwrap_or(500);
    let runs = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let mut d = 2 + i % 3;
            if (n * d) % 2 == 1 {
                d += 1;
            }
            let s = sample(Family::RandomRegular { n, d, connected: false }, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t1 = rng.gen_range(0..6);
            let t2 = t1 + rng.gen_range(1..=10);
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let c = verify_midpoint_bound::<BigRational>(&s, &ExactDistribution::uniform(n), u, v, t1, t2, 0.0)?;
            let shown = BoundReport::new("lemma-inftoell2-displayed", c.report.instance.clone(), c.report.lhs,
                c.rhs_displayed.to_f64_lossy(), 0.0, Provenance::Paper);
            Ok((s.short_hash(), seed, c.report, shown, c.flagged))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut proof = Tally::default();
    let mut shown_fail = 0usize;
    let mut flagged = 0usize;
    for (hash, seed, r, shown, f) in &runs {
        out.bound(r, hash, *seed);
        proof.record(r.clone());
        shown_fail += usize::from(!shown.pass);
        flagged += usize::from(*f);
    }
    let base = cfg.seed;
    out.measure("displayed-form-failures", "random-regular", n, shown_fail as f64, None, "-", base, Provenance::Derived);
    out.measure("flagged-instances", "random-regular", n, flagged as f64, None, "-", base, Provenance::Derived);
    out.check(
        4,
        "midpoint bound, exact arithmetic",
        proof.instances == count && proof.all_pass(),
        format!("{}; displayed-form failures={shown_fail}, flagged={flagged}", tally_detail(&proof)),
    );
    Ok(out)
}

struct GraphTallies {
    hash: String,
    group: String,
    upper: Tally,
    lower: Tally,
    ball: Tally,
}

fn cheeger_and_balls(g: &StaticGraph, group: String, tol: &dynwalk::Tolerances) -> Result<GraphTallies> {
    let hash = graph_hash(g);
    let n = g.n();
    let pi = Distribution::from_degrees(g)?;
    let p = lazy_matrix::<f64>(g);
    let gap = spectral_gap(p.matrix(), &pi)?;
    let phi = conductance(p.matrix(), &pi)?.value;
    let label = format!("g={hash} n={n} m={}", g.m());
    let mut upper = Tally::default();
    let mut lower = Tally::default();
    upper.record(BoundReport::new("cheeger-upper", label.clone(), gap, 2.0 * phi, tol.spectral, Provenance::Paper));
    lower.record(BoundReport::new("cheeger-lower", label.clone(), phi * phi / 2.0, gap, tol.spectral, Provenance::Paper));
    let mut ball = Tally::default();
    let delta = g.min_degree() as f64;
    for u in 0..n {
        for x in 1..=n {
            let need = (delta * x as f64 / 3.0).min(n as f64);
            let got = g.ball_size(u, x)? as f64;
            ball.observe("ballsize", need, got, tol.structural, Provenance::Paper, || format!("{label} u={u} x={x}"));
        }
    }
    Ok(GraphTallies { hash, group, upper, lower, ball })
}

fn cheeger_ballsize(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let tol = cfg.tolerances;
    let random = cfg.instances.unwrap_or(500);
    let max_catalog = cfg.sizes_or(&[8])[0].min(dynwalk::catalog::CATALOG_MAX_N);
    let catalog = connected_graphs_up_to(2, max_catalog)?;
    let mut per = catalog
        .par_iter()
        .map(|g| cheeger_and_balls(g, format!("catalog n={}", g.n()), &tol))
        .collect::<Result<Vec<_>>>()?;
    per.extend(
        (0..random)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = rng.gen_range(3..=12);
                let p = rng.gen_range(0.15..0.7);
                let g = generate(&Family::RandomConnected { n, p }, seed)?;
                cheeger_and_balls(&g, format!("random n={n}"), &tol)
            })
            .collect::<Result<Vec<_>>>()?,
    );
    let mut groups: Vec<String> = per.iter().map(|t| t.group.clone()).collect();
    groups.dedup();
    groups.sort();
    groups.dedup();
    let mut all = Tally::default();
    for group in &groups {
        let mut acc: [(Tally, String); 3] = Default::default();
        for t in per.iter().filter(|t| &t.group == group) {
            merge_tracked(&mut acc[0], &t.upper, &t.hash);
            merge_tracked(&mut acc[1], &t.lower, &t.hash);
            merge_tracked(&mut acc[2], &t.ball, &t.hash);
        }
        for (t, hash) in &acc {
            out.tally(t, hash, cfg.seed);
            all.merge(t.clone());
        }
    }
    out.measure("graphs", "catalog", max_catalog, catalog.len() as f64, None, "-", cfg.seed, Provenance::Derived);
    out.check(
        5,
        "Cheeger sandwich and ball sizes",
        all.all_pass(),
        format!("{} catalog graphs (n<={max_catalog}) and {random} random graphs; {}", catalog.len(), tally_detail(&all)),
    );
    Ok(out)
}

fn worst_case(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let sizes = cfg.sizes_or(&[16, 32, 64]);
    let seeds = cfg.seeds_or(&[1, 2, 3]);
    let eps = cfg.eps.unwrap_or(DEFAULT_HIT_EPS);
    let family = "random-4-regular";
    let mut means = Vec::new();
    for &n in &sizes {
        let mut hits = Vec::new();
        let mut mixes = Vec::new();
        for &k in &seeds {
            let seed = derive_seed(derive_seed(cfg.seed, n as u64), k);
            let s = sample(Family::RandomRegular { n, d: 4, connected: true }, seed);
            let tmax = cfg.tmax.unwrap_or_else(|| default_hit_horizon(n));
            let targets: Vec<usize> = (0..n).collect();
            let h = max_hitting(&s, &targets, tmax, eps)?;
            let mix = measure_mixing(&s, &Distribution::uniform(n), MIX_THRESHOLD, tmax)?;
            let hash = s.short_hash();
            out.measure("t_hit_sample", family, n, h.value, None, &hash, seed, Provenance::Derived);
            out.measure("t_mix_sample", family, n, mix as f64, None, &hash, seed, Provenance::Derived);
            if h.truncated > 0 {
                return Err(anyhow!("hitting search truncated for {} queries at n={n}", h.truncated));
            }
            if n == sizes[0] && k == seeds[0] {
                let trials = cfg.trials.unwrap_or(2000);
                let mc = monte_carlo(&s, h.start, derive_seed(seed, 99), trials, StopRule::Hit(h.target), tmax)?;
                let diff = (mc.mean - h.value).abs();
                out.measure("t_hit_mc", family, n, mc.mean, Some(mc.stderr), &hash, seed, Provenance::Derived);
                out.check(
                    6,
                    "Monte Carlo agrees with exact hitting",
                    mc.censored == 0 && diff <= 3.0 * mc.stderr,
                    format!("n={n} {}->{}: exact={:.4} mc={:.4}±{:.4} ({} trials)", h.start, h.target, h.value, mc.mean, mc.stderr, trials),
                );
            }
            hits.push(h.value);
            mixes.push(mix as f64);
        }
        let (mh, sh) = mean_stderr(&hits);
        let (mm, sm) = mean_stderr(&mixes);
        out.measure("t_hit", family, n, mh, sh, "-", cfg.seed, Provenance::Derived);
        out.measure("t_mix", family, n, mm, sm, "-", cfg.seed, Provenance::Derived);
        means.push((n, mh, mm));
    }
    for w in means.windows(2) {
        let (hr, mr) = (w[1].1 / w[0].1, w[1].2 / w[0].2);
        out.check(
            6,
            &format!("doubling {}->{}", w[0].0, w[1].0),
            hr <= 5.0 && mr <= 5.0,
            format!("t_hit ratio={hr:.4} t_mix ratio={mr:.4}"),
        );
    }
    Ok(out)
}

fn mean_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, Some((var / k).sqrt()))
}

fn torus_scaling(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let pairs = cfg.instances.unwrap_or(20);
    let eps = cfg.eps.unwrap_or(DEFAULT_HIT_EPS);
    for (dim, sides) in [(3usize, [4usize, 5, 6]), (2, [8, 12, 16])] {
        for variant in ["line-shift", "static"] {
            let family = format!("torus{dim}d-{variant}");
            let mut normalized = Vec::new();
            for side in sides {
                let seed = derive_seed(cfg.seed, (dim * 100 + side) as u64);
                let s = match variant {
                    "line-shift" => build_torus_schedule(dim, side, seed)?,
                    _ => GraphSchedule::constant(torus(&vec![side; dim])?),
                };
                let n = s.n();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let queries: Vec<(usize, usize)> = (0..pairs)
                    .map(|_| {
                        let u = rng.gen_range(0..n);
                        let v = (u + rng.gen_range(1..n)) % n;
                        (u, v)
                    })
                    .collect();
                let h = max_over(&s, &queries, cfg.tmax.unwrap_or_else(|| default_hit_horizon(n)), eps)?;
                if h.truncated > 0 {
                    return Err(anyhow!("torus hitting truncated at side {side}"));
                }
                let nf = n as f64;
                let scale = if dim == 3 { nf } else { nf * nf.ln() };
                let hash = s.short_hash();
                out.measure("t_hit", &family, n, h.value, None, &hash, seed, Provenance::Derived);
                out.measure("t_hit_normalized", &family, n, h.value / scale, None, &hash, seed, Provenance::Derived);
                normalized.push(h.value / scale);
            }
            let r = spread(&normalized);
            let what = if dim == 3 { "t_hit/n" } else { "t_hit/(n ln n)" };
            out.check(
                7,
                &family,
                r <= 2.0,
                format!("{what} = {normalized:.4?}; max/min = {r:.4}"),
            );
        }
    }
    Ok(out)
}

fn stationarity_tally(s: &GraphSchedule, label: &str, tol: f64) -> Result<Tally> {
    let pi = s.declared_pi().ok_or_else(|| anyhow!("{label}: no declared pi"))?.to_vec();
    let mut t = Tally::default();
    for step in 1..=s.period().unwrap_or(1) {
        let next = step_distribution(&*s.step(step)?, &pi);
        let defect = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        t.observe("nohitting-stationary", defect, 0.0, tol, Provenance::Paper, || format!("{label} step={step}"));
    }
    Ok(t)
}

fn counterexamples(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let tol = cfg.tolerances;
    let n = 16;
    let k = n / 4;
    let base = build_nohitting(n)?;
    let doubled = build_nohitting_doubled(n)?;
    let period = base.period().expect("periodic");
    let (bh, dh) = (base.short_hash(), doubled.short_hash());

    // (a) declared π is stationary for every step
    let mut stat = Vec::new();
    for (s, label, hash) in [(&base, "nohitting", &bh), (&doubled, "nohitting-doubled", &dh)] {
        let certified = validate_common_stationary(s, s.period().unwrap(), None).is_ok();
        let t = stationarity_tally(s, label, tol.stationary)?;
        out.tally(&t, hash, 0);
        stat.push((certified, t));
    }
    out.check(
        8,
        "(a) declared pi certified",
        stat.iter().all(|(c, t)| *c && t.all_pass()),
        stat.iter().map(|(c, t)| format!("certified={c} {}", tally_detail(t))).collect::<Vec<_>>().join("; "),
    );

    // (b) probability ceiling
    let ceiling = 0.5f64.powi(k as i32 + 2);
    let (u, v) = (bucket(1).start, bucket(k).start);
    let mut rows: Vec<Vec<f64>> = (0..n).map(|x| point_mass(n, x)).collect();
    let mut any_pair = Tally::default();
    let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
    for t in 1..=period {
        for r in rows.iter_mut() {
            *r = propagate(&base, r, t - 1, t)?;
        }
        let p = rows[u][v];
        pmin = pmin.min(p);
        pmax = pmax.max(p);
        let least = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        any_pair.observe("nohitting-ceiling-any-pair", least, ceiling, tol.inequality, Provenance::Paper, || {
            format!("t={t}")
        });
    }
    let designated = BoundReport::new(
        "nohitting-ceiling",
        format!("u={u} v={v} t<={period}"),
        pmax,
        ceiling,
        tol.inequality,
        Provenance::Paper,
    );
    out.bound(&designated, &bh, 0);
    out.tally(&any_pair, &bh, 0);
    out.measure("p_uv_min", "nohitting", n, pmin, None, &bh, 0, Provenance::Derived);
    out.measure("p_uv_max", "nohitting", n, pmax, None, &bh, 0, Provenance::Derived);
    out.check(
        8,
        "(b) probability ceiling",
        designated.pass && any_pair.all_pass(),
        format!("min_t p={pmin:e} max_t p={pmax:e} ceiling={ceiling:e}; every t: {}", tally_detail(&any_pair)),
    );

    // (c) hitting growth
    let eps = cfg.eps.unwrap_or(DEFAULT_HIT_EPS);
    let mut hits = Vec::new();
    for m in cfg.sizes_or(&[8, 12, 16]) {
        let s = build_nohitting(m)?;
        let target = bucket(m / 4).start;
        let h = exact_hitting(&s, 0, target, cfg.tmax.unwrap_or_else(|| default_hit_horizon(m)), eps)?;
        out.measure("t_hit_v1_vk", "nohitting", m, h.lower, Some(h.residual), &s.short_hash(), 0, Provenance::Derived);
        hits.push((m, h, s.short_hash()));
    }
    let mut growth = Tally::default();
    for w in hits.windows(2) {
        let r = BoundReport::new(
            "nohitting-growth",
            format!("n={}->{}", w[0].0, w[1].0),
            2.0 * w[0].1.lower,
            w[1].1.lower,
            0.0,
            Provenance::Derived,
        );
        out.bound(&r, &w[1].2, 0);
        growth.record(r);
    }
    let converged = hits.iter().all(|(_, h, _)| h.status == dynwalk::walk::HitStatus::Converged);
    out.check(
        8,
        "(c) hitting time doubles per size step",
        converged && growth.all_pass(),
        hits.iter().map(|(m, h, _)| format!("n={m}: {:.4}", h.lower)).collect::<Vec<_>>().join(", "),
    );

    // (d) window ergodicity
    let dp = doubled.period().unwrap();
    let short = first_non_ergodic_window(&doubled, 3 * n, dp)?;
    let w32 = first_non_ergodic_window(&doubled, 3 * n + 2, dp)?;
    let w4 = first_non_ergodic_window(&doubled, 4 * n, dp)?;
    let b32 = first_non_ergodic_window(&base, 3 * n + 2, period)?;
    let b4 = first_non_ergodic_window(&base, 4 * n, period)?;
    for (q, v) in [("first-non-ergodic-3n", short), ("first-non-ergodic-3n+2", w32), ("first-non-ergodic-4n", w4)] {
        out.measure(q, "nohitting-doubled", n, v.map_or(-1.0, |t| t as f64), None, &dh, 0, Provenance::Derived);
    }
    for (q, v) in [("first-non-ergodic-3n+2", b32), ("first-non-ergodic-4n", b4)] {
        out.measure(q, "nohitting", n, v.map_or(-1.0, |t| t as f64), None, &bh, 0, Provenance::Derived);
    }
    for m in [8, 12] {
        let s = build_nohitting(m)?;
        let pi = Distribution::new(s.declared_pi().unwrap().to_vec(), tol.stationary)?;
        let gap = min_window_gap(&s, &pi, 4 * m, s.period().unwrap())?;
        out.measure("window-gap-4n", "nohitting", m, gap, None, &s.short_hash(), 0, Provenance::Derived);
    }
    out.check(
        8,
        "(d) window ergodicity",
        short.is_some() && w32.is_none() && w4.is_none() && b32.is_none() && b4.is_none(),
        format!("doubled: width 3n non-ergodic at t1={short:?}, 3n+2 -> {w32:?}, 4n -> {w4:?}; base 3n+2 -> {b32:?}, 4n -> {b4:?}"),
    );

    nomixing(cfg, &mut out)?;
    Ok(out)
}

fn nomixing(cfg: &ExperimentConfig, out: &mut SuiteOutput) -> Result<()> {
    let n = 1000;
    let t = 3 * (n as f64).log10().ceil() as usize;
    let (s, layout) = build_nomixing(n, t, cfg.seed)?;
    let hash = s.short_hash();
    let mut p = vec![1.0 / n as f64; n];
    let mut growth = Tally::default();
    let mut shape = Tally::default();
    for step in 1..=t {
        let g = s.step(step)?;
        shape.record(BoundReport::new(
            "nomixing-degree",
            format!("step={step} connected={}", g.is_connected()),
            if g.is_connected() { g.max_degree() as f64 } else { f64::INFINITY },
            9.0,
            0.0,
            Provenance::Trivial,
        ));
        p = propagate(&s, &p, step - 1, step)?;
        if step > layout.padding {
            let i = step - layout.padding;
            let floor = 1.25f64.powi(i as i32) / n as f64;
            for u in layout.set(i) {
                growth.observe("nomixing-growth", floor, p[u], cfg.tolerances.inequality, Provenance::Paper, || {
                    format!("i={i} u={u}")
                });
            }
        }
    }
    out.tally(&shape, &hash, cfg.seed);
    out.tally(&growth, &hash, cfg.seed);
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let c = (n as f64 * pmax).ln() / (n as f64).ln();
    out.measure("nomixing-c", "nomixing", n, c, None, &hash, cfg.seed, Provenance::Derived);
    out.measure("nomixing-pmax", "nomixing", n, pmax, None, &hash, cfg.seed, Provenance::Derived);
    out.check(
        9,
        "nested-set growth",
        growth.instances > 0 && growth.all_pass() && shape.all_pass() && c > 0.0,
        format!("levels={} padding={} sizes={:?}; {}; p_max={pmax:e}, c={c:.6}", layout.levels(), layout.padding, layout.sizes, tally_detail(&growth)),
    );
    Ok(())
}

struct PairTallies {
    hash: String,
    nash: Tally,
    cut: Tally,
    reversed: Tally,
    literal_ratio: (f64, f64),
}

fn commute_sandwich(g: &StaticGraph, tol: f64) -> Result<PairTallies> {
    let hash = graph_hash(g);
    let mut out = PairTallies {
        hash: hash.clone(),
        nash: Tally::default(),
        cut: Tally::default(),
        reversed: Tally::default(),
        literal_ratio: (f64::INFINITY, 0.0),
    };
    for s in 0..g.n() {
        for t in 0..g.n() {
            if s == t {
                continue;
            }
            let exact = exact_commute(g, s, t)?;
            let nw = nash_williams_lower(g, s, t, &distance_cutsets(g, s, t)?)?;
            let cut = cut_sum_upper(g, s, t)?;
            let slack = tol * exact.max(1.0);
            let label = || format!("g={hash} n={} s={s} t={t}", g.n());
            out.nash.observe("nash-williams", nw.flow, exact, slack, Provenance::Paper, label);
            out.cut.observe("cutsum-sandwich", exact, cut.flow, slack, Provenance::Paper, label);
            out.reversed.observe("cutsum-reversed", exact, cut.reversed_flow, slack, Provenance::Paper, label);
            let r = cut.literal / exact;
            out.literal_ratio = (out.literal_ratio.0.min(r), out.literal_ratio.1.max(r));
        }
    }
    Ok(out)
}

fn commute_bounds(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let tol = cfg.tolerances.spectral;
    let count = cfg.instances.unwrap_or(200);

    // sandwich over random graphs
    let per = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..=10);
            let p = rng.gen_range(0.25..0.8);
            commute_sandwich(&generate(&Family::RandomConnected { n, p }, seed)?, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc: [(Tally, String); 3] = Default::default();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for t in &per {
        merge_tracked(&mut acc[0], &t.nash, &t.hash);
        merge_tracked(&mut acc[1], &t.cut, &t.hash);
        merge_tracked(&mut acc[2], &t.reversed, &t.hash);
        lo = lo.min(t.literal_ratio.0);
        hi = hi.max(t.literal_ratio.1);
    }
    for (t, hash) in &acc {
        out.tally(t, hash, cfg.seed);
    }
    out.measure("literal-over-exact-min", "random-connected", 10, lo, None, "-", cfg.seed, Provenance::Derived);
    out.measure("literal-over-exact-max", "random-connected", 10, hi, None, "-", cfg.seed, Provenance::Derived);

    let mut tight = Tally::default();
    for n in 3..=12 {
        let g = generate(&Family::Path { n }, 0)?;
        let e = 4.0 * ((n - 1) * (n - 1)) as f64;
        let exact = exact_commute(&g, 0, n - 1)?;
        let cut = cut_sum_upper(&g, 0, n - 1)?.flow;
        let nw = nash_williams_lower(&g, 0, n - 1, &distance_cutsets(&g, 0, n - 1)?)?.flow;
        for (what, x) in [("exact", exact), ("cutsum", cut), ("nash-williams", nw)] {
            tight.record(BoundReport::new(
                "path-tight",
                format!("n={n} {what}"),
                ((x - e) / e).abs(),
                0.0,
                1e-9,
                Provenance::Paper,
            ));
        }
        out.measure("path-commute", "path", n, exact, None, &graph_hash(&g), 0, Provenance::Derived);
    }
    out.tally(&tight, "-", 0);
    let sandwich_ok = acc.iter().all(|(t, _)| t.instances > 0 && t.all_pass());
    out.check(
        10,
        "commute sandwich",
        sandwich_ok && tight.all_pass(),
        format!(
            "{count} graphs; nash-williams: {}; cut-sum: {}; reversed: {}; path: {}; literal/exact in [{lo:.4}, {hi:.4}]",
            tally_detail(&acc[0].0),
            tally_detail(&acc[1].0),
            tally_detail(&acc[2].0),
            tally_detail(&tight)
        ),
    );

    connected_orderings(cfg, &mut out)?;

    // conductance profile against the eigenvalue sum
    let mut interesting = Tally::default();
    for n in [8, 12] {
        let g = generate(&Family::CliquePrism { n }, 0)?;
        let (eig, prof) = (eigen_sum(&g)?, profile_bound(&g)?);
        let hash = graph_hash(&g);
        let r = BoundReport::new("eq-interesting", format!("clique-prism n={n}"), eig, prof, tol, Provenance::Paper);
        out.bound(&r, &hash, 0);
        out.measure("eigen-sum", "clique-prism", n, eig, None, &hash, 0, Provenance::Derived);
        out.measure("profile-bound", "clique-prism", n, prof, None, &hash, 0, Provenance::Derived);
        interesting.record(r);
    }
    out.check(12, "eigenvalue sum below profile bound", interesting.all_pass(), tally_detail(&interesting));

    // circulants
    for rho in [2usize, 4] {
        let mut normalized = Vec::new();
        let mut ratio = Tally::default();
        let family = format!("circulant-rho{rho}");
        let log_factor = 2.0 * ((2 * rho) as f64).log2();
        for n in [32usize, 64, 128] {
            let g = generate(&Family::Circulant { n, rho }, 0)?;
            let hash = graph_hash(&g);
            let (c, s, t) = max_commute(&g)?;
            let direct = exact_commute(&g, s, t)?;
            if (direct - c).abs() > 1e-6 * c {
                return Err(anyhow!("resistance and hitting solves disagree on {family} n={n}: {c} vs {direct}"));
            }
            let bound = connectivity_bound(&g)?;
            normalized.push(c / ((n * n) as f64 / rho as f64));
            out.measure("max-commute", &family, n, c, None, &hash, 0, Provenance::Derived);
            out.measure("connectivity-bound", &family, n, bound, None, &hash, 0, Provenance::Derived);
            let r = BoundReport::new(
                "optimalconn",
                format!("{family} n={n} bound/exact <= 2 log2(edge connectivity)"),
                bound / c,
                log_factor,
                0.0,
                Provenance::Derived,
            );
            out.bound(&r, &hash, 0);
            ratio.record(r);
        }
        let band = spread(&normalized);
        out.check(
            13,
            &family,
            band <= 4.0 && ratio.all_pass(),
            format!("max commute/(n^2/rho) = {normalized:.4?} (band {band:.4}); {}", tally_detail(&ratio)),
        );
    }
    Ok(out)
}

fn connected_orderings(cfg: &ExperimentConfig, out: &mut SuiteOutput) -> Result<()> {
    let max_n = cfg.sizes_or(&[8])[0].min(dynwalk::catalog::CATALOG_MAX_N);
    let graphs = connected_graphs_up_to(2, max_n)?;
    let per = graphs
        .par_iter()
        .map(|g| {
            let hash = graph_hash(g);
            let mut t = Tally::default();
            let (mut greedy, mut pairs) = (0usize, 0usize);
            for s in 0..g.n() {
                for u in 0..g.n() {
                    if s == u {
                        continue;
                    }
                    let v = solve_voltage(g, s, u)?;
                    let l = connected_labelling(g, &v)?;
                    pairs += 1;
                    greedy += usize::from(l.method == LabellingMethod::Greedy);
                    let found = l.labelling.as_ref().is_some_and(|l| l.prefixes_connected(g));
                    t.observe(
                        "lemma-connected",
                        if found { 0.0 } else { 1.0 },
                        0.0,
                        0.0,
                        Provenance::Paper,
                        || format!("g={hash} n={} s={s} t={u} method={:?}", g.n(), l.method),
                    );
                }
            }
            Ok((g.n(), hash, t, greedy, pairs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all = Tally::default();
    let (mut greedy_all, mut pairs_all) = (0, 0);
    for n in 2..=max_n {
        let mut acc = (Tally::default(), String::new());
        let (mut greedy, mut pairs) = (0, 0);
        for (m, hash, t, gr, pa) in &per {
            if *m == n {
                merge_tracked(&mut acc, t, hash);
                greedy += gr;
                pairs += pa;
            }
        }
        out.tally(&acc.0, &acc.1, 0);
        out.measure("greedy-success-rate", "catalog", n, greedy as f64 / pairs as f64, None, "-", 0, Provenance::Derived);
        all.merge(acc.0);
        greedy_all += greedy;
        pairs_all += pairs;
    }
    out.check(
        11,
        "connected monotone orderings",
        all.all_pass(),
        format!(
            "{} graphs, {pairs_all} ordered pairs; greedy succeeded on {greedy_all} ({:.4}%); {}",
            graphs.len(),
            100.0 * greedy_all as f64 / pairs_all as f64,
            tally_detail(&all)
        ),
    );
    Ok(())
}

fn cover_gap(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(&cfg.suite);
    let n = cfg.sizes_or(&[128])[0];
    let trials = cfg.trials.unwrap_or(200);
    let horizon = cfg.tmax.unwrap_or(10_000_000);
    let s = build_complete_then_cycle(n, 1.0)?;
    let hash = s.short_hash();
    let (cs, hs) = (derive_seed(cfg.seed, 0), derive_seed(cfg.seed, 1));
    let cover = monte_carlo(&s, 0, cs, trials, StopRule::Cover, horizon)?;
    let hit = monte_carlo(&s, 0, hs, trials, StopRule::Hit(n / 2), horizon)?;
    out.measure("cover-mean", "complete-then-cycle", n, cover.mean, Some(cover.stderr), &hash, cs, Provenance::Derived);
    out.measure("hit-mean", "complete-then-cycle", n, hit.mean, Some(hit.stderr), &hash, hs, Provenance::Derived);
    let target = n as f64 / 10.0;
    let r = BoundReport::new(
        "cover-gap",
        format!("n={n} trials={trials} cover/hit >= n/10"),
        target * hit.mean,
        cover.mean,
        0.0,
        Provenance::Derived,
    );
    out.bound(&r, &hash, cfg.seed);
    out.check(
        14,
        "cover/hit gap",
        r.pass && cover.censored == 0 && hit.censored == 0,
        format!(
            "cover {:.2}±{:.2}, hit {:.2}±{:.2}, ratio {:.4} (need {target}), censored {}/{}",
            cover.mean,
            cover.stderr,
            hit.mean,
            hit.stderr,
            cover.mean / hit.mean,
            cover.censored,
            hit.censored
        ),
    );
    Ok(out)
}
