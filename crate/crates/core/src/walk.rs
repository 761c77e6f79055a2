//! Exact propagation, mixing and hitting times, Monte Carlo trajectories
//! and the midpoint probability bound.

use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{
    inner_product_pi, step_distribution, variance_pi, LikelihoodState, StationaryDistribution,
};
use crate::error::{domain, Error, Result};
use crate::graph::StaticGraph;
use crate::report::{BoundReport, Provenance};
use crate::scalar::{compensated_sum, Scalar};
use crate::schedule::{derive_seed, GraphSchedule, ScheduleKind};

/// Negative entries down to this size are treated as rounding and zeroed.
pub const NEGATIVE_DUST: f64 = 1e-14;

/// Default residual at which hitting-time propagation stops.
pub const DEFAULT_HIT_EPS: f64 = 1e-9;

/// Default hitting horizon `200 n²`.
pub fn default_hit_horizon(n: usize) -> usize {
    200 * n * n
}

/// Default mixing threshold on `‖ρ − 1‖_{2,π}`.
pub const MIX_THRESHOLD: f64 = 1.0 / 3.0;

fn sanitize<S: Scalar>(p: &mut [S]) -> Result<()> {
    if S::is_exact() {
        return Ok(());
    }
    let dust = S::from_f64_lossy(-NEGATIVE_DUST);
    let mut clamped = false;
    for (u, x) in p.iter_mut().enumerate() {
        if x.is_negative() {
            if *x < dust {
                return Err(Error::Numerical(format!("entry {u} fell to {:e}", x.to_f64_lossy())));
            }
            *x = S::zero();
            clamped = true;
        }
    }
    if clamped {
        let total = p.iter().cloned().fold(S::zero(), |a, b| a + b);
        for x in p.iter_mut() {
            *x = x.clone() / total.clone();
        }
    }
    Ok(())
}

/// `p P^{(t_from+1)} ⋯ P^{(t_to)}`.
pub fn propagate<S: Scalar>(s: &GraphSchedule, p: &[S], t_from: usize, t_to: usize) -> Result<Vec<S>> {
    if p.len() != s.n() {
        return domain("distribution length differs from the schedule's vertex count");
    }
    if t_to < t_from {
        return domain("propagation cannot run backwards in time");
    }
    let mut cur = p.to_vec();
    for t in t_from + 1..=t_to {
        cur = step_distribution(&*s.step(t)?, &cur);
        sanitize(&mut cur)?;
    }
    Ok(cur)
}

/// `p^{[0,t]} = p^{(0)} P^{(1)} ⋯ P^{(t)}`.
pub fn evolve<S: Scalar>(s: &GraphSchedule, p0: &[S], t: usize) -> Result<Vec<S>> {
    propagate(s, p0, 0, t)
}

pub fn evolve_state<S: Scalar>(
    s: &GraphSchedule,
    pi: &StationaryDistribution<S>,
    p0: &[S],
    t: usize,
) -> Result<LikelihoodState<S>> {
    LikelihoodState::new(evolve(s, p0, t)?, pi)
}

/// States `p^{(t_from)}, …, p^{(t_from+steps)}` of a walk started at time
/// `t_from`.
pub fn trace<S: Scalar>(s: &GraphSchedule, p0: &[S], t_from: usize, steps: usize) -> Result<Vec<Vec<S>>> {
    if p0.len() != s.n() {
        return domain("distribution length differs from the schedule's vertex count");
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(p0.to_vec());
    for t in t_from + 1..=t_from + steps {
        let mut next = step_distribution(&*s.step(t)?, out.last().expect("nonempty"));
        sanitize(&mut next)?;
        out.push(next);
    }
    Ok(out)
}

pub fn point_mass<S: Scalar>(n: usize, u: usize) -> Vec<S> {
    let mut p = vec![S::zero(); n];
    p[u] = S::one();
    p
}

/// `‖p/π − 1‖_{2,π}`.
pub fn l2_distance(p: &[f64], pi: &StationaryDistribution<f64>) -> f64 {
    let w = pi.as_slice();
    let e2 = compensated_sum(p.iter().zip(w).filter(|(_, &q)| q > 0.0).map(|(&x, &q)| x * x / q));
    (e2 - 1.0).max(0.0).sqrt()
}

/// Smallest `t` with `max_u ‖ρ^{[0,t]}_{u,·} − 1‖_{2,π} ≤ threshold`,
/// propagating all point starts together.
pub fn measure_mixing(
    s: &GraphSchedule,
    pi: &StationaryDistribution<f64>,
    threshold: f64,
    t_max: usize,
) -> Result<usize> {
    let n = s.n();
    if pi.n() != n {
        return domain("distribution length differs from the schedule's vertex count");
    }
    let mut rows: Vec<Vec<f64>> = (0..n).map(|u| point_mass(n, u)).collect();
    let worst = |rows: &[Vec<f64>]| rows.par_iter().map(|r| l2_distance(r, pi)).reduce(|| 0.0, f64::max);
    let mut norm = worst(&rows);
    if norm <= threshold {
        return Ok(0);
    }
    let mut best = (0, norm);
    for t in 1..=t_max {
        let g = s.step(t)?;
        rows.par_iter_mut().try_for_each(|r| {
            *r = step_distribution(&g, r);
            sanitize(r)
        })?;
        norm = worst(&rows);
        if norm <= threshold {
            return Ok(t);
        }
        if norm < best.1 {
            best = (t, norm);
        }
    }
    Err(Error::Truncated { best_t: best.0, max_norm: best.1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HitStatus {
    /// Residual fell to the requested tolerance.
    Converged,
    /// Horizon reached first; `lower` is only a lower bound.
    Truncated,
}

impl HitStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            HitStatus::Converged => "exact-to-tolerance",
            HitStatus::Truncated => "truncated",
        }
    }
}

/// Truncated expectation `Σ_{t<T} Pr[τ > t]` and the residual `Pr[τ > T]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HittingEstimate {
    pub lower: f64,
    pub residual: f64,
    pub steps: usize,
    pub status: HitStatus,
}

struct Lane {
    target: usize,
    q: Vec<f64>,
    lower: f64,
    residual: f64,
    steps: usize,
    done: bool,
}

/// Hitting times of several `(start, target)` pairs on walks started at
/// time `t0`, sharing each materialized step across queries.
pub fn exact_hitting_batch(
    s: &GraphSchedule,
    queries: &[(usize, usize)],
    t0: usize,
    t_max: usize,
    eps: f64,
) -> Result<Vec<HittingEstimate>> {
    let n = s.n();
    let mut lanes = Vec::with_capacity(queries.len());
    for &(u, v) in queries {
        if u >= n || v >= n {
            return domain(format!("query ({u},{v}) outside 0..{n}"));
        }
        let mut q = point_mass::<f64>(n, u);
        if u == v {
            q[u] = 0.0;
        }
        let residual = if u == v { 0.0 } else { 1.0 };
        lanes.push(Lane { target: v, q, lower: 0.0, residual, steps: 0, done: u == v });
    }
    let mut t = t0;
    while lanes.iter().any(|l| !l.done) {
        t += 1;
        let g = s.step(t)?;
        lanes.par_iter_mut().filter(|l| !l.done).for_each(|l| advance(l, &g, t_max, eps));
    }
    Ok(lanes
        .into_iter()
        .map(|l| HittingEstimate {
            lower: l.lower,
            residual: l.residual,
            steps: l.steps,
            status: if l.residual <= eps { HitStatus::Converged } else { HitStatus::Truncated },
        })
        .collect())
}

fn advance(l: &mut Lane, g: &StaticGraph, t_max: usize, eps: f64) {
    l.lower += l.residual;
    let mut next = step_distribution(g, &l.q);
    next[l.target] = 0.0;
    for x in next.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    l.residual = compensated_sum(next.iter().copied());
    l.q = next;
    l.steps += 1;
    if l.residual <= eps || l.steps >= t_max {
        l.done = true;
    }
}

/// `τ_{u,v}` of the walk started at time 0.
pub fn exact_hitting(s: &GraphSchedule, u: usize, v: usize, t_max: usize, eps: f64) -> Result<HittingEstimate> {
    if u == v {
        return domain("hitting time needs distinct start and target");
    }
    Ok(exact_hitting_batch(s, &[(u, v)], 0, t_max, eps)?[0])
}

#[derive(Clone, Debug)]
pub struct MaxHitting {
    pub value: f64,
    pub start: usize,
    pub target: usize,
    /// Largest residual over all queries.
    pub residual: f64,
    pub truncated: usize,
    pub queries: usize,
}

/// `max_u τ_{u,v}` over the given targets and every start `u ≠ v`.
pub fn max_hitting(s: &GraphSchedule, targets: &[usize], t_max: usize, eps: f64) -> Result<MaxHitting> {
    let n = s.n();
    let queries: Vec<(usize, usize)> =
        targets.iter().flat_map(|&v| (0..n).filter(move |&u| u != v).map(move |u| (u, v))).collect();
    max_over(s, &queries, t_max, eps)
}

/// Maximum over an explicit list of `(start, target)` pairs.
pub fn max_over(s: &GraphSchedule, queries: &[(usize, usize)], t_max: usize, eps: f64) -> Result<MaxHitting> {
    if queries.is_empty() {
        return domain("no hitting queries");
    }
    let est = exact_hitting_batch(s, queries, 0, t_max, eps)?;
    let mut best = 0;
    for (i, e) in est.iter().enumerate() {
        if e.lower > est[best].lower {
            best = i;
        }
    }
    Ok(MaxHitting {
        value: est[best].lower,
        start: queries[best].0,
        target: queries[best].1,
        residual: est.iter().map(|e| e.residual).fold(0.0, f64::max),
        truncated: est.iter().filter(|e| e.status == HitStatus::Truncated).count(),
        queries: queries.len(),
    })
}

/// Lazily materialized steps shared by concurrent Monte Carlo trials.
pub struct StepCache<'a> {
    schedule: &'a GraphSchedule,
    steps: RwLock<Vec<Arc<StaticGraph>>>,
}

impl<'a> StepCache<'a> {
    pub fn new(schedule: &'a GraphSchedule) -> Self {
        StepCache { schedule, steps: RwLock::new(Vec::new()) }
    }

    pub fn get(&self, t: usize) -> Result<Arc<StaticGraph>> {
        if !matches!(self.schedule.kind(), ScheduleKind::Generator { .. }) {
            return self.schedule.step(t);
        }
        if t == 0 {
            return domain("schedule steps are indexed from 1");
        }
        if let Some(g) = self.steps.read().expect("step cache lock").get(t - 1) {
            return Ok(g.clone());
        }
        let mut w = self.steps.write().expect("step cache lock");
        while w.len() < t {
            let next = self.schedule.step(w.len() + 1)?;
            w.push(next);
        }
        Ok(w[t - 1].clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// First time the walk is at the vertex.
    Hit(usize),
    /// First time every vertex has been visited.
    Cover,
    /// Run the full horizon; each trial reports the horizon length.
    Horizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    /// `None` when the horizon ran out first (censored).
    pub time: Option<usize>,
    pub final_vertex: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McSummary {
    pub trials: usize,
    pub censored: usize,
    /// Mean over uncensored trials.
    pub mean: f64,
    pub stderr: f64,
    pub outcomes: Vec<TrialOutcome>,
}

fn lazy_move(g: &StaticGraph, x: usize, rng: &mut ChaCha8Rng) -> usize {
    let nb = g.neighbors(x);
    if nb.is_empty() || rng.gen_bool(0.5) {
        x
    } else {
        nb[rng.gen_range(0..nb.len())]
    }
}

fn run_trial(cache: &StepCache<'_>, start: usize, stop: StopRule, horizon: usize, seed: u64) -> Result<TrialOutcome> {
    let n = cache.schedule.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = start;
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut unseen = n - 1;
    let reached = |x: usize, unseen: usize| match stop {
        StopRule::Hit(v) => x == v,
        StopRule::Cover => unseen == 0,
        StopRule::Horizon => false,
    };
    if reached(x, unseen) {
        return Ok(TrialOutcome { time: Some(0), final_vertex: x });
    }
    for t in 1..=horizon {
        x = lazy_move(&*cache.get(t)?, x, &mut rng);
        if !seen[x] {
            seen[x] = true;
            unseen -= 1;
        }
        if reached(x, unseen) {
            return Ok(TrialOutcome { time: Some(t), final_vertex: x });
        }
    }
    let time = if stop == StopRule::Horizon { Some(horizon) } else { None };
    Ok(TrialOutcome { time, final_vertex: x })
}

/// Independent trajectories from `start`; trial `i` uses the seed
/// `derive_seed(seed, i)`, so results do not depend on scheduling.
pub fn monte_carlo(
    s: &GraphSchedule,
    start: usize,
    seed: u64,
    trials: usize,
    stop: StopRule,
    horizon: usize,
) -> Result<McSummary> {
    if trials == 0 {
        return domain("at least one trial is required");
    }
    if start >= s.n() || matches!(stop, StopRule::Hit(v) if v >= s.n()) {
        return domain("start or target outside the vertex set");
    }
    let cache = StepCache::new(s);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(&cache, start, stop, horizon, derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let times: Vec<f64> = outcomes.iter().filter_map(|o| o.time.map(|t| t as f64)).collect();
    let k = times.len();
    let (mean, stderr) = if k == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let mean = compensated_sum(times.iter().copied()) / k as f64;
        let var = if k > 1 {
            compensated_sum(times.iter().map(|t| (t - mean) * (t - mean))) / (k - 1) as f64
        } else {
            0.0
        };
        (mean, (var / k as f64).sqrt())
    };
    Ok(McSummary { trials, censored: trials - k, mean, stderr, outcomes })
}

/// Both forms of the midpoint bound on `|ρ^{[t1,t2]}_{v,u} − 1|`.
#[derive(Clone, Debug)]
pub struct MidpointCheck<S> {
    pub mid: usize,
    pub lhs: S,
    /// `max{Var ρ(δ_u P^{(t2)}⋯P^{(mid+1)}), Var ρ(δ_v P^{(t1+1)}⋯P^{(mid)})}`.
    pub rhs: S,
    /// The displayed indices: `δ_u P^{(t2)}⋯P^{(mid)}` and
    /// `δ_v P^{(1)}⋯P^{(mid−1)}`.
    pub rhs_displayed: S,
    pub report: BoundReport,
    /// Set when the displayed form fails although the split form holds.
    pub flagged: bool,
}

fn likelihood_variance<S: Scalar>(p: Vec<S>, pi: &StationaryDistribution<S>) -> Result<S> {
    Ok(variance_pi(LikelihoodState::new(p, pi)?.rho(), pi))
}

/// Applies `P^{(hi)}, P^{(hi−1)}, …, P^{(lo)}` in that order.
fn propagate_reversed<S: Scalar>(s: &GraphSchedule, p: Vec<S>, lo: usize, hi: usize) -> Result<Vec<S>> {
    let mut cur = p;
    for t in (lo.max(1)..=hi).rev() {
        cur = step_distribution(&*s.step(t)?, &cur);
        sanitize(&mut cur)?;
    }
    Ok(cur)
}

pub fn verify_midpoint_bound<S: Scalar>(
    s: &GraphSchedule,
    pi: &StationaryDistribution<S>,
    u: usize,
    v: usize,
    t1: usize,
    t2: usize,
    tolerance: f64,
) -> Result<MidpointCheck<S>> {
    if t1 >= t2 {
        return domain("midpoint bound needs t1 < t2");
    }
    let n = s.n();
    if u >= n || v >= n || pi.n() != n {
        return domain("vertex or distribution outside the schedule");
    }
    if pi.as_slice()[u].is_zero() {
        return domain("target vertex has zero stationary mass");
    }
    let mid = (t1 + t2) / 2;
    let pvu = propagate(s, &point_mass::<S>(n, v), t1, t2)?[u].clone();
    let lhs = (pvu / pi.as_slice()[u].clone() - S::one()).abs();

    let from_u = propagate_reversed(s, point_mass(n, u), mid + 1, t2)?;
    let from_v = propagate(s, &point_mass(n, v), t1, mid)?;
    let a = likelihood_variance(from_u, pi)?;
    let b = likelihood_variance(from_v, pi)?;
    let rhs = if a > b { a } else { b };

    let from_u_shown = propagate_reversed(s, point_mass(n, u), mid, t2)?;
    let from_v_shown = propagate(s, &point_mass(n, v), 0, mid.saturating_sub(1))?;
    let a = likelihood_variance(from_u_shown, pi)?;
    let b = likelihood_variance(from_v_shown, pi)?;
    let rhs_displayed = if a > b { a } else { b };

    let instance = format!("u={u} v={v} t1={t1} t2={t2}");
    let report = BoundReport::from_scalars("lemma-inftoell2", instance.clone(), &lhs, &rhs, tolerance, Provenance::Derived);
    let shown = BoundReport::from_scalars("lemma-inftoell2", instance, &lhs, &rhs_displayed, tolerance, Provenance::Derived);
    let flagged = report.pass && !shown.pass;
    Ok(MidpointCheck { mid, lhs, rhs, rhs_displayed, report, flagged })
}

/// `ρ^{[t1,t2]}_{v,u}` recovered as `⟨ρ₁, ρ₂⟩_π` from the two half-window
/// likelihoods; equals the directly propagated value.
pub fn midpoint_inner_product<S: Scalar>(
    s: &GraphSchedule,
    pi: &StationaryDistribution<S>,
    u: usize,
    v: usize,
    t1: usize,
    t2: usize,
) -> Result<S> {
    let n = s.n();
    let mid = (t1 + t2) / 2;
    let a = LikelihoodState::new(propagate_reversed(s, point_mass(n, u), mid + 1, t2)?, pi)?;
    let b = LikelihoodState::new(propagate(s, &point_mass(n, v), t1, mid)?, pi)?;
    Ok(inner_product_pi(a.rho(), b.rho(), pi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use num_rational::BigRational;

    fn k2() -> GraphSchedule {
        GraphSchedule::constant(StaticGraph::from_edges(2, [(0, 1)]).unwrap())
    }

    #[test]
    fn evolve_basics() {
        let s = k2();
        let p0 = point_mass::<BigRational>(2, 0);
        assert_eq!(evolve(&s, &p0, 0).unwrap(), p0);
        assert_eq!(evolve(&s, &p0, 1).unwrap(), vec![BigRational::ratio(1, 2); 2]);
        assert!(propagate(&s, &p0, 3, 2).is_err());
    }

    #[test]
    fn hitting_k2_and_p3() {
        let h = exact_hitting(&k2(), 0, 1, 10_000, 1e-12).unwrap();
        assert_eq!(h.status, HitStatus::Converged);
        assert!((h.lower - 2.0).abs() < 1e-9);
        let p3 = GraphSchedule::constant(generate(&Family::Path { n: 3 }, 0).unwrap());
        let h = exact_hitting(&p3, 0, 2, 10_000, 1e-12).unwrap();
        assert!((h.lower - 8.0).abs() < 1e-9, "{}", h.lower);
        let t = exact_hitting(&p3, 0, 2, 5, 1e-12).unwrap();
        assert_eq!(t.status, HitStatus::Truncated);
        assert!(t.lower < h.lower && t.residual > 0.0);
    }

    #[test]
    fn mixing_on_complete_graphs() {
        // (n−1) μ^{2t} ≤ 1/9 with μ = (n−2)/(2(n−1))
        for n in [2usize, 3, 5, 10, 20] {
            let s = GraphSchedule::constant(generate(&Family::Complete { n }, 0).unwrap());
            let pi = StationaryDistribution::uniform(n);
            let mu = (n as f64 - 2.0) / (2.0 * (n as f64 - 1.0));
            let oracle = (0..).find(|&t| (n as f64 - 1.0) * mu.powi(2 * t) <= 1.0 / 9.0).unwrap() as usize;
            assert_eq!(measure_mixing(&s, &pi, MIX_THRESHOLD, 100).unwrap(), oracle, "n={n}");
        }
        let s = GraphSchedule::constant(generate(&Family::Cycle { n: 8 }, 0).unwrap());
        let pi = StationaryDistribution::uniform(8);
        assert!(matches!(measure_mixing(&s, &pi, MIX_THRESHOLD, 2), Err(Error::Truncated { .. })));
    }

    #[test]
    fn monte_carlo_is_deterministic_and_censors() {
        let a = monte_carlo(&k2(), 0, 5, 2000, StopRule::Hit(1), 1000).unwrap();
        let b = monte_carlo(&k2(), 0, 5, 2000, StopRule::Hit(1), 1000).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - 2.0).abs() <= 4.0 * a.stderr);
        let s = GraphSchedule::constant(StaticGraph::from_edges(3, [(0, 1)]).unwrap());
        let c = monte_carlo(&s, 0, 1, 10, StopRule::Hit(2), 50).unwrap();
        assert_eq!(c.censored, 10);
        assert!(c.mean.is_nan());
    }

    #[test]
    fn midpoint_identity_and_bound() {
        let fam = Family::RandomRegular { n: 8, d: 3, connected: true };
        let steps = (0..6).map(|i| Arc::new(generate(&fam, i).unwrap())).collect();
        let s = GraphSchedule::periodic(steps).unwrap();
        let pi = StationaryDistribution::<BigRational>::uniform(8);
        for (u, v, t1, t2) in [(0, 1, 0, 1), (2, 2, 1, 5), (3, 7, 2, 9)] {
            let direct = propagate(&s, &point_mass::<BigRational>(8, v), t1, t2).unwrap()[u].clone() / pi.as_slice()[u].clone();
            assert_eq!(midpoint_inner_product(&s, &pi, u, v, t1, t2).unwrap(), direct);
            let c = verify_midpoint_bound(&s, &pi, u, v, t1, t2, 0.0).unwrap();
            assert!(c.report.pass, "{:?}", c.report);
        }
    }
}
