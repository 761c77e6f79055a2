//! Builders for the example and counterexample schedules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::generate::{complete, generate, Family, DEFAULT_EXPANDER_GAP};
use crate::graph::StaticGraph;
use crate::schedule::{derive_seed, Dynamic, GraphSchedule, StepSource};

pub const BUCKET: usize = 4;

/// `(a, b)` pairs of a 4-element bucket in lexicographic order.
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Odd steps: independent 3-regular expanders on the two halves; even
/// steps: the matching `i ↔ n/2 + i`. π is uniform.
pub fn build_expander_matching(n: usize, min_gap: f64, seed: u64) -> Result<GraphSchedule> {
    if n < 8 || !n.is_multiple_of(2) {
        return domain("expander/matching schedule needs even n >= 8");
    }
    GraphSchedule::generator(StepSource::Dynamic(Dynamic::ExpanderMatching { n, d: 3, min_gap }), seed)
        .with_pi(vec![1.0 / n as f64; n])
}

/// Number of complete-graph steps, `⌈c·n·ln n⌉`.
pub fn complete_phase_len(n: usize, c: f64) -> usize {
    (c * n as f64 * (n as f64).ln()).ceil() as usize
}

/// Complete graph for `⌈c·n·ln n⌉` steps, then the cycle forever.
pub fn build_complete_then_cycle(n: usize, c: f64) -> Result<GraphSchedule> {
    if n < 3 || !(c > 0.0) {
        return domain("complete-then-cycle needs n >= 3 and c > 0");
    }
    let k = Arc::new(complete(n)?);
    let cycle = Arc::new(generate(&Family::Cycle { n }, 0)?);
    let mut steps = vec![k; complete_phase_len(n, c)];
    steps.push(cycle);
    GraphSchedule::finite(steps)?.with_pi(vec![1.0 / n as f64; n])
}

/// Nested sets and step layout of [`build_nomixing`].
#[derive(Clone, Debug, PartialEq)]
pub struct NomixingLayout {
    /// `S_0 = V ⊋ S_1 ⊋ …`, each a prefix `0..|S_i|`.
    pub sizes: Vec<usize>,
    /// Leading expander-only steps.
    pub padding: usize,
}

impl NomixingLayout {
    /// Gadget levels `i ≥ 1`; level `i` is step `padding + i`.
    pub fn levels(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn set(&self, i: usize) -> std::ops::Range<usize> {
        0..self.sizes[i]
    }
}

/// Set sizes `|S_{i+1}| = ⌈|S_i|/10⌉` while `|S_i∖S_{i+1}| ≥ 6|S_{i+1}|`.
pub fn nomixing_sizes(n: usize) -> Vec<usize> {
    let mut sizes = vec![n];
    loop {
        let cur = *sizes.last().unwrap();
        let next = cur.div_ceil(10);
        if next == 0 || cur - next < 6 * next {
            return sizes;
        }
        sizes.push(next);
    }
}

/// `t` steps: `t − L` connected random 3-regular graphs, then the `L`
/// gadget levels, each unioned with a fresh 3-regular graph. Not a
/// common-stationary schedule.
pub fn build_nomixing(n: usize, t: usize, seed: u64) -> Result<(GraphSchedule, NomixingLayout)> {
    let sizes = nomixing_sizes(n);
    let levels = sizes.len() - 1;
    if levels == 0 {
        return domain(format!("n = {n} admits no gadget level"));
    }
    if t < levels {
        return domain(format!("t = {t} is shorter than the {levels} gadget levels"));
    }
    let padding = t - levels;
    let fam = Family::RandomRegular { n, d: 3, connected: true };
    let mut steps = Vec::with_capacity(t);
    for step in 1..=t {
        let expander = generate(&fam, derive_seed(seed, step as u64))?;
        if step <= padding {
            steps.push(Arc::new(expander));
            continue;
        }
        let i = step - padding;
        let (outer, inner) = (sizes[i - 1], sizes[i]);
        // receiver r of S_{i−1}∖S_i goes to sender r mod |S_i|
        let gadget = (0..6 * inner).map(|r| (r % inner, inner + r));
        debug_assert!(6 * inner <= outer - inner);
        let edges: Vec<_> = expander.edges().iter().copied().chain(gadget).collect();
        steps.push(Arc::new(StaticGraph::from_edges_dedup(n, edges)?));
    }
    Ok((GraphSchedule::finite(steps)?, NomixingLayout { sizes, padding }))
}

/// Vertices of bucket `V_i`, `i ≥ 1`.
pub fn bucket(i: usize) -> std::ops::Range<usize> {
    BUCKET * (i - 1)..BUCKET * i
}

/// `π(u) = 2^{−i−2}/(1 − 2^{−k})` for `u ∈ V_i`.
pub fn nohitting_pi(n: usize) -> Vec<f64> {
    let k = n / BUCKET;
    let z = 1.0 - 0.5f64.powi(k as i32);
    (0..n).map(|u| 0.5f64.powi((u / BUCKET + 3) as i32) / z).collect()
}

/// One half-period: six `K_{2,4}` gadgets per bucket pair, then six empty
/// steps so the half-period has length `6k`.
fn nohitting_half(n: usize) -> Result<Vec<Arc<StaticGraph>>> {
    let k = n / BUCKET;
    let mut half = Vec::with_capacity(6 * k);
    for i in 1..k {
        let (lo, hi) = (bucket(i).start, bucket(i + 1));
        for (a, b) in PAIRS {
            let edges = [lo + a, lo + b].into_iter().flat_map(|x| hi.clone().map(move |y| (x, y)));
            half.push(Arc::new(StaticGraph::from_edges(n, edges.collect::<Vec<_>>())?));
        }
    }
    let empty = Arc::new(StaticGraph::empty(n));
    half.resize(6 * k, empty);
    Ok(half)
}

fn nohitting_period(n: usize) -> Result<Vec<Arc<StaticGraph>>> {
    let mut period = nohitting_half(n)?;
    let back: Vec<_> = period.iter().rev().cloned().collect();
    period.extend(back);
    Ok(period)
}

/// Period-`3n` bucket schedule with declared π ∝ `2^{−i−2}`.
pub fn build_nohitting(n: usize) -> Result<GraphSchedule> {
    if n < 2 * BUCKET || !n.is_multiple_of(BUCKET) {
        return domain("nohitting needs n a multiple of 4, at least 8");
    }
    GraphSchedule::periodic(nohitting_period(n)?)?.with_pi(nohitting_pi(n))
}

/// Two copies on `V ∪ V′` (`V′ = n..2n`), with a step holding only the
/// matching `V_k ↔ V′_k` inserted after every period of the base
/// schedule, so the period is `3n + 1`.
pub fn build_nohitting_doubled(n: usize) -> Result<GraphSchedule> {
    if n < 2 * BUCKET || !n.is_multiple_of(BUCKET) {
        return domain("nohitting needs n a multiple of 4, at least 8");
    }
    let mut steps = Vec::with_capacity(3 * n + 1);
    for g in nohitting_period(n)? {
        let edges = g.edges().iter().flat_map(|&(u, v)| [(u, v), (u + n, v + n)]);
        steps.push(Arc::new(StaticGraph::from_edges(2 * n, edges.collect::<Vec<_>>())?));
    }
    let last = bucket(n / BUCKET);
    steps.push(Arc::new(StaticGraph::from_edges(2 * n, last.map(|u| (u, u + n)).collect::<Vec<_>>())?));
    let half: Vec<f64> = nohitting_pi(n).into_iter().map(|p| p / 2.0).collect();
    GraphSchedule::periodic(steps)?.with_pi([half.clone(), half].concat())
}

/// Torus with per-line random cyclic shifts at every step.
pub fn build_torus_schedule(dim: usize, side: usize, seed: u64) -> Result<GraphSchedule> {
    if !(2..=3).contains(&dim) || side < 3 {
        return domain("torus schedule needs dim in {2, 3} and side >= 3");
    }
    let n = side.pow(dim as u32);
    GraphSchedule::generator(StepSource::Dynamic(Dynamic::ShuffledTorus { dims: vec![side; dim] }), seed)
        .with_pi(vec![1.0 / n as f64; n])
}

fn constant(g: StaticGraph) -> Result<GraphSchedule> {
    let pi = crate::chain::degree_stationary::<f64>(&g)?.as_slice().to_vec();
    GraphSchedule::constant(g).with_pi(pi)
}

fn default_gap() -> f64 {
    DEFAULT_EXPANDER_GAP
}

fn default_c() -> f64 {
    1.0
}

/// A named construction with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum Construction {
    ExpanderMatching {
        n: usize,
        #[serde(default = "default_gap")]
        min_gap: f64,
    },
    CompleteThenCycle {
        n: usize,
        #[serde(default = "default_c")]
        c: f64,
    },
    Nomixing {
        n: usize,
        t: usize,
    },
    Nohitting {
        n: usize,
    },
    NohittingDoubled {
        n: usize,
    },
    TorusSchedule {
        dim: usize,
        side: usize,
    },
    Circulant {
        n: usize,
        rho: usize,
    },
    Barbell {
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    #[serde(flatten)]
    pub construction: Construction,
    #[serde(default)]
    pub seed: u64,
}

impl ConstructionSpec {
    pub fn new(construction: Construction, seed: u64) -> Self {
        ConstructionSpec { construction, seed }
    }

    /// Whether the schedule promises a time-invariant stationary
    /// distribution (false only for `nomixing`).
    pub fn common_stationary(&self) -> bool {
        !matches!(self.construction, Construction::Nomixing { .. })
    }

    pub fn build(&self) -> Result<GraphSchedule> {
        let seed = self.seed;
        match &self.construction {
            Construction::ExpanderMatching { n, min_gap } => build_expander_matching(*n, *min_gap, seed),
            Construction::CompleteThenCycle { n, c } => build_complete_then_cycle(*n, *c),
            Construction::Nomixing { n, t } => Ok(build_nomixing(*n, *t, seed)?.0),
            Construction::Nohitting { n } => build_nohitting(*n),
            Construction::NohittingDoubled { n } => build_nohitting_doubled(*n),
            Construction::TorusSchedule { dim, side } => build_torus_schedule(*dim, *side, seed),
            Construction::Circulant { n, rho } => constant(generate(&Family::Circulant { n: *n, rho: *rho }, seed)?),
            Construction::Barbell { n } => constant(generate(&Family::Barbell { n: *n }, seed)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{first_non_ergodic_window, validate_common_stationary, window_ergodic};

    #[test]
    fn nohitting_structure() {
        let s = build_nohitting(16).unwrap();
        assert_eq!(s.period(), Some(48));
        validate_common_stationary(&s, 48, None).unwrap();
        let pi = nohitting_pi(16);
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(pi[0] / pi[15], 8.0);
        for t in 1..=24 {
            assert_eq!(s.step(t).unwrap(), s.step(49 - t).unwrap());
        }
        let g1 = s.step(1).unwrap();
        assert_eq!(g1.m(), 8);
        assert!(g1.has_edge(0, 4) && g1.has_edge(1, 7) && !g1.has_edge(2, 4));
        assert_eq!(s.step(19).unwrap().m(), 0);
        assert!(window_ergodic(&s, 0, 48).unwrap());
        assert_eq!(first_non_ergodic_window(&s, 64, 48).unwrap(), None);
    }

    #[test]
    fn doubled_windows() {
        let n = 8;
        let s = build_nohitting_doubled(n).unwrap();
        assert_eq!(s.period(), Some(3 * n + 1));
        validate_common_stationary(&s, 3 * n + 1, None).unwrap();
        assert!(first_non_ergodic_window(&s, 3 * n, 3 * n + 1).unwrap().is_some());
        assert_eq!(first_non_ergodic_window(&s, 3 * n + 2, 3 * n + 1).unwrap(), None);
        assert!(build_nohitting(10).is_err());
    }

    #[test]
    fn nomixing_levels() {
        assert_eq!(nomixing_sizes(1000), vec![1000, 100, 10, 1]);
        assert_eq!(nomixing_sizes(60), vec![60, 6]);
        let (s, layout) = build_nomixing(200, 5, 3).unwrap();
        assert_eq!(layout.padding, 3);
        for t in 1..=5 {
            let g = s.step(t).unwrap();
            assert!(g.is_connected());
            assert!(g.max_degree() <= 9);
        }
        let g = s.step(4).unwrap();
        assert!(g.degree(0) >= 6);
        assert!(build_nomixing(200, 1, 3).is_err());
    }

    #[test]
    fn complete_then_cycle_switches() {
        let s = build_complete_then_cycle(128, 1.0).unwrap();
        let k = complete_phase_len(128, 1.0);
        assert_eq!(k, 622);
        assert_eq!(s.step(k).unwrap().m(), 128 * 127 / 2);
        assert_eq!(s.step(k + 1).unwrap().regular_degree(), Some(2));
        assert_eq!(s.step(10 * k).unwrap().m(), 128);
    }

    #[test]
    fn spec_json() {
        let spec: ConstructionSpec = serde_json::from_str(r#"{"name":"nohitting","params":{"n":16},"seed":2}"#).unwrap();
        assert_eq!(spec.construction, Construction::Nohitting { n: 16 });
        let back = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ConstructionSpec>(&back).unwrap(), spec);
        let s = ConstructionSpec::new(Construction::TorusSchedule { dim: 2, side: 8 }, 1).build().unwrap();
        let g = s.step(3).unwrap();
        assert_eq!(g.regular_degree(), Some(4));
        assert!(g.is_connected());
    }

    #[test]
    fn expander_matching_regular_steps() {
        let s = build_expander_matching(32, DEFAULT_EXPANDER_GAP, 5).unwrap();
        validate_common_stationary(&s, 4, None).unwrap();
        assert!(!s.step(1).unwrap().is_connected());
        assert!(window_ergodic(&s, 0, 2).unwrap());
    }
}
