//! Evolving graph sequences on a fixed vertex set, common-stationarity
//! certification and windowed average matrices.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::{lazy_matrix, DenseMatrix, StationaryDistribution};
use crate::error::{domain, Error, Result};
use crate::generate::{generate, torus, torus_coords, torus_index, Family};
use crate::graph::StaticGraph;
use crate::spectral::spectral_gap;

/// Tolerance used when certifying a common stationary distribution.
pub const STATIONARY_TOL: f64 = 1e-10;

/// SplitMix64 finalizer applied to `seed` and `index`; the per-step and
/// per-trial seed derivation used throughout the crate.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(index))
}

/// Step generators that are not independent samples of one family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Dynamic {
    /// A torus whose every axis-parallel line is cyclically shifted by its
    /// own random amount at every step.
    ShuffledTorus { dims: Vec<usize> },
    /// Odd steps: independent expanders on the two halves. Even steps: the
    /// matching `i ↔ n/2 + i`.
    ExpanderMatching { n: usize, d: usize, min_gap: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSource {
    /// Independent sample of the family at every step.
    Sample(Family),
    Dynamic(Dynamic),
}

impl StepSource {
    pub fn n(&self) -> usize {
        match self {
            StepSource::Sample(f) => f.n(),
            StepSource::Dynamic(Dynamic::ShuffledTorus { dims }) => dims.iter().product(),
            StepSource::Dynamic(Dynamic::ExpanderMatching { n, .. }) => *n,
        }
    }

    fn step(&self, seed: u64, t: usize) -> Result<StaticGraph> {
        let s = derive_seed(seed, t as u64);
        match self {
            StepSource::Sample(f) => generate(f, s),
            StepSource::Dynamic(Dynamic::ShuffledTorus { dims }) => shuffled_torus(dims, s),
            StepSource::Dynamic(Dynamic::ExpanderMatching { n, d, min_gap }) => {
                expander_matching_step(*n, *d, *min_gap, s, t)
            }
        }
    }
}

fn shuffled_torus(dims: &[usize], seed: u64) -> Result<StaticGraph> {
    let base = torus(dims)?;
    let n = base.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // label[x] is the vertex that base vertex x is moved to
    let mut label: Vec<usize> = (0..n).collect();
    for (axis, &side) in dims.iter().enumerate() {
        let mut shift = vec![None; n];
        let mut next = vec![0; n];
        for x in 0..n {
            let mut c = torus_coords(dims, label[x]);
            // the line through c along `axis` is keyed by c with that axis zeroed
            let along = c[axis];
            c[axis] = 0;
            let key = torus_index(dims, &c);
            let r = *shift[key].get_or_insert_with(|| rng.gen_range(0..side));
            c[axis] = (along + r) % side;
            next[x] = torus_index(dims, &c);
        }
        label = next;
    }
    StaticGraph::from_edges(n, base.edges().iter().map(|&(u, v)| (label[u], label[v])))
}

fn expander_matching_step(n: usize, d: usize, min_gap: f64, seed: u64, t: usize) -> Result<StaticGraph> {
    if n < 2 || !n.is_multiple_of(2) {
        return domain("expander/matching schedule needs even n");
    }
    let h = n / 2;
    if t.is_multiple_of(2) {
        return StaticGraph::from_edges(n, (0..h).map(|i| (i, h + i)));
    }
    let fam = Family::Expander { n: h, d, min_gap };
    let a = generate(&fam, derive_seed(seed, 0))?;
    let b = generate(&fam, derive_seed(seed, 1))?;
    let edges = a.edges().iter().copied().chain(b.edges().iter().map(|&(u, v)| (u + h, v + h)));
    StaticGraph::from_edges(n, edges)
}

#[derive(Clone, Debug)]
pub enum ScheduleKind {
    /// `G^{(t)}` for `t ≤ len`; the last graph holds forever after.
    Finite(Vec<Arc<StaticGraph>>),
    /// `G^{(t)} = steps[(t−1) mod len]`.
    Periodic(Vec<Arc<StaticGraph>>),
    Generator { source: StepSource, seed: u64 },
}

/// `𝒢 = {G^{(t)}}_{t ≥ 1}` on the vertex set `0..n`.
#[derive(Clone, Debug)]
pub struct GraphSchedule {
    n: usize,
    kind: ScheduleKind,
    pi: Option<Vec<f64>>,
}

impl GraphSchedule {
    pub fn finite(steps: Vec<Arc<StaticGraph>>) -> Result<Self> {
        let n = check_steps(&steps)?;
        Ok(GraphSchedule { n, kind: ScheduleKind::Finite(steps), pi: None })
    }

    pub fn periodic(steps: Vec<Arc<StaticGraph>>) -> Result<Self> {
        let n = check_steps(&steps)?;
        Ok(GraphSchedule { n, kind: ScheduleKind::Periodic(steps), pi: None })
    }

    pub fn constant(g: StaticGraph) -> Self {
        GraphSchedule { n: g.n(), kind: ScheduleKind::Periodic(vec![Arc::new(g)]), pi: None }
    }

    pub fn generator(source: StepSource, seed: u64) -> Self {
        GraphSchedule { n: source.n(), kind: ScheduleKind::Generator { source, seed }, pi: None }
    }

    /// Attaches a declared stationary distribution (certified later by
    /// [`validate_common_stationary`]).
    pub fn with_pi(mut self, pi: Vec<f64>) -> Result<Self> {
        if pi.len() != self.n {
            return domain("declared pi has the wrong length");
        }
        self.pi = Some(pi);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn declared_pi(&self) -> Option<&[f64]> {
        self.pi.as_deref()
    }

    pub fn period(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Periodic(s) => Some(s.len()),
            _ => None,
        }
    }

    /// Number of explicitly listed steps (0 for generators).
    pub fn listed_len(&self) -> usize {
        match &self.kind {
            ScheduleKind::Finite(s) | ScheduleKind::Periodic(s) => s.len(),
            ScheduleKind::Generator { .. } => 0,
        }
    }

    /// `G^{(t)}` for `t ≥ 1`.
    pub fn step(&self, t: usize) -> Result<Arc<StaticGraph>> {
        if t == 0 {
            return domain("schedule steps are indexed from 1");
        }
        match &self.kind {
            ScheduleKind::Finite(s) => Ok(s[(t - 1).min(s.len() - 1)].clone()),
            ScheduleKind::Periodic(s) => Ok(s[(t - 1) % s.len()].clone()),
            ScheduleKind::Generator { source, seed } => {
                let g = source.step(*seed, t)?;
                if g.n() != self.n {
                    return Err(Error::Validation { step: t, reason: "generated graph has the wrong size".into() });
                }
                Ok(Arc::new(g))
            }
        }
    }

    /// Horizon after which certification needs no further steps: one period,
    /// or the listed length of a finite schedule (the last step repeats).
    fn certification_horizon(&self, horizon: usize) -> usize {
        match &self.kind {
            ScheduleKind::Finite(s) | ScheduleKind::Periodic(s) => s.len(),
            ScheduleKind::Generator { .. } => horizon,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ScheduleFile::from(self)).expect("schedule serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&ScheduleFile::from(self)).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScheduleFile = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        file.try_into()
    }

    /// SHA-256 of the canonical JSON form, hex-encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// First 16 hex digits of [`GraphSchedule::hash`].
    pub fn short_hash(&self) -> String {
        self.hash()[..16].to_string()
    }
}

fn check_steps(steps: &[Arc<StaticGraph>]) -> Result<usize> {
    let first = steps.first().ok_or_else(|| Error::Domain("schedule needs at least one step".into()))?;
    let n = first.n();
    for (i, g) in steps.iter().enumerate() {
        if g.n() != n {
            return Err(Error::Validation { step: i + 1, reason: format!("{} vertices, expected {n}", g.n()) });
        }
    }
    Ok(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    Finite,
    Periodic,
    Generator,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum StepRef {
    Index(usize),
    Inline(Vec<[usize; 2]>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GeneratorSpec {
    #[serde(flatten)]
    source: StepSource,
    seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    n: usize,
    mode: Mode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    graphs: Vec<StaticGraph>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    steps: Vec<StepRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<f64>>,
}

impl From<&GraphSchedule> for ScheduleFile {
    fn from(s: &GraphSchedule) -> Self {
        let (mode, list, generator) = match &s.kind {
            ScheduleKind::Finite(l) => (Mode::Finite, Some(l), None),
            ScheduleKind::Periodic(l) => (Mode::Periodic, Some(l), None),
            ScheduleKind::Generator { source, seed } => {
                (Mode::Generator, None, Some(GeneratorSpec { source: source.clone(), seed: *seed }))
            }
        };
        let mut graphs: Vec<Arc<StaticGraph>> = Vec::new();
        let mut steps = Vec::new();
        for g in list.into_iter().flatten() {
            let idx = match graphs.iter().position(|h| Arc::ptr_eq(h, g) || **h == **g) {
                Some(i) => i,
                None => {
                    graphs.push(g.clone());
                    graphs.len() - 1
                }
            };
            steps.push(StepRef::Index(idx));
        }
        ScheduleFile {
            n: s.n,
            mode,
            graphs: graphs.iter().map(|g| (**g).clone()).collect(),
            steps,
            generator,
            pi: s.pi.clone(),
        }
    }
}

impl TryFrom<ScheduleFile> for GraphSchedule {
    type Error = Error;

    fn try_from(f: ScheduleFile) -> Result<Self> {
        let table: Vec<Arc<StaticGraph>> = f.graphs.into_iter().map(Arc::new).collect();
        let mut steps = Vec::with_capacity(f.steps.len());
        for (i, r) in f.steps.into_iter().enumerate() {
            steps.push(match r {
                StepRef::Index(k) => table
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::Validation { step: i + 1, reason: format!("graph ref {k} out of range") })?,
                StepRef::Inline(e) => Arc::new(StaticGraph::from_edges(f.n, e.into_iter().map(|[u, v]| (u, v)))?),
            });
        }
        let s = match f.mode {
            Mode::Finite => GraphSchedule::finite(steps)?,
            Mode::Periodic => GraphSchedule::periodic(steps)?,
            Mode::Generator => {
                if !steps.is_empty() {
                    return domain("generator schedules take no explicit steps");
                }
                let g = f.generator.ok_or_else(|| Error::Domain("generator mode needs a generator".into()))?;
                GraphSchedule::generator(g.source, g.seed)
            }
        };
        if s.n != f.n {
            return domain(format!("header says n={} but steps have {} vertices", f.n, s.n));
        }
        match f.pi {
            Some(pi) => s.with_pi(pi),
            None => Ok(s),
        }
    }
}

/// Certifies a distribution stationary for every step up to `horizon`
/// (one period for periodic schedules, the listed steps for finite ones).
///
/// The candidate is, in order: `candidate`, the schedule's declared π, or
/// the degree distribution of step 1 when that step is connected.
pub fn validate_common_stationary(
    s: &GraphSchedule,
    horizon: usize,
    candidate: Option<&StationaryDistribution<f64>>,
) -> Result<StationaryDistribution<f64>> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    let pi = match (candidate, s.declared_pi()) {
        (Some(c), _) => c.clone(),
        (None, Some(p)) => StationaryDistribution::new(p.to_vec(), STATIONARY_TOL)?,
        (None, None) => {
            let g1 = s.step(1)?;
            if !g1.is_connected() {
                return Err(Error::Validation {
                    step: 1,
                    reason: "step is disconnected; a candidate distribution must be supplied".into(),
                });
            }
            StationaryDistribution::from_degrees(&g1)?
        }
    };
    if pi.n() != s.n() {
        return domain("candidate distribution has the wrong length");
    }
    for t in 1..=s.certification_horizon(horizon) {
        let g = s.step(t)?;
        pi.certify_graph(&g, STATIONARY_TOL)
            .map_err(|e| Error::Validation { step: t, reason: e.to_string() })?;
    }
    Ok(pi)
}

/// `P̄ = (1/w)(P^{(t1+1)} + … + P^{(t1+w)})` with its ergodicity and gap.
#[derive(Clone, Debug)]
pub struct WindowAverage {
    pub matrix: DenseMatrix<f64>,
    pub t1: usize,
    pub w: usize,
    pub ergodic: bool,
    pub gap: f64,
}

/// Union of the step graphs `t1+1 ..= t1+w`, the support of the window
/// average off the diagonal.
pub fn window_union(s: &GraphSchedule, t1: usize, w: usize) -> Result<StaticGraph> {
    if w == 0 {
        return domain("window width must be at least 1");
    }
    let steps = (t1 + 1..=t1 + w).map(|t| s.step(t)).collect::<Result<Vec<_>>>()?;
    StaticGraph::union(s.n(), steps.iter().map(|g| g.as_ref()))
}

pub fn window_ergodic(s: &GraphSchedule, t1: usize, w: usize) -> Result<bool> {
    Ok(window_union(s, t1, w)?.is_connected())
}

pub fn window_average(
    s: &GraphSchedule,
    pi: &StationaryDistribution<f64>,
    t1: usize,
    w: usize,
) -> Result<WindowAverage> {
    if w == 0 {
        return domain("window width must be at least 1");
    }
    let steps = (t1 + 1..=t1 + w).map(|t| s.step(t)).collect::<Result<Vec<_>>>()?;
    let mats: Vec<DenseMatrix<f64>> = steps.iter().map(|g| lazy_matrix::<f64>(g).matrix().clone()).collect();
    let matrix = DenseMatrix::mean(&mats)?;
    let ergodic = matrix.support_connected();
    let gap = if ergodic { spectral_gap(&matrix, pi)? } else { 0.0 };
    Ok(WindowAverage { matrix, t1, w, ergodic, gap })
}

/// Minimum window gap over starts `0 ≤ t1 < horizon`; 0 as soon as any
/// window is non-ergodic.
pub fn min_window_gap(s: &GraphSchedule, pi: &StationaryDistribution<f64>, w: usize, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    let mut best = f64::INFINITY;
    for t1 in 0..horizon {
        if !window_ergodic(s, t1, w)? {
            return Ok(0.0);
        }
        best = best.min(window_average(s, pi, t1, w)?.gap);
    }
    Ok(best)
}

/// First window start in `0..horizon` whose width-`w` window is not
/// ergodic.
pub fn first_non_ergodic_window(s: &GraphSchedule, w: usize, horizon: usize) -> Result<Option<usize>> {
    for t1 in 0..horizon {
        if !window_ergodic(s, t1, w)? {
            return Ok(Some(t1));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate;

    fn arc(g: StaticGraph) -> Arc<StaticGraph> {
        Arc::new(g)
    }

    #[test]
    fn step_indexing() {
        let a = arc(generate(&Family::Cycle { n: 5 }, 0).unwrap());
        let b = arc(generate(&Family::Complete { n: 5 }, 0).unwrap());
        let fin = GraphSchedule::finite(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(*fin.step(1).unwrap(), *a);
        assert_eq!(*fin.step(7).unwrap(), *b);
        assert!(fin.step(0).is_err());
        let per = GraphSchedule::periodic(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(*per.step(3).unwrap(), *a);
        assert_eq!(per.period(), Some(2));
    }

    #[test]
    fn mixed_sizes_rejected() {
        let a = arc(StaticGraph::empty(3));
        let b = arc(StaticGraph::empty(4));
        assert!(matches!(GraphSchedule::finite(vec![a, b]), Err(Error::Validation { step: 2, .. })));
    }

    #[test]
    fn regular_schedule_is_uniform() {
        let a = arc(generate(&Family::Cycle { n: 8 }, 0).unwrap());
        let b = arc(generate(&Family::RandomRegular { n: 8, d: 2, connected: false }, 3).unwrap());
        let s = GraphSchedule::periodic(vec![a, b]).unwrap();
        let pi = validate_common_stationary(&s, 10, None).unwrap();
        assert!(pi.as_slice().iter().all(|&x| (x - 0.125).abs() < 1e-15));
    }

    #[test]
    fn inconsistent_degrees_name_the_step() {
        let a = arc(generate(&Family::Cycle { n: 6 }, 0).unwrap());
        let b = arc(generate(&Family::Star { leaves: 5 }, 0).unwrap());
        let s = GraphSchedule::finite(vec![a.clone(), a, b]).unwrap();
        assert!(matches!(validate_common_stationary(&s, 3, None), Err(Error::Validation { step: 3, .. })));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let a = arc(generate(&Family::Cycle { n: 6 }, 0).unwrap());
        let b = arc(generate(&Family::RandomMatching { n: 6 }, 4).unwrap());
        let s = GraphSchedule::periodic(vec![a.clone(), b, a])
            .unwrap()
            .with_pi(vec![0.1, 0.2, 0.3, 0.15, 0.15, 0.1])
            .unwrap();
        let text = s.to_json();
        let back = GraphSchedule::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.hash(), s.hash());
        assert_eq!(back.listed_len(), 3);

        let gen = GraphSchedule::generator(StepSource::Dynamic(Dynamic::ShuffledTorus { dims: vec![4, 4] }), 9);
        let text = gen.to_json();
        assert!(text.contains(r#""generator":{"family":"shuffled_torus","params":{"dims":[4,4]},"seed":9}"#));
        let back = GraphSchedule::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(*back.step(3).unwrap(), *gen.step(3).unwrap());

        let sample = GraphSchedule::generator(StepSource::Sample(Family::RandomRegular { n: 10, d: 3, connected: true }), 1);
        let back = GraphSchedule::from_json(&sample.to_json()).unwrap();
        assert_eq!(*back.step(2).unwrap(), *sample.step(2).unwrap());
    }

    #[test]
    fn inline_steps_and_errors() {
        let text = r#"{"n":3,"mode":"finite","steps":[[[0,1],[1,2]],[[0,2]]]}"#;
        let s = GraphSchedule::from_json(text).unwrap();
        assert_eq!(s.step(2).unwrap().m(), 1);
        assert!(GraphSchedule::from_json(r#"{"n":3,"mode":"finite","steps":[4]}"#).is_err());
        assert!(GraphSchedule::from_json(r#"{"n":3,"mode":"finite","steps":[[[0,1]]],"bogus":1}"#).is_err());
        assert!(GraphSchedule::from_json(r#"{"n":4,"mode":"finite","steps":[[[0,1]]]}"#).is_ok());
        assert!(GraphSchedule::from_json(r#"{"n":2,"mode":"finite","steps":[[[0,3]]]}"#).is_err());
    }

    #[test]
    fn shuffled_torus_moves_but_stays_regular() {
        let s = GraphSchedule::generator(StepSource::Dynamic(Dynamic::ShuffledTorus { dims: vec![8, 8] }), 2);
        let g1 = s.step(1).unwrap();
        let g2 = s.step(2).unwrap();
        assert_ne!(*g1, *g2);
        for g in [g1, g2] {
            assert_eq!(g.regular_degree(), Some(4));
            assert!(g.is_connected());
            assert_eq!(g.m(), 128);
        }
    }

    #[test]
    fn identical_window_equals_single_step() {
        let g = generate(&Family::Cycle { n: 7 }, 0).unwrap();
        let single = lazy_matrix::<f64>(&g).matrix().clone();
        let s = GraphSchedule::constant(g);
        let pi = validate_common_stationary(&s, 1, None).unwrap();
        let avg = window_average(&s, &pi, 3, 4).unwrap();
        assert_eq!(avg.matrix, single);
        assert!(avg.ergodic && avg.gap > 0.0);
    }

    #[test]
    fn split_components_are_not_ergodic() {
        let g = StaticGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let s = GraphSchedule::constant(g);
        let pi = StationaryDistribution::uniform(4);
        let avg = window_average(&s, &pi, 0, 3).unwrap();
        assert!(!avg.ergodic);
        assert_eq!(avg.gap, 0.0);
        assert_eq!(min_window_gap(&s, &pi, 2, 5).unwrap(), 0.0);
        assert_eq!(first_non_ergodic_window(&s, 2, 5).unwrap(), Some(0));
    }
}
