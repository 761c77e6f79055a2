//! Deterministic and seeded graph families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{lazy_matrix, StationaryDistribution};
use crate::error::{domain, Error, Result};
use crate::graph::StaticGraph;
use crate::spectral::spectral_gap;

/// Retry cap for rejection sampling of random regular graphs.
pub const PAIRING_RETRIES: usize = 1000;

/// Default acceptance threshold on the lazy spectral gap of an expander.
pub const DEFAULT_EXPANDER_GAP: f64 = 0.025;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    Empty { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Star { leaves: usize },
    /// Product of cycles with the given side lengths (each ≥ 3).
    Torus { dims: Vec<usize> },
    /// Two cliques on `n/3` vertices joined through a path on the middle
    /// `n/3` vertices.
    Barbell { n: usize },
    /// Edges `(i, i+u mod n)` for `1 ≤ u ≤ rho`.
    Circulant { n: usize, rho: usize },
    /// `K_{n/2} × K_2`: two cliques joined by a perfect matching.
    CliquePrism { n: usize },
    /// Uniform perfect matching.
    RandomMatching { n: usize },
    /// Pairing model with rejection; `connected` additionally rejects
    /// disconnected samples.
    RandomRegular { n: usize, d: usize, connected: bool },
    /// Connected random regular graph whose lazy spectral gap is at least
    /// `min_gap`.
    Expander { n: usize, d: usize, min_gap: f64 },
    /// Erdős–Rényi `G(n, p)` conditioned on connectivity.
    RandomConnected { n: usize, p: f64 },
}

impl Family {
    pub fn n(&self) -> usize {
        match self {
            Family::Empty { n }
            | Family::Path { n }
            | Family::Cycle { n }
            | Family::Complete { n }
            | Family::Barbell { n }
            | Family::Circulant { n, .. }
            | Family::CliquePrism { n }
            | Family::RandomMatching { n }
            | Family::RandomRegular { n, .. }
            | Family::Expander { n, .. }
            | Family::RandomConnected { n, .. } => *n,
            Family::Star { leaves } => leaves + 1,
            Family::Torus { dims } => dims.iter().product(),
        }
    }
}

/// Builds a member of `family`; randomized families are a pure function of
/// `seed`.
pub fn generate(family: &Family, seed: u64) -> Result<StaticGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *family {
        Family::Empty { n } => Ok(StaticGraph::empty(n)),
        Family::Path { n } => {
            if n == 0 {
                return domain("path needs at least one vertex");
            }
            StaticGraph::from_edges(n, (1..n).map(|i| (i - 1, i)))
        }
        Family::Cycle { n } => {
            if n < 3 {
                return domain("cycle needs at least three vertices");
            }
            StaticGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        Family::Complete { n } => complete(n),
        Family::Star { leaves } => StaticGraph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))),
        Family::Torus { ref dims } => torus(dims),
        Family::Barbell { n } => barbell(n),
        Family::Circulant { n, rho } => circulant(n, rho),
        Family::CliquePrism { n } => clique_prism(n),
        Family::RandomMatching { n } => random_matching(n, &mut rng),
        Family::RandomRegular { n, d, connected } => random_regular(n, d, connected, &mut rng),
        Family::Expander { n, d, min_gap } => expander(n, d, min_gap, &mut rng),
        Family::RandomConnected { n, p } => random_connected(n, p, &mut rng),
    }
}

pub fn complete(n: usize) -> Result<StaticGraph> {
    if n == 0 {
        return domain("complete graph needs at least one vertex");
    }
    StaticGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Mixed-radix coordinates of vertex `x` (first axis varies fastest).
pub fn torus_coords(dims: &[usize], mut x: usize) -> Vec<usize> {
    dims.iter()
        .map(|&side| {
            let c = x % side;
            x /= side;
            c
        })
        .collect()
}

pub fn torus_index(dims: &[usize], coords: &[usize]) -> usize {
    dims.iter().zip(coords).rev().fold(0, |acc, (&side, &c)| acc * side + c)
}

pub fn torus(dims: &[usize]) -> Result<StaticGraph> {
    if dims.is_empty() || dims.iter().any(|&s| s < 3) {
        return domain("torus sides must all be at least 3");
    }
    let n: usize = dims.iter().product();
    let mut edges = Vec::with_capacity(n * dims.len());
    for x in 0..n {
        let c = torus_coords(dims, x);
        for (axis, &side) in dims.iter().enumerate() {
            let mut next = c.clone();
            next[axis] = (c[axis] + 1) % side;
            edges.push((x, torus_index(dims, &next)));
        }
    }
    StaticGraph::from_edges(n, edges)
}

fn barbell(n: usize) -> Result<StaticGraph> {
    if n < 6 || !n.is_multiple_of(3) {
        return domain("barbell needs n a multiple of 3, at least 6");
    }
    let k = n / 3;
    let mut edges = Vec::new();
    for base in [0, 2 * k] {
        for u in base..base + k {
            for v in u + 1..base + k {
                edges.push((u, v));
            }
        }
    }
    // k-1 (last of the left clique) through the middle block to 2k
    for u in (k - 1)..(2 * k) {
        edges.push((u, u + 1));
    }
    StaticGraph::from_edges(n, edges)
}

fn circulant(n: usize, rho: usize) -> Result<StaticGraph> {
    if rho == 0 || n <= 2 * rho {
        return domain("circulant needs 1 <= rho < n/2");
    }
    StaticGraph::from_edges(n, (0..n).flat_map(|i| (1..=rho).map(move |u| (i, (i + u) % n))))
}

fn clique_prism(n: usize) -> Result<StaticGraph> {
    if n < 4 || !n.is_multiple_of(2) {
        return domain("K_{n/2} x K_2 needs even n >= 4");
    }
    let h = n / 2;
    let mut edges = Vec::new();
    for side in 0..2 {
        for u in 0..h {
            for v in u + 1..h {
                edges.push((side * h + u, side * h + v));
            }
        }
    }
    edges.extend((0..h).map(|i| (i, h + i)));
    StaticGraph::from_edges(n, edges)
}

fn random_matching(n: usize, rng: &mut ChaCha8Rng) -> Result<StaticGraph> {
    if !n.is_multiple_of(2) {
        return domain("perfect matching needs even n");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    StaticGraph::from_edges(n, order.chunks(2).map(|c| (c[0], c[1])))
}

/// One pairing-model sample; `None` on a loop or repeated pair.
fn pairing_attempt(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<StaticGraph> {
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    points.shuffle(rng);
    let mut edges = Vec::with_capacity(n * d / 2);
    for c in points.chunks(2) {
        if c[0] == c[1] {
            return None;
        }
        edges.push((c[0], c[1]));
    }
    StaticGraph::from_edges(n, edges).ok()
}

fn random_regular(n: usize, d: usize, connected: bool, rng: &mut ChaCha8Rng) -> Result<StaticGraph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return domain(format!("no simple {d}-regular graph on {n} vertices"));
    }
    if d == 0 {
        return Ok(StaticGraph::empty(n));
    }
    for _ in 0..PAIRING_RETRIES {
        if let Some(g) = pairing_attempt(n, d, rng) {
            if !connected || g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(Error::Generation(format!("no simple {d}-regular sample on {n} vertices in {PAIRING_RETRIES} tries")))
}

/// Lazy spectral gap of a regular graph (uniform π).
pub fn regular_gap(g: &StaticGraph) -> Result<f64> {
    let pi = StationaryDistribution::<f64>::uniform(g.n());
    spectral_gap(lazy_matrix::<f64>(g).matrix(), &pi)
}

fn expander(n: usize, d: usize, min_gap: f64, rng: &mut ChaCha8Rng) -> Result<StaticGraph> {
    if d < 3 {
        return domain("expanders need degree at least 3");
    }
    for _ in 0..PAIRING_RETRIES {
        let g = random_regular(n, d, true, rng)?;
        if regular_gap(&g)? >= min_gap {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no {d}-regular graph on {n} vertices with lazy gap >= {min_gap} in {PAIRING_RETRIES} tries"
    )))
}

fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<StaticGraph> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return domain("G(n,p) needs n >= 1 and p in [0,1]");
    }
    if n > 1 && p == 0.0 {
        return domain("G(n,0) is never connected");
    }
    for _ in 0..PAIRING_RETRIES * 10 {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = StaticGraph::from_edges(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!("G({n},{p}) produced no connected sample")))
}
