//! Commute times of the lazy walk on a static graph and the cut-sum,
//! Nash-Williams, conductance-profile and edge-connectivity bounds.
//!
//! Every bound is expressed through the probability flow
//! `Q(A, B) = Σ π(u)P(u,v)`. For the lazy walk each edge carries flow
//! `1/(4m)`, so `Σ 1/Q = 4m Σ 1/|∂|`; the `2m`-prefactor forms are reported
//! next to the flow forms for comparison.

use nalgebra::{DMatrix, DVector};

use crate::chain::{lazy_matrix, StationaryDistribution};
use crate::conductance::conductance_profile;
use crate::error::{domain, Error, Result};
use crate::graph::{Edge, StaticGraph};
use crate::spectral::eigenvalues;

/// Residual accepted from a dense linear solve.
pub const SOLVE_RESIDUAL: f64 = 1e-9;

/// Largest graph for which [`connected_labelling`] falls back to search.
pub const LABELLING_SEARCH_MAX_N: usize = 10;

/// Tolerance for ties when checking that voltages are non-decreasing.
pub const MONOTONE_TOL: f64 = 1e-9;

fn require_pair(g: &StaticGraph, s: usize, t: usize) -> Result<()> {
    if s >= g.n() || t >= g.n() {
        return domain(format!("vertex outside 0..{}", g.n()));
    }
    if s == t {
        return domain("s and t must differ");
    }
    if !g.is_connected() {
        return domain("commute quantities need a connected graph");
    }
    Ok(())
}

fn solve_checked(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let x = a.clone().lu().solve(&b).ok_or_else(|| Error::Numerical("singular linear system".into()))?;
    let scale = 1.0 + b.amax() + x.amax();
    let residual = (&a * &x - &b).amax();
    if residual > SOLVE_RESIDUAL * scale {
        return Err(Error::Numerical(format!("linear solve residual {residual:e}")));
    }
    Ok(x)
}

/// `τ_{u,t}` for every `u` in the lazy walk, by solving
/// `h(u) = 1 + Σ_v P(u,v) h(v)`, `h(t) = 0`.
pub fn hitting_times_to(g: &StaticGraph, t: usize) -> Result<Vec<f64>> {
    let n = g.n();
    if t >= n {
        return domain("target outside the vertex set");
    }
    if !g.is_connected() {
        return domain("hitting times need a connected graph");
    }
    let p = lazy_matrix::<f64>(g);
    let idx: Vec<usize> = (0..n).filter(|&u| u != t).collect();
    let k = idx.len();
    let mut a = DMatrix::zeros(k, k);
    for (i, &u) in idx.iter().enumerate() {
        for (j, &v) in idx.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            a[(i, j)] = delta - p.matrix().get(u, v);
        }
    }
    let x = solve_checked(a, DVector::from_element(k, 1.0))?;
    let mut h = vec![0.0; n];
    for (i, &u) in idx.iter().enumerate() {
        h[u] = x[i];
    }
    Ok(h)
}

/// `C_{s,t} = τ_{s,t} + τ_{t,s}`; 0 when `s = t`.
pub fn exact_commute(g: &StaticGraph, s: usize, t: usize) -> Result<f64> {
    if s == t && s < g.n() {
        return Ok(0.0);
    }
    require_pair(g, s, t)?;
    Ok(hitting_times_to(g, t)?[s] + hitting_times_to(g, s)?[t])
}

/// All commute times at once, `C = 4m R_eff`, with the effective
/// resistances read from `(L + J/n)^{-1}`.
pub fn commute_matrix(g: &StaticGraph) -> Result<DMatrix<f64>> {
    let n = g.n();
    if n < 2 || !g.is_connected() {
        return domain("commute matrix needs a connected graph on at least two vertices");
    }
    let mut l = DMatrix::from_element(n, n, 1.0 / n as f64);
    for u in 0..n {
        l[(u, u)] += g.degree(u) as f64;
    }
    for &(u, v) in g.edges() {
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    let m = l.try_inverse().ok_or_else(|| Error::Numerical("Laplacian inversion failed".into()))?;
    let four_m = 4.0 * g.m() as f64;
    Ok(DMatrix::from_fn(n, n, |u, v| four_m * (m[(u, u)] + m[(v, v)] - 2.0 * m[(u, v)])))
}

/// `max_{s,t} C_{s,t}` and a maximizing pair.
pub fn max_commute(g: &StaticGraph) -> Result<(f64, usize, usize)> {
    let c = commute_matrix(g)?;
    let mut best = (0.0, 0, 1);
    for s in 0..g.n() {
        for t in s + 1..g.n() {
            if c[(s, t)] > best.0 {
                best = (c[(s, t)], s, t);
            }
        }
    }
    Ok(best)
}

/// Harmonic function with `g(s) = 0`, `g(t) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VoltageFunction {
    pub g: Vec<f64>,
    pub s: usize,
    pub t: usize,
}

impl VoltageFunction {
    /// `𝓔_P(g, g) = (1/4m) Σ_{u∼v} (g(u) − g(v))²` on `graph`.
    pub fn energy(&self, graph: &StaticGraph) -> f64 {
        energy(graph, &self.g)
    }
}

pub fn energy(graph: &StaticGraph, f: &[f64]) -> f64 {
    let sum: f64 = graph.edges().iter().map(|&(u, v)| (f[u] - f[v]).powi(2)).sum();
    sum / (4.0 * graph.m() as f64)
}

pub fn solve_voltage(graph: &StaticGraph, s: usize, t: usize) -> Result<VoltageFunction> {
    require_pair(graph, s, t)?;
    let n = graph.n();
    let idx: Vec<usize> = (0..n).filter(|&u| u != s && u != t).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &u) in idx.iter().enumerate() {
        pos[u] = i;
    }
    let k = idx.len();
    let mut g = vec![0.0; n];
    g[t] = 1.0;
    if k > 0 {
        let mut a = DMatrix::zeros(k, k);
        let mut b = DVector::zeros(k);
        for (i, &u) in idx.iter().enumerate() {
            a[(i, i)] = graph.degree(u) as f64;
            for &v in graph.neighbors(u) {
                if v == t {
                    b[i] += 1.0;
                } else if v != s {
                    a[(i, pos[v])] -= 1.0;
                }
            }
        }
        let x = solve_checked(a, b)?;
        for (i, &u) in idx.iter().enumerate() {
            g[u] = x[i].clamp(0.0, 1.0);
        }
    }
    Ok(VoltageFunction { g, s, t })
}

/// A vertex ordering with its prefix cuts `[j] = {order[0..j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Labelling {
    pub order: Vec<usize>,
    /// `|∂[j]|` for `j = 1..n−1`.
    pub prefix_boundaries: Vec<usize>,
    /// `Q([j], V∖[j])` for `j = 1..n−1`.
    pub prefix_flows: Vec<f64>,
}

impl Labelling {
    pub fn new(graph: &StaticGraph, order: Vec<usize>) -> Result<Self> {
        let n = graph.n();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&u| u >= n || std::mem::replace(&mut seen[u], true)) {
            return domain("labelling must be a permutation of the vertices");
        }
        let pi = StationaryDistribution::<f64>::from_degrees(graph)?;
        let p = lazy_matrix::<f64>(graph);
        let mut inside = vec![false; n];
        let mut boundary = 0usize;
        let mut flow = 0.0;
        let mut prefix_boundaries = Vec::with_capacity(n.saturating_sub(1));
        let mut prefix_flows = Vec::with_capacity(n.saturating_sub(1));
        for &x in &order[..n - 1] {
            inside[x] = true;
            for &y in graph.neighbors(x) {
                let w = pi.as_slice()[x] * p.matrix().get(x, y);
                if inside[y] {
                    boundary -= 1;
                    flow -= pi.as_slice()[y] * p.matrix().get(y, x);
                } else {
                    boundary += 1;
                    flow += w;
                }
            }
            prefix_boundaries.push(boundary);
            prefix_flows.push(flow);
        }
        Ok(Labelling { order, prefix_boundaries, prefix_flows })
    }

    pub fn reversed(&self, graph: &StaticGraph) -> Result<Self> {
        Labelling::new(graph, self.order.iter().rev().copied().collect())
    }

    /// Whether every prefix induces a connected subgraph.
    pub fn prefixes_connected(&self, graph: &StaticGraph) -> bool {
        let mut inside = vec![false; graph.n()];
        for (j, &x) in self.order.iter().enumerate() {
            if j > 0 && !graph.neighbors(x).iter().any(|&y| inside[y]) {
                return false;
            }
            inside[x] = true;
        }
        true
    }
}

/// Upper bounds from a voltage-ordered labelling.
#[derive(Clone, Debug)]
pub struct CutSumBound {
    pub labelling: Labelling,
    /// `Σ_{j=1}^{n−1} 1/Q([j], V∖[j])`.
    pub flow: f64,
    /// `2m Σ_{j=1}^{n−1} 1/|∂[j]|`.
    pub literal: f64,
    /// `2 max(F, R)` where `F`, `R` sum `1/Q` over prefixes of size at
    /// most `n/2` of the labelling and of its reversal.
    pub reversed_flow: f64,
    /// `4m max(·)` of the same half sums over `1/|∂[j]|`.
    pub reversed_literal: f64,
}

fn voltage_order(v: &VoltageFunction) -> Vec<usize> {
    let n = v.g.len();
    let mut rest: Vec<usize> = (0..n).filter(|&u| u != v.s && u != v.t).collect();
    rest.sort_by(|&a, &b| v.g[a].total_cmp(&v.g[b]).then(a.cmp(&b)));
    let mut order = Vec::with_capacity(n);
    order.push(v.s);
    order.extend(rest);
    order.push(v.t);
    order
}

fn half_sums(l: &Labelling) -> (f64, f64) {
    let half = l.order.len() / 2;
    let q: f64 = l.prefix_flows[..half].iter().map(|q| 1.0 / q).sum();
    let b: f64 = l.prefix_boundaries[..half].iter().map(|&b| 1.0 / b as f64).sum();
    (q, b)
}

pub fn cut_sum_upper(graph: &StaticGraph, s: usize, t: usize) -> Result<CutSumBound> {
    let v = solve_voltage(graph, s, t)?;
    let labelling = Labelling::new(graph, voltage_order(&v))?;
    let flow = labelling.prefix_flows.iter().map(|q| 1.0 / q).sum();
    let two_m = 2.0 * graph.m() as f64;
    let literal = two_m * labelling.prefix_boundaries.iter().map(|&b| 1.0 / b as f64).sum::<f64>();
    let (fq, fb) = half_sums(&labelling);
    let (rq, rb) = half_sums(&labelling.reversed(graph)?);
    Ok(CutSumBound {
        labelling,
        flow,
        literal,
        reversed_flow: 2.0 * fq.max(rq),
        reversed_literal: 2.0 * two_m * fb.max(rb),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabellingMethod {
    Greedy,
    Search,
    /// Greedy failed and the graph is too large to search.
    NotFound,
    /// Exhaustive search found no valid ordering.
    Counterexample,
}

#[derive(Clone, Debug)]
pub struct ConnectedLabelling {
    pub labelling: Option<Labelling>,
    pub method: LabellingMethod,
}

/// Voltage-monotone ordering whose prefixes all induce connected subgraphs.
pub fn connected_labelling(graph: &StaticGraph, v: &VoltageFunction) -> Result<ConnectedLabelling> {
    let n = graph.n();
    if v.g.len() != n {
        return domain("voltage length differs from the graph");
    }
    if let Some(order) = greedy_connected(graph, v) {
        return Ok(ConnectedLabelling { labelling: Some(Labelling::new(graph, order)?), method: LabellingMethod::Greedy });
    }
    if n > LABELLING_SEARCH_MAX_N {
        return Ok(ConnectedLabelling { labelling: None, method: LabellingMethod::NotFound });
    }
    let mut failed = vec![false; 1 << n];
    let mut order = vec![v.s];
    if search_connected(graph, v, 1u64 << v.s, &mut order, &mut failed) {
        Ok(ConnectedLabelling { labelling: Some(Labelling::new(graph, order)?), method: LabellingMethod::Search })
    } else {
        Ok(ConnectedLabelling { labelling: None, method: LabellingMethod::Counterexample })
    }
}

fn greedy_connected(graph: &StaticGraph, v: &VoltageFunction) -> Option<Vec<usize>> {
    let n = graph.n();
    let mut inside = vec![false; n];
    let mut frontier = vec![false; n];
    let mut order = vec![v.s];
    inside[v.s] = true;
    for &y in graph.neighbors(v.s) {
        frontier[y] = true;
    }
    let mut last = v.g[v.s];
    while order.len() < n {
        let next = (0..n)
            .filter(|&u| frontier[u] && !inside[u])
            .min_by(|&a, &b| v.g[a].total_cmp(&v.g[b]).then(a.cmp(&b)))?;
        if v.g[next] < last - MONOTONE_TOL {
            return None;
        }
        last = last.max(v.g[next]);
        inside[next] = true;
        order.push(next);
        for &y in graph.neighbors(next) {
            frontier[y] = true;
        }
    }
    Some(order)
}

fn search_connected(
    graph: &StaticGraph,
    v: &VoltageFunction,
    mask: u64,
    order: &mut Vec<usize>,
    failed: &mut [bool],
) -> bool {
    let n = graph.n();
    if order.len() == n {
        return true;
    }
    if failed[mask as usize] {
        return false;
    }
    let last = order.iter().map(|&u| v.g[u]).fold(f64::NEG_INFINITY, f64::max);
    for u in 0..n {
        if mask >> u & 1 == 1 || v.g[u] < last - MONOTONE_TOL {
            continue;
        }
        if !graph.neighbors(u).iter().any(|&y| mask >> y & 1 == 1) {
            continue;
        }
        order.push(u);
        if search_connected(graph, v, mask | 1 << u, order, failed) {
            return true;
        }
        order.pop();
    }
    failed[mask as usize] = true;
    false
}

/// Lower bound from edge-disjoint cutsets separating `s` from `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct NashWilliams {
    /// `Σ_j 1/Q(E_j)`.
    pub flow: f64,
    /// `2m Σ_j 1/|E_j|`.
    pub literal: f64,
}

pub fn nash_williams_lower(graph: &StaticGraph, s: usize, t: usize, cutsets: &[Vec<Edge>]) -> Result<NashWilliams> {
    require_pair(graph, s, t)?;
    let mut used = std::collections::BTreeSet::new();
    let pi = StationaryDistribution::<f64>::from_degrees(graph)?;
    let p = lazy_matrix::<f64>(graph);
    let mut flow = 0.0;
    let mut literal = 0.0;
    for (j, cut) in cutsets.iter().enumerate() {
        if cut.is_empty() {
            return domain(format!("cutset {j} is empty"));
        }
        let mut q = 0.0;
        let mut normalized = Vec::with_capacity(cut.len());
        for &(a, b) in cut {
            let e = (a.min(b), a.max(b));
            if !graph.has_edge(e.0, e.1) {
                return domain(format!("cutset {j} contains non-edge ({a},{b})"));
            }
            if !used.insert(e) {
                return domain(format!("cutset {j} repeats edge ({a},{b}) from an earlier cutset"));
            }
            q += pi.as_slice()[e.0] * p.matrix().get(e.0, e.1);
            normalized.push(e);
        }
        let rest = StaticGraph::from_edges(graph.n(), graph.edges().iter().copied().filter(|e| !normalized.contains(e)))?;
        if rest.bfs_distances(s)[t].is_some() {
            return domain(format!("cutset {j} does not separate {s} from {t}"));
        }
        flow += 1.0 / q;
        literal += 2.0 * graph.m() as f64 / cut.len() as f64;
    }
    Ok(NashWilliams { flow, literal })
}

/// Edges between consecutive breadth-first layers around `s`, up to the
/// layer of `t`.
pub fn distance_cutsets(graph: &StaticGraph, s: usize, t: usize) -> Result<Vec<Vec<Edge>>> {
    require_pair(graph, s, t)?;
    let dist = graph.bfs_distances(s);
    let dt = dist[t].expect("connected");
    let mut cuts = vec![Vec::new(); dt];
    for &(u, v) in graph.edges() {
        let (du, dv) = (dist[u].expect("connected"), dist[v].expect("connected"));
        let (lo, hi) = (du.min(dv), du.max(dv));
        if hi == lo + 1 && hi <= dt {
            cuts[lo].push((u, v));
        }
    }
    Ok(cuts)
}

/// `Φ_j = min_{|S|=j} |∂S|/(d·j)` for `j = 1..n/2` (n ≤ 20).
pub fn combinatorial_profile(graph: &StaticGraph) -> Result<Vec<f64>> {
    let d = graph.regular_degree().ok_or_else(|| Error::Domain("profile bound needs a regular graph".into()))?;
    if d == 0 {
        return domain("profile bound needs edges");
    }
    let pi = StationaryDistribution::<f64>::uniform(graph.n());
    let p = lazy_matrix::<f64>(graph);
    // the chain profile of the lazy walk is |∂S|/(2dj), half the combinatorial one
    (1..=graph.n() / 2).map(|j| Ok(2.0 * conductance_profile(p.matrix(), &pi, j)?.value)).collect()
}

/// `4n Σ_{j=1}^{n/2} 1/(Φ_j · j)` for a regular graph.
pub fn profile_bound(graph: &StaticGraph) -> Result<f64> {
    let phi = combinatorial_profile(graph)?;
    let sum: f64 = phi.iter().enumerate().map(|(i, &f)| 1.0 / (f * (i + 1) as f64)).sum();
    Ok(4.0 * graph.n() as f64 * sum)
}

/// `Σ_{k≥2} 1/(1 − λ_k)` over the lazy walk's eigenvalues.
pub fn eigen_sum(graph: &StaticGraph) -> Result<f64> {
    let pi = StationaryDistribution::<f64>::from_degrees(graph)?;
    let ev = eigenvalues(lazy_matrix::<f64>(graph).matrix(), &pi)?;
    if ev[1] >= 1.0 - 1e-12 {
        return domain("eigen sum diverges on a disconnected graph");
    }
    Ok(ev[1..].iter().map(|l| 1.0 / (1.0 - l)).sum())
}

/// `n² d̄ (log₂δ/δ² + 1/(δρ))` with `ρ` the edge connectivity.
pub fn connectivity_bound(graph: &StaticGraph) -> Result<f64> {
    if graph.n() < 2 || !graph.is_connected() {
        return domain("connectivity bound needs a connected graph");
    }
    let n = graph.n() as f64;
    let delta = graph.min_degree() as f64;
    let rho = graph.edge_connectivity() as f64;
    Ok(n * n * graph.average_degree() * (delta.log2() / (delta * delta) + 1.0 / (delta * rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    fn path(n: usize) -> StaticGraph {
        generate(&Family::Path { n }, 0).unwrap()
    }

    /// First-step analysis for the lazy walk on P4, solved by hand:
    /// simple-walk hitting 0→3 is 9, lazy doubles it, and the return leg
    /// is symmetric.
    #[test]
    fn path_commute_oracle() {
        assert!((exact_commute(&path(4), 0, 3).unwrap() - 36.0).abs() < 1e-9);
        for n in [2, 3, 5, 9] {
            let c = exact_commute(&path(n), 0, n - 1).unwrap();
            let e = 4.0 * ((n - 1) * (n - 1)) as f64;
            assert!((c - e).abs() < 1e-9 * e, "n={n}: {c}");
        }
        assert_eq!(exact_commute(&path(4), 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn resistance_matches_hitting_solve() {
        let g = generate(&Family::Barbell { n: 9 }, 0).unwrap();
        let c = commute_matrix(&g).unwrap();
        for (s, t) in [(0, 8), (1, 4), (3, 5)] {
            let direct = exact_commute(&g, s, t).unwrap();
            assert!((c[(s, t)] - direct).abs() < 1e-8 * direct);
        }
    }

    #[test]
    fn voltage_is_the_maximizer() {
        let g = generate(&Family::Barbell { n: 9 }, 0).unwrap();
        let v = solve_voltage(&g, 0, 8).unwrap();
        let c = exact_commute(&g, 0, 8).unwrap();
        assert!((1.0 / v.energy(&g) - c).abs() < 1e-6 * c);
        let p = solve_voltage(&path(5), 0, 4).unwrap();
        for (i, x) in p.g.iter().enumerate() {
            assert!((x - i as f64 / 4.0).abs() < 1e-12);
        }
        let k2 = path(2);
        let v = solve_voltage(&k2, 0, 1).unwrap();
        assert_eq!(v.g, vec![0.0, 1.0]);
        assert!((v.energy(&k2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn path_bounds_are_tight() {
        for n in [2, 3, 6, 10] {
            let g = path(n);
            let exact = 4.0 * ((n - 1) * (n - 1)) as f64;
            let up = cut_sum_upper(&g, 0, n - 1).unwrap();
            assert!((up.flow - exact).abs() < 1e-9 * exact);
            assert!((up.literal - exact / 2.0).abs() < 1e-9 * exact);
            let nw = nash_williams_lower(&g, 0, n - 1, &distance_cutsets(&g, 0, n - 1).unwrap()).unwrap();
            assert!((nw.flow - exact).abs() < 1e-9 * exact);
            assert!(up.reversed_flow >= up.flow - 1e-9);
        }
    }

    #[test]
    fn cutset_validation() {
        let g = generate(&Family::Cycle { n: 6 }, 0).unwrap();
        assert!(nash_williams_lower(&g, 0, 3, &[vec![(0, 1)]]).is_err());
        assert!(nash_williams_lower(&g, 0, 3, &[vec![(0, 1), (0, 5)], vec![(1, 0), (4, 5)]]).is_err());
        assert!(nash_williams_lower(&g, 0, 3, &[vec![(0, 2), (0, 5)]]).is_err());
        let nw = nash_williams_lower(&g, 0, 3, &distance_cutsets(&g, 0, 3).unwrap()).unwrap();
        let c = exact_commute(&g, 0, 3).unwrap();
        assert!(nw.flow <= c + 1e-9);
    }

    #[test]
    fn connected_labelling_on_cycle() {
        let g = generate(&Family::Cycle { n: 6 }, 0).unwrap();
        let v = solve_voltage(&g, 0, 3).unwrap();
        let l = connected_labelling(&g, &v).unwrap();
        assert_eq!(l.method, LabellingMethod::Greedy);
        let lab = l.labelling.unwrap();
        assert!(lab.prefixes_connected(&g));
        assert_eq!(lab.order, vec![0, 1, 5, 2, 4, 3]);
    }

    #[test]
    fn labelling_flows() {
        let g = generate(&Family::Complete { n: 4 }, 0).unwrap();
        let l = Labelling::new(&g, vec![2, 0, 3, 1]).unwrap();
        assert_eq!(l.prefix_boundaries, vec![3, 4, 3]);
        for (q, b) in l.prefix_flows.iter().zip(&l.prefix_boundaries) {
            assert!((q - *b as f64 / 24.0).abs() < 1e-15);
        }
        assert!(Labelling::new(&g, vec![0, 0, 1, 2]).is_err());
    }

    #[test]
    fn profile_and_eigen_sum() {
        let k4 = generate(&Family::Complete { n: 4 }, 0).unwrap();
        // Φ_1 = 3/3, Φ_2 = 4/6
        let phi = combinatorial_profile(&k4).unwrap();
        assert!((phi[0] - 1.0).abs() < 1e-12 && (phi[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((profile_bound(&k4).unwrap() - 16.0 * (1.0 + 0.75)).abs() < 1e-9);
        // lazy K4 eigenvalues 1, 1/3 ×3
        assert!((eigen_sum(&k4).unwrap() - 4.5).abs() < 1e-9);
        assert!(profile_bound(&path(4)).is_err());
    }

    #[test]
    fn connectivity_bound_shape() {
        let k = generate(&Family::Complete { n: 8 }, 0).unwrap();
        let b = connectivity_bound(&k).unwrap();
        let expected = 64.0 * 7.0 * (7f64.log2() / 49.0 + 1.0 / 49.0);
        assert!((b - expected).abs() < 1e-9);
        assert!(connectivity_bound(&StaticGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap()).is_err());
    }
}
