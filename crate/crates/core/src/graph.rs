//! Static undirected simple graphs on the dense vertex set `0..n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Undirected edge stored with `u < v`.
pub type Edge = (usize, usize);

fn normalize(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Immutable undirected unweighted graph without self-loops or multi-edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct StaticGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for StaticGraph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        StaticGraph::from_edges(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<StaticGraph> for GraphRepr {
    fn from(g: StaticGraph) -> Self {
        GraphRepr { n: g.n, edges: g.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }
}

impl StaticGraph {
    /// Builds a graph, rejecting out-of-range endpoints, self-loops and
    /// repeated edges.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return domain(format!("edge ({u},{v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return domain(format!("self-loop at vertex {u}"));
            }
            list.push(normalize(u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return domain(format!("repeated edge ({},{})", w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// Like [`StaticGraph::from_edges`] but silently merges repeated edges.
    pub fn from_edges_dedup<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return domain(format!("edge ({u},{v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return domain(format!("self-loop at vertex {u}"));
            }
            list.push(normalize(u, v));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        StaticGraph { n, edges, adj }
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Minimum degree δ (0 for the empty vertex set).
    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n as f64
        }
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Component label per vertex, labels numbered in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }

    /// Largest hop distance, `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n {
            for d in self.bfs_distances(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Edges with exactly one endpoint in `a`.
    pub fn edge_boundary(&self, a: &VertexSet) -> Result<Vec<Edge>> {
        a.check_proper(self.n)?;
        Ok(self.edges.iter().copied().filter(|&(u, v)| a.contains(u) != a.contains(v)).collect())
    }

    /// Number of vertices within `radius` hops of `center`.
    pub fn ball_size(&self, center: usize, radius: usize) -> Result<usize> {
        if center >= self.n {
            return domain(format!("center {center} outside 0..{}", self.n));
        }
        Ok(self.bfs_distances(center).into_iter().flatten().filter(|&d| d <= radius).count())
    }

    /// Exact edge-connectivity: minimum |∂S| over nonempty proper subsets,
    /// via unit-capacity max-flow from vertex 0 to every other vertex.
    /// Disconnected graphs (and graphs with fewer than two vertices) give 0.
    pub fn edge_connectivity(&self) -> usize {
        if self.n < 2 || !self.is_connected() {
            return 0;
        }
        let mut net = FlowNetwork::from_graph(self);
        let mut best = self.min_degree();
        for t in 1..self.n {
            net.reset();
            best = best.min(net.max_flow(0, t, best));
            if best == 0 {
                break;
            }
        }
        best
    }

    /// Union of edge sets over a common vertex set.
    pub fn union<'a, I: IntoIterator<Item = &'a StaticGraph>>(n: usize, graphs: I) -> Result<Self> {
        let mut edges = Vec::new();
        for g in graphs {
            if g.n != n {
                return domain(format!("graph on {} vertices in a union over {n}", g.n));
            }
            edges.extend_from_slice(&g.edges);
        }
        Self::from_edges_dedup(n, edges)
    }

    /// Text form: a header line `n m`, then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_pair(header, hline + 1)?;
        let (n, m) = nums;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            edges.push(parse_pair(line, i + 1)?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, edges).map_err(|e| Error::Parse { line: hline + 1, msg: e.to_string() })
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or(Error::Parse { line: lineno, msg: "expected two integers".into() })?
            .parse::<usize>()
            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
    }
    Ok((a, b))
}

/// Subset of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    mask: Vec<bool>,
}

impl VertexSet {
    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        let mut mask = vec![false; n];
        for u in members {
            if u >= n {
                return domain(format!("vertex {u} outside 0..{n}"));
            }
            mask[u] = true;
        }
        Ok(VertexSet { mask })
    }

    /// Subset encoded by the low `n` bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        VertexSet { mask: (0..n).map(|i| bits >> i & 1 == 1).collect() }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.mask.get(u).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn complement(&self) -> Self {
        VertexSet { mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub(crate) fn check_proper(&self, n: usize) -> Result<()> {
        if self.mask.len() != n {
            return domain(format!("vertex set over {} vertices used with a graph on {n}", self.mask.len()));
        }
        let k = self.len();
        if k == 0 || k == n {
            return domain("vertex set must be a nonempty proper subset");
        }
        Ok(())
    }
}

/// Residual network for unit-capacity Dinic on an undirected graph.
struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u32>,
    next: Vec<usize>,
    level: Vec<i64>,
    iter: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    fn from_graph(g: &StaticGraph) -> Self {
        let mut net = FlowNetwork {
            head: vec![NIL; g.n],
            to: Vec::with_capacity(2 * g.m()),
            cap: Vec::with_capacity(2 * g.m()),
            next: Vec::with_capacity(2 * g.m()),
            level: vec![0; g.n],
            iter: vec![0; g.n],
        };
        // An undirected unit edge is a pair of opposite arcs, each of
        // capacity one and each the other's residual.
        for &(u, v) in &g.edges {
            net.add_arc(u, v);
            net.add_arc(v, u);
        }
        net
    }

    fn add_arc(&mut self, u: usize, v: usize) {
        self.to.push(v);
        self.cap.push(1);
        self.next.push(self.head[u]);
        self.head[u] = self.to.len() - 1;
    }

    fn reset(&mut self) {
        self.cap.iter_mut().for_each(|c| *c = 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let mut e = self.head[u];
            while e != NIL {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
                e = self.next[e];
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize) -> bool {
        if u == t {
            return true;
        }
        while self.iter[u] != NIL {
            let e = self.iter[u];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 && self.dfs(v, t) {
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                return true;
            }
            self.iter[u] = self.next[e];
        }
        false
    }

    /// Max flow, stopping early once `limit` units are routed.
    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.iter.copy_from_slice(&self.head);
            while flow < limit && self.dfs(s, t) {
                flow += 1;
            }
        }
        flow
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> StaticGraph {
        StaticGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn cycle(n: usize) -> StaticGraph {
        StaticGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> StaticGraph {
        StaticGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(StaticGraph::from_edges(3, [(0, 3)]).is_err());
        assert!(StaticGraph::from_edges(3, [(1, 1)]).is_err());
        assert!(StaticGraph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert_eq!(StaticGraph::from_edges_dedup(3, [(0, 1), (1, 0)]).unwrap().m(), 1);
    }

    #[test]
    fn degrees_match_incidence() {
        let g = StaticGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.degrees(), vec![3, 1, 1, 1]);
        assert_eq!(g.min_degree(), 1);
        assert_eq!(g.regular_degree(), None);
        assert_eq!(cycle(5).regular_degree(), Some(2));
    }

    #[test]
    fn boundary_examples() {
        // path 1-2-3 relabelled to 0-1-2, a = {0}
        let p = path(3);
        let a = VertexSet::from_members(3, [0]).unwrap();
        assert_eq!(p.edge_boundary(&a).unwrap(), vec![(0, 1)]);

        let c4 = cycle(4);
        let a = VertexSet::from_members(4, [0, 1]).unwrap();
        assert_eq!(c4.edge_boundary(&a).unwrap(), vec![(0, 3), (1, 2)]);

        let k4 = complete(4);
        assert_eq!(k4.edge_boundary(&a).unwrap().len(), 2 * 2);
    }

    #[test]
    fn boundary_rejects_trivial_sets() {
        let g = cycle(4);
        assert!(g.edge_boundary(&VertexSet::from_members(4, []).unwrap()).is_err());
        assert!(g.edge_boundary(&VertexSet::from_members(4, 0..4).unwrap()).is_err());
    }

    #[test]
    fn ball_examples() {
        let c8 = cycle(8);
        assert_eq!(c8.ball_size(3, 0).unwrap(), 1);
        assert_eq!(c8.ball_size(0, 2).unwrap(), 5);
        assert_eq!(c8.ball_size(0, 4).unwrap(), 8);
        assert!(c8.ball_size(8, 1).is_err());
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(cycle(9).edge_connectivity(), 2);
        assert_eq!(complete(5).edge_connectivity(), 4);
        assert_eq!(path(6).edge_connectivity(), 1);
        let two = StaticGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.edge_connectivity(), 0);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let g = cycle(5);
        assert_eq!(StaticGraph::from_text(&g.to_text()).unwrap(), g);
        match StaticGraph::from_text("3 2\n0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(StaticGraph::from_text("3 2\n0 1\n").is_err());
    }

    #[test]
    fn json_form_revalidates() {
        let g = cycle(4);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":4,"edges":[[0,1],[0,3],[1,2],[2,3]]}"#);
        let back: StaticGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<StaticGraph>(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
    }
}
