//! Lazy transition matrices, stationary distributions, the ℓ2(π) geometry
//! and Dirichlet forms.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::graph::StaticGraph;
use crate::scalar::{approx_eq, Scalar};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return domain("matrix rows must all have length n");
        }
        Ok(DenseMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: S) {
        self.data[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.n).map(|i| self.row(i).iter().cloned().fold(S::zero(), |a, b| a + b)).collect()
    }

    /// Row vector times matrix, `p M`.
    pub fn left_mul(&self, p: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n];
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (o, mij) in out.iter_mut().zip(self.row(i)) {
                if !mij.is_zero() {
                    *o += pi.clone() * mij.clone();
                }
            }
        }
        out
    }

    /// Matrix times column vector, `M f`.
    pub fn right_mul(&self, f: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(f)
                    .filter(|(m, _)| !m.is_zero())
                    .fold(S::zero(), |a, (m, x)| a + m.clone() * x.clone())
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    /// Entrywise mean of equally sized matrices.
    pub fn mean<'a, I: IntoIterator<Item = &'a Self>>(mats: I) -> Result<Self> {
        let mut iter = mats.into_iter();
        let first = iter.next().ok_or_else(|| Error::Domain("mean of zero matrices".into()))?;
        let mut acc = first.clone();
        let mut count = 1usize;
        for m in iter {
            if m.n != acc.n {
                return domain("matrices of different sizes");
            }
            for (a, b) in acc.data.iter_mut().zip(&m.data) {
                *a += b.clone();
            }
            count += 1;
        }
        let c = S::from_usize_lossy(count);
        for a in &mut acc.data {
            *a /= c.clone();
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> DenseMatrix<f64> {
        DenseMatrix { n: self.n, data: self.data.iter().map(Scalar::to_f64_lossy).collect() }
    }

    /// Comma-separated rows, for debugging exports.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{}", x.to_f64_lossy())).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Whether the positive off-diagonal entries connect all vertices.
    pub fn support_connected(&self) -> bool {
        let n = self.n;
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && v != u && (!self.get(u, v).is_zero() || !self.get(v, u).is_zero()) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// Self-loop probability of the lazy walk at a vertex of degree `d`.
pub fn stay_probability<S: Scalar>(d: usize) -> S {
    if d == 0 {
        S::one()
    } else {
        S::ratio(1, 2)
    }
}

/// One step of the lazy walk on `g` applied to a row distribution: `p P`.
pub fn step_distribution<S: Scalar>(g: &StaticGraph, p: &[S]) -> Vec<S> {
    let mut out: Vec<S> = (0..g.n()).map(|u| p[u].clone() * stay_probability::<S>(g.degree(u))).collect();
    for u in 0..g.n() {
        let d = g.degree(u);
        if d == 0 || p[u].is_zero() {
            continue;
        }
        let share = p[u].clone() / S::from_usize_lossy(2 * d);
        for &v in g.neighbors(u) {
            out[v] += share.clone();
        }
    }
    out
}

/// The lazy step applied to a column function: `(P f)(u)`.
pub fn step_function<S: Scalar>(g: &StaticGraph, f: &[S]) -> Vec<S> {
    (0..g.n())
        .map(|u| {
            let d = g.degree(u);
            if d == 0 {
                return f[u].clone();
            }
            let nb = g.neighbors(u).iter().fold(S::zero(), |a, &v| a + f[v].clone());
            (f[u].clone() + nb / S::from_usize_lossy(d)) / S::from_usize_lossy(2)
        })
        .collect()
}

/// Lazy transition matrix of one schedule step.
#[derive(Clone, Debug)]
pub struct LazyChainStep<S> {
    matrix: DenseMatrix<S>,
    graph: Arc<StaticGraph>,
}

impl<S: Scalar> LazyChainStep<S> {
    /// `P(u,u) = 1/2`, `P(u,v) = 1/(2 d_u)` on edges; isolated rows are
    /// the identity.
    pub fn new(graph: Arc<StaticGraph>) -> Self {
        let n = graph.n();
        let mut matrix = DenseMatrix::zeros(n);
        for u in 0..n {
            let d = graph.degree(u);
            matrix.set(u, u, stay_probability(d));
            if d > 0 {
                let w = S::ratio(1, 2 * d as i64);
                for &v in graph.neighbors(u) {
                    matrix.set(u, v, w.clone());
                }
            }
        }
        LazyChainStep { matrix, graph }
    }

    pub fn matrix(&self) -> &DenseMatrix<S> {
        &self.matrix
    }

    pub fn graph(&self) -> &StaticGraph {
        &self.graph
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    /// Dirichlet form by the general double sum.
    pub fn dirichlet_form(&self, pi: &StationaryDistribution<S>, f: &[S]) -> S {
        dirichlet_form(&self.matrix, pi, f)
    }
}

pub fn lazy_matrix<S: Scalar>(g: &StaticGraph) -> LazyChainStep<S> {
    LazyChainStep::new(Arc::new(g.clone()))
}

/// Probability distribution certified stationary for some chain.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryDistribution<S> {
    pi: Vec<S>,
    pi_star: S,
}

impl<S: Scalar> StationaryDistribution<S> {
    /// Validates non-negativity and unit mass (within `tol`, exactly for
    /// exact scalars).
    pub fn new(pi: Vec<S>, tol: f64) -> Result<Self> {
        if pi.is_empty() {
            return domain("empty distribution");
        }
        if pi.iter().any(|x| x.is_negative()) {
            return domain("negative stationary mass");
        }
        let total = pi.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !approx_eq(&total, &S::one(), tol) {
            return domain(format!("stationary masses sum to {}", total.to_f64_lossy()));
        }
        let pi_star = pi.iter().cloned().fold(pi[0].clone(), |a, b| if b < a { b } else { a });
        Ok(StationaryDistribution { pi, pi_star })
    }

    pub fn uniform(n: usize) -> Self {
        let x = S::ratio(1, n as i64);
        StationaryDistribution { pi: vec![x.clone(); n], pi_star: x }
    }

    /// `π(u) = d_u / 2m`.
    pub fn from_degrees(g: &StaticGraph) -> Result<Self> {
        if g.m() == 0 {
            return domain("degree-proportional distribution needs at least one edge");
        }
        let two_m = 2 * g.m() as i64;
        let pi: Vec<S> = g.degrees().into_iter().map(|d| S::ratio(d as i64, two_m)).collect();
        Self::new(pi, 1e-12)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.pi
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn pi_star(&self) -> &S {
        &self.pi_star
    }

    pub fn mass<I: IntoIterator<Item = usize>>(&self, set: I) -> S {
        set.into_iter().fold(S::zero(), |a, u| a + self.pi[u].clone())
    }

    pub fn to_f64(&self) -> StationaryDistribution<f64> {
        let pi: Vec<f64> = self.pi.iter().map(Scalar::to_f64_lossy).collect();
        let pi_star = self.pi_star.to_f64_lossy();
        StationaryDistribution { pi, pi_star }
    }

    /// Largest detailed-balance defect `|π(u)P(u,v) − π(v)P(v,u)|`.
    pub fn detailed_balance_defect(&self, p: &DenseMatrix<S>) -> f64 {
        let n = p.n();
        let mut worst = 0.0f64;
        for u in 0..n {
            for v in u + 1..n {
                let a = self.pi[u].clone() * p.get(u, v).clone();
                let b = self.pi[v].clone() * p.get(v, u).clone();
                worst = worst.max((a - b).abs().to_f64_lossy());
            }
        }
        worst
    }

    /// Checks detailed balance and `πP = π` for a dense matrix.
    pub fn certify(&self, p: &DenseMatrix<S>, tol: f64) -> Result<()> {
        if p.n() != self.n() {
            return domain("matrix and distribution sizes differ");
        }
        for u in 0..p.n() {
            for v in u + 1..p.n() {
                let a = self.pi[u].clone() * p.get(u, v).clone();
                let b = self.pi[v].clone() * p.get(v, u).clone();
                if !approx_eq(&a, &b, tol) {
                    return domain(format!("detailed balance fails on ({u},{v})"));
                }
            }
        }
        self.check_fixed_point(&p.left_mul(&self.pi), tol)
    }

    /// Checks `π P = π` for the lazy step on `g` without forming a matrix.
    pub fn certify_graph(&self, g: &StaticGraph, tol: f64) -> Result<()> {
        if g.n() != self.n() {
            return domain("graph and distribution sizes differ");
        }
        for &(u, v) in g.edges() {
            let a = self.pi[u].clone() / S::from_usize_lossy(2 * g.degree(u));
            let b = self.pi[v].clone() / S::from_usize_lossy(2 * g.degree(v));
            if !approx_eq(&a, &b, tol) {
                return domain(format!("detailed balance fails on edge ({u},{v})"));
            }
        }
        self.check_fixed_point(&step_distribution(g, &self.pi), tol)
    }

    fn check_fixed_point(&self, moved: &[S], tol: f64) -> Result<()> {
        for (u, (a, b)) in moved.iter().zip(&self.pi).enumerate() {
            if !approx_eq(a, b, tol) {
                return domain(format!(
                    "pi is not fixed at vertex {u}: {} vs {}",
                    a.to_f64_lossy(),
                    b.to_f64_lossy()
                ));
            }
        }
        Ok(())
    }
}

pub fn degree_stationary<S: Scalar>(g: &StaticGraph) -> Result<StationaryDistribution<S>> {
    StationaryDistribution::from_degrees(g)
}

/// A distribution together with its likelihood ratio against a reference π.
#[derive(Clone, Debug)]
pub struct LikelihoodState<S> {
    p: Vec<S>,
    rho: Vec<S>,
}

impl<S: Scalar> LikelihoodState<S> {
    pub fn new(p: Vec<S>, reference: &StationaryDistribution<S>) -> Result<Self> {
        if p.len() != reference.n() {
            return domain("distribution and reference sizes differ");
        }
        let mut rho = Vec::with_capacity(p.len());
        for (u, (pu, piu)) in p.iter().zip(reference.as_slice()).enumerate() {
            if piu.is_zero() {
                if !pu.is_zero() {
                    return domain(format!("mass at vertex {u} where the reference has none"));
                }
                rho.push(S::zero());
            } else {
                rho.push(pu.clone() / piu.clone());
            }
        }
        Ok(LikelihoodState { p, rho })
    }

    /// Point mass at `u`: ρ is `1/π(u)` at `u` and 0 elsewhere.
    pub fn point(u: usize, reference: &StationaryDistribution<S>) -> Result<Self> {
        let mut p = vec![S::zero(); reference.n()];
        p[u] = S::one();
        Self::new(p, reference)
    }

    pub fn p(&self) -> &[S] {
        &self.p
    }

    pub fn rho(&self) -> &[S] {
        &self.rho
    }
}

/// `⟨f, g⟩_π = Σ f(u) g(u) π(u)`.
pub fn inner_product_pi<S: Scalar>(f: &[S], g: &[S], pi: &StationaryDistribution<S>) -> S {
    f.iter()
        .zip(g)
        .zip(pi.as_slice())
        .fold(S::zero(), |a, ((x, y), w)| a + x.clone() * y.clone() * w.clone())
}

pub fn mean_pi<S: Scalar>(f: &[S], pi: &StationaryDistribution<S>) -> S {
    f.iter().zip(pi.as_slice()).fold(S::zero(), |a, (x, w)| a + x.clone() * w.clone())
}

/// `Var_π f = Σ π(u) (f(u) − E_π f)²`. For a likelihood ratio this is
/// `E_π ρ² − 1`.
pub fn variance_pi<S: Scalar>(f: &[S], pi: &StationaryDistribution<S>) -> S {
    let mean = mean_pi(f, pi);
    f.iter().zip(pi.as_slice()).fold(S::zero(), |a, (x, w)| {
        let d = x.clone() - mean.clone();
        a + d.clone() * d * w.clone()
    })
}

/// `½ Σ_{u,v} (f(u) − f(v))² π(u) P(u,v)` for any reversible matrix.
pub fn dirichlet_form<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>, f: &[S]) -> S {
    let n = p.n();
    let mut acc = S::zero();
    for u in 0..n {
        for v in 0..n {
            let w = p.get(u, v);
            if u == v || w.is_zero() {
                continue;
            }
            let d = f[u].clone() - f[v].clone();
            acc += d.clone() * d * pi.as_slice()[u].clone() * w.clone();
        }
    }
    acc / S::from_usize_lossy(2)
}

/// Dirichlet form of the lazy step on `g` with respect to an arbitrary
/// stationary π: `Σ_{edges} π(u)/(2 d_u) (f(u) − f(v))²`.
pub fn dirichlet_form_graph<S: Scalar>(g: &StaticGraph, pi: &StationaryDistribution<S>, f: &[S]) -> S {
    g.edges().iter().fold(S::zero(), |a, &(u, v)| {
        let d = f[u].clone() - f[v].clone();
        a + d.clone() * d * pi.as_slice()[u].clone() / S::from_usize_lossy(2 * g.degree(u))
    })
}

/// `(1/4m) Σ_{u∼v} (f(u) − f(v))²`, the form under the degree-proportional π.
pub fn dirichlet_form_edges<S: Scalar>(g: &StaticGraph, f: &[S]) -> Result<S> {
    if g.m() == 0 {
        return domain("edge-sum Dirichlet form needs at least one edge");
    }
    let sum = g.edges().iter().fold(S::zero(), |a, &(u, v)| {
        let d = f[u].clone() - f[v].clone();
        a + d.clone() * d
    });
    Ok(sum / S::from_usize_lossy(4 * g.m()))
}
