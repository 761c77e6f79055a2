//! Conductance of vertex sets, exhaustive chain conductance and the
//! size-restricted conductance profile.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{DenseMatrix, StationaryDistribution};
use crate::error::{domain, Error, Result};
use crate::graph::VertexSet;
use crate::scalar::Scalar;

/// Largest vertex count for exhaustive cut enumeration.
pub const EXHAUSTIVE_MAX_N: usize = 20;

/// Probability flow `Q(A, B) = Σ_{u∈A, v∈B} π(u) P(u,v)`.
pub fn probability_flow<S: Scalar>(
    p: &DenseMatrix<S>,
    pi: &StationaryDistribution<S>,
    a: &VertexSet,
    b: &VertexSet,
) -> S {
    let mut acc = S::zero();
    for u in a.members() {
        for v in b.members() {
            let w = p.get(u, v);
            if !w.is_zero() {
                acc += pi.as_slice()[u].clone() * w.clone();
            }
        }
    }
    acc
}

/// `Φ_P(A) = Q(A, Aᶜ) / min{π(A), π(Aᶜ)}`.
pub fn conductance_set<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>, a: &VertexSet) -> Result<S> {
    a.check_proper(p.n())?;
    let ac = a.complement();
    let q = probability_flow(p, pi, a, &ac);
    let ma = pi.mass(a.members());
    let mc = pi.mass(ac.members());
    let denom = if ma < mc { ma } else { mc };
    if denom.is_zero() {
        return domain("cut side with zero stationary mass");
    }
    Ok(q / denom)
}

/// Minimizing cut found by [`conductance`] or [`conductance_profile`].
#[derive(Clone, Debug)]
pub struct CutValue<S> {
    pub value: S,
    pub set: VertexSet,
    /// `false` when the minimum came from sampling and is only an upper
    /// bound on the true conductance.
    pub exact: bool,
}

/// Positive off-diagonal pairs `u < v` with weight `π(u)P(u,v)`.
fn flow_pairs<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>) -> Vec<(usize, usize, S)> {
    let n = p.n();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = p.get(u, v);
            if !w.is_zero() {
                pairs.push((u, v, pi.as_slice()[u].clone() * w.clone()));
            }
        }
    }
    pairs
}

fn mask_value<S: Scalar>(mask: u64, pairs: &[(usize, usize, S)], pi: &[S], total: &S) -> Option<S> {
    let mut q = S::zero();
    for (u, v, w) in pairs {
        if (mask >> u & 1) != (mask >> v & 1) {
            q += w.clone();
        }
    }
    let mut ma = S::zero();
    let mut bits = mask;
    while bits != 0 {
        let u = bits.trailing_zeros() as usize;
        ma += pi[u].clone();
        bits &= bits - 1;
    }
    let mc = total.clone() - ma.clone();
    let denom = if ma < mc { ma } else { mc };
    if denom.is_zero() || denom.is_negative() {
        None
    } else {
        Some(q / denom)
    }
}

fn better<S: Scalar>(a: Option<(S, u64)>, b: Option<(S, u64)>) -> Option<(S, u64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            // ties resolved by the smaller mask so the answer is independent
            // of how the scan was split across workers
            if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

fn exhaustive_min<S: Scalar>(
    p: &DenseMatrix<S>,
    pi: &StationaryDistribution<S>,
    size: Option<usize>,
) -> Result<CutValue<S>> {
    let n = p.n();
    if n < 2 {
        return domain("conductance needs at least two vertices");
    }
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::Capability(format!(
            "exact conductance limited to n <= {EXHAUSTIVE_MAX_N} (got {n}); use conductance_sampled"
        )));
    }
    let pairs = flow_pairs(p, pi);
    let w = pi.as_slice();
    let total = pi.mass(0..n);
    // Without a size restriction Φ(A) = Φ(Aᶜ), so masks containing the last
    // vertex are skipped.
    let limit: u64 = match size {
        None => 1u64 << (n - 1),
        Some(_) => 1u64 << n,
    };
    let best = (1..limit)
        .into_par_iter()
        .filter(|&mask| size.is_none_or(|k| mask.count_ones() as usize == k))
        .map(|mask| mask_value(mask, &pairs, w, &total).map(|v| (v, mask)))
        .reduce(|| None, better);
    let (value, mask) = best.ok_or_else(|| Error::Domain("no admissible cut".into()))?;
    Ok(CutValue { value, set: VertexSet::from_bits(n, mask), exact: true })
}

/// `Φ(P)`: minimum of `Φ_P(A)` over all nonempty proper subsets (n ≤ 20).
pub fn conductance<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>) -> Result<CutValue<S>> {
    exhaustive_min(p, pi, None)
}

/// Minimum of `Φ_P(A)` over sets of size exactly `k`, `1 ≤ k ≤ n/2` (n ≤ 20).
pub fn conductance_profile<S: Scalar>(
    p: &DenseMatrix<S>,
    pi: &StationaryDistribution<S>,
    k: usize,
) -> Result<CutValue<S>> {
    if k == 0 || k > p.n() / 2 {
        return domain(format!("profile size {k} outside 1..={}", p.n() / 2));
    }
    exhaustive_min(p, pi, Some(k))
}

/// Sampled upper bound on `Φ(P)` for graphs beyond exhaustive reach:
/// random subsets plus breadth-first balls around random centers.
pub fn conductance_sampled(
    p: &DenseMatrix<f64>,
    pi: &StationaryDistribution<f64>,
    samples: usize,
    seed: u64,
) -> Result<CutValue<f64>> {
    let n = p.n();
    if n < 2 {
        return domain("conductance needs at least two vertices");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, VertexSet)> = None;
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..samples.max(1) {
        let set = if i % 2 == 0 {
            order.shuffle(&mut rng);
            let k = rng.gen_range(1..n);
            VertexSet::from_members(n, order[..k].iter().copied())?
        } else {
            let center = rng.gen_range(0..n);
            let k = rng.gen_range(1..n);
            VertexSet::from_members(n, grow_ball(p, center, k))?
        };
        let v = conductance_set(p, pi, &set)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, set));
        }
    }
    let (value, set) = best.expect("at least one sample");
    Ok(CutValue { value, set, exact: false })
}

fn grow_ball(p: &DenseMatrix<f64>, center: usize, k: usize) -> Vec<usize> {
    let n = p.n();
    let mut seen = vec![false; n];
    let mut out = vec![center];
    seen[center] = true;
    let mut head = 0;
    while out.len() < k && head < out.len() {
        let u = out[head];
        head += 1;
        for v in 0..n {
            if !seen[v] && *p.get(u, v) > 0.0 {
                seen[v] = true;
                out.push(v);
                if out.len() == k {
                    break;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::lazy_matrix;
    use crate::graph::StaticGraph;
    use crate::spectral::spectral_gap;
    use num_rational::BigRational;

    fn cycle(n: usize) -> StaticGraph {
        StaticGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn single_vertex_regular_is_half() {
        let g = cycle(6);
        let step = lazy_matrix::<BigRational>(&g);
        let pi = StationaryDistribution::uniform(6);
        let a = VertexSet::from_members(6, [2]).unwrap();
        assert_eq!(conductance_set(step.matrix(), &pi, &a).unwrap(), BigRational::ratio(1, 2));
        assert_eq!(conductance_profile(step.matrix(), &pi, 1).unwrap().value, BigRational::ratio(1, 2));
    }

    #[test]
    fn cycle_half_arc() {
        let g = cycle(8);
        let step = lazy_matrix::<BigRational>(&g);
        let pi = StationaryDistribution::uniform(8);
        let arc = VertexSet::from_members(8, 0..4).unwrap();
        assert_eq!(conductance_set(step.matrix(), &pi, &arc).unwrap(), BigRational::ratio(1, 8));
        let best = conductance(step.matrix(), &pi).unwrap();
        assert_eq!(best.value, BigRational::ratio(1, 8));
        assert!(best.exact);
    }

    #[test]
    fn errors() {
        let g = cycle(4);
        let step = lazy_matrix::<f64>(&g);
        let pi = StationaryDistribution::uniform(4);
        assert!(conductance_set(step.matrix(), &pi, &VertexSet::from_members(4, []).unwrap()).is_err());
        assert!(conductance_profile(step.matrix(), &pi, 3).is_err());
        let big = cycle(21);
        let step = lazy_matrix::<f64>(&big);
        let pi = StationaryDistribution::uniform(21);
        assert!(matches!(conductance(step.matrix(), &pi), Err(Error::Capability(_))));
        let approx = conductance_sampled(step.matrix(), &pi, 200, 3).unwrap();
        assert!(!approx.exact);
        // a contiguous arc of 10 or 11 gives 1/(2·10); sampling can only be above the optimum
        assert!(approx.value >= 1.0 / 20.0 - 1e-12);
    }

    #[test]
    fn cheeger_on_small_graphs() {
        let graphs = [
            cycle(7),
            StaticGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap(),
            StaticGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap(),
        ];
        for g in graphs {
            let step = lazy_matrix::<f64>(&g);
            let pi = crate::chain::degree_stationary(&g).unwrap();
            let phi = conductance(step.matrix(), &pi).unwrap().value;
            let gap = spectral_gap(step.matrix(), &pi).unwrap();
            assert!(2.0 * phi >= gap && gap >= phi * phi / 2.0);
        }
    }
}
