//! Spectra of reversible chains via the π-symmetrized matrix
//! `S(u,v) = sqrt(π(u)/π(v)) P(u,v)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::chain::{DenseMatrix, StationaryDistribution};
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Detailed-balance tolerance accepted before symmetrizing.
pub const REVERSIBILITY_TOL: f64 = 1e-10;

fn symmetrized<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>) -> Result<DMatrix<f64>> {
    let n = p.n();
    if n < 2 {
        return domain("spectral quantities need at least two vertices");
    }
    if pi.n() != n {
        return domain("matrix and distribution sizes differ");
    }
    let defect = pi.detailed_balance_defect(p);
    if defect > REVERSIBILITY_TOL {
        return domain(format!("matrix is not reversible with respect to pi (defect {defect:e})"));
    }
    let pi = pi.to_f64();
    let w = pi.as_slice();
    if w.iter().any(|&x| x <= 0.0) {
        return domain("spectral gap needs a strictly positive stationary distribution");
    }
    let pf = p.to_f64();
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut s = DMatrix::zeros(n, n);
    for u in 0..n {
        for v in u..n {
            // Average the two triangles so rounding in P cannot leave the
            // matrix asymmetric.
            let a = sq[u] / sq[v] * pf.get(u, v);
            let b = sq[v] / sq[u] * pf.get(v, u);
            let x = 0.5 * (a + b);
            s[(u, v)] = x;
            s[(v, u)] = x;
        }
    }
    Ok(s)
}

/// Eigenvalues of a reversible chain, sorted in decreasing order.
pub fn eigenvalues<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>) -> Result<Vec<f64>> {
    let s = symmetrized(p, pi)?;
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `λ(P) = 1 − λ₂`.
pub fn spectral_gap<S: Scalar>(p: &DenseMatrix<S>, pi: &StationaryDistribution<S>) -> Result<f64> {
    let ev = eigenvalues(p, pi)?;
    Ok((1.0 - ev[1]).max(0.0))
}

/// Second eigenpair as a function on vertices: `(λ₂, f)` with
/// `P f = λ₂ f` and `f = φ / sqrt(π)` normalized to `Var_π f = 1`.
pub fn second_eigenfunction<S: Scalar>(
    p: &DenseMatrix<S>,
    pi: &StationaryDistribution<S>,
) -> Result<(f64, Vec<f64>)> {
    let s = symmetrized(p, pi)?;
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let k = order[1];
    let w = pi.to_f64();
    let f: Vec<f64> = (0..p.n()).map(|u| eig.eigenvectors[(u, k)] / w.as_slice()[u].sqrt()).collect();
    Ok((eig.eigenvalues[k], f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{dirichlet_form, lazy_matrix, variance_pi};
    use crate::graph::StaticGraph;

    fn cycle(n: usize) -> StaticGraph {
        StaticGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn k2_gap_is_one() {
        let g = StaticGraph::from_edges(2, [(0, 1)]).unwrap();
        let pi = StationaryDistribution::<f64>::uniform(2);
        let gap = spectral_gap(lazy_matrix::<f64>(&g).matrix(), &pi).unwrap();
        assert!((gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_gap_matches_circulant_formula() {
        // eigenvalues of the lazy cycle are (1 + cos(2πk/n))/2
        for n in [5, 8, 13] {
            let pi = StationaryDistribution::<f64>::uniform(n);
            let gap = spectral_gap(lazy_matrix::<f64>(&cycle(n)).matrix(), &pi).unwrap();
            let expected = (1.0 - (2.0 * std::f64::consts::PI / n as f64).cos()) / 2.0;
            assert!((gap - expected).abs() < 1e-12, "n={n}: {gap} vs {expected}");
        }
        let pi = StationaryDistribution::<f64>::uniform(8);
        let gap = spectral_gap(lazy_matrix::<f64>(&cycle(8)).matrix(), &pi).unwrap();
        assert!((gap - 0.146_446_609_406_726_24).abs() < 1e-12);
    }

    #[test]
    fn disconnected_gap_is_zero() {
        let g = StaticGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let pi = StationaryDistribution::<f64>::uniform(4);
        let gap = spectral_gap(lazy_matrix::<f64>(&g).matrix(), &pi).unwrap();
        assert!(gap.abs() < 1e-12);
    }

    #[test]
    fn non_reversible_rejected() {
        let p = DenseMatrix::from_rows(vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]]).unwrap();
        let pi = StationaryDistribution::<f64>::uniform(3);
        assert!(spectral_gap(&p, &pi).is_err());
    }

    #[test]
    fn eigenfunction_attains_the_gap() {
        let g = StaticGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        let pi = crate::chain::degree_stationary::<f64>(&g).unwrap();
        let step = lazy_matrix::<f64>(&g);
        let gap = spectral_gap(step.matrix(), &pi).unwrap();
        let (_, f) = second_eigenfunction(step.matrix(), &pi).unwrap();
        let ratio = dirichlet_form(step.matrix(), &pi, &f) / variance_pi(&f, &pi);
        assert!((ratio - gap).abs() < 1e-9);
    }
}
