//! Graph Fourier basis, polynomial graph filters and stationary signals.

mod covariance;
mod filter;

pub use covariance::{
    is_stationary, sample_covariance, sample_covariance_centered, synthesize, true_covariance,
    CovarianceEstimate, StationarityReport,
};
pub use filter::{
    filter_matrix, frequency_response, lowpass_exp_filter, true_power_spectrum, GraphFilter,
    PowerSpectrum,
};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::ShiftOperator;

const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a shift operator.
///
/// Column `n` of `eigenvectors` pairs with `eigenvalues[n]`. Each column is
/// signed so that its largest-magnitude entry is positive, ties going to the
/// lowest row index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.amax()
    }

    /// `N x order` Vandermonde matrix with entries `lambda_i^j`, `j = 0..order`.
    pub fn vandermonde(&self, order: usize) -> DMatrix<f64> {
        vandermonde(self.eigenvalues.as_slice(), order)
    }

    /// `U diag(d) U^T`, symmetrized.
    pub fn synthesize_diag(&self, d: &DVector<f64>) -> DMatrix<f64> {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (mut col, &dn) in scaled.column_iter_mut().zip(d.iter()) {
            col *= dn;
        }
        symmetrize(scaled * u.transpose())
    }
}

pub fn vandermonde(points: &[f64], order: usize) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), order, |i, j| points[i].powi(j as i32))
}

/// Symmetric eigendecomposition with deterministic ordering and signs.
pub fn eigendecompose(s: &ShiftOperator) -> Result<SpectralBasis> {
    eigendecompose_matrix(s.matrix())
}

pub fn eigendecompose_matrix(m: &DMatrix<f64>) -> Result<SpectralBasis> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("eigendecomposition needs a square matrix".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("shift operator".into()));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;

    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.set_column(dst, &(col * sign));
    }
    if eigenvalues.iter().chain(eigenvectors.iter()).any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    Ok(SpectralBasis { eigenvalues, eigenvectors })
}

pub(crate) fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, random_sensor_graph, tests::path3, Graph};

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.amax()
    }

    fn check_invariants(s: &DMatrix<f64>, b: &SpectralBasis) {
        let u = b.eigenvectors();
        let n = b.n();
        assert!(max_abs(&(u.transpose() * u - DMatrix::identity(n, n))) <= 1e-10);
        let recon = b.synthesize_diag(b.eigenvalues());
        assert!(max_abs(&(recon - s)) <= 1e-8 * b.max_abs_eigenvalue().max(1.0));
        for w in b.eigenvalues().as_slice().windows(2) {
            assert!(w[0] <= w[1]);
        }
        for col in u.column_iter() {
            let imax = col.iamax();
            assert!(col[imax] > 0.0);
        }
    }

    #[test]
    fn two_vertex_laplacian() {
        let g = Graph::new(2, [(0, 1, 1.0)], None).unwrap();
        let l = build_laplacian(&g);
        let b = eigendecompose(&l).unwrap();
        assert!((b.eigenvalues()[0]).abs() < 1e-14);
        assert!((b.eigenvalues()[1] - 2.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let u = b.eigenvectors();
        assert!((u[(0, 0)] - r).abs() < 1e-14 && (u[(1, 0)] - r).abs() < 1e-14);
        // Tie in magnitude on the second vector: the lowest index is made positive.
        assert!((u[(0, 1)] - r).abs() < 1e-14 && (u[(1, 1)] + r).abs() < 1e-14);
        check_invariants(l.matrix(), &b);
    }

    #[test]
    fn identity_matrix() {
        let b = eigendecompose_matrix(&DMatrix::identity(3, 3)).unwrap();
        assert!(b.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-15));
        check_invariants(&DMatrix::identity(3, 3), &b);
    }

    #[test]
    fn path3_eigenvalues() {
        // det(L - x I) = -x (x - 1) (x - 3) by cofactor expansion.
        let l = build_laplacian(&path3());
        let b = eigendecompose(&l).unwrap();
        for (got, want) in b.eigenvalues().iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        check_invariants(l.matrix(), &b);
    }

    #[test]
    fn sensor_graph_laplacian_is_psd_and_deterministic() {
        let g = random_sensor_graph(60, 6, 4).unwrap();
        let l = build_laplacian(&g);
        let b1 = eigendecompose(&l).unwrap();
        let b2 = eigendecompose(&l).unwrap();
        assert_eq!(b1, b2);
        let lmax = b1.eigenvalues()[59];
        assert!(b1.eigenvalues()[0] >= -1e-10 * lmax);
        check_invariants(l.matrix(), &b1);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(eigendecompose_matrix(&m).is_err());
    }
}
