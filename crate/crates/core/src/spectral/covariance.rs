use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{filter_matrix, symmetrize, GraphFilter, SpectralBasis};
use crate::error::{Error, Result};

/// Symmetric PSD covariance matrix and the number of snapshots behind it
/// (`0` for a population covariance).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    matrix: DMatrix<f64>,
    n_snapshots: usize,
}

impl CovarianceEstimate {
    pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

    pub fn new(matrix: DMatrix<f64>, n_snapshots: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvariantViolation("covariance must be square".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance".into()));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        let n = matrix.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > Self::SYMMETRY_TOLERANCE * scale {
                    return Err(Error::InvariantViolation(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(CovarianceEstimate { matrix, n_snapshots })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_snapshots(&self) -> usize {
        self.n_snapshots
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_population(&self) -> bool {
        self.n_snapshots == 0
    }
}

/// `R_x = H H^T` for white noise filtered by `f`.
pub fn true_covariance(f: &GraphFilter, b: &SpectralBasis) -> CovarianceEstimate {
    let h = filter_matrix(f, b);
    let r = symmetrize(&h * h.transpose());
    CovarianceEstimate { matrix: r, n_snapshots: 0 }
}

/// `n_snapshots` realizations `x_t = H n_t` with `n_t` i.i.d. standard normal,
/// one per column.
pub fn synthesize(
    f: &GraphFilter,
    b: &SpectralBasis,
    n_snapshots: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    if n_snapshots == 0 {
        return Err(Error::InvalidArgument("synthesis needs at least one snapshot".into()));
    }
    let n = b.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = DMatrix::from_fn(n, n_snapshots, |_, _| StandardNormal.sample(&mut rng));
    Ok(filter_matrix(f, b) * noise)
}

/// `(1 / N_s) sum_t x_t x_t^T`, without mean removal.
pub fn sample_covariance(snapshots: &DMatrix<f64>) -> Result<CovarianceEstimate> {
    gram(snapshots)
}

/// Sample covariance after subtracting the per-vertex empirical mean.
pub fn sample_covariance_centered(snapshots: &DMatrix<f64>) -> Result<CovarianceEstimate> {
    let mut centered = snapshots.clone();
    for mut row in centered.row_iter_mut() {
        let mean = row.mean();
        row.add_scalar_mut(-mean);
    }
    gram(&centered)
}

fn gram(x: &DMatrix<f64>) -> Result<CovarianceEstimate> {
    let ns = x.ncols();
    if ns == 0 {
        return Err(Error::InvalidArgument("sample covariance needs at least one snapshot".into()));
    }
    let n = x.nrows();
    let inv = 1.0 / ns as f64;
    let mut r = DMatrix::zeros(n, n);
    // Fill the lower triangle row-pair by row-pair and mirror, so the result is
    // exactly symmetric and a principal submatrix equals the covariance of the
    // corresponding rows bit for bit.
    for j in 0..n {
        let xj = x.row(j);
        for i in j..n {
            let v = x.row(i).dot(&xj) * inv;
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sample covariance".into()));
    }
    Ok(CovarianceEstimate { matrix: r, n_snapshots: ns })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    /// Off-diagonal to diagonal energy of `U^T R U`.
    pub ratio: f64,
    pub stationary: bool,
}

/// Checks joint diagonalizability of `R` with the shift operator.
pub fn is_stationary(r: &CovarianceEstimate, b: &SpectralBasis, tol: f64) -> Result<StationarityReport> {
    if r.dim() != b.n() {
        return Err(Error::InvalidArgument(format!(
            "covariance is {0}x{0} but basis has {1} vertices",
            r.dim(),
            b.n()
        )));
    }
    let u = b.eigenvectors();
    let m = u.transpose() * r.matrix() * u;
    let (mut diag, mut off) = (0.0, 0.0);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)] * m[(i, j)];
            if i == j {
                diag += v;
            } else {
                off += v;
            }
        }
    }
    let ratio = if diag > 0.0 { off / diag } else if off > 0.0 { f64::INFINITY } else { 0.0 };
    Ok(StationarityReport { ratio, stationary: ratio <= tol })
}
