//! Linear models mapping the unknowns (`p` or `alpha`) to `vec(R_y)`.
//!
//! Rows are indexed by pairs `(a, b)` of positions in the sampling pattern and
//! ordered column-major over the `K x K` covariance: row `a + b * K`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SamplingPattern;
use crate::error::{Error, Result};
use crate::graph::ShiftOperator;
use crate::spectral::{CovarianceEstimate, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[default]
    Spectral,
    Vertex,
}

/// Which `(a, b)` pairs contribute equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSet {
    /// All `K^2` pairs, matching `vec(R_y)`.
    Full,
    /// Only `a <= b`; the other half duplicates these by symmetry of `R_y`.
    UpperTriangular,
}

/// `(Phi U o Phi U)` in the spectral domain or `(Phi (x) Phi) Psi_v` in the
/// vertex domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceModelMatrix {
    domain: Domain,
    matrix: DMatrix<f64>,
    pattern: SamplingPattern,
    order: Option<usize>,
    column_norms: Vec<f64>,
    rows: RowSet,
}

impl CovarianceModelMatrix {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn pattern(&self) -> &SamplingPattern {
        &self.pattern
    }

    /// `Q` for vertex-domain models.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Number of unknowns `M` (`N` or `Q`).
    pub fn n_unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn row_set(&self) -> RowSet {
        self.rows
    }

    /// Column norms of the model before subsampling (`||vec(S^q)||` in the
    /// vertex domain, `1` in the spectral domain). Used to balance columns in
    /// the least-squares solve and the design objective.
    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    /// Keeps only the `a <= b` rows.
    pub fn deduplicated(&self) -> CovarianceModelMatrix {
        if self.rows == RowSet::UpperTriangular {
            return self.clone();
        }
        let k = self.pattern.len();
        let keep: Vec<usize> = upper_pairs(k).map(|(a, b)| a + b * k).collect();
        CovarianceModelMatrix {
            matrix: self.matrix.select_rows(&keep),
            rows: RowSet::UpperTriangular,
            ..self.clone()
        }
    }

    /// The observation vector matching this model's rows.
    pub fn observation(&self, r_y: &CovarianceEstimate) -> Result<Vec<f64>> {
        let k = self.pattern.len();
        if r_y.dim() != k {
            return Err(Error::InvalidArgument(format!(
                "subsampled covariance is {0}x{0} but the model expects {k}x{k}",
                r_y.dim()
            )));
        }
        let m = r_y.matrix();
        Ok(match self.rows {
            RowSet::Full => m.as_slice().to_vec(),
            RowSet::UpperTriangular => upper_pairs(k).map(|(a, b)| m[(a, b)]).collect(),
        })
    }
}

fn upper_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |b| (0..=b).map(move |a| (a, b)))
}

/// Column `n` is `vec(u_n|X u_n|X^T)`.
pub fn build_spectral_model(b: &SpectralBasis, pat: &SamplingPattern) -> Result<CovarianceModelMatrix> {
    let n = b.n();
    if pat.n_vertices() != n {
        return Err(Error::InvalidArgument(format!(
            "pattern is over {} vertices but basis has {n}",
            pat.n_vertices()
        )));
    }
    let k = pat.len();
    let sub_u = b.eigenvectors().select_rows(pat.selected());
    let matrix = DMatrix::from_fn(k * k, n, |row, col| {
        let (a, bb) = (row % k, row / k);
        sub_u[(a, col)] * sub_u[(bb, col)]
    });
    Ok(CovarianceModelMatrix {
        domain: Domain::Spectral,
        matrix,
        pattern: pat.clone(),
        order: None,
        column_norms: vec![1.0; n],
        rows: RowSet::Full,
    })
}

/// `S^0, S^1, ..., S^{q_order - 1}` by repeated multiplication.
pub fn shift_powers(s: &ShiftOperator, q_order: usize) -> Vec<DMatrix<f64>> {
    let n = s.n();
    let mut powers = Vec::with_capacity(q_order);
    let mut current = DMatrix::identity(n, n);
    for q in 0..q_order {
        if q > 0 {
            current = s.matrix() * &current;
        }
        powers.push(current.clone());
    }
    powers
}

/// Column `q` is `vec((S^q)|X x X)`, `q = 0..q_order`. No eigendecomposition
/// is involved.
pub fn build_vertex_model(
    s: &ShiftOperator,
    pat: &SamplingPattern,
    q_order: usize,
) -> Result<CovarianceModelMatrix> {
    let n = s.n();
    if pat.n_vertices() != n {
        return Err(Error::InvalidArgument(format!(
            "pattern is over {} vertices but shift operator has {n}",
            pat.n_vertices()
        )));
    }
    if q_order == 0 || q_order > n {
        return Err(Error::InvalidArgument(format!("order Q must lie in 1..={n}, got {q_order}")));
    }
    let k = pat.len();
    let sel = pat.selected();
    let powers = shift_powers(s, q_order);
    let mut matrix = DMatrix::zeros(k * k, q_order);
    let mut column_norms = Vec::with_capacity(q_order);
    for (q, p) in powers.iter().enumerate() {
        for bb in 0..k {
            for a in 0..k {
                matrix[(a + bb * k, q)] = p[(sel[a], sel[bb])];
            }
        }
        column_norms.push(p.norm());
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("shift operator powers up to {}", q_order - 1)));
    }
    Ok(CovarianceModelMatrix {
        domain: Domain::Vertex,
        matrix,
        pattern: pat.clone(),
        order: Some(q_order),
        column_norms,
        rows: RowSet::Full,
    })
}
