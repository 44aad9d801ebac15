use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ShiftOperator;
use crate::sampling::shift_powers;
use crate::spectral::SpectralBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `log det(G + eps I) - M log eps`.
    #[default]
    LogDetEps,
    /// `tr(G^T G)`.
    FramePotential,
}

/// Set function over vertex subsets `X`, evaluated on the Gram matrix
/// `G(X) = sum_{(i, j) in X x X} psi_ij psi_ij^T` of the selected model rows.
#[derive(Debug, Clone)]
pub struct DesignObjective {
    kind: ObjectiveKind,
    epsilon: f64,
    n: usize,
    /// `M x N^2`; column `i + j * N` is `psi_ij`.
    rows: DMatrix<f64>,
}

impl DesignObjective {
    /// `rows` holds `psi_ij` in column `i + j * n`. With `epsilon = None` the
    /// regularizer defaults to `1e-8` times the mean squared row norm.
    pub fn from_rows(
        kind: ObjectiveKind,
        n: usize,
        rows: DMatrix<f64>,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        if n == 0 || rows.ncols() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} row vectors for {n} vertices, got {}",
                n * n,
                rows.ncols()
            )));
        }
        if rows.nrows() == 0 {
            return Err(Error::InvalidArgument("row vectors must be nonempty".into()));
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design row vectors".into()));
        }
        let epsilon = match epsilon {
            Some(e) => e,
            None => {
                let mean_sq = rows.norm_squared() / rows.ncols() as f64;
                1e-8 * if mean_sq > 0.0 { mean_sq } else { 1.0 }
            }
        };
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(DesignObjective { kind, epsilon, n, rows })
    }

    /// Rows of `Psi_s = U o U`: `psi_ij[n] = U[i, n] U[j, n]`.
    pub fn spectral(b: &SpectralBasis, kind: ObjectiveKind, epsilon: Option<f64>) -> Result<Self> {
        let n = b.n();
        let u = b.eigenvectors();
        let rows = DMatrix::from_fn(n, n * n, |m, col| {
            let (i, j) = (col % n, col / n);
            u[(i, m)] * u[(j, m)]
        });
        Self::from_rows(kind, n, rows, epsilon)
    }

    /// Rows of `Psi_v`: `psi_ij[q] = (S^q)[i, j]`, each column `vec(S^q)`
    /// scaled to unit norm so that high powers do not swamp the Gram matrix.
    pub fn vertex(s: &ShiftOperator, q_order: usize, kind: ObjectiveKind, epsilon: Option<f64>) -> Result<Self> {
        let n = s.n();
        if q_order == 0 || q_order > n {
            return Err(Error::InvalidArgument(format!("order Q must lie in 1..={n}, got {q_order}")));
        }
        let powers = shift_powers(s, q_order);
        let mut rows = DMatrix::zeros(q_order, n * n);
        for (q, p) in powers.iter().enumerate() {
            let norm = p.norm();
            let scale = if norm > 0.0 && norm.is_finite() { 1.0 / norm } else { 1.0 };
            for (col, v) in p.as_slice().iter().enumerate() {
                rows[(q, col)] = v * scale;
            }
        }
        Self::from_rows(kind, n, rows, epsilon)
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Ground-set size `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row dimension `M`.
    pub fn dim(&self) -> usize {
        self.rows.nrows()
    }

    pub fn row(&self, i: usize, j: usize) -> &[f64] {
        let m = self.dim();
        let col = i + j * self.n;
        &self.rows.as_slice()[col * m..(col + 1) * m]
    }

    /// `G(X)`, without the regularizer.
    pub fn gram(&self, x_set: &[usize]) -> DMatrix<f64> {
        let m = self.dim();
        let mut g = DMatrix::zeros(m, m);
        for &i in x_set {
            for &j in x_set {
                let psi = nalgebra::DVectorView::from_slice(self.row(i, j), m);
                g.ger(1.0, &psi, &psi, 1.0);
            }
        }
        g
    }

    fn check_set(&self, x_set: &[usize]) -> Result<()> {
        if let Some(&bad) = x_set.iter().find(|&&v| v >= self.n) {
            return Err(Error::InvalidArgument(format!("vertex {bad} out of range 0..{}", self.n)));
        }
        let mut sorted = x_set.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("vertex repeated in set".into()));
        }
        Ok(())
    }

    /// `f(X)`; `f(empty) = 0` exactly for both kinds.
    pub fn value(&self, x_set: &[usize]) -> Result<f64> {
        self.check_set(x_set)?;
        if x_set.is_empty() {
            return Ok(0.0);
        }
        let g = self.gram(x_set);
        match self.kind {
            ObjectiveKind::LogDetEps => regularized_logdet(&g, self.epsilon),
            ObjectiveKind::FramePotential => Ok(g.norm_squared()),
        }
    }
}

/// `log det(G + eps I) - M log eps`, computed as `log det(I + G / eps)` via
/// Cholesky.
pub(crate) fn regularized_logdet(g: &DMatrix<f64>, epsilon: f64) -> Result<f64> {
    let m = g.nrows();
    let a = g / epsilon + DMatrix::identity(m, m);
    let chol = Cholesky::new(a).ok_or_else(|| Error::NonFinite("regularized Gram matrix".into()))?;
    let value: f64 = chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    if !value.is_finite() {
        return Err(Error::NonFinite("log-determinant".into()));
    }
    Ok(value)
}

pub fn objective_value(obj: &DesignObjective, x_set: &[usize]) -> Result<f64> {
    obj.value(x_set)
}
