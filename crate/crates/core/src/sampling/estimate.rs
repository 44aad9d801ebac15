use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{CovarianceModelMatrix, Domain};
use crate::error::{Error, Result};
use crate::spectral::{CovarianceEstimate, PowerSpectrum, SpectralBasis};

/// Least-squares power spectrum estimate.
///
/// `p_hat` is the raw solution and may dip below zero under sampling noise;
/// use [`SpectrumEstimate::clamped`] for the nonnegative projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub domain: Domain,
    pub p_hat: Vec<f64>,
    /// Polynomial covariance coefficients; `p_hat = V_Q alpha_hat`.
    pub alpha_hat: Option<Vec<f64>>,
    pub residual_norm: f64,
    pub rank: usize,
    pub rank_ok: bool,
    /// Singular-value cutoff used for the rank decision.
    pub rank_threshold: f64,
}

impl SpectrumEstimate {
    pub fn clamped(&self) -> PowerSpectrum {
        let v = DVector::from_iterator(self.p_hat.len(), self.p_hat.iter().map(|p| p.max(0.0)));
        PowerSpectrum::new(v).expect("clamped values are nonnegative")
    }

    /// `||p_hat - p||^2 / ||p||^2`.
    pub fn nmse(&self, p_true: &DVector<f64>) -> f64 {
        nmse(&self.p_hat, p_true.as_slice())
    }
}

pub fn nmse(p_hat: &[f64], p_true: &[f64]) -> f64 {
    let num: f64 = p_hat.iter().zip(p_true).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = p_true.iter().map(|b| b * b).sum();
    num / den
}

/// `Q = min(2L - 1, N)` polynomial coefficients describe the covariance of a
/// length-`L` filter's output.
pub fn required_q(filter_length: usize, n: usize) -> usize {
    (2 * filter_length).saturating_sub(1).min(n)
}

pub(crate) struct LsSolution {
    pub x: DVector<f64>,
    pub rank: usize,
    pub threshold: f64,
    pub residual_norm: f64,
}

/// Minimum-norm least squares via SVD, after scaling column `j` by
/// `1 / scale[j]`. Rank counts singular values above
/// `max(rows, cols) * eps * sigma_max` of the scaled matrix.
pub(crate) fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>, scale: &[f64]) -> Result<LsSolution> {
    let (m, n) = a.shape();
    debug_assert_eq!(scale.len(), n);
    let inv: Vec<f64> = scale.iter().map(|&s| if s > 0.0 && s.is_finite() { 1.0 / s } else { 1.0 }).collect();
    let mut scaled = a.clone();
    for (mut col, &c) in scaled.column_iter_mut().zip(&inv) {
        col *= c;
    }
    let svd = scaled.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let threshold = m.max(n) as f64 * f64::EPSILON * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > threshold).count();
    let z = svd
        .solve(y, threshold)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let x = DVector::from_iterator(n, z.iter().zip(&inv).map(|(zi, c)| zi * c));
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares solution".into()));
    }
    let residual_norm = (a * &x - y).norm();
    Ok(LsSolution { x, rank, threshold, residual_norm })
}

fn check_domain(model: &CovarianceModelMatrix, want: Domain) -> Result<()> {
    if model.domain() != want {
        return Err(Error::InvalidArgument(format!(
            "expected a {want:?}-domain model, got {:?}",
            model.domain()
        )));
    }
    Ok(())
}

/// `p_hat = (Phi U o Phi U)^+ r_y`.
pub fn estimate_spectrum_spectral(
    r_y: &CovarianceEstimate,
    model: &CovarianceModelMatrix,
) -> Result<SpectrumEstimate> {
    check_domain(model, Domain::Spectral)?;
    let y = DVector::from_vec(model.observation(r_y)?);
    let sol = least_squares(model.matrix(), &y, model.column_norms())?;
    Ok(SpectrumEstimate {
        domain: Domain::Spectral,
        rank_ok: sol.rank == model.n_unknowns(),
        p_hat: sol.x.as_slice().to_vec(),
        alpha_hat: None,
        residual_norm: sol.residual_norm,
        rank: sol.rank,
        rank_threshold: sol.threshold,
    })
}

/// Least squares restricted to the frequencies in `support`; the other
/// entries of `p_hat` are zero.
pub fn estimate_spectrum_spectral_reduced(
    r_y: &CovarianceEstimate,
    model: &CovarianceModelMatrix,
    support: &[usize],
) -> Result<SpectrumEstimate> {
    check_domain(model, Domain::Spectral)?;
    let n = model.n_unknowns();
    let mut cols = support.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if cols.is_empty() {
        return Err(Error::InvalidSupport("empty support".into()));
    }
    if cols.len() != support.len() {
        return Err(Error::InvalidSupport("repeated frequency index".into()));
    }
    if let Some(&bad) = cols.iter().find(|&&c| c >= n) {
        return Err(Error::InvalidSupport(format!("frequency index {bad} out of range 0..{n}")));
    }
    let y = DVector::from_vec(model.observation(r_y)?);
    let sub = model.matrix().select_columns(&cols);
    let scale: Vec<f64> = cols.iter().map(|&c| model.column_norms()[c]).collect();
    let sol = least_squares(&sub, &y, &scale)?;
    let mut p_hat = vec![0.0; n];
    for (&c, v) in cols.iter().zip(sol.x.iter()) {
        p_hat[c] = *v;
    }
    Ok(SpectrumEstimate {
        domain: Domain::Spectral,
        rank_ok: sol.rank == cols.len(),
        p_hat,
        alpha_hat: None,
        residual_norm: sol.residual_norm,
        rank: sol.rank,
        rank_threshold: sol.threshold,
    })
}

/// Graph covariance matching: `alpha_hat = [(Phi (x) Phi) Psi_v]^+ r_y`,
/// then `p_hat = V_Q alpha_hat` using all eigenvalues of `b`.
pub fn estimate_spectrum_vertex(
    r_y: &CovarianceEstimate,
    model: &CovarianceModelMatrix,
    b: &SpectralBasis,
) -> Result<SpectrumEstimate> {
    check_domain(model, Domain::Vertex)?;
    if b.n() != model.pattern().n_vertices() {
        return Err(Error::InvalidArgument("basis size does not match the model".into()));
    }
    let q = model.n_unknowns();
    let y = DVector::from_vec(model.observation(r_y)?);
    let sol = least_squares(model.matrix(), &y, model.column_norms())?;
    let p = b.vandermonde(q) * &sol.x;
    Ok(SpectrumEstimate {
        domain: Domain::Vertex,
        rank_ok: sol.rank == q,
        p_hat: p.as_slice().to_vec(),
        alpha_hat: Some(sol.x.as_slice().to_vec()),
        residual_norm: sol.residual_norm,
        rank: sol.rank,
        rank_threshold: sol.threshold,
    })
}
