use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SpectralBasis;
use crate::error::{Error, Result};

/// Polynomial graph filter `H = sum_l h_l S^l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GraphFilter {
    coefficients: Vec<f64>,
}

impl GraphFilter {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("filter needs at least one coefficient".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("filter coefficients".into()));
        }
        Ok(GraphFilter { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of taps `L` (degree `L - 1`).
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl TryFrom<Vec<f64>> for GraphFilter {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        GraphFilter::new(v)
    }
}

impl From<GraphFilter> for Vec<f64> {
    fn from(f: GraphFilter) -> Self {
        f.coefficients
    }
}

/// Nonnegative power spectrum, ordered like the basis eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    values: DVector<f64>,
}

impl PowerSpectrum {
    pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

    /// Entries in `[-1e-12, 0)` are clamped to zero; anything more negative is
    /// rejected.
    pub fn new(mut values: DVector<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(Error::NonFinite("power spectrum".into()));
            }
            if *v < -Self::NEGATIVE_TOLERANCE {
                return Err(Error::InvariantViolation(format!("negative power spectrum entry {v}")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(PowerSpectrum { values })
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.values
    }
}

/// `V_L h`, the filter's response at each graph frequency.
pub fn frequency_response(f: &GraphFilter, b: &SpectralBasis) -> DVector<f64> {
    // Horner per eigenvalue; same values as the Vandermonde product.
    b.eigenvalues().map(|lambda| {
        f.coefficients().iter().rev().fold(0.0, |acc, &h| acc * lambda + h)
    })
}

/// `H = U diag(V_L h) U^T`.
pub fn filter_matrix(f: &GraphFilter, b: &SpectralBasis) -> DMatrix<f64> {
    b.synthesize_diag(&frequency_response(f, b))
}

/// `p_n = (V_L h)_n^2`.
pub fn true_power_spectrum(f: &GraphFilter, b: &SpectralBasis) -> PowerSpectrum {
    let p = frequency_response(f, b).map(|r| r * r);
    PowerSpectrum::new(p).expect("squares are nonnegative")
}

/// Lowpass filter with `taps` coefficients whose response approximates
/// `exp(-rate * lambda / lambda_max)` in the least-squares sense over the
/// graph's eigenvalues.
pub fn lowpass_exp_filter(b: &SpectralBasis, rate: f64, taps: usize) -> Result<GraphFilter> {
    if taps == 0 {
        return Err(Error::InvalidArgument("lowpass filter needs at least one tap".into()));
    }
    if !rate.is_finite() {
        return Err(Error::NonFinite("lowpass rate".into()));
    }
    let lmax = b.max_abs_eigenvalue();
    if lmax <= 0.0 {
        return Err(Error::InvalidArgument("lowpass fit needs a nonzero spectrum".into()));
    }
    // Fit in t = lambda / lambda_max to keep the Vandermonde system well scaled.
    let t: Vec<f64> = b.eigenvalues().iter().map(|l| l / lmax).collect();
    let v = super::vandermonde(&t, taps);
    let target = DVector::from_iterator(t.len(), t.iter().map(|&ti| (-rate * ti).exp()));
    let svd = v.svd(true, true);
    let c = svd
        .solve(&target, 1e-13 * svd.singular_values.max())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let h = c.iter().enumerate().map(|(l, cl)| cl / lmax.powi(l as i32)).collect();
    GraphFilter::new(h)
}
