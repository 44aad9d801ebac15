use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::CovarianceEstimate;

/// Set of `K` observed vertices out of `N`, kept in increasing order.
///
/// The row order of the selection matrix follows this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct SamplingPattern {
    n_vertices: usize,
    selected: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    n_vertices: usize,
    selected: Vec<usize>,
}

impl TryFrom<PatternRepr> for SamplingPattern {
    type Error = Error;
    fn try_from(r: PatternRepr) -> Result<Self> {
        SamplingPattern::new(r.n_vertices, r.selected)
    }
}

impl From<SamplingPattern> for PatternRepr {
    fn from(p: SamplingPattern) -> Self {
        PatternRepr { n_vertices: p.n_vertices, selected: p.selected }
    }
}

impl SamplingPattern {
    /// Accepts indices in any order; duplicates and out-of-range indices are
    /// rejected.
    pub fn new(n_vertices: usize, mut selected: Vec<usize>) -> Result<Self> {
        selected.sort_unstable();
        if selected.is_empty() {
            return Err(Error::InvariantViolation("sampling pattern selects no vertices".into()));
        }
        if let Some(&last) = selected.last() {
            if last >= n_vertices {
                return Err(Error::InvariantViolation(format!(
                    "vertex {last} out of range for {n_vertices} vertices"
                )));
            }
        }
        if let Some(w) = selected.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvariantViolation(format!("vertex {} selected twice", w[0])));
        }
        Ok(SamplingPattern { n_vertices, selected })
    }

    pub fn full(n_vertices: usize) -> Self {
        SamplingPattern { n_vertices, selected: (0..n_vertices).collect() }
    }

    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        let sel = mask.iter().enumerate().filter(|(_, &w)| w).map(|(i, _)| i).collect();
        Self::new(mask.len(), sel)
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut w = vec![false; self.n_vertices];
        for &i in &self.selected {
            w[i] = true;
        }
        w
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// `K`.
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.selected.binary_search(&v).is_ok()
    }
}

/// `Phi x`: the selected rows of `x` (a vector or an `N x N_s` matrix).
pub fn subsample(x: &DMatrix<f64>, pat: &SamplingPattern) -> Result<DMatrix<f64>> {
    if x.nrows() != pat.n_vertices() {
        return Err(Error::InvalidArgument(format!(
            "signal has {} rows but pattern is over {} vertices",
            x.nrows(),
            pat.n_vertices()
        )));
    }
    Ok(x.select_rows(pat.selected()))
}

/// `Phi R Phi^T`: the principal submatrix on the selected vertices.
pub fn subsampled_covariance(r: &CovarianceEstimate, pat: &SamplingPattern) -> Result<CovarianceEstimate> {
    if r.dim() != pat.n_vertices() {
        return Err(Error::InvalidArgument(format!(
            "covariance is {0}x{0} but pattern is over {1} vertices",
            r.dim(),
            pat.n_vertices()
        )));
    }
    let sub = r.matrix().select_rows(pat.selected()).select_columns(pat.selected());
    CovarianceEstimate::new(sub, r.n_snapshots())
}
