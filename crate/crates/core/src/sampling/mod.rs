//! Vertex subsampling and least-squares recovery of the power spectrum.

mod estimate;
mod model;
mod pattern;

pub use estimate::{
    estimate_spectrum_spectral, estimate_spectrum_spectral_reduced, estimate_spectrum_vertex, nmse,
    required_q, SpectrumEstimate,
};
pub use model::{
    build_spectral_model, build_vertex_model, shift_powers, CovarianceModelMatrix, Domain, RowSet,
};
pub use pattern::{subsample, subsampled_covariance, SamplingPattern};
