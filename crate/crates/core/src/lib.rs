//! Power spectrum estimation for second-order stationary graph signals.
//!
//! The pipeline has four stages, each in its own module:
//!
//! - [`graph`]: undirected weighted graphs, shift operators (Laplacian or
//!   adjacency) and a seeded k-nearest-neighbour sensor-graph generator.
//! - [`spectral`]: graph Fourier basis, polynomial graph filters, synthesis of
//!   stationary signals by filtering white noise, and covariances.
//! - [`sampling`]: vertex subsampling, the spectral-domain (Khatri-Rao) and
//!   vertex-domain (polynomial covariance) linear models, and least-squares
//!   recovery of the power spectrum from a `K x K` subsampled covariance.
//! - [`design`]: greedy selection of the `K` vertices that maximize a
//!   regularized log-determinant of the model Gram matrix, plus brute-force
//!   and random baselines.
//!
//! [`experiment`] wires everything into reproducible end-to-end runs.
//!
//! All matrices are dense `nalgebra::DMatrix<f64>`. Vectorization is
//! column-major throughout, so `vec(R)` is exactly `R.as_slice()`.

pub mod design;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod sampling;
pub mod spectral;

pub use experiment::{ExperimentConfig, ExperimentResult};
pub use design::{DesignObjective, GreedyTrace, ObjectiveKind};
pub use error::{Error, Result};

pub use graph::{Graph, ShiftKind, ShiftOperator};
pub use sampling::{CovarianceModelMatrix, Domain, SamplingPattern, SpectrumEstimate};
pub use spectral::{CovarianceEstimate, GraphFilter, PowerSpectrum, SpectralBasis};

pub use nalgebra::{DMatrix, DVector};
