use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::ObjectiveKind;
use crate::error::{Error, Result};
use crate::graph::ShiftKind;
use crate::sampling::Domain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Sensor { n: usize, k_neighbors: usize, seed: u64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterSpec {
    Coefficients(Vec<f64>),
    /// Least-squares polynomial fit of `exp(-rate * lambda / lambda_max)`.
    LowpassExp { rate: f64, taps: usize },
}

impl FilterSpec {
    pub fn taps(&self) -> usize {
        match self {
            FilterSpec::Coefficients(c) => c.len(),
            FilterSpec::LowpassExp { taps, .. } => *taps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplerSpec {
    #[default]
    Greedy,
    /// Uniform subset seeded from the experiment seed.
    Random,
    /// A `pattern.json` file.
    File(PathBuf),
}

impl SamplerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerSpec::Greedy => "greedy",
            SamplerSpec::Random => "random",
            SamplerSpec::File(_) => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ObjectiveSpec {
    #[serde(default)]
    pub kind: ObjectiveKind,
    /// `None` selects the scaled default.
    #[serde(default)]
    pub epsilon: Option<f64>,
}

/// Everything needed to reproduce a run. All randomness derives from
/// `graph.seed` and `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub shift: ShiftKind,
    pub filter: FilterSpec,
    pub n_snapshots: usize,
    /// Seeds snapshot synthesis and the random sampler.
    pub seed: u64,
    pub domain: Domain,
    pub k: usize,
    pub q: usize,
    pub sampler: SamplerSpec,
    pub objective: ObjectiveSpec,
    pub use_population_covariance: bool,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    /// 100-vertex sensor graph, 7-tap lowpass, 1000 snapshots, greedy
    /// spectral-domain design with `K = 50`.
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSource::Sensor { n: 100, k_neighbors: 6, seed: 1 },
            shift: ShiftKind::Laplacian,
            filter: FilterSpec::LowpassExp { rate: 3.0, taps: 7 },
            n_snapshots: 1000,
            seed: 0,
            domain: Domain::Spectral,
            k: 50,
            q: 13,
            sampler: SamplerSpec::Greedy,
            objective: ObjectiveSpec::default(),
            use_population_covariance: false,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks what can be checked without building the graph.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if let GraphSource::Sensor { n, k_neighbors, .. } = self.graph {
            if n < 2 || k_neighbors == 0 || k_neighbors >= n {
                return bad(format!("sensor graph needs n >= 2 and 1 <= k_neighbors < n, got n={n}, k_neighbors={k_neighbors}"));
            }
            if self.k > n {
                return bad(format!("K = {} exceeds N = {n}", self.k));
            }
            if self.q > n {
                return bad(format!("Q = {} exceeds N = {n}", self.q));
            }
        }
        if self.k == 0 {
            return bad("K must be positive".into());
        }
        if self.q == 0 {
            return bad("Q must be positive".into());
        }
        if self.filter.taps() == 0 {
            return bad("filter needs at least one tap".into());
        }
        if !self.use_population_covariance && self.n_snapshots == 0 {
            return bad("n_snapshots must be positive".into());
        }
        if let Some(e) = self.objective.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be positive, got {e}"));
            }
        }
        Ok(())
    }
}
