use std::fs;
use std::time::Instant;

use serde::Serialize;

use super::config::{ExperimentConfig, FilterSpec, GraphSource, SamplerSpec};
use super::output;
use crate::design::{greedy_design, random_design, DesignObjective, GreedyTrace};
use crate::error::Error;
use crate::graph::{build_shift, load_graph, random_sensor_graph, Graph, ShiftOperator};
use crate::sampling::{
    build_spectral_model, build_vertex_model, estimate_spectrum_spectral, estimate_spectrum_vertex,
    nmse, subsampled_covariance, Domain, SamplingPattern, SpectrumEstimate,
};
use crate::spectral::{
    eigendecompose, lowpass_exp_filter, sample_covariance, synthesize, true_covariance,
    true_power_spectrum, CovarianceEstimate, GraphFilter, SpectralBasis,
};

/// A pipeline failure tagged with the stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("stage `{stage}` failed: {source}")]
pub struct ExperimentError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, ExperimentError>;
}

impl<T> Stage<T> for crate::error::Result<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, ExperimentError> {
        self.map_err(|source| ExperimentError { stage, source })
    }
}

pub type ExperimentOutcome<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub domain: Domain,
    pub n: usize,
    pub k: usize,
    pub q: Option<usize>,
    pub n_snapshots: usize,
    pub seed: u64,
    pub sampler: String,
    pub eigenvalues: Vec<f64>,
    pub p_true: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub alpha_hat: Option<Vec<f64>>,
    pub pattern: SamplingPattern,
    pub rank: usize,
    pub rank_ok: bool,
    pub rank_threshold: f64,
    pub residual_norm: f64,
    pub nmse: f64,
    #[serde(skip)]
    pub trace: Option<GreedyTrace>,
    #[serde(skip)]
    pub coordinates: Option<Vec<[f64; 2]>>,
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
}

/// The configuration-dependent pieces shared by every pattern and seed.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub graph: Graph,
    pub shift: ShiftOperator,
    pub basis: SpectralBasis,
    pub filter: GraphFilter,
    pub p_true: Vec<f64>,
    pub population: CovarianceEstimate,
}

#[derive(Default)]
struct Timer(Vec<StageTiming>);

impl Timer {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push(StageTiming { stage, seconds: start.elapsed().as_secs_f64() });
        out
    }
}

pub fn prepare(cfg: &ExperimentConfig) -> ExperimentOutcome<Prepared> {
    prepare_timed(cfg, &mut Timer::default())
}

fn prepare_timed(cfg: &ExperimentConfig, t: &mut Timer) -> ExperimentOutcome<Prepared> {
    cfg.validate().stage("config")?;
    let graph = t
        .time("graph", || match &cfg.graph {
            GraphSource::Sensor { n, k_neighbors, seed } => random_sensor_graph(*n, *k_neighbors, *seed),
            GraphSource::File(path) => load_graph(path),
        })
        .stage("graph")?;
    let n = graph.n_vertices();
    if cfg.k > n || cfg.q > n {
        return Err(Error::InvalidArgument(format!(
            "K = {} and Q = {} must not exceed N = {n}",
            cfg.k, cfg.q
        )))
        .stage("config");
    }
    let shift = build_shift(&graph, cfg.shift);
    let basis = t.time("basis", || eigendecompose(&shift)).stage("basis")?;
    let filter = match &cfg.filter {
        FilterSpec::Coefficients(c) => GraphFilter::new(c.clone()),
        FilterSpec::LowpassExp { rate, taps } => lowpass_exp_filter(&basis, *rate, *taps),
    }
    .stage("filter")?;
    let p_true = true_power_spectrum(&filter, &basis).into_inner().as_slice().to_vec();
    let population = true_covariance(&filter, &basis);
    Ok(Prepared { graph, shift, basis, filter, p_true, population })
}

impl Prepared {
    pub fn n(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn objective(&self, cfg: &ExperimentConfig) -> crate::error::Result<DesignObjective> {
        match cfg.domain {
            Domain::Spectral => DesignObjective::spectral(&self.basis, cfg.objective.kind, cfg.objective.epsilon),
            Domain::Vertex => {
                DesignObjective::vertex(&self.shift, cfg.q, cfg.objective.kind, cfg.objective.epsilon)
            }
        }
    }

    /// Population covariance or the sample covariance of `n_snapshots`
    /// realizations drawn with `seed`.
    pub fn covariance(&self, cfg: &ExperimentConfig, seed: u64) -> crate::error::Result<CovarianceEstimate> {
        if cfg.use_population_covariance {
            Ok(self.population.clone())
        } else {
            let x = synthesize(&self.filter, &self.basis, cfg.n_snapshots, seed)?;
            sample_covariance(&x)
        }
    }

    /// Builds the domain's model for `pattern` and solves least squares.
    pub fn estimate(
        &self,
        cfg: &ExperimentConfig,
        covariance: &CovarianceEstimate,
        pattern: &SamplingPattern,
    ) -> crate::error::Result<SpectrumEstimate> {
        let r_y = subsampled_covariance(covariance, pattern)?;
        match cfg.domain {
            Domain::Spectral => estimate_spectrum_spectral(&r_y, &build_spectral_model(&self.basis, pattern)?),
            Domain::Vertex => {
                estimate_spectrum_vertex(&r_y, &build_vertex_model(&self.shift, pattern, cfg.q)?, &self.basis)
            }
        }
    }
}

fn choose_pattern(
    prep: &Prepared,
    cfg: &ExperimentConfig,
) -> crate::error::Result<(SamplingPattern, Option<GreedyTrace>)> {
    let n = prep.n();
    match &cfg.sampler {
        SamplerSpec::Greedy => {
            let obj = prep.objective(cfg)?;
            let (pattern, trace) = greedy_design(&obj, cfg.k, n)?;
            Ok((pattern, Some(trace)))
        }
        SamplerSpec::Random => Ok((random_design(cfg.k, n, cfg.seed)?, None)),
        SamplerSpec::File(path) => {
            let pattern: SamplingPattern = serde_json::from_str(&fs::read_to_string(path)?)?;
            if pattern.n_vertices() != n {
                return Err(Error::InvalidArgument(format!(
                    "pattern file is over {} vertices, graph has {n}",
                    pattern.n_vertices()
                )));
            }
            Ok((pattern, None))
        }
    }
}

fn run_inner(cfg: &ExperimentConfig) -> ExperimentOutcome<ExperimentResult> {
    let mut t = Timer::default();
    let prep = prepare_timed(cfg, &mut t)?;
    let covariance = t.time("covariance", || prep.covariance(cfg, cfg.seed)).stage("covariance")?;
    let (pattern, trace) = t.time("design", || choose_pattern(&prep, cfg)).stage("design")?;
    let est = t.time("estimate", || prep.estimate(cfg, &covariance, &pattern)).stage("estimate")?;

    Ok(ExperimentResult {
        domain: cfg.domain,
        n: prep.n(),
        k: pattern.len(),
        q: (cfg.domain == Domain::Vertex).then_some(cfg.q),
        n_snapshots: if cfg.use_population_covariance { 0 } else { cfg.n_snapshots },
        seed: cfg.seed,
        sampler: cfg.sampler.name().to_string(),
        eigenvalues: prep.basis.eigenvalues().as_slice().to_vec(),
        nmse: nmse(&est.p_hat, &prep.p_true),
        p_true: prep.p_true,
        p_hat: est.p_hat,
        alpha_hat: est.alpha_hat,
        pattern,
        rank: est.rank,
        rank_ok: est.rank_ok,
        rank_threshold: est.rank_threshold,
        residual_norm: est.residual_norm,
        trace,
        coordinates: prep.graph.coordinates().map(<[_]>::to_vec),
        timings: t.0,
    })
}

/// Runs the full pipeline. With `output_dir` set, results (or a
/// `failure.json` naming the failed stage) are written there.
pub fn run_experiment(cfg: &ExperimentConfig) -> ExperimentOutcome<ExperimentResult> {
    let outcome = run_inner(cfg);
    if let Some(dir) = &cfg.output_dir {
        match &outcome {
            Ok(result) => output::write_outputs(result, dir).stage("output")?,
            Err(e) => {
                // The original error is more useful than a secondary write failure.
                let _ = output::write_failure(e, dir);
            }
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(domain: Domain) -> ExperimentConfig {
        ExperimentConfig {
            graph: GraphSource::Sensor { n: 30, k_neighbors: 5, seed: 2 },
            filter: FilterSpec::LowpassExp { rate: 3.0, taps: 3 },
            domain,
            k: 10,
            q: 5,
            n_snapshots: 200,
            ..Default::default()
        }
    }

    #[test]
    fn population_runs_recover_exactly() {
        for domain in [Domain::Spectral, Domain::Vertex] {
            let cfg = ExperimentConfig { use_population_covariance: true, ..small(domain) };
            let r = run_experiment(&cfg).unwrap();
            assert!(r.rank_ok, "{domain:?}");
            assert!(r.nmse < 1e-12, "{domain:?}: {}", r.nmse);
            assert_eq!(r.n_snapshots, 0);
            assert!(r.trace.is_some());
        }
    }

    #[test]
    fn sample_run_is_deterministic() {
        let cfg = small(Domain::Spectral);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.p_hat, b.p_hat);
        assert_eq!(a.pattern, b.pattern);
        assert!(a.nmse > 0.0);
    }

    #[test]
    fn random_sampler() {
        let cfg = ExperimentConfig { sampler: SamplerSpec::Random, ..small(Domain::Spectral) };
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.pattern, random_design(10, 30, cfg.seed).unwrap());
        assert!(r.trace.is_none());
    }

    #[test]
    fn failure_names_stage() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            graph: GraphSource::File(dir.path().join("missing.txt")),
            output_dir: Some(dir.path().to_path_buf()),
            ..small(Domain::Spectral)
        };
        let err = run_experiment(&cfg).unwrap_err();
        assert_eq!(err.stage, "graph");
        let record = fs::read_to_string(dir.path().join("failure.json")).unwrap();
        assert!(record.contains("\"graph\""));
    }

    #[test]
    fn k_larger_than_file_graph_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        crate::graph::save_graph(&random_sensor_graph(8, 2, 1).unwrap(), &path).unwrap();
        let cfg = ExperimentConfig { graph: GraphSource::File(path), ..small(Domain::Spectral) };
        assert_eq!(run_experiment(&cfg).unwrap_err().stage, "config");
    }
}
