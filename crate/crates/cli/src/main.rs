use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphpsd_core::design::{greedy_design, random_design};
use graphpsd_core::experiment::{
    checks, compression_sweep, prepare, rank_scan_csv, rank_scan_prepared, run_experiment, smallest_rank_ok,
    sweep_csv, ExperimentError, GraphSource, SamplerSpec,
};
use graphpsd_core::graph::{random_sensor_graph, save_graph};
use graphpsd_core::{Domain, Error, ExperimentConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "graphpsd", version, about = "Graph power spectrum estimation from subsampled covariances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random sensor graph and write it to `<out>/graph.txt`.
    GenGraph(Common),
    /// Choose a sampling pattern and write `pattern.json` (and `trace.json` for greedy).
    Design(Common),
    /// Estimate the power spectrum from a given pattern file.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// `pattern.json` produced by `design`.
        #[arg(long)]
        pattern: PathBuf,
    },
    /// Full pipeline: graph, filter, snapshots, design, estimate, result files.
    Run(Common),
    /// NMSE against K for greedy and random samplers, plus a rank scan.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list of budgets.
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 15, 20, 30, 40, 50])]
        ks: Vec<usize>,
        /// Number of snapshot seeds per budget.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
    },
    /// Run the algebraic and submodularity property suites.
    Check(Common),
}

#[derive(Copy, Clone, ValueEnum)]
enum DomainArg {
    Spectral,
    Vertex,
}

#[derive(Copy, Clone, ValueEnum)]
enum SamplerArg {
    Greedy,
    Random,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Load the graph from a file instead of generating one.
    #[arg(long, conflicts_with = "n")]
    graph: Option<PathBuf>,
    /// Number of vertices of the generated sensor graph.
    #[arg(long)]
    n: Option<usize>,
    /// Nearest neighbours per vertex in the generated sensor graph.
    #[arg(long)]
    neighbors: Option<usize>,
    /// Graph generation seed.
    #[arg(long)]
    graph_seed: Option<u64>,
    /// Number of sampled vertices.
    #[arg(long)]
    k: Option<usize>,
    /// Number of covariance polynomial coefficients (vertex domain).
    #[arg(long)]
    q: Option<usize>,
    /// Number of signal snapshots; 0 uses the population covariance.
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    /// Seed for snapshots and the random sampler (and for the graph in `gen-graph`).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Numerical(String),
    CheckFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let msg = e.to_string();
        if e.source.is_numerical() {
            Failure::Numerical(msg)
        } else {
            Failure::Config(msg)
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &self.graph {
            cfg.graph = GraphSource::File(path.clone());
        }
        if self.n.is_some() || self.neighbors.is_some() || self.graph_seed.is_some() {
            let GraphSource::Sensor { n, k_neighbors, seed } = &mut cfg.graph else {
                return Err(Failure::Config("--n/--neighbors/--graph-seed need a generated graph".into()));
            };
            *n = self.n.unwrap_or(*n);
            *k_neighbors = self.neighbors.unwrap_or(*k_neighbors);
            *seed = self.graph_seed.unwrap_or(*seed);
        }
        if let Some(k) = self.k {
            cfg.k = k;
        } else if let GraphSource::Sensor { n, .. } = cfg.graph {
            cfg.k = cfg.k.min(n);
        }
        if let Some(q) = self.q {
            cfg.q = q;
        } else if let GraphSource::Sensor { n, .. } = cfg.graph {
            cfg.q = cfg.q.min(n);
        }
        match self.snapshots {
            Some(0) => cfg.use_population_covariance = true,
            Some(ns) => {
                cfg.n_snapshots = ns;
                cfg.use_population_covariance = false;
            }
            None => {}
        }
        if let Some(d) = self.domain {
            cfg.domain = match d {
                DomainArg::Spectral => Domain::Spectral,
                DomainArg::Vertex => Domain::Vertex,
            };
        }
        if let Some(s) = self.sampler {
            cfg.sampler = match s {
                SamplerArg::Greedy => SamplerSpec::Greedy,
                SamplerArg::Random => SamplerSpec::Random,
            };
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.output_dir = Some(self.out.clone());
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn gen_graph(common: &Common) -> Result<(), Failure> {
    let cfg = common.resolve()?;
    let GraphSource::Sensor { n, k_neighbors, seed } = cfg.graph else {
        return Err(Failure::Config("gen-graph needs a generated graph, not a file".into()));
    };
    let seed = common.seed.unwrap_or(seed);
    let g = random_sensor_graph(n, k_neighbors, seed)?;
    fs::create_dir_all(&common.out)?;
    let path = common.out.join("graph.txt");
    save_graph(&g, &path)?;
    println!("wrote {} ({} vertices, {} edges)", path.display(), g.n_vertices(), g.edges().len());
    Ok(())
}

fn design(common: &Common) -> Result<(), Failure> {
    let cfg = common.resolve()?;
    let prep = prepare(&cfg)?;
    let n = prep.n();
    fs::create_dir_all(&common.out)?;
    let pattern = match cfg.sampler {
        SamplerSpec::Random => random_design(cfg.k, n, cfg.seed)?,
        _ => {
            let (pattern, trace) = greedy_design(&prep.objective(&cfg)?, cfg.k, n)?;
            write_json(&common.out.join("trace.json"), &trace)?;
            pattern
        }
    };
    write_json(&common.out.join("pattern.json"), &pattern)?;
    println!("selected {:?}", pattern.selected());
    Ok(())
}

fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let r = run_experiment(cfg)?;
    println!(
        "domain {:?}, N = {}, K = {}, rank {} ({}), nmse {:.4e}",
        r.domain,
        r.n,
        r.k,
        r.rank,
        if r.rank_ok { "full" } else { "deficient" },
        r.nmse
    );
    Ok(())
}

fn sweep(common: &Common, ks: &[usize], seeds: usize) -> Result<(), Failure> {
    let cfg = common.resolve()?;
    let rows = compression_sweep(&cfg, ks, seeds)?;
    fs::create_dir_all(&common.out)?;
    fs::write(common.out.join("sweep.csv"), sweep_csv(&rows))?;
    print!("{}", sweep_csv(&rows));

    let prep = prepare(&ExperimentConfig { k: 1, q: 1, ..cfg.clone() })?;
    let hi = (prep.n().isqrt() + 8).min(prep.n());
    let scan = rank_scan_prepared(&prep, cfg.objective.kind, cfg.objective.epsilon, 1..=hi)?;
    fs::write(common.out.join("rank_scan.csv"), rank_scan_csv(&scan))?;
    match smallest_rank_ok(&scan) {
        Some(k) => println!("smallest full-rank greedy K: {k}"),
        None => println!("no greedy K <= {hi} gives full rank"),
    }
    Ok(())
}

fn check(common: &Common) -> Result<(), Failure> {
    let seed = common.seed.unwrap_or(0);
    let outcomes = checks::run_all(seed)?;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    fs::create_dir_all(&common.out)?;
    write_json(&common.out.join("checks.json"), &outcomes)?;
    if outcomes.iter().all(|o| o.passed) {
        Ok(())
    } else {
        Err(Failure::CheckFailed)
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenGraph(c) => gen_graph(&c),
        Command::Design(c) => design(&c),
        Command::Estimate { common, pattern } => {
            let cfg = ExperimentConfig { sampler: SamplerSpec::File(pattern), ..common.resolve()? };
            run(&cfg)
        }
        Command::Run(c) => run(&c.resolve()?),
        Command::Sweep { common, ks, seeds } => sweep(&common, &ks, seeds),
        Command::Check(c) => check(&c),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::CheckFailed) => ExitCode::from(EXIT_CHECK_FAILED),
    }
}
