//! Property suites run by `graphpsd check`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::{
    brute_force_design, check_submodularity, greedy_design, DesignObjective, GreedyState, ObjectiveKind,
};
use crate::error::Result;
use crate::graph::{build_laplacian, random_sensor_graph, ShiftOperator};
use crate::sampling::{build_spectral_model, build_vertex_model, SamplingPattern};
use crate::spectral::{eigendecompose, filter_matrix, frequency_response, GraphFilter, SpectralBasis};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Result<(ShiftOperator, SpectralBasis)> {
    let k = rng.random_range(2..=4.min(n - 1));
    let g = random_sensor_graph(n, k, rng.random())?;
    let s = build_laplacian(&g);
    let b = eigendecompose(&s)?;
    Ok((s, b))
}

fn random_pattern(rng: &mut ChaCha8Rng, n: usize) -> Result<SamplingPattern> {
    let k = rng.random_range(1..=n);
    SamplingPattern::new(n, rand::seq::index::sample(rng, n, k).into_vec())
}

/// Diminishing returns, monotonicity and normalization on 10 instances with
/// `n = 8`, 200 chains each.
pub fn submodularity_suite(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut trials, mut dr, mut mono, mut worst, mut norm) = (0, 0, 0, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let (_, b) = random_instance(&mut rng, 8)?;
        let obj = DesignObjective::spectral(&b, ObjectiveKind::LogDetEps, None)?;
        let r = check_submodularity(&obj, 200, rng.random())?;
        trials += r.trials;
        dr += r.diminishing_returns_violations;
        mono += r.monotonicity_violations;
        worst = worst.max(r.max_diminishing_returns_violation);
        norm = norm.max(r.normalization_error);
    }
    Ok(CheckOutcome {
        name: "submodularity",
        passed: dr == 0 && mono == 0 && norm <= crate::design::SLACK,
        detail: format!(
            "{trials} chains: {dr} diminishing-returns violations (max {worst:.3e}), {mono} monotonicity violations, |f(empty)| = {norm:e}"
        ),
    })
}

/// `f(greedy) >= (1 - 1/e) f(OPT)` on `N = 8`, `K = 3` instances.
pub fn greedy_bound_suite(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 1.0 - (-1.0f64).exp();
    let mut worst = f64::INFINITY;
    for i in 0..10 {
        let (s, b) = random_instance(&mut rng, 8)?;
        let obj = if i % 2 == 0 {
            DesignObjective::spectral(&b, ObjectiveKind::LogDetEps, None)?
        } else {
            DesignObjective::vertex(&s, 5, ObjectiveKind::LogDetEps, None)?
        };
        let (_, trace) = greedy_design(&obj, 3, 8)?;
        let (_, opt) = brute_force_design(&obj, 3, 8)?;
        worst = worst.min(trace.final_value / opt);
    }
    Ok(CheckOutcome {
        name: "greedy_bound",
        passed: worst >= bound,
        detail: format!("worst f(greedy)/f(OPT) = {worst:.4} (bound {bound:.4})"),
    })
}

/// `build_vertex_model == build_spectral_model * V_Q`.
pub fn model_equivalence_suite(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(5..=30);
        let (s, b) = random_instance(&mut rng, n)?;
        let pat = random_pattern(&mut rng, n)?;
        let q = rng.random_range(1..=n.min(8));
        let vm = build_vertex_model(&s, &pat, q)?;
        let sm = build_spectral_model(&b, &pat)?;
        let via = sm.matrix() * b.vandermonde(q);
        for c in 0..q {
            let scale = vm.column_norms()[c].max(1.0);
            let err = (vm.matrix().column(c) - via.column(c)).amax() / scale;
            worst = worst.max(err);
        }
    }
    Ok(CheckOutcome {
        name: "model_equivalence",
        passed: worst <= 1e-8,
        detail: format!("max scaled deviation {worst:e}"),
    })
}

/// `diag(U^T H H^T U) == (V_L h)^2`.
pub fn spectrum_consistency_suite(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(5..=30);
        let (_, b) = random_instance(&mut rng, n)?;
        let taps = rng.random_range(1..=5);
        let lmax = b.max_abs_eigenvalue().max(1.0);
        let h: Vec<f64> = (0..taps).map(|l| rng.random_range(-1.0..1.0) / lmax.powi(l)).collect();
        let f = GraphFilter::new(h)?;
        let hm = filter_matrix(&f, &b);
        let u = b.eigenvectors();
        let d = (u.transpose() * &hm * hm.transpose() * u).diagonal();
        let p: DVector<f64> = frequency_response(&f, &b).map(|r| r * r);
        let scale = p.amax().max(f64::MIN_POSITIVE);
        worst = worst.max((d - p).amax() / scale);
    }
    Ok(CheckOutcome {
        name: "spectrum_consistency",
        passed: worst <= 1e-8,
        detail: format!("max scaled deviation {worst:e}"),
    })
}

/// Incremental rank-one gains against from-scratch differences along greedy
/// runs.
pub fn incremental_gain_suite(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let n = rng.random_range(6..=20);
        let (_, b) = random_instance(&mut rng, n)?;
        let obj = DesignObjective::spectral(&b, ObjectiveKind::LogDetEps, None)?;
        let mut state = GreedyState::new(&obj);
        for _ in 0..rng.random_range(2..=n.min(6)) {
            let base = obj.value(state.chosen())?;
            let mut best = None;
            for c in (0..n).filter(|&c| !state.contains(c)) {
                let mut with = state.chosen().to_vec();
                with.push(c);
                let scratch = obj.value(&with)? - base;
                let inc = state.gain(c)?;
                worst = worst.max((inc - scratch).abs() / scratch.abs().max(1.0));
                if best.is_none_or(|(_, g)| inc > g) {
                    best = Some((c, inc));
                }
            }
            state.push(best.unwrap().0)?;
        }
    }
    Ok(CheckOutcome {
        name: "incremental_gain",
        passed: worst <= 1e-8,
        detail: format!("max relative deviation {worst:e}"),
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        spectrum_consistency_suite(seed)?,
        model_equivalence_suite(seed)?,
        incremental_gain_suite(seed)?,
        greedy_bound_suite(seed)?,
        submodularity_suite(seed)?,
    ])
}
