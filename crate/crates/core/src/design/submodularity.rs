//! Empirical checks of normalization, monotonicity and diminishing returns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DesignObjective;
use crate::error::{Error, Result};

/// Absolute slack allowed on every inequality.
pub const SLACK: f64 = 1e-9;

/// Largest ground set the checks accept.
pub const MAX_CHECK_VERTICES: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SubmodularityReport {
    pub trials: usize,
    /// `|f(empty)|`.
    pub normalization_error: f64,
    pub monotonicity_violations: usize,
    /// Largest `f(X) - f(Y)` seen for `X subset Y`.
    pub max_monotonicity_violation: f64,
    pub diminishing_returns_violations: usize,
    /// Largest `[f(Y + s) - f(Y)] - [f(X + s) - f(X)]` seen.
    pub max_diminishing_returns_violation: f64,
}

impl SubmodularityReport {
    pub fn passed(&self) -> bool {
        self.normalization_error <= SLACK
            && self.monotonicity_violations == 0
            && self.diminishing_returns_violations == 0
    }

    fn record(&mut self, obj: &DesignObjective, x: &[usize], y: &[usize], s: usize) -> Result<()> {
        let fx = obj.value(x)?;
        let fy = obj.value(y)?;
        let mut xs = x.to_vec();
        xs.push(s);
        let mut ys = y.to_vec();
        ys.push(s);
        let gain_x = obj.value(&xs)? - fx;
        let gain_y = obj.value(&ys)? - fy;

        let mono = fx - fy;
        self.max_monotonicity_violation = self.max_monotonicity_violation.max(mono);
        if mono > SLACK {
            self.monotonicity_violations += 1;
        }
        let dr = gain_y - gain_x;
        self.max_diminishing_returns_violation = self.max_diminishing_returns_violation.max(dr);
        if dr > SLACK {
            self.diminishing_returns_violations += 1;
        }
        self.trials += 1;
        Ok(())
    }
}

fn check_size(obj: &DesignObjective) -> Result<()> {
    if obj.n() < 2 || obj.n() > MAX_CHECK_VERTICES {
        return Err(Error::InvalidArgument(format!(
            "submodularity checks need 2..={MAX_CHECK_VERTICES} vertices, got {}",
            obj.n()
        )));
    }
    Ok(())
}

/// Samples `trials` chains `X subset Y subset N \ {s}` and checks the set
/// function properties on each.
pub fn check_submodularity(obj: &DesignObjective, trials: usize, seed: u64) -> Result<SubmodularityReport> {
    check_size(obj)?;
    let n = obj.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SubmodularityReport { normalization_error: obj.value(&[])?.abs(), ..Default::default() };
    for _ in 0..trials {
        let s = rng.random_range(0..n);
        let y: Vec<usize> = (0..n).filter(|&v| v != s && rng.random_bool(0.5)).collect();
        let x: Vec<usize> = y.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        report.record(obj, &x, &y, s)?;
    }
    Ok(report)
}

/// Every chain `X subset Y subset N \ {s}` for every `s`.
pub fn check_submodularity_exhaustive(obj: &DesignObjective) -> Result<SubmodularityReport> {
    check_size(obj)?;
    let n = obj.n();
    let mut report = SubmodularityReport { normalization_error: obj.value(&[])?.abs(), ..Default::default() };
    let members = |mask: u32| (0..n).filter(|&v| mask & (1 << v) != 0).collect::<Vec<_>>();
    for s in 0..n {
        let rest = ((1u32 << n) - 1) & !(1 << s);
        // Enumerate Y over subsets of `rest`, then X over subsets of Y.
        let mut y = rest;
        loop {
            let mut x = y;
            loop {
                report.record(obj, &members(x), &members(y), s)?;
                if x == 0 {
                    break;
                }
                x = (x - 1) & y;
            }
            if y == 0 {
                break;
            }
            y = (y - 1) & rest;
        }
    }
    Ok(report)
}
