//! Greedy subset selection with incremental log-det gains.
//!
//! Adding a vertex `s` to `X` adds the rows `psi_sj`, `psi_js` for `j in X`
//! and `psi_ss` to the Gram matrix, i.e. `2|X| + 1` rank-one terms. The gain
//! for the log-det objective is accumulated while applying those terms as
//! Cholesky rank-one updates to a copy of the current factor of
//! `I + G(X) / eps`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DesignObjective, ObjectiveKind};
use crate::error::{Error, Result};
use crate::sampling::SamplingPattern;

/// Order in which the greedy algorithm picked vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub chosen: Vec<usize>,
    pub gains: Vec<f64>,
    pub final_value: f64,
    pub epsilon: f64,
    pub objective: ObjectiveKind,
}

impl GreedyTrace {
    /// Pattern formed by the first `k` picks. Greedy is prefix-consistent, so
    /// this equals the pattern a size-`k` run would return.
    pub fn prefix_pattern(&self, n: usize, k: usize) -> Result<SamplingPattern> {
        if k > self.chosen.len() {
            return Err(Error::InvalidArgument(format!(
                "trace holds {} picks, asked for {k}",
                self.chosen.len()
            )));
        }
        SamplingPattern::new(n, self.chosen[..k].to_vec())
    }
}

/// Selected set plus the Cholesky factor of `I + G(X) / eps`.
#[derive(Debug, Clone)]
pub struct GreedyState<'a> {
    obj: &'a DesignObjective,
    chosen: Vec<usize>,
    in_set: Vec<bool>,
    /// Lower-triangular `M x M`, column-major.
    factor: Vec<f64>,
    value: f64,
}

impl<'a> GreedyState<'a> {
    pub fn new(obj: &'a DesignObjective) -> Self {
        let m = obj.dim();
        let mut factor = vec![0.0; m * m];
        for i in 0..m {
            factor[i * m + i] = 1.0;
        }
        GreedyState { obj, chosen: Vec::new(), in_set: vec![false; obj.n()], factor, value: 0.0 }
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn contains(&self, s: usize) -> bool {
        self.in_set[s]
    }

    /// `f(X + s) - f(X)`.
    pub fn gain(&self, s: usize) -> Result<f64> {
        self.check_candidate(s)?;
        match self.obj.kind() {
            ObjectiveKind::LogDetEps => {
                let mut factor = self.factor.clone();
                Ok(self.absorb(&mut factor, s))
            }
            ObjectiveKind::FramePotential => {
                let mut with = self.chosen.clone();
                with.push(s);
                Ok(self.obj.value(&with)? - self.value)
            }
        }
    }

    /// Adds `s` to the set and returns the realized gain.
    pub fn push(&mut self, s: usize) -> Result<f64> {
        self.check_candidate(s)?;
        let gain = match self.obj.kind() {
            ObjectiveKind::LogDetEps => {
                let mut factor = std::mem::take(&mut self.factor);
                let g = self.absorb(&mut factor, s);
                self.factor = factor;
                g
            }
            ObjectiveKind::FramePotential => self.gain(s)?,
        };
        self.chosen.push(s);
        self.in_set[s] = true;
        self.value += gain;
        Ok(gain)
    }

    fn check_candidate(&self, s: usize) -> Result<()> {
        if s >= self.obj.n() {
            return Err(Error::InvalidArgument(format!("vertex {s} out of range 0..{}", self.obj.n())));
        }
        if self.in_set[s] {
            return Err(Error::InvalidArgument(format!("vertex {s} already selected")));
        }
        Ok(())
    }

    /// Applies the `2|X| + 1` rank-one terms for candidate `s` to `factor`
    /// and returns the log-det increment.
    fn absorb(&self, factor: &mut [f64], s: usize) -> f64 {
        let m = self.obj.dim();
        let scale = 1.0 / self.obj.epsilon().sqrt();
        let mut work = vec![0.0; m];
        let mut total = 0.0;
        let mut apply = |row: &[f64], factor: &mut [f64]| {
            for (w, r) in work.iter_mut().zip(row) {
                *w = r * scale;
            }
            total += cholesky_rank_one_update(factor, m, &mut work);
        };
        for &j in &self.chosen {
            apply(self.obj.row(s, j), factor);
            apply(self.obj.row(j, s), factor);
        }
        apply(self.obj.row(s, s), factor);
        total
    }
}

/// In-place update of lower-triangular `l` (column-major `m x m`) so that
/// `l' l'^T = l l^T + v v^T`. `v` is consumed as workspace. Returns
/// `log det(l' l'^T) - log det(l l^T)`.
pub fn cholesky_rank_one_update(l: &mut [f64], m: usize, v: &mut [f64]) -> f64 {
    let mut logdet = 0.0;
    for j in 0..m {
        let vj = v[j];
        if vj == 0.0 {
            continue;
        }
        let col = &mut l[j * m..(j + 1) * m];
        let ljj = col[j];
        let r = ljj.hypot(vj);
        let c = r / ljj;
        let s = vj / ljj;
        col[j] = r;
        for i in (j + 1)..m {
            let lij = (col[i] + s * v[i]) / c;
            v[i] = c * v[i] - s * lij;
            col[i] = lij;
        }
        logdet += 2.0 * c.ln();
    }
    logdet
}

/// Runs `k` greedy rounds. Each round adds the candidate with the largest
/// gain; ties go to the lowest vertex index. Candidates within a round are
/// evaluated in parallel.
pub fn greedy_design(obj: &DesignObjective, k: usize, n: usize) -> Result<(SamplingPattern, GreedyTrace)> {
    if n != obj.n() {
        return Err(Error::InvalidArgument(format!(
            "objective is over {} vertices, asked for {n}",
            obj.n()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("K must lie in 1..={n}, got {k}")));
    }
    let mut state = GreedyState::new(obj);
    let mut gains = Vec::with_capacity(k);
    for _ in 0..k {
        let candidates: Vec<usize> = (0..n).filter(|&s| !state.contains(s)).collect();
        let scored: Vec<f64> = candidates
            .par_iter()
            .map(|&s| state.gain(s))
            .collect::<Result<_>>()?;
        let mut best = 0;
        for idx in 1..candidates.len() {
            if scored[idx] > scored[best] || (scored[best].is_nan() && !scored[idx].is_nan()) {
                best = idx;
            }
        }
        if !scored[best].is_finite() {
            return Err(Error::NonFinite("greedy gain".into()));
        }
        gains.push(state.push(candidates[best])?);
    }
    let trace = GreedyTrace {
        chosen: state.chosen().to_vec(),
        gains,
        final_value: state.value(),
        epsilon: obj.epsilon(),
        objective: obj.kind(),
    };
    let pattern = SamplingPattern::new(n, trace.chosen.clone())?;
    Ok((pattern, trace))
}
