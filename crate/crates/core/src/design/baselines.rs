use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DesignObjective;
use crate::error::{Error, Result};
use crate::sampling::SamplingPattern;

/// Largest number of subsets [`brute_force_design`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact maximizer of the objective over all `k`-subsets; ties go to the
/// lexicographically smallest set.
pub fn brute_force_design(obj: &DesignObjective, k: usize, n: usize) -> Result<(SamplingPattern, f64)> {
    if n != obj.n() {
        return Err(Error::InvalidArgument(format!(
            "objective is over {} vertices, asked for {n}",
            obj.n()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("K must lie in 1..={n}, got {k}")));
    }
    let count = binomial(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "C({n}, {k}) = {count} subsets exceeds the brute-force limit"
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..n).combinations(k) {
        let v = obj.value(&subset)?;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((subset, v));
        }
    }
    let (set, value) = best.expect("at least one subset");
    Ok((SamplingPattern::new(n, set)?, value))
}

/// Uniform `k`-subset of `0..n` without replacement.
pub fn random_design(k: usize, n: usize, seed: u64) -> Result<SamplingPattern> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("K must lie in 1..={n}, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, n, k).into_vec();
    SamplingPattern::new(n, picks)
}
