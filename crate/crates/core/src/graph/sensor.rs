use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

pub const MAX_CONNECT_ATTEMPTS: u32 = 100;

/// Random geometric sensor graph.
///
/// Vertices are drawn uniformly in the unit square and each one is joined to
/// its `k_neighbors` nearest neighbours (union-symmetrized). Edge weights are
/// `exp(-d^2 / (2 sigma^2))` where `sigma` is the mean directed k-NN distance.
/// Disconnected draws are rejected and redrawn with `seed + 1, seed + 2, ...`.
pub fn random_sensor_graph(n: usize, k_neighbors: usize, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("sensor graph needs n >= 2, got {n}")));
    }
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(Error::InvalidArgument(format!(
            "k_neighbors must lie in 1..{n}, got {k_neighbors}"
        )));
    }
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let g = draw(n, k_neighbors, seed.wrapping_add(attempt as u64))?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::FailedToConnect { attempts: MAX_CONNECT_ATTEMPTS })
}

fn draw(n: usize, k: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    let dist = |a: usize, b: usize| {
        let dx = coords[a][0] - coords[b][0];
        let dy = coords[a][1] - coords[b][1];
        (dx * dx + dy * dy).sqrt()
    };

    let mut pairs = BTreeMap::new();
    let mut total = 0.0;
    for v in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&w| w != v).map(|w| (dist(v, w), w)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d, w) in &others[..k] {
            total += d;
            pairs.insert((v.min(w), v.max(w)), d);
        }
    }
    let sigma = total / (n * k) as f64;
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvariantViolation("coincident sensor positions".into()));
    }
    let edges = pairs
        .into_iter()
        .map(|((i, j), d)| (i, j, (-d * d / (2.0 * sigma * sigma)).exp()));
    Graph::new(n, edges, Some(coords))
}
