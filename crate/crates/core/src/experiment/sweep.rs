use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{prepare, ExperimentError, ExperimentOutcome, Prepared};
use crate::design::{greedy_design, random_design, DesignObjective, ObjectiveKind};
use crate::error::Error;
use crate::sampling::{build_spectral_model, estimate_spectrum_spectral, nmse, subsampled_covariance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankScanRow {
    pub k: usize,
    pub rank: usize,
    pub rank_ok: bool,
}

fn stage<T>(stage: &'static str, r: crate::error::Result<T>) -> ExperimentOutcome<T> {
    r.map_err(|source| ExperimentError { stage, source })
}

/// Rank of the spectral-domain model along one greedy run (prefixes are the
/// size-`K` greedy patterns).
pub fn rank_threshold_scan(
    cfg: &ExperimentConfig,
    k_range: std::ops::RangeInclusive<usize>,
) -> ExperimentOutcome<Vec<RankScanRow>> {
    let prep = prepare(&ExperimentConfig { k: 1, ..cfg.clone() })?;
    rank_scan_prepared(&prep, cfg.objective.kind, cfg.objective.epsilon, k_range)
}

pub fn rank_scan_prepared(
    prep: &Prepared,
    kind: ObjectiveKind,
    epsilon: Option<f64>,
    k_range: std::ops::RangeInclusive<usize>,
) -> ExperimentOutcome<Vec<RankScanRow>> {
    let n = prep.n();
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo == 0 || hi > n || lo > hi {
        return Err(ExperimentError {
            stage: "config",
            source: Error::InvalidArgument(format!("K range {lo}..={hi} invalid for N = {n}")),
        });
    }
    let obj = stage("design", DesignObjective::spectral(&prep.basis, kind, epsilon))?;
    let (_, trace) = stage("design", greedy_design(&obj, hi, n))?;
    let pop = &prep.population;
    (lo..=hi)
        .map(|k| {
            let pat = stage("design", trace.prefix_pattern(n, k))?;
            let model = stage("model", build_spectral_model(&prep.basis, &pat))?;
            let r_y = stage("estimate", subsampled_covariance(pop, &pat))?;
            let est = stage("estimate", estimate_spectrum_spectral(&r_y, &model))?;
            Ok(RankScanRow { k, rank: est.rank, rank_ok: est.rank_ok })
        })
        .collect()
}

/// Smallest greedy `K` whose spectral-domain model has full column rank.
pub fn smallest_rank_ok(rows: &[RankScanRow]) -> Option<usize> {
    rows.iter().find(|r| r.rank_ok).map(|r| r.k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub sampler: &'static str,
    pub mean_nmse: f64,
    pub median_nmse: f64,
    pub rank_ok_fraction: f64,
}

/// Mean and median NMSE plus full-rank fraction for greedy and random
/// samplers at each `K`, over `n_seeds` seeds (`cfg.seed + i` drives both the
/// snapshots and the random pattern). Cells run in parallel.
pub fn compression_sweep(
    cfg: &ExperimentConfig,
    k_list: &[usize],
    n_seeds: usize,
) -> ExperimentOutcome<Vec<SweepRow>> {
    if k_list.is_empty() {
        return Err(ExperimentError { stage: "config", source: Error::InvalidArgument("empty K list".into()) });
    }
    if n_seeds == 0 {
        return Err(ExperimentError { stage: "config", source: Error::InvalidArgument("need at least one seed".into()) });
    }
    if k_list.contains(&0) {
        return Err(ExperimentError { stage: "config", source: Error::InvalidArgument("K must be positive".into()) });
    }
    let kmax = *k_list.iter().max().unwrap();
    let prep = prepare(&ExperimentConfig { k: kmax, ..cfg.clone() })?;
    let n = prep.n();

    let obj = stage("design", prep.objective(cfg))?;
    let (_, trace) = stage("design", greedy_design(&obj, kmax, n))?;

    let seeds: Vec<u64> = (0..n_seeds as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let covariances = seeds
        .par_iter()
        .map(|&s| stage("covariance", prep.covariance(cfg, s)))
        .collect::<ExperimentOutcome<Vec<_>>>()?;

    let cells: Vec<(usize, &'static str, usize)> = k_list
        .iter()
        .flat_map(|&k| ["greedy", "random"].into_iter().map(move |s| (k, s)))
        .flat_map(|(k, s)| (0..n_seeds).map(move |i| (k, s, i)))
        .collect();
    let outcomes = cells
        .par_iter()
        .map(|&(k, sampler, i)| {
            let pat = match sampler {
                "greedy" => stage("design", trace.prefix_pattern(n, k))?,
                _ => stage("design", random_design(k, n, seeds[i]))?,
            };
            let est = stage("estimate", prep.estimate(cfg, &covariances[i], &pat))?;
            Ok((nmse(&est.p_hat, &prep.p_true), est.rank_ok))
        })
        .collect::<ExperimentOutcome<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (chunk, cell) in outcomes.chunks(n_seeds).zip(cells.chunks(n_seeds)) {
        let (k, sampler, _) = cell[0];
        let mut errs: Vec<f64> = chunk.iter().map(|c| c.0).collect();
        let ok = chunk.iter().filter(|c| c.1).count();
        errs.sort_by(f64::total_cmp);
        rows.push(SweepRow {
            k,
            sampler,
            mean_nmse: errs.iter().sum::<f64>() / errs.len() as f64,
            median_nmse: median_sorted(&errs),
            rank_ok_fraction: ok as f64 / n_seeds as f64,
        });
    }
    Ok(rows)
}

pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,sampler,mean_nmse,median_nmse,rank_ok_fraction\n");
    for r in rows {
        writeln!(out, "{},{},{:?},{:?},{:?}", r.k, r.sampler, r.mean_nmse, r.median_nmse, r.rank_ok_fraction)
            .unwrap();
    }
    out
}

pub fn rank_scan_csv(rows: &[RankScanRow]) -> String {
    let mut out = String::from("k,rank,rank_ok\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.k, r.rank, r.rank_ok).unwrap();
    }
    out
}
