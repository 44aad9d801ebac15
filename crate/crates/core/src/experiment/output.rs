//! Result files.
//!
//! | file | content |
//! |------|---------|
//! | `spectrum.csv` | `index,eigenvalue,p_true,p_hat` |
//! | `pattern.json` | selected vertices |
//! | `metrics.json` | domain, sizes, rank, residual, nmse, seed |
//! | `trace.json` | greedy selection order and gains (greedy runs only) |
//! | `spectrum_true.dat`, `spectrum_est.dat` | `index p` for plotting |
//! | `vertices.dat` | `x y selected` (graphs with coordinates) |
//! | `timing.json` | per-stage wall-clock seconds |
//!
//! Everything except `timing.json` is a deterministic function of the
//! configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::run::{ExperimentError, ExperimentResult};
use crate::error::{Error, Result};

pub fn spectrum_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("index,eigenvalue,p_true,p_hat\n");
    for (i, ((l, pt), ph)) in result.eigenvalues.iter().zip(&result.p_true).zip(&result.p_hat).enumerate() {
        writeln!(out, "{i},{l:?},{pt:?},{ph:?}").unwrap();
    }
    out
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("spectrum.csv"), spectrum_csv(result))?;
    write_json(
        &dir.join("pattern.json"),
        &json!({
            "n_vertices": result.pattern.n_vertices(),
            "selected": result.pattern.selected(),
            "sampler": result.sampler,
        }),
    )?;
    write_json(
        &dir.join("metrics.json"),
        &json!({
            "domain": result.domain,
            "n": result.n,
            "k": result.k,
            "q": result.q,
            "n_snapshots": result.n_snapshots,
            "seed": result.seed,
            "sampler": result.sampler,
            "rank": result.rank,
            "rank_ok": result.rank_ok,
            "rank_threshold": result.rank_threshold,
            "residual_norm": result.residual_norm,
            "nmse": result.nmse,
            "alpha_hat": result.alpha_hat,
        }),
    )?;
    if let Some(trace) = &result.trace {
        write_json(&dir.join("trace.json"), trace)?;
    }
    write_json(&dir.join("timing.json"), &result.timings)?;
    emit_plot_data(result, dir)?;
    Ok(())
}

pub fn write_failure(err: &ExperimentError, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("failure.json"), &json!({ "stage": err.stage, "error": err.source.to_string() }))
}

/// Writes two-column spectrum files and, when the graph has coordinates, a
/// vertex file marking the selected vertices. Returns the written paths.
pub fn emit_plot_data(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, values) in [("spectrum_true.dat", &result.p_true), ("spectrum_est.dat", &result.p_hat)] {
        let mut out = String::from("# index p\n");
        for (i, p) in values.iter().enumerate() {
            writeln!(out, "{i} {p:?}").unwrap();
        }
        let path = dir.join(name);
        fs::write(&path, out)?;
        written.push(path);
    }
    if let Some(coords) = &result.coordinates {
        let mut out = String::from("# x y selected\n");
        for (v, [x, y]) in coords.iter().enumerate() {
            writeln!(out, "{x:?} {y:?} {}", u8::from(result.pattern.contains(v))).unwrap();
        }
        let path = dir.join("vertices.dat");
        fs::write(&path, out)?;
        written.push(path);
    }
    Ok(written)
}

/// Whitespace-separated numeric rows, `#` comments skipped.
pub fn parse_dat(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })
        })
        .collect()
}
