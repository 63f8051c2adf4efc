//! Parallel Monte Carlo batches.
//!
//! Path `i` draws from seed + i regardless of which worker runs it, and
//! verdicts land in slot `i` of the result vector, so the aggregated report
//! is identical for any worker count — `LV_THREADS=1` and the default both
//! reproduce the sequential `lv-core` functions bit for bit.

use lv_core::{
    pathstats, pdmp, MonteCarloReport, ModelParams, PathError, PathVerdict, PdmpSpec, SimConfig,
};
use rayon::prelude::*;

/// Worker cap from `LV_THREADS` (unset or unparsable means rayon's default).
pub fn worker_threads() -> Option<usize> {
    std::env::var("LV_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
}

fn pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_threads() {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}

/// Parallel version of [`lv_core::extinction_probabilities`]; same report.
pub fn extinction_probabilities_parallel(
    p: &ModelParams,
    z0: [f64; 2],
    n_paths: u64,
    cfg: &SimConfig,
    floor: f64,
) -> Result<MonteCarloReport, PathError> {
    if n_paths < 1 {
        return Err(PathError::InvalidArgument {
            reason: "n_paths must be at least 1",
        });
    }
    if !(floor > 0.0) || floor >= z0[0].min(z0[1]) {
        return Err(PathError::InvalidArgument {
            reason: "floor must be positive and below min(z0)",
        });
    }
    p.validate_deterministic()?;
    cfg.validate()?;
    let verdicts: Vec<PathVerdict> = pool().install(|| {
        (0..n_paths)
            .into_par_iter()
            .map(|i| pathstats::run_batch_path(p, z0, cfg, floor, i))
            .collect()
    });
    Ok(pathstats::summarize_batch(
        &verdicts,
        floor,
        cfg.horizon,
        cfg.seed,
    ))
}

/// Parallel version of [`lv_core::pdmp_exclusion_mc`]; same report.
pub fn pdmp_exclusion_mc_parallel(
    spec: &PdmpSpec,
    i0: u8,
    z0: [f64; 2],
    n_paths: u64,
    cfg: &SimConfig,
    floor: f64,
) -> Result<MonteCarloReport, pdmp::PdmpError> {
    spec.validate()?;
    if n_paths < 1 {
        return Err(pdmp::PdmpError::Sim(lv_core::SimError::InvalidConfig {
            reason: "n_paths must be at least 1",
        }));
    }
    if !(floor > 0.0) || floor >= z0[0].min(z0[1]) {
        return Err(pdmp::PdmpError::Sim(lv_core::SimError::InvalidConfig {
            reason: "floor must be positive and below min(z0)",
        }));
    }
    if i0 != 1 && i0 != 2 {
        return Err(pdmp::PdmpError::BadInitialRegime { got: i0 });
    }
    cfg.validate()?;
    let verdicts: Vec<PathVerdict> = pool().install(|| {
        (0..n_paths)
            .into_par_iter()
            .map(|i| pdmp::run_pdmp_batch_path(spec, i0, z0, cfg, floor, i))
            .collect()
    });
    Ok(pathstats::summarize_batch(
        &verdicts,
        floor,
        cfg.horizon,
        cfg.seed,
    ))
}
