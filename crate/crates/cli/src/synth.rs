//! Synthetic boundary data on the data grid.

use std::sync::Arc;

use helmsrc_core::reconstruction::Provenance;
use helmsrc_core::{solve_direct, Complex64, Measurement, MeasurementSet, RadialGrid, SourceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Result, StageExt};

/// Direct traces of `f` at every frequency of `ks`, solved in parallel.
pub fn forward_traces(
    cfg: &ExperimentConfig,
    f: &SourceSpec,
    ks: &[f64],
    grid: &Arc<RadialGrid>,
) -> Result<Vec<Measurement>> {
    let m = cfg.medium_spec().stage(|| "medium".into())?;
    ks.par_iter()
        .map(|&k| {
            let u = solve_direct(&m, f, k, grid).stage(|| format!("direct solve at k = {k}"))?;
            let h = m.h(k).stage(|| format!("h at k = {k}"))?;
            Ok(Measurement { k, trace: u.boundary_value(), h })
        })
        .collect()
}

/// Adds complex Gaussian noise with per-component standard deviation
/// `sigma_rel · |trace|`, drawn in frequency order from a seeded stream.
pub fn add_noise(entries: &mut [Measurement], sigma_rel: f64, seed: u64) {
    if sigma_rel == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in entries {
        let s = sigma_rel * e.trace.norm();
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        e.trace += Complex64::new(s * re, s * im);
    }
}

/// Measurements of `f` at `ks` on the configured data grid, with noise.
pub fn synthesize(cfg: &ExperimentConfig, f: &SourceSpec, ks: &[f64]) -> Result<MeasurementSet> {
    let grid = cfg.data_grid()?;
    let mut entries = forward_traces(cfg, f, ks, &grid)?;
    add_noise(&mut entries, cfg.sigma_rel, cfg.seed);
    let provenance = Provenance {
        grid_id: format!("uniform-{}", cfg.n_data),
        noise_level: cfg.sigma_rel,
    };
    MeasurementSet::new(entries, grid.radius(), provenance).stage(|| "measurement set".into())
}

/// Synthetic measurements for the configured source and frequencies.
pub fn generate_synthetic_data(cfg: &ExperimentConfig) -> Result<MeasurementSet> {
    let f = cfg.source_spec().stage(|| "source".into())?;
    synthesize(cfg, &f, &cfg.frequencies)
}
