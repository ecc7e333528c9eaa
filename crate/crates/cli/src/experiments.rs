//! End-to-end experiment pipelines and their reports.

use std::sync::Arc;
use std::time::Instant;

use helmsrc_core::media::{homogeneous_medium, source_f1, source_f2, DOMAIN_RADIUS};
use helmsrc_core::radial::{inner_product_volume, norm_profile};
use helmsrc_core::reconstruction::{measurement_constraints, ComplexMatrix, SolveMethod};
use helmsrc_core::{
    eigen_reconstruct, make_nonradiating, minimum_norm_reconstruction, relative_error,
    solve_adjoint, solve_direct, sturm_liouville_eigs, Complex64, GramSystem, Measurement,
    MeasurementSet, RadialField, RadialGrid, RadialPolynomial, ReconstructionResult,
    SourceSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, MediumChoice};
use crate::error::{config_err, HarnessError, Result, StageExt};
use crate::synth::synthesize;

/// Frequency counts reported by [`run_table1`].
pub const TABLE1_COUNTS: [usize; 6] = [10, 20, 30, 40, 50, 60];
/// Frequency count whose reconstructions [`run_table1`] exports as profiles.
pub const TABLE1_PROFILE_COUNT: usize = 40;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MeasurementRecord {
    pub label: String,
    pub k: f64,
    pub trace_re: f64,
    pub trace_im: f64,
    pub h_re: f64,
    pub h_im: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ErrorRecord {
    pub label: String,
    pub count: usize,
    pub eps: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DiagnosticRecord {
    pub label: String,
    pub count: usize,
    pub condition: f64,
    pub effective_rank: usize,
    pub method: String,
    pub max_constraint_residual: f64,
    pub imag_ratio: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EigenRecord {
    pub j: usize,
    pub lambda: f64,
    pub k_j: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    /// `⟨f, ψ_j⟩` computed from the true source.
    pub alpha_volumetric: f64,
    /// Relative error of the expansion truncated after mode `j`.
    pub eps_prefix: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NonradRecord {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub trace_abs: [f64; 3],
    pub trace_abs_coarse: [f64; 3],
    pub oracle_abs: [f64; 3],
    pub source_norm: f64,
    pub suppression_ratio: f64,
    pub suppression_ratio_coarse: f64,
    pub commutation_exact: bool,
    pub polynomial_degree: usize,
}

/// Sampled true and reconstructed profile on the inversion grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRecord {
    pub label: String,
    pub r: Vec<f64>,
    pub f_true: Vec<f64>,
    pub f_rec: Vec<Complex64>,
}

/// A solved field sampled on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRecord {
    pub k: f64,
    pub r: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Everything an experiment produces. Timings are kept apart so the rest of
/// the report is reproducible bit for bit.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub measurements: Vec<MeasurementRecord>,
    pub errors: Vec<ErrorRecord>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub eigen: Vec<EigenRecord>,
    pub nonradiating: Option<NonradRecord>,
    #[serde(skip)]
    pub profiles: Vec<ProfileRecord>,
    #[serde(skip)]
    pub fields: Vec<FieldRecord>,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    fn new(experiment: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.to_owned(),
            config: cfg.clone(),
            measurements: Vec::new(),
            errors: Vec::new(),
            diagnostics: Vec::new(),
            eigen: Vec::new(),
            nonradiating: None,
            profiles: Vec::new(),
            fields: Vec::new(),
            timings: Vec::new(),
        }
    }

    /// Error for `label` at `count` frequencies, if recorded.
    pub fn error(&self, label: &str, count: usize) -> Option<f64> {
        self.errors.iter().find(|e| e.label == label && e.count == count).map(|e| e.eps)
    }

    /// Errors for `label` in recording order.
    pub fn error_series(&self, label: &str) -> Vec<(usize, f64)> {
        self.errors.iter().filter(|e| e.label == label).map(|e| (e.count, e.eps)).collect()
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f()?;
        self.timings.push((stage.to_owned(), t0.elapsed().as_secs_f64()));
        Ok(out)
    }

    fn push_measurements(&mut self, label: &str, set: &MeasurementSet) {
        self.measurements.extend(set.entries().iter().map(|m| MeasurementRecord {
            label: label.to_owned(),
            k: m.k,
            trace_re: m.trace.re,
            trace_im: m.trace.im,
            h_re: m.h.re,
            h_im: m.h.im,
        }));
    }

    fn push_error(&mut self, label: &str, count: usize, eps: f64) -> Result<()> {
        if !eps.is_finite() {
            return Err(HarnessError::Stage {
                stage: format!("{label}, {count} frequencies"),
                source: helmsrc_core::Error::NonFinite("relative error"),
            });
        }
        self.errors.push(ErrorRecord { label: label.to_owned(), count, eps });
        Ok(())
    }

    fn push_diagnostics(&mut self, label: &str, count: usize, res: &ReconstructionResult) {
        let d = &res.diagnostics;
        self.diagnostics.push(DiagnosticRecord {
            label: label.to_owned(),
            count,
            condition: d.condition,
            effective_rank: d.effective_rank,
            method: method_name(res),
            max_constraint_residual: d.constraint_residuals.iter().copied().fold(0.0, f64::max),
            imag_ratio: d.imag_ratio,
        });
    }

    fn push_profile(&mut self, label: &str, f: &SourceSpec, est: &RadialField) {
        let r = est.grid().nodes().to_vec();
        self.profiles.push(ProfileRecord {
            label: label.to_owned(),
            f_true: r.iter().map(|&x| f.value(x)).collect(),
            f_rec: est.values().to_vec(),
            r,
        });
    }
}

fn method_name(res: &ReconstructionResult) -> String {
    match res.diagnostics.method {
        Some(SolveMethod::Cholesky) => "cholesky".into(),
        Some(SolveMethod::Tikhonov(l)) => format!("tikhonov({l:e})"),
        Some(SolveMethod::Tsvd(r)) => format!("tsvd({r:e})"),
        None => "eigen".into(),
    }
}

/// Adjoint fields for unit boundary data at each frequency, solved in parallel.
fn unit_adjoint_fields(
    cfg: &ExperimentConfig,
    ks: &[f64],
    grid: &Arc<RadialGrid>,
) -> Result<Vec<RadialField>> {
    let m = cfg.medium_spec().stage(|| "medium".into())?;
    ks.par_iter()
        .map(|&k| {
            solve_adjoint(&m, Complex64::new(1.0, 0.0), k, grid)
                .stage(|| format!("adjoint solve at k = {k}"))
        })
        .collect()
}

/// Gram system with entries computed in parallel (each entry summed serially).
fn parallel_gram(fields: &[RadialField], set: &MeasurementSet) -> Result<GramSystem> {
    let n = fields.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|r| (r..n).map(move |c| (r, c))).collect();
    let values = pairs
        .par_iter()
        .map(|&(r, c)| inner_product_volume(&fields[c], &fields[r]))
        .collect::<helmsrc_core::Result<Vec<_>>>()
        .stage(|| "Gram assembly".into())?;
    let mut g = ComplexMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (&(r, c), v) in pairs.iter().zip(values) {
        g[(r, c)] = v;
        g[(c, r)] = v.conj();
    }
    GramSystem::from_parts(g, measurement_constraints(set)).stage(|| "Gram system".into())
}

fn scaled_fields(unit: &[RadialField], set: &MeasurementSet) -> Vec<RadialField> {
    unit.iter().zip(set.entries()).map(|(psi, m)| psi.scaled(m.trace)).collect()
}

/// Minimum-norm reconstructions for every leading block of the Gram system.
#[allow(clippy::too_many_arguments)]
fn reconstruct_prefixes(
    report: &mut RunReport,
    cfg: &ExperimentConfig,
    label: &str,
    f: &SourceSpec,
    unit: &[RadialField],
    set: &MeasurementSet,
    counts: &[usize],
    profile_count: usize,
) -> Result<()> {
    let fields = scaled_fields(unit, set);
    let gram = report.time(&format!("{label}: Gram"), || parallel_gram(&fields, set))?;
    for &j in counts {
        let res = report.time(&format!("{label}: solve J = {j}"), || {
            let gs = gram.leading(j).stage(|| format!("{label}: leading block {j}"))?;
            minimum_norm_reconstruction(&fields[..j], &gs, cfg.regularization())
                .stage(|| format!("{label}: reconstruction with {j} frequencies"))
        })?;
        let eps = relative_error(f, &res).stage(|| format!("{label}: error with {j} frequencies"))?;
        report.push_error(label, j, eps)?;
        report.push_diagnostics(label, j, &res);
        if j == profile_count {
            report.push_profile(label, f, &res.estimate);
        }
    }
    Ok(())
}

fn source_label(cfg: &ExperimentConfig) -> &'static str {
    match cfg.source {
        crate::config::SourceChoice::F1 => "f1",
        crate::config::SourceChoice::F2 => "f2",
        crate::config::SourceChoice::Polynomial { .. } => "polynomial",
    }
}

/// Synthetic traces at the configured frequencies.
pub fn run_forward(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mut report = RunReport::new("forward", cfg);
    let f = cfg.source_spec().stage(|| "source".into())?;
    let set = report.time("direct solves", || synthesize(cfg, &f, &cfg.frequencies))?;
    report.push_measurements(source_label(cfg), &set);
    Ok(report)
}

/// Adjoint fields for unit boundary data at the configured frequencies.
pub fn run_adjoint(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mut report = RunReport::new("adjoint", cfg);
    let grid = cfg.inverse_grid()?;
    let fields = report.time("adjoint solves", || unit_adjoint_fields(cfg, &cfg.frequencies, &grid))?;
    report.fields = fields
        .iter()
        .zip(&cfg.frequencies)
        .map(|(psi, &k)| FieldRecord { k, r: grid.nodes().to_vec(), values: psi.values().to_vec() })
        .collect();
    Ok(report)
}

/// Data on the data grid, inversion on the inversion grid, using every
/// configured frequency.
pub fn run_reconstruction(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mut report = RunReport::new("reconstruct", cfg);
    let label = source_label(cfg);
    let f = cfg.source_spec().stage(|| "source".into())?;
    let set = report.time("direct solves", || synthesize(cfg, &f, &cfg.frequencies))?;
    report.push_measurements(label, &set);
    let grid = cfg.inverse_grid()?;
    let unit = report.time("adjoint solves", || unit_adjoint_fields(cfg, &cfg.frequencies, &grid))?;
    let j = cfg.frequencies.len();
    reconstruct_prefixes(&mut report, cfg, label, &f, &unit, &set, &[j], j)?;
    Ok(report)
}

/// Both test sources at `k_j = j` for the counts in [`TABLE1_COUNTS`].
/// The configured source and frequencies are ignored.
pub fn run_table1(cfg: &ExperimentConfig) -> Result<RunReport> {
    let jmax = *TABLE1_COUNTS.last().expect("non-empty");
    let ks: Vec<f64> = (1..=jmax).map(|j| j as f64).collect();
    let table_cfg = ExperimentConfig { frequencies: ks.clone(), ..cfg.clone() };
    let mut report = RunReport::new("table1", &table_cfg);
    let grid = table_cfg.inverse_grid()?;
    let unit = report.time("adjoint solves", || unit_adjoint_fields(&table_cfg, &ks, &grid))?;
    for (label, f) in [("f1", source_f1()), ("f2", source_f2())] {
        let set = report.time(&format!("{label}: direct solves"), || synthesize(&table_cfg, &f, &ks))?;
        report.push_measurements(label, &set);
        reconstruct_prefixes(
            &mut report,
            &table_cfg,
            label,
            &f,
            &unit,
            &set,
            &TABLE1_COUNTS,
            TABLE1_PROFILE_COUNT,
        )?;
    }
    Ok(report)
}

/// Generalized Fourier reconstruction from traces at the first `modes`
/// Sturm–Liouville eigenfrequencies. The configured frequencies are ignored.
pub fn run_eigen_experiment(cfg: &ExperimentConfig, modes: usize) -> Result<RunReport> {
    let mut report = RunReport::new("eigen", cfg);
    let label = source_label(cfg);
    let m = cfg.medium_spec().stage(|| "medium".into())?;
    let f = cfg.source_spec().stage(|| "source".into())?;
    let grid = cfg.inverse_grid()?;
    let basis = report.time("eigensolve", || {
        sturm_liouville_eigs(&m, &grid, modes).stage(|| format!("eigensolve for {modes} modes"))
    })?;
    let ks = basis.frequencies();
    report.config.frequencies = ks.clone();
    let set = report.time("direct solves", || synthesize(cfg, &f, &ks))?;
    report.push_measurements(label, &set);
    let volumetric = basis.volumetric_coefficients(&f);
    let full = eigen_reconstruct(&m, &basis, &set).stage(|| "eigen reconstruction".into())?;
    for j in 1..=modes {
        let res = eigen_reconstruct(&m, &basis, &set.prefix(j))
            .stage(|| format!("eigen reconstruction with {j} modes"))?;
        let eps = relative_error(&f, &res).stage(|| format!("error with {j} modes"))?;
        report.push_error(label, j, eps)?;
        let a = full.alphas[j - 1];
        report.eigen.push(EigenRecord {
            j,
            lambda: basis.eigenvalues()[j - 1],
            k_j: ks[j - 1],
            alpha_re: a.re,
            alpha_im: a.im,
            alpha_volumetric: volumetric[j - 1],
            eps_prefix: eps,
            residual: basis.residuals()[j - 1],
        });
    }
    report.push_diagnostics(label, modes, &full);
    report.push_profile(label, &f, &full.estimate);
    Ok(report)
}

/// Support radius of the bump `w = (ρ² − r²)^5` used by the demonstration.
pub const NONRAD_SUPPORT: f64 = 0.5;

/// `g = (Δ + k₁²)(Δ + k₂²)(1/4 − r²)^5` in the homogeneous medium: traces at
/// `k₁`, `k₂` and a control frequency `k₃`.
pub fn run_nonradiating_demo(cfg: &ExperimentConfig, k1: f64, k2: f64, k3: f64) -> Result<RunReport> {
    if k1 == k2 {
        return Err(config_err("k1", "k1 and k2 must differ"));
    }
    if k3 == k1 || k3 == k2 {
        return Err(config_err("k3", "k3 must differ from k1 and k2"));
    }
    let homo_cfg = ExperimentConfig {
        medium: MediumChoice::Homogeneous,
        h: crate::config::WeightChoice::One,
        frequencies: vec![k1, k2, k3],
        ..cfg.clone()
    };
    let mut report = RunReport::new("nonrad", &homo_cfg);
    let w = RadialPolynomial::bump(NONRAD_SUPPORT, 5).stage(|| "bump".into())?;
    let g = make_nonradiating(&w, k1, k2).stage(|| "non-radiating construction".into())?;
    let swapped = make_nonradiating(&w, k2, k1).stage(|| "non-radiating construction".into())?;
    let source = g.to_source(DOMAIN_RADIUS).stage(|| "non-radiating source".into())?;
    let m = homogeneous_medium();
    let ks = [k1, k2, k3];

    let solve_on = |grid: &Arc<RadialGrid>| -> Result<Vec<Measurement>> {
        ks.par_iter()
            .map(|&k| {
                let u = solve_direct(&m, &source, k, grid).stage(|| format!("direct solve at k = {k}"))?;
                Ok(Measurement { k, trace: u.boundary_value(), h: Complex64::new(1.0, 0.0) })
            })
            .collect()
    };
    let fine = bump_grid(homo_cfg.n_data)?;
    let coarse = bump_grid(homo_cfg.n_inverse)?;
    let traces = report.time("direct solves (data grid)", || solve_on(&fine))?;
    let traces_coarse = report.time("direct solves (inversion grid)", || solve_on(&coarse))?;

    let abs3 = |v: &[Measurement]| [v[0].trace.norm(), v[1].trace.norm(), v[2].trace.norm()];
    let ratio = |a: [f64; 3]| a[2] / a[0].max(a[1]);
    let oracle_abs = ks.map(|k| g.sine_moment(k).0.abs() / (k * DOMAIN_RADIUS));
    let (t, tc) = (abs3(&traces), abs3(&traces_coarse));
    report.nonradiating = Some(NonradRecord {
        k1,
        k2,
        k3,
        trace_abs: t,
        trace_abs_coarse: tc,
        oracle_abs,
        source_norm: norm_profile(source.profile(), &fine),
        suppression_ratio: ratio(t),
        suppression_ratio_coarse: ratio(tc),
        commutation_exact: g == swapped,
        polynomial_degree: g.degree().unwrap_or(0),
    });
    let mut entries = traces;
    entries.sort_by(|a, b| a.k.total_cmp(&b.k));
    let set = MeasurementSet::new(entries, DOMAIN_RADIUS, Default::default())
        .stage(|| "measurement set".into())?;
    report.push_measurements("g", &set);
    Ok(report)
}

fn bump_grid(elements: usize) -> Result<Arc<RadialGrid>> {
    RadialGrid::build(DOMAIN_RADIUS, elements + 1, &[NONRAD_SUPPORT])
        .map(Arc::new)
        .stage(|| format!("grid with {elements} elements"))
}
