//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use helmsrc_cli::config::{ExperimentConfig, MediumChoice, SourceChoice};
use helmsrc_cli::experiments::TABLE1_COUNTS;
use helmsrc_cli::export::export_all;
use helmsrc_cli::{run_eigen_experiment, run_nonradiating_demo, run_reconstruction, run_table1};
use helmsrc_core::helmholtz::{
    check_variational_identity, oracle_homogeneous_adjoint, oracle_homogeneous_direct_trace,
};
use helmsrc_core::media::{homogeneous_medium, paper_medium, source_f1, source_f2};
use helmsrc_core::radial::{inner_product_profile, inner_product_volume, norm_profile, norm_volume};
use helmsrc_core::reconstruction::{volumetric_constraints, ComplexMatrix};
use helmsrc_core::{
    adjoint_fields, assemble_gram, make_nonradiating,
    minimum_norm_reconstruction, solve_adjoint, solve_direct, sturm_liouville_eigs, Complex64,
    GramSystem, PiecewiseRadialProfile, RadialField, RadialGrid, RadialPolynomial,
    Regularization, Segment, SegmentShape, SourceSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid(elements: usize, bps: &[f64]) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::build(2.0, elements + 1, bps).expect("grid"))
}

fn sci(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

// 1. Error table for k = 1..60.
const TABLE1_F1: [f64; 6] = [4.14e-1, 2.93e-1, 2.42e-1, 2.12e-1, 1.88e-1, 1.73e-1];
const TABLE1_F2: [f64; 6] = [1.30e-1, 1.92e-2, 6.27e-3, 4.25e-3, 2.74e-3, 2.34e-3];
const F1_REL_TOL: f64 = 0.35;
const F2_FACTOR: f64 = 3.0;
const TABLE1_RUNTIME_S: f64 = 60.0;

fn table1_reproduction() -> Check {
    let t0 = Instant::now();
    let report = run_table1(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let col = |label| -> Vec<f64> {
        TABLE1_COUNTS.iter().map(|&j| report.error(label, j).expect("recorded")).collect()
    };
    let (e1, e2) = (col("f1"), col("f2"));
    for (i, &j) in TABLE1_COUNTS.iter().enumerate() {
        ensure((e1[i] / TABLE1_F1[i] - 1.0).abs() <= F1_REL_TOL, || {
            format!("f1, J={j}: {:.3e} vs {:.3e}", e1[i], TABLE1_F1[i])
        })?;
        let r = e2[i] / TABLE1_F2[i];
        ensure((1.0 / F2_FACTOR..=F2_FACTOR).contains(&r), || {
            format!("f2, J={j}: {:.3e} vs {:.3e}", e2[i], TABLE1_F2[i])
        })?;
        ensure(e2[i] < e1[i], || format!("J={j}: f2 error not below f1 error"))?;
    }
    ensure(non_increasing(&e1), || format!("f1 column not non-increasing: {}", sci(&e1)))?;
    ensure(non_increasing(&e2), || format!("f2 column not non-increasing: {}", sci(&e2)))?;
    ensure(secs <= TABLE1_RUNTIME_S, || format!("runtime {secs:.1} s"))?;
    Ok(format!("eps_f1 = {}; eps_f2 = {}; {secs:.1} s", sci(&e1), sci(&e2)))
}

// 2. Solver oracle equivalence.
const RATIO_RANGE: std::ops::RangeInclusive<f64> = 3.5..=4.5;
const FINE_TRACE_TOL: f64 = 1e-6;

fn solver_oracles() -> Check {
    let m = homogeneous_medium();
    let sizes = [1024, 2048, 4096];
    let mut worst: (f64, f64) = (f64::INFINITY, 0.0);
    let mut track = |r: f64| worst = (worst.0.min(r), worst.1.max(r));
    for k in [1.0, 2.0, 5.0, 10.0] {
        for f in [source_f1(), source_f2()] {
            let oracle = oracle_homogeneous_direct_trace(&f, k, 2.0);
            let e: Vec<f64> = sizes
                .iter()
                .map(|&n| {
                    let u = solve_direct(&m, &f, k, &grid(n, &[0.5])).expect("solve");
                    (u.boundary_value() - oracle).norm()
                })
                .collect();
            for w in e.windows(2) {
                track(w[0] / w[1]);
                ensure(RATIO_RANGE.contains(&(w[0] / w[1])), || {
                    format!("direct trace, k={k}: errors {}", sci(&e))
                })?;
            }
        }
        let eta = Complex64::new(0.7, -0.4);
        // L²(Ω) norm of the nodal error; see the ledger on the r = 0 rounding floor
        let e: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let g = grid(n, &[]);
                let psi = solve_adjoint(&m, eta, k, &g).expect("solve");
                let diff = g
                    .nodes()
                    .iter()
                    .zip(psi.values())
                    .map(|(&r, v)| v - oracle_homogeneous_adjoint(eta, k, 2.0, r))
                    .collect();
                norm_volume(&RadialField::untagged(g, diff).expect("field"))
            })
            .collect();
        for w in e.windows(2) {
            track(w[0] / w[1]);
            ensure(RATIO_RANGE.contains(&(w[0] / w[1])), || {
                format!("adjoint field, k={k}: errors {}", sci(&e))
            })?;
        }
    }
    let mut fine = 0.0f64;
    for k in [1.0, 2.0, 3.0, 4.0, 5.0] {
        for f in [source_f1(), source_f2()] {
            let u = solve_direct(&m, &f, k, &grid(8192, &[0.5])).expect("solve");
            fine = fine.max((u.boundary_value() - oracle_homogeneous_direct_trace(&f, k, 2.0)).norm());
        }
    }
    ensure(fine <= FINE_TRACE_TOL, || format!("trace error {fine:.3e} at n = 8192"))?;
    Ok(format!(
        "convergence ratios in [{:.3}, {:.3}]; max trace error at n = 8192: {fine:.2e}",
        worst.0, worst.1
    ))
}

// 3. Variational identity.
const VI_LAYERED_TOL: f64 = 1e-4;
const VI_HOMOGENEOUS_TOL: f64 = 1e-6;
const VI_CASES: usize = 20;

fn random_source(rng: &mut ChaCha8Rng) -> SourceSpec {
    let support = rng.random_range(8..=56) as f64 / 32.0;
    let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let seg = Segment { lo: 0.0, hi: support, shape: SegmentShape::Polynomial(coeffs) };
    SourceSpec::new(PiecewiseRadialProfile::new(2.0, vec![seg], 0.0).expect("profile"), support)
        .expect("source")
}

fn variational_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [0.0f64; 2];
    for (slot, (m, tol)) in
        [(paper_medium(), VI_LAYERED_TOL), (homogeneous_medium(), VI_HOMOGENEOUS_TOL)].into_iter().enumerate()
    {
        let g = grid(4096, &[0.75, 1.0]);
        for case in 0..VI_CASES {
            let f = random_source(&mut rng);
            let eta = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let k = rng.random_range(0.1..=10.0);
            let res = check_variational_identity(&m, &f, eta, k, &g).map_err(|e| e.to_string())?;
            worst[slot] = worst[slot].max(res);
            ensure(res <= tol, || format!("case {case}: k = {k:.3}, residual {res:.3e}"))?;
        }
    }
    Ok(format!("max residual {:.2e} (layered), {:.2e} (homogeneous)", worst[0], worst[1]))
}

// 4. Minimum-norm properties.
const CONSTRAINT_TOL: f64 = 1e-8;
const ORTHOGONALITY_TOL: f64 = 1e-8;

fn gram_of(fields: &[RadialField], rhs: Vec<Complex64>) -> GramSystem {
    let n = fields.len();
    let mut g = ComplexMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for r in 0..n {
        for c in 0..n {
            g[(r, c)] = inner_product_volume(&fields[c], &fields[r]).expect("same grid");
        }
    }
    GramSystem::from_parts(g, rhs).expect("gram")
}

fn min_norm_properties() -> Check {
    let m = paper_medium();
    let g = grid(4096, &[0.5, 0.75, 1.0]);
    let mut worst_c = 0.0f64;
    let mut worst_o = 0.0f64;
    for j in [5, 10, 20] {
        // frequencies spaced by π/2 keep the Gram matrix well conditioned
        let ks: Vec<f64> = (1..=j).map(|i| i as f64 * std::f64::consts::FRAC_PI_2).collect();
        let fields: Vec<RadialField> = ks
            .iter()
            .map(|&k| solve_adjoint(&m, Complex64::new(1.0, 0.0), k, &g).expect("solve"))
            .collect();
        for f in [source_f1(), source_f2()] {
            let gs = gram_of(&fields, volumetric_constraints(&f, &fields));
            let res = minimum_norm_reconstruction(&fields, &gs, Regularization::None)
                .map_err(|e| e.to_string())?;
            let c = res.diagnostics.constraint_residuals.iter().copied().fold(0.0, f64::max);
            worst_c = worst_c.max(c);
            ensure(c <= CONSTRAINT_TOL, || {
                format!("J={j}: constraint residual {c:.3e}, cond {:.2e}", gs.condition_estimate())
            })?;
            let fnorm = norm_profile(f.profile(), &g);
            for psi in &fields {
                let d = inner_product_profile(f.profile(), psi)
                    - inner_product_volume(&res.estimate, psi).expect("same grid");
                let rel = d.norm() / (fnorm * norm_volume(psi));
                worst_o = worst_o.max(rel);
                ensure(rel <= ORTHOGONALITY_TOL, || format!("J={j}: residual not orthogonal, {rel:.3e}"))?;
            }
        }
    }
    // Gram from measured traces at k = 1..10
    let mut min_eig = f64::INFINITY;
    let data = grid(8192, &[0.5, 0.75, 1.0]);
    for f in [source_f1(), source_f2()] {
        let ks: Vec<f64> = (1..=10).map(f64::from).collect();
        let entries = ks
            .iter()
            .map(|&k| helmsrc_core::Measurement {
                k,
                trace: solve_direct(&m, &f, k, &data).expect("solve").boundary_value(),
                h: Complex64::new(1.0, 0.0),
            })
            .collect();
        let set = helmsrc_core::MeasurementSet::new(entries, 2.0, Default::default()).expect("set");
        let fields = adjoint_fields(&m, &set, &g).map_err(|e| e.to_string())?;
        let gs = assemble_gram(&fields, &set).map_err(|e| e.to_string())?;
        for j in 1..=10 {
            let lead = gs.leading(j).map_err(|e| e.to_string())?;
            let mat = lead.matrix();
            let hermitian = (0..j).all(|r| (0..j).all(|c| mat[(r, c)] == mat[(c, r)].conj()));
            ensure(hermitian, || format!("J={j}: Gram not Hermitian"))?;
            let lo = lead.eigenvalues()[0] / lead.eigenvalues()[j - 1];
            min_eig = min_eig.min(lo);
            ensure(lead.eigenvalues()[0] > 0.0, || format!("J={j}: smallest eigenvalue {:.3e}", lead.eigenvalues()[0]))?;
        }
    }
    Ok(format!(
        "max constraint residual {worst_c:.2e}; max orthogonality defect {worst_o:.2e}; min λ/λmax for J ≤ 10: {min_eig:.2e}"
    ))
}

// 5. Eigen pipeline.
const EIGENVALUE_TOL: f64 = 1e-4;
const EIGEN_RECON_TOL: f64 = 5e-2;
const COEFFICIENT_TOL: f64 = 1e-4;

fn eigen_pipeline() -> Check {
    let basis = sturm_liouville_eigs(&homogeneous_medium(), &grid(4096, &[]), 10).map_err(|e| e.to_string())?;
    let mut worst_l = 0.0f64;
    for (j, &l) in basis.eigenvalues().iter().enumerate() {
        let exact = ((j + 1) as f64 * std::f64::consts::FRAC_PI_2).powi(2);
        let rel = (l / exact - 1.0).abs();
        worst_l = worst_l.max(rel);
        ensure(rel <= EIGENVALUE_TOL, || format!("λ_{} = {l} vs {exact}", j + 1))?;
    }
    let cfg = ExperimentConfig {
        medium: MediumChoice::Homogeneous,
        source: SourceChoice::F2,
        ..ExperimentConfig::default()
    };
    let report = run_eigen_experiment(&cfg, 40).map_err(|e| e.to_string())?;
    let eps = report.error("f2", 40).expect("recorded");
    ensure(eps <= EIGEN_RECON_TOL, || format!("J=40 error {eps:.3e}"))?;
    let scale = report.eigen.iter().map(|e| e.alpha_volumetric.abs()).fold(0.0, f64::max);
    let mut worst_a = 0.0f64;
    for e in &report.eigen {
        let d = Complex64::new(e.alpha_re - e.alpha_volumetric, e.alpha_im).norm() / scale;
        worst_a = worst_a.max(d);
        ensure(d <= COEFFICIENT_TOL, || format!("α_{}: {d:.3e} relative deviation", e.j))?;
    }
    Ok(format!(
        "max eigenvalue deviation {worst_l:.2e}; J=40 error {eps:.3e}; max coefficient deviation {worst_a:.2e}"
    ))
}

// 6. Non-radiating demonstration.
const SUPPRESSION_MIN: f64 = 1e4;
const CONVERGED_TOL: f64 = 1e-3;

fn nonradiating() -> Check {
    let cfg = ExperimentConfig::default();
    let a = run_nonradiating_demo(&cfg, 1.0, 2.0, 3.0).map_err(|e| e.to_string())?;
    let b = run_nonradiating_demo(&cfg, 2.0, 1.0, 3.0).map_err(|e| e.to_string())?;
    let (na, nb) = (a.nonradiating.expect("record"), b.nonradiating.expect("record"));
    ensure(na.suppression_ratio >= SUPPRESSION_MIN, || format!("ratio {:.3e}", na.suppression_ratio))?;
    ensure(na.suppression_ratio_coarse >= SUPPRESSION_MIN, || {
        format!("ratio {:.3e} on the inversion grid", na.suppression_ratio_coarse)
    })?;
    let drift = (na.trace_abs[2] - na.trace_abs_coarse[2]).abs() / na.trace_abs[2];
    ensure(drift <= CONVERGED_TOL, || format!("control trace changes by {drift:.2e} under refinement"))?;
    let oracle = (na.trace_abs[2] - na.oracle_abs[2]).abs() / na.oracle_abs[2];
    ensure(oracle <= CONVERGED_TOL, || format!("control trace off the oracle by {oracle:.2e}"))?;
    let null = na.trace_abs[0].max(na.trace_abs[1]) / na.source_norm;
    ensure(null <= 1e-8, || format!("null traces {null:.3e}·‖g‖"))?;
    ensure(na.commutation_exact, || "construction depends on frequency order".into())?;
    let w = RadialPolynomial::bump(0.5, 5).expect("bump");
    ensure(
        make_nonradiating(&w, 1.0, 2.0).ok() == make_nonradiating(&w, 2.0, 1.0).ok(),
        || "construction depends on frequency order".into(),
    )?;
    let swapped = [nb.trace_abs[1], nb.trace_abs[0], nb.trace_abs[2]];
    ensure(swapped == na.trace_abs, || "swapped construction gives a different report".into())?;
    Ok(format!(
        "suppression {:.2e} (data grid), {:.2e} (inversion grid); control trace drift {drift:.1e}",
        na.suppression_ratio, na.suppression_ratio_coarse
    ))
}

// 7. Determinism.
fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .expect("dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.file_name().is_some_and(|n| n != "timings.json"))
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).expect("read")))
        .collect();
    v.sort();
    v
}

fn determinism() -> Check {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig {
        frequencies: (1..=20).map(f64::from).collect(),
        source: SourceChoice::F2,
        sigma_rel: 1e-2,
        seed: 99,
        ..ExperimentConfig::default()
    };
    let mut files = 0;
    for (name, run) in [
        ("reconstruct", run_reconstruction as fn(&ExperimentConfig) -> helmsrc_cli::Result<_>),
        ("eigen", |c: &ExperimentConfig| run_eigen_experiment(c, 20)),
        ("nonrad", |c: &ExperimentConfig| run_nonradiating_demo(c, 1.0, 2.0, 3.0)),
    ] {
        let mut outs = Vec::new();
        for rep in 0..2 {
            let dir = root.path().join(format!("{name}-{rep}"));
            let report = run(&cfg).map_err(|e| e.to_string())?;
            export_all(&report, &dir).map_err(|e| e.to_string())?;
            outs.push(artifacts(&dir));
        }
        ensure(!outs[0].is_empty(), || format!("{name}: nothing written"))?;
        for ((fa, a), (fb, b)) in outs[0].iter().zip(&outs[1]) {
            ensure(fa == fb && a == b, || format!("{name}: {fa} differs between runs"))?;
        }
        ensure(outs[0].len() == outs[1].len(), || format!("{name}: file sets differ"))?;
        files += outs[0].len();
    }
    Ok(format!("{files} CSV/JSON artifacts byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("error table", table1_reproduction),
        ("solver oracle equivalence", solver_oracles),
        ("variational identity", variational_identity),
        ("minimum-norm properties", min_norm_properties),
        ("eigen pipeline", eigen_pipeline),
        ("non-radiating demonstration", nonradiating),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
