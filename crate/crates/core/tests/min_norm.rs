//! Projection properties of the minimum-norm reconstruction.

use std::sync::Arc;

use helmsrc_core::media::{paper_medium, source_f1, source_f2};
use helmsrc_core::radial::{inner_product_profile, inner_product_volume, norm_profile, norm_volume};
use helmsrc_core::reconstruction::{volumetric_constraints, ComplexMatrix, Provenance};
use helmsrc_core::{
    adjoint_fields, assemble_gram, minimum_norm_reconstruction, solve_adjoint, solve_direct,
    Complex64, GramSystem, Measurement, MeasurementSet, MediumSpec, RadialField, RadialGrid,
    Regularization, SourceSpec,
};
use proptest::prelude::*;

fn grid(elements: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::build(2.0, elements + 1, &[0.5, 0.75, 1.0]).unwrap())
}

fn unit_fields(m: &MediumSpec, ks: &[f64], g: &Arc<RadialGrid>) -> Vec<RadialField> {
    ks.iter().map(|&k| solve_adjoint(m, Complex64::new(1.0, 0.0), k, g).unwrap()).collect()
}

fn gram_of(fields: &[RadialField], rhs: Vec<Complex64>) -> GramSystem {
    let n = fields.len();
    let mut g = ComplexMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for r in 0..n {
        for c in 0..n {
            g[(r, c)] = inner_product_volume(&fields[c], &fields[r]).unwrap();
        }
    }
    GramSystem::from_parts(g, rhs).unwrap()
}

/// Frequencies spaced by π/2, where the homogeneous adjoint fields are
/// nearly orthogonal and the Gram matrix stays well conditioned.
fn separated(j: usize) -> Vec<f64> {
    (1..=j).map(|i| i as f64 * std::f64::consts::FRAC_PI_2).collect()
}

fn measured(m: &MediumSpec, f: &SourceSpec, ks: &[f64], g: &Arc<RadialGrid>) -> MeasurementSet {
    let entries = ks
        .iter()
        .map(|&k| Measurement {
            k,
            trace: solve_direct(m, f, k, g).unwrap().boundary_value(),
            h: m.h(k).unwrap(),
        })
        .collect();
    MeasurementSet::new(entries, 2.0, Provenance::default()).unwrap()
}

#[test]
fn volumetric_constraints_are_satisfied() {
    let m = paper_medium();
    let g = grid(2048);
    let fields = unit_fields(&m, &separated(20), &g);
    for f in [source_f1(), source_f2()] {
        let gs = gram_of(&fields, volumetric_constraints(&f, &fields));
        assert!(gs.condition_estimate() < 1e6, "cond {}", gs.condition_estimate());
        let res = minimum_norm_reconstruction(&fields, &gs, Regularization::None).unwrap();
        let worst = res.diagnostics.constraint_residuals.iter().copied().fold(0.0, f64::max);
        assert!(worst <= 1e-8, "max constraint residual {worst}");
    }
}

#[test]
fn residual_is_orthogonal_to_every_field() {
    let m = paper_medium();
    let g = grid(2048);
    let fields = unit_fields(&m, &separated(20), &g);
    let f = source_f2();
    let gs = gram_of(&fields, volumetric_constraints(&f, &fields));
    let res = minimum_norm_reconstruction(&fields, &gs, Regularization::None).unwrap();
    let fnorm = norm_profile(f.profile(), &g);
    for psi in &fields {
        let d = inner_product_profile(f.profile(), psi) - inner_product_volume(&res.estimate, psi).unwrap();
        let rel = d.norm() / (fnorm * norm_volume(psi));
        assert!(rel <= 1e-8, "{rel}");
    }
}

#[test]
fn measured_constraints_match_volumetric_ones() {
    // h⁻¹‖γu‖² = ⟨f, ψ⟩ for ψ solved with η = γu, up to rounding.
    let m = paper_medium();
    let g = grid(2048);
    let f = source_f2();
    let set = measured(&m, &f, &[1.0, 2.0, 3.0], &g);
    let fields = adjoint_fields(&m, &set, &g).unwrap();
    let gs = assemble_gram(&fields, &set).unwrap();
    for (c, v) in gs.rhs().iter().zip(volumetric_constraints(&f, &fields)) {
        assert!((c - v).norm() <= 1e-6 * c.norm(), "{c} vs {v}");
    }
}

#[test]
fn gram_is_positive_definite_for_few_frequencies() {
    let m = paper_medium();
    let g = grid(2048);
    for f in [source_f1(), source_f2()] {
        let ks: Vec<f64> = (1..=10).map(f64::from).collect();
        let set = measured(&m, &f, &ks, &g);
        let fields = adjoint_fields(&m, &set, &g).unwrap();
        let gs = assemble_gram(&fields, &set).unwrap();
        for j in 1..=10 {
            let lead = gs.leading(j).unwrap();
            let mat = lead.matrix();
            for r in 0..j {
                for c in 0..j {
                    assert_eq!(mat[(r, c)], mat[(c, r)].conj());
                }
            }
            assert!(lead.eigenvalues()[0] > 0.0, "J={j}: {:?}", lead.eigenvalues());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Any feasible g = f_min + δ with δ orthogonal to the span has ‖g‖ ≥ ‖f_min‖.
    #[test]
    fn minimum_norm_among_feasible_points(
        coeffs in proptest::collection::vec(-1.0f64..1.0, 8),
        phases in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 4),
    ) {
        let m = paper_medium();
        let g = grid(256);
        let fields = unit_fields(&m, &separated(6), &g);
        let f = source_f2();
        let gs = gram_of(&fields, volumetric_constraints(&f, &fields));
        let fmin = minimum_norm_reconstruction(&fields, &gs, Regularization::None).unwrap().estimate;

        // random q, then remove its projection onto span{ψ_j}
        let q = RadialField::from_fn(g.clone(), |r| {
            let mut v = Complex64::new(0.0, 0.0);
            for (i, c) in coeffs.iter().enumerate() {
                v += Complex64::from_polar(*c, phases[i % 4] * i as f64) * r.powi(i as i32 % 4) * (1.0 + i as f64 * r).cos();
            }
            v
        });
        let qc: Vec<Complex64> = fields.iter().map(|psi| inner_product_volume(&q, psi).unwrap()).collect();
        let pq = minimum_norm_reconstruction(&fields, &gram_of(&fields, qc), Regularization::None)
            .unwrap()
            .estimate;
        let feasible: Vec<Complex64> = fmin
            .values()
            .iter()
            .zip(q.values())
            .zip(pq.values())
            .map(|((a, b), c)| a + b - c)
            .collect();
        let feasible = RadialField::untagged(g.clone(), feasible).unwrap();
        for psi in &fields {
            let d = inner_product_volume(&feasible, psi).unwrap() - inner_product_volume(&fmin, psi).unwrap();
            prop_assert!(d.norm() <= 1e-9 * norm_volume(psi) * (1.0 + norm_volume(&q)));
        }
        prop_assert!(norm_volume(&feasible) >= norm_volume(&fmin) * (1.0 - 1e-12));
    }
}
