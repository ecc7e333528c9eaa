//! Sturm–Liouville reconstruction against direct Fourier coefficients and the
//! minimum-norm projection.

use std::sync::Arc;

use helmsrc_core::media::{homogeneous_medium, paper_medium, source_f2};
use helmsrc_core::reconstruction::Provenance;
use helmsrc_core::{
    adjoint_fields, assemble_gram, eigen_reconstruct, minimum_norm_reconstruction,
    relative_error, solve_direct, sturm_liouville_eigs, Measurement, MeasurementSet, MediumSpec,
    RadialGrid, Regularization, SourceSpec,
};

fn grid(elements: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::build(2.0, elements + 1, &[0.5, 0.75, 1.0]).unwrap())
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
fn homogeneous_eigenvalues_at_production_resolution() {
    let basis = sturm_liouville_eigs(&homogeneous_medium(), &grid(4096), 10).unwrap();
    for (j, &l) in basis.eigenvalues().iter().enumerate() {
        let exact = ((j + 1) as f64 * std::f64::consts::FRAC_PI_2).powi(2);
        assert!((l / exact - 1.0).abs() <= 1e-4, "j={}: {l} vs {exact}", j + 1);
    }
    assert!(basis.residuals().iter().all(|&r| r <= 1e-10));
}

#[test]
fn layered_medium_basis_contract() {
    let basis = sturm_liouville_eigs(&paper_medium(), &grid(2048), 20).unwrap();
    assert!(basis.eigenvalues().windows(2).all(|w| w[1] > w[0]));
    assert!(basis.residuals().iter().all(|&r| r <= 1e-10), "{:?}", basis.residuals());
    for psi in basis.modes() {
        assert!(psi.values()[0].re > 0.0);
        assert_eq!(psi.boundary_value().norm(), 0.0);
    }
}

#[test]
fn boundary_coefficients_match_volumetric_ones() {
    let m = homogeneous_medium();
    let g = grid(4096);
    let basis = sturm_liouville_eigs(&m, &g, 40).unwrap();
    let f = source_f2();
    let data = measured(&m, &f, &basis.frequencies(), &grid(8192));
    let rec = eigen_reconstruct(&m, &basis, &data).unwrap();
    let vol = basis.volumetric_coefficients(&f);
    let scale = vol.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for (a, v) in rec.alphas.iter().zip(&vol) {
        assert!((a.re - v).abs() <= 1e-4 * scale && a.im.abs() <= 1e-4 * scale, "{a} vs {v}");
    }
    assert!(relative_error(&f, &rec).unwrap() <= 5e-2);
}

#[test]
fn zero_data_gives_zero_expansion() {
    let m = paper_medium();
    let g = grid(512);
    let basis = sturm_liouville_eigs(&m, &g, 5).unwrap();
    let data = measured(&m, &SourceSpec::zero(2.0), &basis.frequencies(), &g);
    let rec = eigen_reconstruct(&m, &basis, &data).unwrap();
    assert!(rec.estimate.values().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn frequency_mismatch_rejected() {
    let m = homogeneous_medium();
    let g = grid(512);
    let basis = sturm_liouville_eigs(&m, &g, 3).unwrap();
    let mut ks = basis.frequencies();
    ks[1] *= 1.0 + 1e-6;
    let data = measured(&m, &source_f2(), &ks, &g);
    assert!(eigen_reconstruct(&m, &basis, &data).is_err());
}

#[test]
fn eigen_and_projection_agree_at_twenty_frequencies() {
    let m = homogeneous_medium();
    let g = grid(4096);
    let basis = sturm_liouville_eigs(&m, &g, 20).unwrap();
    let f = source_f2();
    let data = measured(&m, &f, &basis.frequencies(), &grid(8192));
    let eig = relative_error(&f, &eigen_reconstruct(&m, &basis, &data).unwrap()).unwrap();
    let fields = adjoint_fields(&m, &data, &g).unwrap();
    let gs = assemble_gram(&fields, &data).unwrap();
    let proj = minimum_norm_reconstruction(&fields, &gs, Regularization::None).unwrap();
    let proj = relative_error(&f, &proj).unwrap();
    let ratio = eig.max(proj) / eig.min(proj);
    assert!(ratio <= 2.0, "eigen {eig}, projection {proj}");
}
