//! Algebraic invariants under randomized inputs.

use std::sync::Arc;

use helmsrc_core::helmholtz::check_variational_identity;
use helmsrc_core::media::{homogeneous_medium, paper_medium};
use helmsrc_core::radial::{inner_product_volume, norm_volume};
use helmsrc_core::{
    solve_adjoint, solve_direct, Complex64, PiecewiseRadialProfile, RadialField, RadialGrid,
    Segment, SegmentShape, SourceSpec,
};
use proptest::prelude::*;

fn grid(elements: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::build(2.0, elements + 1, &[0.75, 1.0]).unwrap())
}

fn poly_source(coeffs: &[f64], support: f64) -> SourceSpec {
    let seg = Segment { lo: 0.0, hi: support, shape: SegmentShape::Polynomial(coeffs.to_vec()) };
    SourceSpec::new(PiecewiseRadialProfile::new(2.0, vec![seg], 0.0).unwrap(), support).unwrap()
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_product_is_hermitian(a in complex_vec(33), b in complex_vec(33), s in (-2.0f64..2.0, -2.0f64..2.0)) {
        let g = grid(32);
        let fa = RadialField::untagged(g.clone(), a).unwrap();
        let fb = RadialField::untagged(g.clone(), b).unwrap();
        let ab = inner_product_volume(&fa, &fb).unwrap();
        let ba = inner_product_volume(&fb, &fa).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12 * (1.0 + ab.norm()));
        let aa = inner_product_volume(&fa, &fa).unwrap();
        prop_assert!(aa.im.abs() <= 1e-12 * aa.re.abs() && aa.re >= 0.0);
        prop_assert!((aa.re.sqrt() - norm_volume(&fa)).abs() <= 1e-12 * (1.0 + aa.re.sqrt()));
        let c = Complex64::new(s.0, s.1);
        let cab = inner_product_volume(&fa.scaled(c), &fb).unwrap();
        prop_assert!((cab - ab * c).norm() <= 1e-12 * (1.0 + cab.norm()));
        let acb = inner_product_volume(&fa, &fb.scaled(c)).unwrap();
        prop_assert!((acb - ab * c.conj()).norm() <= 1e-12 * (1.0 + acb.norm()));
    }

    #[test]
    fn direct_solve_is_linear_in_the_source(
        c1 in proptest::collection::vec(-1.0f64..1.0, 3),
        c2 in proptest::collection::vec(-1.0f64..1.0, 3),
        k in 0.5f64..10.0,
    ) {
        let g = grid(512);
        let m = paper_medium();
        let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + 2.0 * b).collect();
        let u1 = solve_direct(&m, &poly_source(&c1, 0.5), k, &g).unwrap().boundary_value();
        let u2 = solve_direct(&m, &poly_source(&c2, 0.5), k, &g).unwrap().boundary_value();
        let us = solve_direct(&m, &poly_source(&sum, 0.5), k, &g).unwrap().boundary_value();
        prop_assert!((us - u1 - u2 * 2.0).norm() <= 1e-9 * (1.0 + u1.norm() + u2.norm()));
    }

    #[test]
    fn variational_identity_for_random_data(
        coeffs in proptest::collection::vec(-1.0f64..1.0, 4),
        support_step in 8usize..56,
        eta in (-2.0f64..2.0, -2.0f64..2.0),
        k in 0.25f64..10.0,
        layered in any::<bool>(),
    ) {
        let g = grid(1024);
        let m = if layered { paper_medium() } else { homogeneous_medium() };
        let f = poly_source(&coeffs, support_step as f64 / 32.0);
        let res = check_variational_identity(&m, &f, Complex64::new(eta.0, eta.1), k, &g).unwrap();
        prop_assert!(res <= 1e-8, "residual {}", res);
    }

    #[test]
    fn adjoint_solve_is_linear_in_the_data(
        e1 in (-2.0f64..2.0, -2.0f64..2.0),
        e2 in (-2.0f64..2.0, -2.0f64..2.0),
        k in 0.5f64..10.0,
    ) {
        let g = grid(256);
        let m = paper_medium();
        let (a, b) = (Complex64::new(e1.0, e1.1), Complex64::new(e2.0, e2.1));
        let pa = solve_adjoint(&m, a, k, &g).unwrap();
        let pb = solve_adjoint(&m, b, k, &g).unwrap();
        let ps = solve_adjoint(&m, a + b, k, &g).unwrap();
        let scale = norm_volume(&pa) + norm_volume(&pb);
        let diff: Vec<Complex64> = ps
            .values()
            .iter()
            .zip(pa.values().iter().zip(pb.values()))
            .map(|(s, (x, y))| s - x - y)
            .collect();
        let diff = RadialField::untagged(g.clone(), diff).unwrap();
        prop_assert!(norm_volume(&diff) <= 1e-10 * (1.0 + scale));
    }
}

#[test]
fn grid_snaps_breakpoints_onto_nodes() {
    for n in [10usize, 97, 1000] {
        let g = RadialGrid::build(2.0, n + 1, &[0.3, 1.37]).unwrap();
        assert_eq!(g.len(), n + 1);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        for &b in g.breakpoints() {
            assert!(g.has_node(b));
        }
    }
}
