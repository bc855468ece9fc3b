mod common;

use common::*;
use dlpack::certifier::{certify, AngleData, CertifyOptions, Status};
use dlpack::constraints::{CellFunctions, ConstraintForm, Vec9};
use dlpack::geom::{normalize_polygon, ConvexPolygon, Point2};
use dlpack::halfplg::{canonicalize, minimize_area};
use proptest::prelude::*;

fn fast() -> CertifyOptions {
    CertifyOptions { trials: 500, ..CertifyOptions::default() }
}

fn same_vertex_set(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    a.len() == b.len() && a.vertices().iter().all(|p| b.vertices().iter().any(|q| p.dist(*q) < tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalize_ignores_order_and_orientation(seed in 0u64..10_000, shift in 0usize..12, rev in any::<bool>()) {
        let poly = random_polygons(seed).next().unwrap();
        let mut pts = poly.vertices().to_vec();
        let len = pts.len();
        pts.rotate_left(shift % len);
        if rev {
            pts.reverse();
        }
        let again = normalize_polygon(&pts, 1e-10).unwrap();
        prop_assert!((again.area() - poly.area()).abs() < 1e-12);
        prop_assert!(same_vertex_set(&poly, &again, 1e-14));
        prop_assert!(again.vertex(0).dist(pts[0]) < 1e-14);
    }

    #[test]
    fn density_is_similarity_invariant(
        seed in 0u64..10_000,
        angle in -3.0f64..3.0,
        scale in 0.2f64..5.0,
        dx in -10.0f64..10.0,
        dy in -10.0f64..10.0,
    ) {
        let poly = random_polygons(seed).next().unwrap();
        let moved = poly.map(|p| p.rotate(angle) * scale + Point2::new(dx, dy)).unwrap();
        let a = minimize_area(&poly, TOL).unwrap();
        let b = minimize_area(&moved, TOL).unwrap();
        prop_assert!((b.min_area - scale * scale * a.min_area).abs() < 1e-9 * b.min_area);
        let (da, db) = (poly.area() / (2.0 * a.min_area), moved.area() / (2.0 * b.min_area));
        prop_assert!((da - db).abs() < 1e-9, "{da} vs {db}");
        prop_assert!(da <= 1.0 + 1e-12);
    }
}

#[test]
fn sweep_motion_is_the_null_direction() {
    let mut checked = 0;
    for poly in random_polygons(7).take(60) {
        let rep = certify(&poly, &fast()).unwrap();
        for c in rep.certificates.iter().filter(|c| c.status == Status::StronglyExtreme) {
            let angles = c.angles.as_ref().unwrap();
            let from_motion = angles.z0_from_velocities();
            let closed = angles.z0_closed();
            let k = closed[0] / from_motion[0];
            for i in 0..9 {
                assert!((from_motion[i] * k - closed[i]).abs() < 1e-9, "{from_motion:?} vs {closed:?}");
            }
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} certified minimizers");
}

#[test]
fn regular_polygon_minimizers_form_rotation_orbits() {
    for n in 5..=12 {
        let poly = ConvexPolygon::regular(n, 1.0).unwrap();
        let rep = certify(&poly, &fast()).unwrap();
        assert!(rep.density > 0.89 && rep.density <= 1.0 + 1e-12, "n={n}: {}", rep.density);
        assert_eq!(rep.certificates.len() % n, 0, "n={n}: minimizers come in rotation orbits");
    }
}

/// Weak LP duality: with `eta' >= 0` and `eta' G = c'`, every linearized feasible
/// direction (`G z >= 0`) has `c' . z >= 0`.
#[test]
fn linearized_dual_bounds_feasible_directions() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut certified = 0;
    for poly in random_polygons(11).take(40) {
        let rep = certify(&poly, &fast()).unwrap();
        let Some(c) = rep.certificates.iter().find(|c| c.status == Status::StronglyExtreme) else { continue };
        certified += 1;
        let dual = c.dual.as_ref().unwrap();
        assert!(dual.eta_prime.iter().all(|x| *x > 0.0));
        let canon = canonicalize(&poly, &c.config, TOL).unwrap();
        let cells = CellFunctions::build(&canon.polygon, &canon.config, ConstraintForm::Contact).unwrap();
        let lin = cells.linearize();
        let c_prime = Vec9::from(dual.c_prime);
        let pinv = lin.g.pseudo_inverse(1e-12).unwrap();
        let e0 = Vec9::from(dual.eta0);
        for _ in 0..2000 {
            // Nonnegative right-hand side in the range of G (orthogonal to eta0).
            let mut w = Vec9::from_fn(|_, _| rng.random::<f64>());
            let pos: f64 = (0..9).filter(|&i| e0[i] > 0.0).map(|i| e0[i] * w[i]).sum();
            let neg: f64 = (0..9).filter(|&i| e0[i] < 0.0).map(|i| -e0[i] * w[i]).sum();
            for i in 0..9 {
                if e0[i] > 0.0 {
                    w[i] *= neg.min(pos) / pos;
                } else if e0[i] < 0.0 {
                    w[i] *= neg.min(pos) / neg;
                }
            }
            let z = pinv * w + Vec9::from(dual.z0) * (rng.random::<f64>() - 0.5);
            let gz = lin.g * z;
            assert!(gz.iter().all(|x| *x > -1e-9), "construction left the cone: {gz:?}");
            assert!(c_prime.dot(&z) > -1e-9 * z.norm(), "dual bound violated");
        }
    }
    assert!(certified >= 10);
}

#[test]
fn closed_forms_hold_on_random_minimizers() {
    let mut n = 0;
    for poly in random_polygons(3).take(40) {
        let rep = certify(&poly, &fast()).unwrap();
        for c in rep.certificates.iter().filter(|c| c.dual.is_some()) {
            let canon = canonicalize(&poly, &c.config, TOL).unwrap();
            let angles = AngleData::new(&canon);
            assert!((angles.a - angles.a_stationary()).abs() < 1e-8);
            let d = c.dual.as_ref().unwrap();
            assert!(d.z0_residual < 1e-8 && d.grouped.closed_form_residual < 1e-8);
            n += 1;
        }
    }
    assert!(n >= 20);
}
