//! Reference data and shared fixtures for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dlpack::geom::{random_convex_polygon, ConvexPolygon, Point2};
use dlpack::halfplg::{minimize_area, ParallelogramConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-10;

pub fn pentagon_density() -> f64 {
    (5.0 - 5f64.sqrt()) / 3.0
}

/// Minimal parallelogram area of the regular heptagon (unit circumradius).
pub const HEPTAGON_MIN_AREA: f64 = 1.5326754446782211;

/// Reference branches `(y_lo, y_hi, [a0, a1, a2])` of the area in `y` for the family with
/// `p1` at vertex 0, regular n-gons of unit circumradius.
pub fn reference_branches(n: usize) -> Vec<(f64, f64, [f64; 3])> {
    match n {
        5 => vec![(-1.0, 1.0, [1.2903580504417251, 0.0, 0.10153740507278321])],
        7 => {
            let y = 0.506040792565066;
            vec![
                (-1.0, -y, [1.5848482175212668, 0.08816765628922468, 0.06225952189759027]),
                (-y, y, [1.5326754446782211, 0.0, 0.09176757534725741]),
                (y, 1.0, [1.5848482175212668, -0.08816765628922468, 0.06225952189759027]),
            ]
        }
        9 => {
            let y = 0.30540728933227923;
            vec![
                (-1.0, -y, [1.633850356689106, 0.0797264910024892, 0.05533299936304392]),
                (-y, y, [1.6115786662088993, 0.0, 0.033061308882837155]),
                (y, 1.0, [1.633850356689106, -0.0797264910024892, 0.05533299936304392]),
            ]
        }
        _ => vec![],
    }
}

pub fn uv(n: usize) -> (f64, f64) {
    ((PI / n as f64).cos(), (PI / n as f64).sin())
}

/// The optimal pentagon parallelogram with `p1` at vertex 0.
pub fn pentagon_config(poly: &ConvexPolygon) -> ParallelogramConfig {
    let k = |i: usize| poly.vertex(i);
    let (u, _) = uv(5);
    let pts = [
        k(0),
        k(0) * 0.25 + k(1) * 0.75,
        k(1) * ((3.0 - 2.0 * u) / 4.0) + k(2) * ((1.0 + 2.0 * u) / 4.0),
        (k(2) + k(3)) * 0.5,
        k(3) * ((1.0 + 2.0 * u) / 4.0) + k(4) * ((3.0 - 2.0 * u) / 4.0),
        k(4) * 0.75 + k(0) * 0.25,
    ];
    ParallelogramConfig::from_points(poly, pts, TOL).unwrap()
}

/// Global minimizer of a regular polygon with `p1` at vertex 0.
pub fn regular_minimizer_at_vertex0(poly: &ConvexPolygon) -> ParallelogramConfig {
    let res = minimize_area(poly, TOL).unwrap();
    let cfg = res
        .global_minimizers()
        .map(|m| m.config.clone())
        .find(|c| c.p(1).dist(poly.vertex(0)) < 1e-12)
        .expect("a minimizer pivots on vertex 0");
    cfg
}

/// Pentagon constraint Jacobian and objective gradient in the polygon-edge form.
pub fn pentagon_reference() -> ([[f64; 9]; 9], [f64; 9], [f64; 9], [f64; 9]) {
    let (u, v) = uv(5);
    let h = 1.5;
    let g = [
        [-2.0 * u * v, -h + u, 0.0, 2.0 * u * v, h - u, h - u, 0.0, 0.0, 0.0],
        [-2.0 * u * v, -h + u, h - u, 2.0 * u * v, h - u, 0.0, 0.0, 0.0, 0.0],
        [-2.0 * u * v, h - u, 0.0, 0.0, 0.0, 0.0, 2.0 * u * v, -h + u, -h + u],
        [-2.0 * u * v, h - u, -h + u, 0.0, 0.0, 0.0, 2.0 * u * v, -h + u, 0.0],
        [0.0, 0.0, 0.0, v - 2.0 * u * v, -0.5 + 2.0 * u, h - u, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, v - 2.0 * u * v, -0.5 + 2.0 * u, -3.5 + 4.0 * u, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v - 2.0 * u * v, 0.5 - 2.0 * u, -h + u],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v - 2.0 * u * v, 0.5 - 2.0 * u, 3.5 - 4.0 * u],
        [-2.0 * v, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ];
    let c = [-6.0 * u * v, 0.0, 0.0, 0.0, 1.0 + u, 0.0, 0.0, -1.0 - u, 0.0];
    let a = (1.0 + u) / 10.0;
    let b = 0.4 + 0.9 * u;
    let eta = [0.25, 0.25, 0.25, 0.25, a, b, a, b, 2.0 * u];
    let z0 = [0.0, 2.0 + 4.0 * u, 0.0, 2.0 * v + 4.0 * u * v, 1.0, 0.0, -2.0 * v - 4.0 * u * v, 1.0, 0.0];
    (g, c, eta, z0)
}

/// Heptagon constraint Jacobian and objective gradient in the polygon-edge form.
pub fn heptagon_reference() -> ([[f64; 9]; 9], [f64; 9], [f64; 9], [f64; 9]) {
    let (u, v) = uv(7);
    let u2 = u * u;
    let a = v + 2.0 * u * v - 4.0 * u2 * v;
    let b = 1.5 + u - 4.0 * u2;
    let c_ = 11.0 + 2.0 * u - 16.0 * u2;
    let d = -2.0 + 2.0 * u2;
    let e = 2.0 * v - 4.0 * u2 * v;
    let f = 0.5 + 2.0 * u - 2.0 * u2;
    let h = -9.5 - u + 12.0 * u2;
    let g = [
        [a, b, c_, -a, -b, d, 0.0, 0.0, 0.0],
        [a, b, d, -a, -b, c_, 0.0, 0.0, 0.0],
        [a, -b, -c_, 0.0, 0.0, 0.0, -a, b, -d],
        [a, -b, -d, 0.0, 0.0, 0.0, -a, b, -c_],
        [0.0, 0.0, 0.0, e, f, -d, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, e, f, h, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, e, -f, d],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, e, -f, -h],
        [-2.0 * v, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ];
    let c = [7.0 * v + 2.0 * u * v - 20.0 * u2 * v, 0.0, 0.0, 0.0, 1.0 + u, 0.0, 0.0, -1.0 - u, 0.0];
    let p = (70.0 + 45.0 * u - 66.0 * u2) / 71.0;
    let q = (-141.0 - 45.0 * u + 208.0 * u2) / 71.0;
    let r = -2.0 + 4.0 * u2;
    let eta = [0.5, r, 0.5, r, p, q, p, q, -5.0 - 2.0 * u + 12.0 * u2];
    let w = -4.0 * u * v + 8.0 * u2 * v;
    let z0 = [0.0, 2.0 - 8.0 * u + 8.0 * u2, 0.0, w, 1.0, 0.0, -w, 1.0, 0.0];
    (g, c, eta, z0)
}

fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
    v.iter().map(|&p| p.into()).collect()
}

/// The three exceptional examples: (polygon, parallelogram points p1..p6).
pub fn exceptional_examples() -> Vec<(Vec<Point2>, [Point2; 6])> {
    let base = [
        (1.0, 0.0),
        (5.0 / 16.0, 44.0 / 70.0),
        (-2.0 / 9.0, 9.0 / 10.0),
        (-19.0 / 30.0, 55.0 / 90.0),
        (-1.0, 0.0),
        (0.0, -7.0 / 10.0),
    ];
    let p = |x: f64, y: f64| Point2::new(x, y);
    let top = [p(96.0 / 271.0, 160.0 / 271.0), p(-175.0 / 271.0, 160.0 / 271.0)];
    let bottom = [p(-0.5, -7.0 / 20.0), p(0.5, -7.0 / 20.0)];
    let left = (pts(&base), [p(1.0, 0.0), top[0], top[1], p(-1.0, 0.0), bottom[0], bottom[1]]);

    let dx = p(-1.0 / 40.0, 1.0 / 10.0);
    let mut mid_poly = vec![p(1.0, 0.0), p(1.0, 0.0) + dx];
    mid_poly.extend(base[1..5].iter().map(|&q| Point2::from(q) + dx));
    mid_poly.extend([p(-1.0, 0.0), p(0.0, -0.7)]);
    let middle = (mid_poly, [p(1.0, 0.0), top[0] + dx, top[1] + dx, p(-1.0, 0.0), bottom[0], bottom[1]]);

    let right_poly = pts(&[
        (1.0, 0.0),
        (256.0 / 669.0, 1888.0 / 3345.0),
        (-2.0 / 9.0, 0.75),
        (-0.6, 0.59),
        (-1.1, -59.0 / 400.0),
        (-0.7, -0.5),
        (0.0, -0.7),
        (0.65, -0.4),
    ]);
    let right = (
        right_poly,
        [
            p(1.0, 0.0),
            p(256.0 / 669.0, 1888.0 / 3345.0),
            p(-413.0 / 669.0, 1888.0 / 3345.0),
            p(-1.0, 0.0),
            p(-21.0 / 34.0, -89.0 / 170.0),
            p(13.0 / 34.0, -89.0 / 170.0),
        ],
    );
    vec![left, middle, right]
}

/// Deterministic stream of random convex polygons with 5 to 12 vertices.
pub fn random_polygons(seed: u64) -> impl Iterator<Item = ConvexPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::from_fn(move || {
        let n = rand::Rng::random_range(&mut rng, 5..=12);
        Some(random_convex_polygon(&mut rng, n))
    })
}
