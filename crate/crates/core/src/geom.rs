//! Planar primitives and convex polygon normalization.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Point2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Point2 {
        self / self.norm()
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn rotate(self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2::new(a[0], a[1])
    }
}

impl From<(f64, f64)> for Point2 {
    fn from(a: (f64, f64)) -> Self {
        Point2::new(a.0, a.1)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    fn div(self, s: f64) -> Point2 {
        Point2::new(self.x / s, self.y / s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Signed area of triangle abc, positive when counterclockwise.
pub fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Twice the signed area of triangle abc.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Shoelace area, positive for counterclockwise order.
pub fn polygon_signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * s
}

/// Location of a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryRef {
    Vertex { index: usize },
    /// Edge `index` runs from vertex `index` to vertex `index + 1`; `t` is in (0, 1).
    EdgeInterior { index: usize, t: f64 },
}

impl BoundaryRef {
    pub fn is_vertex(&self) -> bool {
        matches!(self, BoundaryRef::Vertex { .. })
    }
}

/// Convex polygon with counterclockwise vertices, no duplicates, no collinear triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    area: f64,
    /// Characteristic length (half the largest vertex distance) used to scale tolerances.
    scale: f64,
}

impl ConvexPolygon {
    pub fn new(raw: &[Point2], tol: f64) -> Result<Self> {
        normalize_polygon(raw, tol)
    }

    /// Regular n-gon with vertex 0 at `(radius, 0)`.
    pub fn regular(n: usize, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::DegeneratePolygon(format!("regular polygon needs n >= 3, got {n}")));
        }
        let pts: Vec<Point2> = (0..n)
            .map(|i| Point2::from_angle(2.0 * std::f64::consts::PI * i as f64 / n as f64) * radius)
            .collect();
        normalize_polygon(&pts, crate::Tolerances::default().geom)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge vector of edge `i` (from vertex i to vertex i+1).
    pub fn edge(&self, i: usize) -> Point2 {
        self.vertex(i + 1) - self.vertex(i)
    }

    pub fn edge_endpoints(&self, i: usize) -> (Point2, Point2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.len();
        let mut c = Point2::ZERO;
        let mut a2 = 0.0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertex(i + 1));
            let w = p.cross(q);
            c += (p + q) * w;
            a2 += w;
        }
        c / (3.0 * a2)
    }

    /// Image under an orientation-preserving similarity (or any map that keeps CCW order).
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        let pts: Vec<Point2> = self.vertices.iter().map(|&p| f(p)).collect();
        let area = polygon_signed_area(&pts);
        if area <= 0.0 {
            return Err(Error::DegeneratePolygon("mapped polygon lost orientation".into()));
        }
        let scale = half_diameter(&pts);
        Ok(ConvexPolygon { vertices: pts, area, scale })
    }

    /// Classify a point known to lie (within tolerance) on the boundary.
    pub fn locate(&self, p: Point2, tol: f64) -> Result<BoundaryRef> {
        let eps = tol * self.scale;
        for (i, &v) in self.vertices.iter().enumerate() {
            if v.dist(p) <= eps {
                return Ok(BoundaryRef::Vertex { index: i });
            }
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for i in 0..self.len() {
            let (a, b) = self.edge_endpoints(i);
            let e = b - a;
            let t = ((p - a).dot(e) / e.norm2()).clamp(0.0, 1.0);
            let d = (a + e * t).dist(p);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, i, t));
            }
        }
        let (d, i, t) = best.expect("polygon has edges");
        if d > 1e3 * eps.max(f64::EPSILON * self.scale) {
            return Err(Error::NotOnBoundary { x: p.x, y: p.y, distance: d });
        }
        Ok(BoundaryRef::EdgeInterior { index: i, t })
    }

    /// Support function h(u) = max <v, u>.
    pub fn support(&self, u: Point2) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Intersection of the line `{x : cross(dir, x - base) = offset}` with the polygon,
    /// returned as (backward, forward) endpoints along `dir` (a unit vector).
    pub fn line_section(&self, base: Point2, dir: Point2, offset: f64) -> Option<(Point2, Point2)> {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut found = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertex(i + 1);
            let fa = dir.cross(a - base) - offset;
            let fb = dir.cross(b - base) - offset;
            let mut consider = |q: Point2| {
                let s = (q - base).dot(dir);
                lo = lo.min(s);
                hi = hi.max(s);
                found = true;
            };
            if fa == 0.0 {
                consider(a);
            }
            if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                let t = fa / (fa - fb);
                consider(a.lerp(b, t));
            }
        }
        if !found {
            return None;
        }
        // Offset measured along the left normal of dir.
        let foot = base + dir.perp() * offset;
        Some((foot + dir * lo, foot + dir * hi))
    }

    /// Separating-axis test for closed convex polygons.
    pub fn intersects(&self, other: &ConvexPolygon, tol: f64) -> bool {
        for poly in [self, other] {
            for i in 0..poly.len() {
                let nrm = poly.edge(i).perp();
                let (amin, amax) = project(self.vertices(), nrm);
                let (bmin, bmax) = project(other.vertices(), nrm);
                let eps = tol * nrm.norm();
                if amax < bmin - eps || bmax < amin - eps {
                    return false;
                }
            }
        }
        true
    }

    /// Area of the intersection with another convex polygon (Sutherland-Hodgman).
    pub fn intersection_area(&self, other: &ConvexPolygon) -> f64 {
        let mut out: Vec<Point2> = self.vertices.clone();
        for i in 0..other.len() {
            if out.is_empty() {
                return 0.0;
            }
            let (a, b) = other.edge_endpoints(i);
            let input = std::mem::take(&mut out);
            let m = input.len();
            for j in 0..m {
                let p = input[j];
                let q = input[(j + 1) % m];
                let fp = orient(a, b, p);
                let fq = orient(a, b, q);
                if fp >= 0.0 {
                    out.push(p);
                }
                if (fp >= 0.0) != (fq >= 0.0) {
                    let t = fp / (fp - fq);
                    out.push(p.lerp(q, t));
                }
            }
        }
        if out.len() < 3 {
            0.0
        } else {
            polygon_signed_area(&out).max(0.0)
        }
    }
}

fn project(pts: &[Point2], axis: Point2) -> (f64, f64) {
    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

fn half_diameter(pts: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(pts[i].dist(pts[j]));
        }
    }
    0.5 * d
}

/// Validate and canonicalize a vertex list: counterclockwise order, no duplicate or
/// collinear vertices. The list may be given in any order; the vertex closest to the
/// first input point becomes vertex 0.
pub fn normalize_polygon(raw: &[Point2], tol: f64) -> Result<ConvexPolygon> {
    if raw.len() < 3 {
        return Err(Error::DegeneratePolygon(format!("{} vertices", raw.len())));
    }
    if raw.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegeneratePolygon("non-finite coordinate".into()));
    }
    let scale = half_diameter(raw);
    if scale == 0.0 {
        return Err(Error::DegeneratePolygon("all vertices coincide".into()));
    }
    let eps = tol * scale;

    // Drop duplicates, keeping first occurrences.
    let mut pts: Vec<Point2> = Vec::with_capacity(raw.len());
    for &p in raw {
        if pts.iter().all(|q| q.dist(p) > eps) {
            pts.push(p);
        }
    }
    if pts.len() < 3 {
        return Err(Error::DegeneratePolygon("fewer than 3 distinct vertices".into()));
    }
    let first = pts[0];

    // Angular order about the vertex mean. A point set whose mean ordering is not
    // convex is rejected below, so an arbitrary input order is fine.
    let mean = pts.iter().fold(Point2::ZERO, |a, &p| a + p) / pts.len() as f64;
    pts.sort_by(|a, b| (*a - mean).angle().total_cmp(&(*b - mean).angle()));

    // Remove collinear vertices and reject reflex ones.
    loop {
        let n = pts.len();
        if n < 3 {
            return Err(Error::DegeneratePolygon("collinear vertices".into()));
        }
        let mut removed = false;
        for i in 0..n {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            let len = (c - a).norm().max(eps);
            // Distance of b from the line ac, positive when b is a convex turn.
            let d = orient(a, b, c) / len;
            if d.abs() <= eps {
                pts.remove(i);
                removed = true;
                break;
            }
            if d < 0.0 {
                return Err(Error::NonConvexInput { vertex: i });
            }
        }
        if !removed {
            break;
        }
    }
    let area = polygon_signed_area(&pts);
    if area <= eps * scale {
        return Err(Error::DegeneratePolygon(format!("area {area:e}")));
    }
    // Angular sort can still wind twice for pathological inputs; check total turning.
    let n = pts.len();
    let mut turn = 0.0;
    for i in 0..n {
        let e0 = pts[(i + 1) % n] - pts[i];
        let e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
        turn += e0.cross(e1).atan2(e0.dot(e1));
    }
    if (turn - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
        return Err(Error::NonConvexInput { vertex: 0 });
    }
    let start = pts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.dist(first).total_cmp(&b.1.dist(first)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    pts.rotate_left(start);
    let scale = half_diameter(&pts);
    Ok(ConvexPolygon { vertices: pts, area, scale })
}

/// One representative chord of maximal length in a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    /// Endpoint reached going backward along the direction.
    pub tail: Point2,
    /// Endpoint reached going forward along the direction.
    pub head: Point2,
    pub tail_ref: BoundaryRef,
    pub head_ref: BoundaryRef,
}

impl Chord {
    pub fn length(&self) -> f64 {
        self.head.dist(self.tail)
    }
}

/// Longest chord(s) of a polygon in a fixed direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineDiameter {
    pub length: f64,
    pub unique: bool,
    /// One chord when unique, otherwise the two extreme members of the family.
    pub extremes: Vec<Chord>,
}

/// Longest chord parallel to `dir`.
///
/// The chord length is concave and piecewise linear in the offset of the chord, with
/// breakpoints at vertex offsets, so its maximum is attained at a vertex offset. A
/// plateau between two distinct vertex offsets means the diameter is not unique.
pub fn longest_chord(poly: &ConvexPolygon, dir: Point2, tol: f64) -> Result<AffineDiameter> {
    if !(dir.norm() > 0.0) || !dir.is_finite() {
        return Err(Error::DegeneratePolygon("zero chord direction".into()));
    }
    let d = dir.normalized();
    let base = poly.vertex(0);
    let mut samples: Vec<(f64, f64, Point2, Point2)> = Vec::with_capacity(poly.len());
    for v in poly.vertices() {
        let off = d.cross(*v - base);
        if let Some((a, b)) = poly.line_section(base, d, off) {
            samples.push((off, b.dist(a), a, b));
        }
    }
    let best = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let eps = tol * poly.scale();
    let mut winners: Vec<&(f64, f64, Point2, Point2)> =
        samples.iter().filter(|s| s.1 >= best - eps).collect();
    winners.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = winners[0];
    let hi = winners[winners.len() - 1];
    let mk = |s: &(f64, f64, Point2, Point2)| -> Result<Chord> {
        Ok(Chord { tail: s.2, head: s.3, tail_ref: poly.locate(s.2, tol)?, head_ref: poly.locate(s.3, tol)? })
    };
    if hi.0 - lo.0 <= eps {
        let c = mk(lo)?;
        Ok(AffineDiameter { length: c.length(), unique: true, extremes: vec![c] })
    } else {
        Ok(AffineDiameter { length: best, unique: false, extremes: vec![mk(lo)?, mk(hi)?] })
    }
}

/// Orientation-preserving similarity q -> s R (q - m), stored as a complex multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    /// Complex multiplier (s cos t, s sin t).
    pub mul: Point2,
    /// Point sent to the origin.
    pub center: Point2,
}

impl Similarity {
    /// Map sending `p1` to (1, 0) and `p4` to (-1, 0).
    pub fn to_canonical(p1: Point2, p4: Point2, tol: f64) -> Result<Self> {
        let d = (p1 - p4) * 0.5;
        if d.norm() <= tol {
            return Err(Error::DegeneratePolygon("coincident diameter endpoints".into()));
        }
        // mul * d = 1  =>  mul = conj(d) / |d|^2
        let mul = Point2::new(d.x, -d.y) / d.norm2();
        Ok(Similarity { mul, center: (p1 + p4) * 0.5 })
    }

    pub fn scale(&self) -> f64 {
        self.mul.norm()
    }

    pub fn apply(&self, q: Point2) -> Point2 {
        let w = q - self.center;
        Point2::new(self.mul.x * w.x - self.mul.y * w.y, self.mul.x * w.y + self.mul.y * w.x)
    }

    /// Apply only the linear part.
    pub fn apply_vec(&self, w: Point2) -> Point2 {
        Point2::new(self.mul.x * w.x - self.mul.y * w.y, self.mul.x * w.y + self.mul.y * w.x)
    }

    pub fn inverse_apply(&self, q: Point2) -> Point2 {
        let inv = Point2::new(self.mul.x, -self.mul.y) / self.mul.norm2();
        Point2::new(inv.x * q.x - inv.y * q.y, inv.x * q.y + inv.y * q.x) + self.center
    }
}

/// Similarity taking an affine diameter to the segment from (-1, 0) to (1, 0).
pub fn similarity_to_canonical(p1: Point2, p4: Point2) -> Result<Similarity> {
    Similarity::to_canonical(p1, p4, 0.0)
}

/// Random convex polygon with `n` vertices: points at random angles on a random
/// ellipse, each pushed outward a little, rejected until convex.
pub fn random_convex_polygon<R: rand::Rng>(rng: &mut R, n: usize) -> ConvexPolygon {
    loop {
        let aspect = rng.random_range(0.4..1.0);
        let tilt = rng.random_range(0.0..std::f64::consts::PI);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Point2> = angles
            .iter()
            .map(|&t| {
                let r = 1.0 + rng.random_range(0.0..0.08);
                Point2::new(r * t.cos(), aspect * r * t.sin()).rotate(tilt)
            })
            .collect();
        if let Ok(p) = normalize_polygon(&pts, 1e-10) {
            if p.len() == n {
                return p;
            }
        }
    }
}
