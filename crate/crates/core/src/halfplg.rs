//! Half-length parallelograms inscribed in a convex polygon, the sweep over all
//! affine diameters, and minimization of the parallelogram area.
//!
//! Labels follow the usual convention: `p1`, `p4` are the endpoints of an affine
//! diameter, `p2`/`p3` the endpoints of the half-length chord on its left (with
//! `p2 - p3 = (p1 - p4) / 2`) and `p6`/`p5` those on its right (`p6 - p5 = (p1 - p4) / 2`).
//! Arrays indexed by label use index `i - 1` for `p_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{longest_chord, BoundaryRef, ConvexPolygon, Point2, Similarity};

/// Six labeled points of a half-length parallelogram together with their boundary locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelogramConfig {
    pub points: [Point2; 6],
    pub refs: [BoundaryRef; 6],
}

impl ParallelogramConfig {
    /// Validate six points against the half-length conditions.
    pub fn from_points(poly: &ConvexPolygon, points: [Point2; 6], tol: f64) -> Result<Self> {
        let eps = 1e3 * tol * poly.scale();
        let mut refs = [BoundaryRef::Vertex { index: 0 }; 6];
        for (i, p) in points.iter().enumerate() {
            refs[i] = poly.locate(*p, tol).map_err(|_| Error::NotHalfLength(format!("p{} is off the boundary", i + 1)))?;
        }
        let d = points[0] - points[3];
        if (points[1] - points[2] - d * 0.5).norm() > eps || (points[5] - points[4] - d * 0.5).norm() > eps {
            return Err(Error::NotHalfLength("chords are not half the diameter".into()));
        }
        let diam = longest_chord(poly, d, tol)?;
        if d.norm() < diam.length - eps {
            return Err(Error::NotHalfLength("p1p4 is not an affine diameter".into()));
        }
        let side = |q: Point2| d.cross(q - points[3]);
        if side(points[1]) <= 0.0 || side(points[2]) <= 0.0 || side(points[4]) >= 0.0 || side(points[5]) >= 0.0 {
            return Err(Error::NotHalfLength("chords on the wrong side of the diameter".into()));
        }
        Ok(ParallelogramConfig { points, refs })
    }

    pub fn p(&self, label: usize) -> Point2 {
        self.points[label - 1]
    }

    pub fn diameter(&self) -> Point2 {
        self.points[0] - self.points[3]
    }

    /// Area of the parallelogram p2 p3 p5 p6.
    pub fn area(&self) -> f64 {
        (self.diameter() * 0.5).cross(self.p(3) - self.p(5))
    }

    /// Same parallelogram with labels shifted by three (p1 <-> p4, p2 <-> p5, p3 <-> p6).
    pub fn relabeled(&self) -> Self {
        let mut points = self.points;
        let mut refs = self.refs;
        points.rotate_left(3);
        refs.rotate_left(3);
        ParallelogramConfig { points, refs }
    }

    pub fn map(&self, poly_image: &ConvexPolygon, sim: &Similarity, tol: f64) -> Result<Self> {
        let points = self.points.map(|p| sim.apply(p));
        let mut refs = self.refs;
        for (i, p) in points.iter().enumerate() {
            refs[i] = poly_image.locate(*p, tol)?;
        }
        Ok(ParallelogramConfig { points, refs })
    }

    /// Labels whose point is a polygon vertex.
    pub fn vertex_labels(&self) -> Vec<usize> {
        (0..6).filter(|&i| self.refs[i].is_vertex()).map(|i| i + 1).collect()
    }

    fn max_dist(&self, other: &ParallelogramConfig) -> f64 {
        (0..6).map(|i| self.points[i].dist(other.points[i])).fold(0.0, f64::max)
    }
}

/// Edge-direction data of a configuration (angles in radians).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigGeometry {
    /// Unit vector along the edge at or after each point (counterclockwise side).
    pub v: [Point2; 6],
    /// Unit vector along the edge at or before each point, pointing counterclockwise.
    pub u: [Point2; 6],
    pub phi: [f64; 6],
    pub chi: [f64; 6],
    /// Distance from each point to the nearest vertex along its edge (zero at vertices).
    pub l: [f64; 6],
}

impl ConfigGeometry {
    pub fn new(poly: &ConvexPolygon, cfg: &ParallelogramConfig) -> Self {
        let mut v = [Point2::ZERO; 6];
        let mut u = [Point2::ZERO; 6];
        let mut l = [0.0; 6];
        let n = poly.len();
        for i in 0..6 {
            match cfg.refs[i] {
                BoundaryRef::Vertex { index } => {
                    v[i] = poly.edge(index).normalized();
                    u[i] = poly.edge(index + n - 1).normalized();
                }
                BoundaryRef::EdgeInterior { index, t } => {
                    let e = poly.edge(index);
                    v[i] = e.normalized();
                    u[i] = v[i];
                    l[i] = t.min(1.0 - t) * e.norm();
                }
            }
        }
        ConfigGeometry { v, u, phi: v.map(|w| w.angle()), chi: u.map(|w| w.angle()), l }
    }
}

/// Evolution speeds `c_i` along the edges, normalized so that `c4 = 2 sin(phi3 - phi2) sin(phi6 - phi5)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Velocities {
    pub c: [f64; 6],
    /// Residual of `c1 v1 - c4 v4 = 2 c2 v2 - 2 c3 v3 = 2 c6 v6 - 2 c5 v5`.
    pub residual: f64,
    /// Set when the motion collapses (for example when phi3 = phi2).
    pub degenerate: bool,
}

/// Speeds along the given edge angles with `p1` held fixed.
pub fn velocities_from_angles(phi: &[f64; 6], dirs: &[Point2; 6]) -> Velocities {
    let s = |a: usize, b: usize| (phi[a - 1] - phi[b - 1]).sin();
    let c = [
        0.0,
        s(4, 3) * s(6, 5),
        s(4, 2) * s(6, 5),
        2.0 * s(3, 2) * s(6, 5),
        s(6, 4) * s(3, 2),
        s(5, 4) * s(3, 2),
    ];
    let q = |i: usize| dirs[i - 1] * c[i - 1];
    let lhs = q(1) - q(4);
    let top = (q(2) - q(3)) * 2.0;
    let bot = (q(6) - q(5)) * 2.0;
    let residual = (lhs - top).norm().max((lhs - bot).norm());
    let degenerate = c[3].abs() < 1e-12 && c.iter().all(|x| x.abs() < 1e-12);
    Velocities { c, residual, degenerate: degenerate || c[3].abs() < 1e-12 }
}

/// Evolution speeds of a non-pivotal configuration.
pub fn evolution_velocities(poly: &ConvexPolygon, cfg: &ParallelogramConfig) -> Result<Velocities> {
    let g = ConfigGeometry::new(poly, cfg);
    if is_pivotal(&g) {
        return Err(Error::PivotalConfiguration);
    }
    Ok(velocities_from_angles(&g.phi, &g.v))
}

fn motion_vector(vel: &Velocities, dirs: &[Point2; 6]) -> Vec<f64> {
    let mut out = Vec::with_capacity(12);
    for i in 0..6 {
        let w = dirs[i] * vel.c[i];
        out.push(w.x);
        out.push(w.y);
    }
    let n = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        out.iter_mut().for_each(|x| *x /= n);
    }
    out
}

/// A configuration is pivotal when the motion leaving it forward differs from the
/// motion arriving at it, i.e. the counterclockwise and clockwise edge data disagree.
pub fn is_pivotal(g: &ConfigGeometry) -> bool {
    let fwd = motion_vector(&velocities_from_angles(&g.phi, &g.v), &g.v);
    let bwd = motion_vector(&velocities_from_angles(&g.chi, &g.u), &g.u);
    let dot: f64 = fwd.iter().zip(&bwd).map(|(a, b)| a * b).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    let diff = fwd.iter().zip(&bwd).map(|(a, b)| (a - sign * b).powi(2)).sum::<f64>().sqrt();
    let zero_f = fwd.iter().all(|x| *x == 0.0);
    let zero_b = bwd.iter().all(|x| *x == 0.0);
    zero_f != zero_b || diff > 1e-7
}

/// Which diameter endpoint stays at a polygon vertex along a sweep piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pivot {
    /// `p1` fixed, `p4` slides.
    P1,
    /// `p4` fixed, `p1` slides.
    P4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// The diameter moves and every point follows a fixed edge.
    Regular,
    /// The diameter is frozen while a half-length chord slides along an edge parallel to it.
    Slide,
}

/// One piece of the labeled sweep. Every point is affine in the parameter:
/// `p_i(s) = origin[i] + s * velocity[i]` for `s` in `s_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPiece {
    pub kind: PieceKind,
    pub pivot: Pivot,
    /// Index of the edge along which the moving diameter endpoint slides.
    pub edge: usize,
    /// Vertex index of the fixed diameter endpoint.
    pub pivot_vertex: usize,
    pub s_range: (f64, f64),
    pub origin: [Point2; 6],
    pub velocity: [Point2; 6],
    /// Area as `a0 + a1 s + a2 s^2`.
    pub area: [f64; 3],
    pub diameter_unique: bool,
}

impl SweepPiece {
    pub fn point(&self, label: usize, s: f64) -> Point2 {
        self.origin[label - 1] + self.velocity[label - 1] * s
    }

    pub fn points_at(&self, s: f64) -> [Point2; 6] {
        std::array::from_fn(|i| self.origin[i] + self.velocity[i] * s)
    }

    pub fn area_at(&self, s: f64) -> f64 {
        self.area[0] + s * (self.area[1] + s * self.area[2])
    }

    pub fn slope_at(&self, s: f64) -> f64 {
        self.area[1] + 2.0 * self.area[2] * s
    }

    /// Area coefficients in `y = 1 - 2 s`, the position of the sliding endpoint
    /// measured in half-edge units from the edge midpoint (y = 1 at the edge start).
    pub fn area_in_y(&self) -> [f64; 3] {
        let [a0, a1, a2] = self.area;
        // s = (1 - y) / 2
        [a0 + a1 / 2.0 + a2 / 4.0, -a1 / 2.0 - a2 / 2.0, a2 / 4.0]
    }

    pub fn y_range(&self) -> (f64, f64) {
        (1.0 - 2.0 * self.s_range.1, 1.0 - 2.0 * self.s_range.0)
    }

    /// Configuration at `s`, relabeled so that `p1` is the fixed endpoint.
    pub fn config_at(&self, poly: &ConvexPolygon, s: f64, tol: f64) -> Result<ParallelogramConfig> {
        let points = self.points_at(s);
        let mut refs = [BoundaryRef::Vertex { index: 0 }; 6];
        for (i, p) in points.iter().enumerate() {
            refs[i] = poly.locate(*p, tol)?;
        }
        let cfg = ParallelogramConfig { points, refs };
        Ok(match self.pivot {
            Pivot::P1 => cfg,
            Pivot::P4 => cfg.relabeled(),
        })
    }
}

/// The full closed loop of labeled half-length parallelograms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub pieces: Vec<SweepPiece>,
}

#[derive(Debug, Clone, Copy)]
struct Family {
    pivot: Pivot,
    edge: usize,
    vertex: usize,
}

impl Family {
    fn diameter_ends(&self, poly: &ConvexPolygon) -> ((Point2, Point2), (Point2, Point2)) {
        // Returns ((p1 origin, p1 velocity), (p4 origin, p4 velocity)).
        let fixed = (poly.vertex(self.vertex), Point2::ZERO);
        let moving = (poly.vertex(self.edge), poly.edge(self.edge));
        match self.pivot {
            Pivot::P1 => (fixed, moving),
            Pivot::P4 => (moving, fixed),
        }
    }
}

fn are_parallel(a: Point2, b: Point2, tol: f64) -> bool {
    a.cross(b).abs() <= tol * a.norm() * b.norm()
}

/// Order the 2n sliding events by the direction of the diameter. Each polygon edge is
/// slid over once by `p4` (with `p1` fixed) and once by `p1` (with `p4` fixed). At
/// antiparallel edge pairs the `p4` move is taken first, which gives a staircase
/// through the family of non-unique diameters.
fn families(poly: &ConvexPolygon, tol: f64) -> Vec<Family> {
    let n = poly.len();
    // Direction swept by an event: p1 sliding on edge k moves along E_k; p4 sliding on
    // edge k corresponds to the diameter direction of -E_k.
    let ang = |p: Point2| p.angle().rem_euclid(std::f64::consts::TAU);
    let mut all: Vec<f64> = (0..n).flat_map(|k| [ang(poly.edge(k)), ang(-poly.edge(k))]).collect();
    all.sort_by(f64::total_cmp);
    let mut gap = (all[0] + std::f64::consts::TAU - all[all.len() - 1], all[all.len() - 1]);
    for w in all.windows(2) {
        if w[1] - w[0] > gap.0 {
            gap = (w[1] - w[0], w[0]);
        }
    }
    let reference = gap.1 + gap.0 / 2.0;
    let rel = |p: Point2| (p.angle() - reference).rem_euclid(std::f64::consts::TAU);
    let start1 = (0..n).min_by(|&a, &b| rel(poly.edge(a)).total_cmp(&rel(poly.edge(b)))).unwrap();
    let start4 = (0..n).min_by(|&a, &b| rel(-poly.edge(a)).total_cmp(&rel(-poly.edge(b)))).unwrap();

    let mut out = Vec::with_capacity(2 * n);
    let (mut i1, mut i4) = (0, 0);
    let mut v1 = start1;
    let mut v4 = start4;
    while i1 < n || i4 < n {
        let k1 = (start1 + i1) % n;
        let k4 = (start4 + i4) % n;
        let take4 = if i1 == n {
            true
        } else if i4 == n {
            false
        } else {
            let e1 = poly.edge(k1);
            let e4 = -poly.edge(k4);
            if are_parallel(e1, e4, tol) && e1.dot(e4) > 0.0 {
                true
            } else {
                rel(e4) < rel(e1)
            }
        };
        if take4 {
            out.push(Family { pivot: Pivot::P1, edge: k4, vertex: v1 });
            v4 = (k4 + 1) % n;
            i4 += 1;
        } else {
            out.push(Family { pivot: Pivot::P4, edge: k1, vertex: v4 });
            v1 = (k1 + 1) % n;
            i1 += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct SideChord {
    fwd: Point2,
    bwd: Point2,
}

/// Half-length chord parallel to `d` on one side (`side` = +1 left, -1 right) of the
/// line through `base`.
fn side_chord(poly: &ConvexPolygon, base: Point2, d: Point2, side: f64) -> Option<SideChord> {
    let dn = d.normalized();
    let half = d.norm() / 2.0;
    let mut offs: Vec<f64> = poly.vertices().iter().map(|v| side * dn.cross(*v - base)).filter(|t| *t > 0.0).collect();
    offs.sort_by(f64::total_cmp);
    offs.dedup();
    let width = |t: f64| poly.line_section(base, dn, side * t).map(|(a, b)| b.dist(a)).unwrap_or(0.0);
    let (mut tp, mut wp) = (0.0, width(0.0).max(d.norm()));
    for &t in &offs {
        let w = width(t);
        if w < half {
            let ts = tp + (wp - half) / (wp - w) * (t - tp);
            let (a, b) = poly.line_section(base, dn, side * ts)?;
            return Some(SideChord { fwd: b, bwd: a });
        }
        tp = t;
        wp = w;
    }
    // A full edge parallel to d at least half as long: the chord can slide along it.
    let (a, b) = poly.line_section(base, dn, side * tp)?;
    Some(SideChord { fwd: b, bwd: b - (b - a) * (half / b.dist(a)) })
}

/// Half-length chords for the diameter from `p4` to `p1`: returns (p2, p3, p5, p6).
pub fn half_length_chords(poly: &ConvexPolygon, p1: Point2, p4: Point2) -> Option<[Point2; 4]> {
    let d = p1 - p4;
    let top = side_chord(poly, p4, d, 1.0)?;
    let bot = side_chord(poly, p4, d, -1.0)?;
    Some([top.fwd, top.bwd, bot.bwd, bot.fwd])
}

/// Pair of points on edges `a`, `b` with `pa - pb = D(s)/2`, affine in `s`.
fn solve_pair(
    poly: &ConvexPolygon,
    a: usize,
    b: usize,
    d0: Point2,
    d1: Point2,
) -> Option<((Point2, Point2), (Point2, Point2))> {
    let (qa, ea) = (poly.vertex(a), poly.edge(a));
    let (qb, eb) = (poly.vertex(b), poly.edge(b));
    // alpha ea - beta eb = rhs
    let det = -ea.cross(eb);
    if det.abs() <= 1e-12 * ea.norm() * eb.norm() {
        return None;
    }
    let solve = |r: Point2| -> (f64, f64) {
        let alpha = -r.cross(eb) / det;
        let beta = -ea.cross(r) / det;
        (alpha, beta)
    };
    let (a0, b0) = solve(d0 * 0.5 - qa + qb);
    let (a1, b1) = solve(d1 * 0.5);
    Some(((qa + ea * a0, ea * a1), (qb + eb * b0, eb * b1)))
}

fn candidate_edges(poly: &ConvexPolygon, p: Point2, tol: f64) -> Vec<usize> {
    let n = poly.len();
    match poly.locate(p, tol) {
        Ok(BoundaryRef::Vertex { index }) => vec![index, (index + n - 1) % n],
        Ok(BoundaryRef::EdgeInterior { index, .. }) => vec![index],
        Err(_) => vec![],
    }
}

/// Linear form of the pair (p_fwd, p_bwd) near parameter `s`, where `p_fwd - p_bwd = D/2`.
fn pair_form(
    poly: &ConvexPolygon,
    fwd: Point2,
    bwd: Point2,
    d0: Point2,
    d1: Point2,
    s: f64,
    tol: f64,
) -> Option<((Point2, Point2), (Point2, Point2))> {
    let eps = 1e3 * tol * poly.scale();
    for a in candidate_edges(poly, fwd, tol) {
        for b in candidate_edges(poly, bwd, tol) {
            if let Some(sol) = solve_pair(poly, a, b, d0, d1) {
                let pf = sol.0 .0 + sol.0 .1 * s;
                let pb = sol.1 .0 + sol.1 .1 * s;
                if pf.dist(fwd) <= eps && pb.dist(bwd) <= eps {
                    return Some(sol);
                }
            }
        }
    }
    None
}

/// Parameters in (0, 1) where some chord endpoint passes through a polygon vertex.
fn breakpoint_candidates(poly: &ConvexPolygon, p4_0: Point2, p4_1: Point2, d0: Point2, d1: Point2, tol: f64) -> Vec<f64> {
    let n = poly.len();
    let mut out = vec![0.0, 1.0];
    let eps = tol * poly.scale();
    for j in 0..n {
        let v = poly.vertex(j);
        // (sign of the partner offset, side) for p2, p3, p6, p5 at v.
        for (sgn, side) in [(-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            for e in 0..n {
                let (q, ee) = (poly.vertex(e), poly.edge(e));
                // partner = v + sgn * D(s) / 2 must lie on edge e.
                let k0 = ee.cross(v + d0 * (0.5 * sgn) - q);
                let k1 = ee.cross(d1 * (0.5 * sgn));
                if k1.abs() <= 1e-14 * ee.norm() * d1.norm() {
                    continue;
                }
                let s = -k0 / k1;
                if !(s > 1e-12 && s < 1.0 - 1e-12) {
                    continue;
                }
                let partner = v + (d0 + d1 * s) * (0.5 * sgn);
                let t = (partner - q).dot(ee) / ee.norm2();
                if t < -1e-9 || t > 1.0 + 1e-9 {
                    continue;
                }
                let d = d0 + d1 * s;
                let p4 = p4_0 + p4_1 * s;
                let off = side * d.normalized().cross(v - p4);
                if off > eps {
                    out.push(s);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

fn area_coeffs(d0: Point2, d1: Point2, p3: (Point2, Point2), p5: (Point2, Point2)) -> [f64; 3] {
    let w0 = p3.0 - p5.0;
    let w1 = p3.1 - p5.1;
    [0.5 * d0.cross(w0), 0.5 * (d0.cross(w1) + d1.cross(w0)), 0.5 * d1.cross(w1)]
}

fn family_pieces(poly: &ConvexPolygon, fam: Family, tol: f64) -> Result<Vec<SweepPiece>> {
    let ((p1_0, p1_1), (p4_0, p4_1)) = fam.diameter_ends(poly);
    let d0 = p1_0 - p4_0;
    let d1 = p1_1 - p4_1;
    let cuts = breakpoint_candidates(poly, p4_0, p4_1, d0, d1, tol);
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (sa, sb) = (w[0], w[1]);
        if sb - sa < 1e-12 {
            continue;
        }
        let sm = 0.5 * (sa + sb);
        let p1 = p1_0 + p1_1 * sm;
        let p4 = p4_0 + p4_1 * sm;
        let [q2, q3, q5, q6] = half_length_chords(poly, p1, p4)
            .ok_or_else(|| Error::DegeneratePolygon("no half-length chord".into()))?;
        let top = pair_form(poly, q2, q3, d0, d1, sm, tol);
        let bot = pair_form(poly, q6, q5, d0, d1, sm, tol);
        let (top, bot) = match (top, bot) {
            (Some(t), Some(b)) => (t, b),
            _ => sampled_forms(poly, p1_0, p1_1, p4_0, p4_1, sa, sb)?,
        };
        let origin = [p1_0, top.0 .0, top.1 .0, p4_0, bot.1 .0, bot.0 .0];
        let velocity = [p1_1, top.0 .1, top.1 .1, p4_1, bot.1 .1, bot.0 .1];
        let unique = longest_chord(poly, p1 - p4, tol).map(|d| d.unique).unwrap_or(true);
        pieces.push(SweepPiece {
            kind: PieceKind::Regular,
            pivot: fam.pivot,
            edge: fam.edge,
            pivot_vertex: fam.vertex,
            s_range: (sa, sb),
            origin,
            velocity,
            area: area_coeffs(d0, d1, top.1, bot.1),
            diameter_unique: unique,
        });
    }
    Ok(pieces)
}

type PairForm = ((Point2, Point2), (Point2, Point2));

/// Fallback for a piece where both chord endpoints ride parallel edges: fit the affine
/// forms through two direct evaluations.
fn sampled_forms(
    poly: &ConvexPolygon,
    p1_0: Point2,
    p1_1: Point2,
    p4_0: Point2,
    p4_1: Point2,
    sa: f64,
    sb: f64,
) -> Result<(PairForm, PairForm)> {
    let eval = |s: f64| half_length_chords(poly, p1_0 + p1_1 * s, p4_0 + p4_1 * s);
    let (s0, s1) = (sa + 0.25 * (sb - sa), sb - 0.25 * (sb - sa));
    let a = eval(s0).ok_or_else(|| Error::DegeneratePolygon("no half-length chord".into()))?;
    let b = eval(s1).ok_or_else(|| Error::DegeneratePolygon("no half-length chord".into()))?;
    let form = |i: usize| {
        let vel = (b[i] - a[i]) / (s1 - s0);
        (a[i] - vel * s0, vel)
    };
    Ok(((form(0), form(1)), (form(3), form(2))))
}

/// Build the closed sweep of labeled half-length parallelograms.
pub fn sweep(poly: &ConvexPolygon, tol: f64) -> Result<Sweep> {
    let mut regular = Vec::new();
    for fam in families(poly, 1e-9) {
        regular.extend(family_pieces(poly, fam, tol)?);
    }
    let eps = 1e3 * tol * poly.scale();
    let m = regular.len();
    let mut pieces = Vec::with_capacity(2 * m);
    for i in 0..m {
        let cur = &regular[i];
        let next = &regular[(i + 1) % m];
        let end = cur.points_at(cur.s_range.1);
        let start = next.points_at(next.s_range.0);
        pieces.push(cur.clone());
        let gap = (0..6).map(|k| end[k].dist(start[k])).fold(0.0, f64::max);
        if gap > eps {
            let a_end = cur.area_at(cur.s_range.1);
            let a_start = next.area_at(next.s_range.0);
            let d = end[0] - end[3];
            pieces.push(SweepPiece {
                kind: PieceKind::Slide,
                pivot: cur.pivot,
                edge: cur.edge,
                pivot_vertex: cur.pivot_vertex,
                s_range: (0.0, 1.0),
                origin: end,
                velocity: std::array::from_fn(|k| start[k] - end[k]),
                area: [a_end, a_start - a_end, 0.0],
                diameter_unique: longest_chord(poly, d, tol).map(|x| x.unique).unwrap_or(true),
            });
        }
    }
    Ok(Sweep { pieces })
}

/// Where along the sweep a minimum sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimumLocation {
    Interior,
    Breakpoint,
    /// A constant stretch of the sweep (regular or sliding).
    Plateau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub area: f64,
    pub config: ParallelogramConfig,
    pub piece: usize,
    pub s: f64,
    pub location: MinimumLocation,
    pub isolated: bool,
    /// Second derivative of the area in the `y` parameter (interior minima only).
    pub second_derivative_y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaMinimization {
    pub sweep: Sweep,
    /// All local minima found along the sweep, deduplicated.
    pub local_minima: Vec<Minimizer>,
    /// Indices into `local_minima` attaining the global minimum.
    pub global: Vec<usize>,
    pub min_area: f64,
}

impl AreaMinimization {
    pub fn global_minimizers(&self) -> impl Iterator<Item = &Minimizer> {
        self.global.iter().map(|&i| &self.local_minima[i])
    }
}

/// Minimize the half-length parallelogram area over all affine diameters.
pub fn minimize_area(poly: &ConvexPolygon, tol: f64) -> Result<AreaMinimization> {
    let sw = sweep(poly, tol)?;
    let sc2 = poly.scale() * poly.scale();
    let eps_a = 1e-9 * sc2;
    let m = sw.pieces.len();
    let mut found: Vec<Minimizer> = Vec::new();

    let flat = |p: &SweepPiece| {
        let len = p.s_range.1 - p.s_range.0;
        p.area[1].abs() * len + p.area[2].abs() * len * len <= eps_a
    };
    // Direction of change leaving a piece forward from its start / arriving at its end.
    let rises = |p: &SweepPiece| {
        let sl = p.slope_at(p.s_range.0);
        sl > eps_a || (sl.abs() <= eps_a && p.area[2] > eps_a)
    };
    let falls = |p: &SweepPiece| {
        let sl = p.slope_at(p.s_range.1);
        sl < -eps_a || (sl.abs() <= eps_a && p.area[2] > eps_a)
    };

    for (i, p) in sw.pieces.iter().enumerate() {
        if p.kind == PieceKind::Regular && p.area[2] > eps_a {
            let s = -p.area[1] / (2.0 * p.area[2]);
            let margin = 1e-9 * (p.s_range.1 - p.s_range.0);
            if s > p.s_range.0 + margin && s < p.s_range.1 - margin {
                found.push(Minimizer {
                    area: p.area_at(s),
                    config: p.config_at(poly, s, tol)?,
                    piece: i,
                    s,
                    location: MinimumLocation::Interior,
                    isolated: true,
                    second_derivative_y: Some(2.0 * p.area_in_y()[2]),
                });
            }
        }
        // Junction between piece i and a following non-flat piece, possibly through a
        // run of flat pieces (which makes the minimum non-isolated).
        if flat(p) {
            continue;
        }
        let mut j = (i + 1) % m;
        let mut plateau = false;
        let mut steps = 0;
        while flat(&sw.pieces[j]) && steps < m {
            plateau = true;
            j = (j + 1) % m;
            steps += 1;
        }
        let q = &sw.pieces[j];
        if falls(p) && rises(q) {
            let s = p.s_range.1;
            let (piece, s_at) = if plateau { ((i + 1) % m, sw.pieces[(i + 1) % m].s_range.0) } else { (i, s) };
            let cfg_piece = &sw.pieces[piece];
            found.push(Minimizer {
                area: p.area_at(s),
                config: config_for(poly, cfg_piece, s_at, tol)?,
                piece,
                s: s_at,
                location: if plateau { MinimumLocation::Plateau } else { MinimumLocation::Breakpoint },
                isolated: !plateau,
                second_derivative_y: None,
            });
        }
    }
    if found.is_empty() {
        // Constant area along the whole sweep.
        let p = &sw.pieces[0];
        found.push(Minimizer {
            area: p.area_at(p.s_range.0),
            config: config_for(poly, p, p.s_range.0, tol)?,
            piece: 0,
            s: p.s_range.0,
            location: MinimumLocation::Plateau,
            isolated: false,
            second_derivative_y: None,
        });
    }

    // Every parallelogram appears twice in the labeled loop.
    let eps = 1e3 * tol * poly.scale();
    let mut local: Vec<Minimizer> = Vec::new();
    for f in found {
        let dup = local.iter_mut().find(|g| g.config.max_dist(&f.config) <= eps || g.config.max_dist(&f.config.relabeled()) <= eps);
        match dup {
            Some(g) => {
                g.isolated &= f.isolated;
            }
            None => local.push(f),
        }
    }
    let min_area = local.iter().map(|g| g.area).fold(f64::INFINITY, f64::min);
    let global = (0..local.len()).filter(|&i| local[i].area <= min_area + eps_a).collect();
    Ok(AreaMinimization { sweep: sw, local_minima: local, global, min_area })
}

fn config_for(poly: &ConvexPolygon, p: &SweepPiece, s: f64, tol: f64) -> Result<ParallelogramConfig> {
    p.config_at(poly, s, tol)
}

/// Area of the parallelogram on the diameter from `p4` to `p1`, computed directly.
pub fn area_for_diameter(poly: &ConvexPolygon, p1: Point2, p4: Point2) -> Option<f64> {
    let [_, p3, p5, _] = half_length_chords(poly, p1, p4)?;
    Some(((p1 - p4) * 0.5).cross(p3 - p5))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    Generic,
    Pivotal,
    ExceptionalTypeI,
    ExceptionalTypeII,
    NotIsolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerClassification {
    pub kind: ConfigKind,
    pub pivotal: bool,
    pub vertex_coincidences: Vec<usize>,
    pub diameter_unique: bool,
}

fn edge_of(r: BoundaryRef) -> Option<usize> {
    match r {
        BoundaryRef::EdgeInterior { index, .. } => Some(index),
        BoundaryRef::Vertex { .. } => None,
    }
}

fn vertex_of(r: BoundaryRef) -> Option<usize> {
    match r {
        BoundaryRef::Vertex { index } => Some(index),
        BoundaryRef::EdgeInterior { .. } => None,
    }
}

fn is_type_one(poly: &ConvexPolygon, cfg: &ParallelogramConfig, diam_unique: bool, extremes: &[(usize, usize)]) -> bool {
    let n = poly.len();
    let e = |l: usize| edge_of(cfg.refs[l - 1]);
    let (Some(e2), Some(e3), Some(e5), Some(e6)) = (e(2), e(3), e(5), e(6)) else {
        return false;
    };
    // Edges meeting at p1 and at p4.
    if let (Some(v1), Some(v4)) = (vertex_of(cfg.refs[0]), vertex_of(cfg.refs[3])) {
        if e2 == v1 && e6 == (v1 + n - 1) % n && e3 == (v4 + n - 1) % n && e5 == v4 {
            return true;
        }
    }
    if diam_unique {
        return false;
    }
    let touches = |edge: usize, v: usize| edge == v || (edge + 1) % n == v;
    let spans = |ea: usize, eb: usize, (a, b): (usize, usize)| {
        (touches(ea, a) && touches(eb, b)) || (touches(ea, b) && touches(eb, a))
    };
    for (i, &da) in extremes.iter().enumerate() {
        for (j, &db) in extremes.iter().enumerate() {
            if i != j && spans(e2, e3, da) && spans(e5, e6, db) {
                return true;
            }
        }
    }
    false
}

fn is_type_two(cfg: &ParallelogramConfig) -> bool {
    [(3, 4, 2), (2, 1, 3), (5, 4, 6), (6, 1, 5)].iter().any(|&(a, b, c)| {
        matches!((edge_of(cfg.refs[a - 1]), edge_of(cfg.refs[b - 1])), (Some(x), Some(y)) if x == y)
            && cfg.refs[c - 1].is_vertex()
    })
}

/// Classify a half-length parallelogram (isolation is decided by the sweep, not here).
pub fn classify(poly: &ConvexPolygon, cfg: &ParallelogramConfig, tol: f64) -> Result<MinimizerClassification> {
    let diam = longest_chord(poly, cfg.diameter(), tol)?;
    let extremes: Vec<(usize, usize)> = diam
        .extremes
        .iter()
        .filter_map(|c| match (vertex_of(c.tail_ref), vertex_of(c.head_ref)) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        })
        .collect();
    let g = ConfigGeometry::new(poly, cfg);
    let pivotal = is_pivotal(&g);
    let kind = if is_type_one(poly, cfg, diam.unique, &extremes) {
        ConfigKind::ExceptionalTypeI
    } else if is_type_two(cfg) {
        ConfigKind::ExceptionalTypeII
    } else if pivotal {
        ConfigKind::Pivotal
    } else {
        ConfigKind::Generic
    };
    Ok(MinimizerClassification { kind, pivotal, vertex_coincidences: cfg.vertex_labels(), diameter_unique: diam.unique })
}

/// Classification of a sweep minimizer, taking isolation into account.
pub fn classify_minimizer(poly: &ConvexPolygon, m: &Minimizer, tol: f64) -> Result<MinimizerClassification> {
    let mut c = classify(poly, &m.config, tol)?;
    if !m.isolated && matches!(c.kind, ConfigKind::Generic | ConfigKind::Pivotal) {
        c.kind = ConfigKind::NotIsolated;
    }
    Ok(c)
}

/// Configuration mapped into the frame where `p1 = (1, 0)` and `p4 = (-1, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalConfig {
    pub similarity: Similarity,
    pub polygon: ConvexPolygon,
    pub config: ParallelogramConfig,
    /// Height of the parallelogram (`p2.y - p6.y`).
    pub h: f64,
    /// Horizontal offset between the two chords (`p2.x - p6.x`).
    pub a: f64,
}

pub fn canonicalize(poly: &ConvexPolygon, cfg: &ParallelogramConfig, tol: f64) -> Result<CanonicalConfig> {
    let sim = Similarity::to_canonical(cfg.p(1), cfg.p(4), tol * poly.scale())?;
    let polygon = poly.map(|q| sim.apply(q))?;
    let points = cfg.points.map(|p| sim.apply(p));
    // Boundary references survive the similarity; recompute the edge parameters only.
    let config = ParallelogramConfig { points, refs: cfg.refs };
    let h = config.p(2).y - config.p(6).y;
    let a = config.p(2).x - config.p(6).x;
    Ok(CanonicalConfig { similarity: sim, polygon, config, h, a })
}
