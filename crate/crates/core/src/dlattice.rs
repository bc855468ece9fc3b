//! Double lattices built from half-length parallelograms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Point2};
use crate::halfplg::ParallelogramConfig;

/// Orientation-preserving plane isometry `x -> R(angle) x + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Isometry2 {
    Translation { t: Point2 },
    /// Point reflection through `center`: `x -> 2 center - x`.
    PointReflection { center: Point2 },
    General { angle: f64, t: Point2 },
}

impl Isometry2 {
    fn parts(&self) -> (f64, Point2) {
        match *self {
            Isometry2::Translation { t } => (0.0, t),
            Isometry2::PointReflection { center } => (std::f64::consts::PI, center * 2.0),
            Isometry2::General { angle, t } => (angle, t),
        }
    }

    fn from_parts(angle: f64, t: Point2) -> Self {
        let a = angle.rem_euclid(std::f64::consts::TAU);
        if a.abs() < 1e-15 || (a - std::f64::consts::TAU).abs() < 1e-15 {
            Isometry2::Translation { t }
        } else if (a - std::f64::consts::PI).abs() < 1e-15 {
            Isometry2::PointReflection { center: t * 0.5 }
        } else {
            Isometry2::General { angle: a, t }
        }
    }

    pub fn apply(&self, x: Point2) -> Point2 {
        match *self {
            Isometry2::Translation { t } => x + t,
            Isometry2::PointReflection { center } => center * 2.0 - x,
            Isometry2::General { angle, t } => x.rotate(angle) + t,
        }
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &Isometry2) -> Isometry2 {
        let (a1, t1) = self.parts();
        let (a2, t2) = other.parts();
        Isometry2::from_parts(a1 + a2, self.apply(t2) - self.apply(Point2::ZERO) + t1)
    }

    pub fn inverse(&self) -> Isometry2 {
        let (a, t) = self.parts();
        Isometry2::from_parts(-a, -t.rotate(-a))
    }
}

/// The double lattice `{x + l, 2 c - x + l : l in span_Z(t1, t2)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleLattice {
    pub t1: Point2,
    pub t2: Point2,
    pub reflection_center: Point2,
    /// Area per body (half the fundamental-domain area).
    pub cell_area: f64,
}

/// Double lattice generated by `Tran(p1 - p4)`, `Ref(p2)` and `Ref(p6)`.
pub fn from_config(cfg: &ParallelogramConfig) -> Result<DoubleLattice> {
    let t1 = cfg.p(1) - cfg.p(4);
    let t2 = (cfg.p(2) - cfg.p(6)) * 2.0;
    let det = t1.cross(t2);
    if !(det.abs() > 0.0) || !det.is_finite() {
        return Err(Error::InvalidLattice("collinear translation generators".into()));
    }
    Ok(DoubleLattice { t1, t2, reflection_center: cfg.p(2), cell_area: det.abs() / 2.0 })
}

pub fn density(poly: &ConvexPolygon, cfg: &ParallelogramConfig) -> Result<f64> {
    Ok(poly.area() / from_config(cfg)?.cell_area)
}

/// Axis-aligned window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn centered(center: Point2, half: f64) -> Rect {
        Rect { min: center - Point2::new(half, half), max: center + Point2::new(half, half) }
    }

    fn as_polygon(&self) -> Option<ConvexPolygon> {
        let pts = [self.min, Point2::new(self.max.x, self.min.y), self.max, Point2::new(self.min.x, self.max.y)];
        ConvexPolygon::new(&pts, 1e-12).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedCopy {
    pub isometry: Isometry2,
    /// Lattice coordinates (i, j) and whether the copy is reflected.
    pub index: (i64, i64, bool),
    pub polygon: ConvexPolygon,
}

/// Copies of `poly` in the packing whose closure meets `bounds`.
pub fn enumerate_packing(poly: &ConvexPolygon, dl: &DoubleLattice, bounds: Rect) -> Result<Vec<PlacedCopy>> {
    if bounds.max.x < bounds.min.x || bounds.max.y < bounds.min.y {
        return Err(Error::InvalidArgument("empty bounds".into()));
    }
    let det = dl.t1.cross(dl.t2);
    if !(det.abs() > 0.0) {
        return Err(Error::InvalidLattice("degenerate lattice".into()));
    }
    let radius = poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let c2 = dl.reflection_center * 2.0;
    let reach = radius + c2.norm();
    // Lattice coordinates of a point: solve i t1 + j t2 = q.
    let coords = |q: Point2| (q.cross(dl.t2) / det, dl.t1.cross(q) / det);
    let corners = [
        Point2::new(bounds.min.x - reach, bounds.min.y - reach),
        Point2::new(bounds.max.x + reach, bounds.min.y - reach),
        Point2::new(bounds.max.x + reach, bounds.max.y + reach),
        Point2::new(bounds.min.x - reach, bounds.max.y + reach),
    ];
    let (mut imin, mut imax, mut jmin, mut jmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in corners {
        let (i, j) = coords(c);
        imin = imin.min(i);
        imax = imax.max(i);
        jmin = jmin.min(j);
        jmax = jmax.max(j);
    }
    let window = bounds.as_polygon();
    let mut out = Vec::new();
    for i in imin.floor() as i64..=imax.ceil() as i64 {
        for j in jmin.floor() as i64..=jmax.ceil() as i64 {
            let l = dl.t1 * i as f64 + dl.t2 * j as f64;
            for reflected in [false, true] {
                let iso = if reflected {
                    Isometry2::PointReflection { center: dl.reflection_center + l * 0.5 }
                } else {
                    Isometry2::Translation { t: l }
                };
                // A point reflection is a half turn, so vertex order stays counterclockwise.
                let copy = poly.map(|p| iso.apply(p))?;
                let hit = match &window {
                    Some(w) => copy.intersects(w, 1e-12),
                    None => copy.vertices().iter().any(|p| {
                        p.x >= bounds.min.x && p.x <= bounds.max.x && p.y >= bounds.min.y && p.y <= bounds.max.y
                    }) || segment_window_hit(&copy, bounds),
                };
                if hit {
                    out.push(PlacedCopy { isometry: iso, index: (i, j, reflected), polygon: copy });
                }
            }
        }
    }
    Ok(out)
}

fn segment_window_hit(copy: &ConvexPolygon, b: Rect) -> bool {
    // Degenerate (zero-width) window: test whether the segment or point meets the copy.
    let samples = 64;
    (0..=samples).any(|k| {
        let q = b.min.lerp(b.max, k as f64 / samples as f64);
        (0..copy.len()).all(|i| {
            let (a, c) = copy.edge_endpoints(i);
            (c - a).cross(q - a) >= -1e-12
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub copies: usize,
    pub pairs_checked: usize,
    pub max_overlap: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub admissible: bool,
}

/// Check that copies meeting the window have pairwise disjoint interiors.
pub fn verify_admissible(poly: &ConvexPolygon, dl: &DoubleLattice, window: Rect, tol: f64) -> Result<Admissibility> {
    let copies = enumerate_packing(poly, dl, window)?;
    let radius = poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let centers: Vec<Point2> = copies.iter().map(|c| c.isometry.apply(Point2::ZERO)).collect();
    let mut max_overlap: f64 = 0.0;
    let mut worst = None;
    let mut pairs = 0;
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            if centers[i].dist(centers[j]) > 2.0 * radius * (1.0 + 1e-9) {
                continue;
            }
            pairs += 1;
            let a = copies[i].polygon.intersection_area(&copies[j].polygon);
            if a > max_overlap {
                max_overlap = a;
                worst = Some((i, j));
            }
        }
    }
    let bound = tol * poly.scale() * poly.scale();
    Ok(Admissibility {
        copies: copies.len(),
        pairs_checked: pairs,
        max_overlap,
        worst_pair: worst,
        admissible: max_overlap <= bound,
    })
}
