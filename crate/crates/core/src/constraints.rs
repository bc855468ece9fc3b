//! Contact constraints of the honeycomb cell and their linearization.
//!
//! The cell holds four bodies: `xi0 = Id`, `xi1 = Tran(p1 - p4)`, `xi2 = Ref(p2)` and
//! `xi6 = Ref(p6)`. Bodies `xi0`, `xi2`, `xi6` are perturbed by
//! `Tran(x, y) . xi . Rot(theta)` (rotation about the frame origin, applied in the
//! body frame); `xi1` is held fixed. The variable vector is
//! `z = (x0, y0, theta0, x2, y2, theta2, x6, y6, theta6)`.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orient, BoundaryRef, ConvexPolygon, Point2};
use crate::halfplg::{ConfigGeometry, ParallelogramConfig};

pub type Mat9 = SMatrix<f64, 9, 9>;
pub type Vec9 = SVector<f64, 9>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Xi0,
    Xi1,
    Xi2,
    Xi6,
}

impl Body {
    /// Offset of the body's variables in `z`, if it moves.
    pub fn var_offset(self) -> Option<usize> {
        match self {
            Body::Xi0 => Some(0),
            Body::Xi1 => None,
            Body::Xi2 => Some(3),
            Body::Xi6 => Some(6),
        }
    }

    fn slot(self) -> usize {
        match self {
            Body::Xi0 => 0,
            Body::Xi1 => 1,
            Body::Xi2 => 2,
            Body::Xi6 => 3,
        }
    }
}

/// Affine placement `q -> sign * q + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub sign: f64,
    pub t: Point2,
}

pub fn base_placements(cfg: &ParallelogramConfig) -> [Placement; 4] {
    [
        Placement { sign: 1.0, t: Point2::ZERO },
        Placement { sign: 1.0, t: cfg.p(1) - cfg.p(4) },
        Placement { sign: -1.0, t: cfg.p(2) * 2.0 },
        Placement { sign: -1.0, t: cfg.p(6) * 2.0 },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactKind {
    /// Two collinear edges touching along a segment.
    EdgeEdge,
    /// A vertex of one body on an edge of another.
    VertexEdge,
}

/// One of the five contacts of a generic cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub kind: ContactKind,
    pub bodies: (Body, Body),
    /// Label of the parallelogram point whose body-frame image is the contact.
    pub label: usize,
    /// Half-length of the contact segment (distance to the nearest vertex along the edge).
    pub half_length: f64,
}

/// `weight * orient(A(x), A(x_prime), B(y))`, with points in body frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub edge_body: Body,
    pub x: Point2,
    pub x_prime: Point2,
    pub other_body: Body,
    pub y: Point2,
    pub weight: f64,
}

/// How the constraint rows are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintForm {
    /// Rows built from the contact segment ends `p_i +- l_i v_i`, divided by `l_i^2`,
    /// in the order (p2: 0|2, 2|0), (p3: 2|1, 1|2), (p5: 1|6, 6|1), (p6: 6|0, 0|6), (p4: 1|0).
    Contact,
    /// Rows built from the polygon's own edge endpoints and one edge vertex, unnormalized,
    /// in the order (p2: 0|2, 2|0), (p6: 0|6, 6|0), (p3: 1|2, 2|1), (p5: 1|6, 6|1), (p4: 1|0).
    PolygonEdge,
}

/// Contacts of a configuration. Requires `p2, p3, p5, p6` and `p4` in edge interiors.
pub fn contact_list(cfg: &ParallelogramConfig) -> Result<Vec<Contact>> {
    for label in [2, 3, 4, 5, 6] {
        if cfg.refs[label - 1].is_vertex() {
            return Err(Error::VertexCoincidence { label });
        }
    }
    let ee = |label, a, b| Contact { kind: ContactKind::EdgeEdge, bodies: (a, b), label, half_length: 0.0 };
    Ok(vec![
        ee(2, Body::Xi0, Body::Xi2),
        ee(3, Body::Xi2, Body::Xi1),
        ee(5, Body::Xi1, Body::Xi6),
        ee(6, Body::Xi6, Body::Xi0),
        Contact { kind: ContactKind::VertexEdge, bodies: (Body::Xi1, Body::Xi0), label: 4, half_length: 0.0 },
    ])
}

/// Constraint and objective functions of the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFunctions {
    pub form: ConstraintForm,
    pub placements: [Placement; 4],
    pub contacts: Vec<Contact>,
    pub rows: Vec<ConstraintRow>,
    pub f_ref: f64,
}

fn rot(q: Point2, theta: f64) -> Point2 {
    q.rotate(theta)
}

impl CellFunctions {
    /// Build the nine constraint rows in the frame in which `poly` and `cfg` are given.
    pub fn build(poly: &ConvexPolygon, cfg: &ParallelogramConfig, form: ConstraintForm) -> Result<Self> {
        let mut contacts = contact_list(cfg)?;
        let geo = ConfigGeometry::new(poly, cfg);
        for c in contacts.iter_mut() {
            c.half_length = geo.l[c.label - 1];
            if c.half_length <= 0.0 {
                return Err(Error::VertexCoincidence { label: c.label });
            }
        }
        let p1 = cfg.p(1);
        let rows = match form {
            ConstraintForm::Contact => {
                let seg = |label: usize| {
                    let (p, l, v) = (cfg.p(label), geo.l[label - 1], geo.v[label - 1]);
                    (p + v * l, p - v * l, 1.0 / (l * l))
                };
                let pair = |label: usize, a: Body, b: Body| {
                    let (x, xp, w) = seg(label);
                    ConstraintRow { edge_body: a, x, x_prime: xp, other_body: b, y: x, weight: w }
                };
                let (x4, x4p, w4) = seg(4);
                vec![
                    pair(2, Body::Xi0, Body::Xi2),
                    pair(2, Body::Xi2, Body::Xi0),
                    pair(3, Body::Xi2, Body::Xi1),
                    pair(3, Body::Xi1, Body::Xi2),
                    pair(5, Body::Xi1, Body::Xi6),
                    pair(5, Body::Xi6, Body::Xi1),
                    pair(6, Body::Xi6, Body::Xi0),
                    pair(6, Body::Xi0, Body::Xi6),
                    ConstraintRow { edge_body: Body::Xi1, x: x4, x_prime: x4p, other_body: Body::Xi0, y: p1, weight: w4 },
                ]
            }
            ConstraintForm::PolygonEdge => {
                // The contact vertex is the edge endpoint closest to the diameter endpoint
                // on the same side (p1 for p2 and p6, p4 for p3 and p5), skipping an endpoint
                // that coincides with it.
                let edge = |label: usize| -> (Point2, Point2, Point2) {
                    let BoundaryRef::EdgeInterior { index, .. } = cfg.refs[label - 1] else {
                        unreachable!("checked by contact_list")
                    };
                    let (s, e) = poly.edge_endpoints(index);
                    let anchor = if matches!(label, 2 | 6) { cfg.p(1) } else { cfg.p(4) };
                    let eps = 1e-9 * poly.scale();
                    let (ds, de) = (s.dist(anchor), e.dist(anchor));
                    let w = if ds <= eps {
                        e
                    } else if de <= eps || ds <= de {
                        s
                    } else {
                        e
                    };
                    (e, s, w)
                };
                let pair = |label: usize, a: Body, b: Body| {
                    let (e, s, w) = edge(label);
                    ConstraintRow { edge_body: a, x: e, x_prime: s, other_body: b, y: w, weight: 1.0 }
                };
                let (e4, s4, _) = edge(4);
                vec![
                    pair(2, Body::Xi0, Body::Xi2),
                    pair(2, Body::Xi2, Body::Xi0),
                    pair(6, Body::Xi0, Body::Xi6),
                    pair(6, Body::Xi6, Body::Xi0),
                    pair(3, Body::Xi1, Body::Xi2),
                    pair(3, Body::Xi2, Body::Xi1),
                    pair(5, Body::Xi1, Body::Xi6),
                    pair(5, Body::Xi6, Body::Xi1),
                    ConstraintRow { edge_body: Body::Xi1, x: e4, x_prime: s4, other_body: Body::Xi0, y: p1, weight: 1.0 },
                ]
            }
        };
        let placements = base_placements(cfg);
        let mut out = CellFunctions { form, placements, contacts, rows, f_ref: 0.0 };
        out.f_ref = out.raw_f(&[0.0; 9]);
        Ok(out)
    }

    /// Position of body point `q` under the perturbed placement.
    pub fn place(&self, body: Body, z: &[f64; 9], q: Point2) -> Point2 {
        let pl = self.placements[body.slot()];
        match body.var_offset() {
            None => q * pl.sign + pl.t,
            Some(o) => rot(q, z[o + 2]) * pl.sign + pl.t + Point2::new(z[o], z[o + 1]),
        }
    }

    pub fn g(&self, z: &[f64; 9]) -> [f64; 9] {
        std::array::from_fn(|r| {
            let row = &self.rows[r];
            row.weight
                * orient(
                    self.place(row.edge_body, z, row.x),
                    self.place(row.edge_body, z, row.x_prime),
                    self.place(row.other_body, z, row.y),
                )
        })
    }

    fn raw_f(&self, z: &[f64; 9]) -> f64 {
        let t = |b| self.place(b, z, Point2::ZERO);
        orient(t(Body::Xi0), t(Body::Xi1), t(Body::Xi2)) + orient(t(Body::Xi0), t(Body::Xi6), t(Body::Xi1))
    }

    /// Change of twice the cell area.
    pub fn f(&self, z: &[f64; 9]) -> f64 {
        self.raw_f(z) - self.f_ref
    }

    /// Gradient of a body point's position with respect to `z`, as (column, d/dz) pairs.
    fn point_jacobian(&self, body: Body, q: Point2) -> Vec<(usize, Point2)> {
        let pl = self.placements[body.slot()];
        match body.var_offset() {
            None => vec![],
            Some(o) => vec![(o, Point2::new(1.0, 0.0)), (o + 1, Point2::new(0.0, 1.0)), (o + 2, q.perp() * pl.sign)],
        }
    }

    /// Analytic Jacobians at `z = 0`.
    pub fn linearize(&self) -> LinearizedProblem {
        let z = [0.0; 9];
        let mut g = Mat9::zeros();
        for (r, row) in self.rows.iter().enumerate() {
            let a = self.place(row.edge_body, &z, row.x);
            let b = self.place(row.edge_body, &z, row.x_prime);
            let c = self.place(row.other_body, &z, row.y);
            // d orient(a, b, c) = perp(c - b).da + perp(a - c).db + perp(b - a).dc
            for (body, q, grad) in [
                (row.edge_body, row.x, (c - b).perp()),
                (row.edge_body, row.x_prime, (a - c).perp()),
                (row.other_body, row.y, (b - a).perp()),
            ] {
                for (col, d) in self.point_jacobian(body, q) {
                    g[(r, col)] += row.weight * grad.dot(d);
                }
            }
        }
        let t = |b| self.place(b, &z, Point2::ZERO);
        let mut c = Vec9::zeros();
        for (a, b, cc) in [(Body::Xi0, Body::Xi1, Body::Xi2), (Body::Xi0, Body::Xi6, Body::Xi1)] {
            let (pa, pb, pc) = (t(a), t(b), t(cc));
            for (body, grad) in [(a, (pc - pb).perp()), (b, (pa - pc).perp()), (cc, (pb - pa).perp())] {
                for (col, d) in self.point_jacobian(body, Point2::ZERO) {
                    c[col] += grad.dot(d);
                }
            }
        }
        LinearizedProblem { g, c }
    }
}

/// Jacobians of the constraints (`g`) and objective (`c`) at the unperturbed cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedProblem {
    pub g: Mat9,
    pub c: Vec9,
}

pub fn linearize(cells: &CellFunctions) -> LinearizedProblem {
    cells.linearize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplg::ParallelogramConfig;

    fn pentagon() -> (ConvexPolygon, ParallelogramConfig) {
        let poly = ConvexPolygon::regular(5, 1.0).unwrap();
        let k = |i: usize| poly.vertex(i);
        let u = (std::f64::consts::PI / 5.0).cos();
        let pts = [
            k(0),
            k(0) * 0.25 + k(1) * 0.75,
            k(1) * ((3.0 - 2.0 * u) / 4.0) + k(2) * ((1.0 + 2.0 * u) / 4.0),
            (k(2) + k(3)) * 0.5,
            k(3) * ((1.0 + 2.0 * u) / 4.0) + k(4) * ((3.0 - 2.0 * u) / 4.0),
            k(4) * 0.75 + k(0) * 0.25,
        ];
        let cfg = ParallelogramConfig::from_points(&poly, pts, 1e-10).unwrap();
        (poly, cfg)
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let (poly, cfg) = pentagon();
        for form in [ConstraintForm::Contact, ConstraintForm::PolygonEdge] {
            let cf = CellFunctions::build(&poly, &cfg, form).unwrap();
            let lin = cf.linearize();
            let h = 1e-6;
            for j in 0..9 {
                let mut zp = [0.0; 9];
                let mut zm = [0.0; 9];
                zp[j] = h;
                zm[j] = -h;
                let (gp, gm) = (cf.g(&zp), cf.g(&zm));
                for r in 0..9 {
                    let fd = (gp[r] - gm[r]) / (2.0 * h);
                    assert!((fd - lin.g[(r, j)]).abs() < 1e-7, "{form:?} row {r} col {j}");
                }
                let fd = (cf.f(&zp) - cf.f(&zm)) / (2.0 * h);
                assert!((fd - lin.c[j]).abs() < 1e-7);
            }
            assert!(cf.g(&[0.0; 9]).iter().all(|x| x.abs() < 1e-12));
            assert_eq!(cf.f(&[0.0; 9]), 0.0);
        }
    }

    #[test]
    fn vertex_contact_rejected() {
        let (_, mut cfg) = pentagon();
        cfg.refs[1] = BoundaryRef::Vertex { index: 1 };
        assert_eq!(contact_list(&cfg), Err(Error::VertexCoincidence { label: 2 }));
    }
}
