//! SVG rendering of a packing window.

use std::fmt::Write;

use crate::dlattice::{enumerate_packing, DoubleLattice, Rect};
use crate::error::Result;
use crate::geom::{ConvexPolygon, Point2};
use crate::halfplg::ParallelogramConfig;

fn path(pts: &[Point2]) -> String {
    let mut s = String::new();
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(s, "{}{:.6},{:.6} ", if i == 0 { "M" } else { "L" }, p.x, -p.y);
    }
    s.push('Z');
    s
}

/// Render the copies meeting `window`, the base copy and its half-length parallelogram.
pub fn render_svg(poly: &ConvexPolygon, dl: &DoubleLattice, cfg: &ParallelogramConfig, window: Rect) -> Result<String> {
    let copies = enumerate_packing(poly, dl, window)?;
    let (w, h) = (window.max.x - window.min.x, window.max.y - window.min.y);
    let stroke = 0.004 * w.max(h);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        window.min.x,
        -window.max.y,
        w,
        h
    );
    for c in &copies {
        let fill = if c.index.2 { "#c6d8ef" } else { "#f2d7b6" };
        let _ = writeln!(
            out,
            r##"  <path d="{}" fill="{fill}" stroke="#333" stroke-width="{stroke:.6}"/>"##,
            path(c.polygon.vertices())
        );
    }
    let par = [cfg.p(2), cfg.p(3), cfg.p(5), cfg.p(6)];
    let _ = writeln!(out, r##"  <path d="{}" fill="none" stroke="#b00" stroke-width="{:.6}"/>"##, path(&par), 2.0 * stroke);
    let (a, b) = (cfg.p(1), cfg.p(4));
    let _ = writeln!(
        out,
        r##"  <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="#b00" stroke-dasharray="{:.6}" stroke-width="{stroke:.6}"/>"##,
        a.x,
        -a.y,
        b.x,
        -b.y,
        4.0 * stroke
    );
    out.push_str("</svg>\n");
    Ok(out)
}
