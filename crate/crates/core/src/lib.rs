//! Densest double-lattice packings of convex polygons, and local-optimality
//! certificates for the minimal-area half-length parallelogram.

pub mod certifier;
pub mod constraints;
pub mod dlattice;
pub mod error;
pub mod geom;
pub mod halfplg;
pub mod linalg;
pub mod report;
pub mod svg;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use geom::{ConvexPolygon, Point2};

/// Numerical tolerances shared across modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative geometric tolerance (scaled by the polygon size).
    pub geom: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Positivity margin for dual multipliers.
    pub pos: f64,
    /// Stationarity residual bound.
    pub stat: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { geom: 1e-10, rank: 1e-8, pos: 1e-9, stat: 1e-8 }
    }
}

/// A margin closer than this factor times its tolerance is reported as inconclusive.
pub const INCONCLUSIVE_FACTOR: f64 = 10.0;
