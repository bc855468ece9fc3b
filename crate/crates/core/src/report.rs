//! Serializable run configuration and certification report.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certifier::{certify, CertificationReport, CertifyOptions};
use crate::error::Result;
use crate::geom::{ConvexPolygon, Point2};
use crate::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSpec {
    Vertices { vertices: Vec<[f64; 2]> },
    Regular { n: usize, radius: f64 },
}

impl InputSpec {
    pub fn polygon(&self, tol: f64) -> Result<ConvexPolygon> {
        match self {
            InputSpec::Vertices { vertices } => {
                let pts: Vec<Point2> = vertices.iter().map(|&v| v.into()).collect();
                ConvexPolygon::new(&pts, tol)
            }
            InputSpec::Regular { n, radius } => ConvexPolygon::regular(*n, *radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSpec,
    pub options: CertifyOptions,
    /// Record wall-clock timings (makes the report non-reproducible byte for byte).
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub certify_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub input: InputSpec,
    /// Normalized (counterclockwise) vertices actually used.
    pub polygon: Vec<[f64; 2]>,
    pub polygon_area: f64,
    pub tolerances: Tolerances,
    pub options: CertifyOptions,
    pub result: CertificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

pub fn build_report(run: &RunConfig) -> Result<Report> {
    let poly = run.input.polygon(run.options.tol.geom)?;
    let start = Instant::now();
    let result = certify(&poly, &run.options)?;
    let elapsed = start.elapsed().as_secs_f64();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        input: run.input.clone(),
        polygon: poly.vertices().iter().map(|p| p.to_array()).collect(),
        polygon_area: poly.area(),
        tolerances: run.options.tol,
        options: run.options,
        result,
        timings: run.timings.then_some(Timings { certify_seconds: elapsed }),
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_determinism() {
        let run = RunConfig {
            input: InputSpec::Regular { n: 5, radius: 1.0 },
            options: CertifyOptions { trials: 500, ..Default::default() },
            timings: false,
        };
        let a = build_report(&run).unwrap();
        let b = build_report(&run).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = Report::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}
