//! Python bindings. Results cross the boundary as JSON strings or plain tuples.

use dlpack::certifier::{certify, CertifyOptions};
use dlpack::geom::{ConvexPolygon, Point2};
use dlpack::halfplg::minimize_area;
use dlpack::report::{build_report, InputSpec, RunConfig};
use dlpack::Tolerances;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: dlpack::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn polygon(vertices: Vec<(f64, f64)>) -> PyResult<ConvexPolygon> {
    let pts: Vec<Point2> = vertices.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
    ConvexPolygon::new(&pts, Tolerances::default().geom).map_err(err)
}

fn options(trials: usize, seed: u64) -> CertifyOptions {
    CertifyOptions { trials, seed, ..CertifyOptions::default() }
}

/// Normalized counterclockwise vertex list.
#[pyfunction]
fn normalize(vertices: Vec<(f64, f64)>) -> PyResult<Vec<(f64, f64)>> {
    Ok(polygon(vertices)?.vertices().iter().map(|p| (p.x, p.y)).collect())
}

/// Vertices of the regular n-gon with vertex 0 at (radius, 0).
#[pyfunction]
#[pyo3(signature = (n, radius = 1.0))]
fn regular(n: usize, radius: f64) -> PyResult<Vec<(f64, f64)>> {
    let poly = ConvexPolygon::regular(n, radius).map_err(err)?;
    Ok(poly.vertices().iter().map(|p| (p.x, p.y)).collect())
}

/// `(min_area, points)` of a minimal-area half-length parallelogram, points `p1..p6`.
#[pyfunction]
fn minimize(vertices: Vec<(f64, f64)>) -> PyResult<(f64, Vec<(f64, f64)>)> {
    let poly = polygon(vertices)?;
    let res = minimize_area(&poly, Tolerances::default().geom).map_err(err)?;
    let m = res.global_minimizers().next().ok_or_else(|| PyValueError::new_err("no minimizer"))?;
    Ok((res.min_area, m.config.points.iter().map(|p| (p.x, p.y)).collect()))
}

/// Best double-lattice packing density.
#[pyfunction]
fn density(vertices: Vec<(f64, f64)>) -> PyResult<f64> {
    let poly = polygon(vertices)?;
    let res = minimize_area(&poly, Tolerances::default().geom).map_err(err)?;
    Ok(poly.area() / (2.0 * res.min_area))
}

/// `(status, density)` of the certification.
#[pyfunction]
#[pyo3(signature = (vertices, trials = 30_000, seed = 0x5eed))]
fn certify_status(vertices: Vec<(f64, f64)>, trials: usize, seed: u64) -> PyResult<(String, f64)> {
    let poly = polygon(vertices)?;
    let rep = certify(&poly, &options(trials, seed)).map_err(err)?;
    let status = serde_json::to_value(rep.status).expect("status serializes");
    Ok((status.as_str().unwrap_or_default().to_string(), rep.density))
}

/// Full JSON report, identical to the one written by the command-line tool.
#[pyfunction]
#[pyo3(signature = (vertices, trials = 30_000, seed = 0x5eed))]
fn report_json(vertices: Vec<(f64, f64)>, trials: usize, seed: u64) -> PyResult<String> {
    let input = InputSpec::Vertices { vertices: vertices.into_iter().map(|(x, y)| [x, y]).collect() };
    let run = RunConfig { input, options: options(trials, seed), timings: false };
    Ok(build_report(&run).map_err(err)?.to_json())
}

#[pymodule]
pub fn dlpack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(regular, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(certify_status, m)?)?;
    m.add_function(wrap_pyfunction!(report_json, m)?)?;
    Ok(())
}
