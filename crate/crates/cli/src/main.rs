use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use dlpack::certifier::{CertifyOptions, Status};
use dlpack::dlattice::{from_config, Rect};
use dlpack::report::{build_report, InputSpec, Report, RunConfig};
use dlpack::svg::render_svg;
use dlpack::Tolerances;
use serde::Deserialize;

/// Find the densest double-lattice packing of a convex polygon and certify that the
/// minimal half-length parallelogram is strongly extreme.
#[derive(Debug, Parser)]
#[command(name = "dlpack", version)]
struct Args {
    /// JSON file with {"vertices": [[x, y], ...]}.
    #[arg(long, conflicts_with = "regular", required_unless_present = "regular")]
    input: Option<PathBuf>,
    /// Use the regular n-gon instead of an input file.
    #[arg(long, value_name = "N")]
    regular: Option<usize>,
    /// Circumradius of the regular polygon.
    #[arg(long, default_value_t = 1.0, requires = "regular")]
    radius: f64,
    /// Output directory for report.json (and packing.svg).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write packing.svg into the output directory.
    #[arg(long, requires = "out")]
    svg: bool,
    /// Half-width of the rendered window, in polygon diameters.
    #[arg(long, default_value_t = 2.5)]
    window: f64,
    /// Perturbation oracle samples per minimizer.
    #[arg(long, default_value_t = 30_000)]
    trials: usize,
    /// Perturbation oracle seed.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Perturbation oracle radius.
    #[arg(long = "oracle-radius", default_value_t = 1e-3)]
    oracle_radius: f64,
    #[arg(long, default_value_t = Tolerances::default().geom)]
    tol_geom: f64,
    #[arg(long, default_value_t = Tolerances::default().pos)]
    tol_pos: f64,
    /// Print only the JSON report to stdout.
    #[arg(long)]
    json_only: bool,
    /// Include wall-clock timings in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timings: bool,
}

#[derive(Deserialize)]
struct VertexFile {
    vertices: Vec<[f64; 2]>,
}

fn run_config(args: &Args) -> Result<RunConfig> {
    let input = match (&args.input, args.regular) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: VertexFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            InputSpec::Vertices { vertices: file.vertices }
        }
        (None, Some(n)) => InputSpec::Regular { n, radius: args.radius },
        _ => bail!("give exactly one of --input or --regular"),
    };
    if !(args.oracle_radius > 0.0) || !(args.window > 0.0) {
        bail!("--oracle-radius and --window must be positive");
    }
    let tol = Tolerances { geom: args.tol_geom, pos: args.tol_pos, ..Tolerances::default() };
    let options = CertifyOptions { tol, trials: args.trials, radius: args.oracle_radius, seed: args.seed };
    Ok(RunConfig { input, options, timings: args.timings })
}

fn write_svg(report: &Report, run: &RunConfig, window: f64, path: &PathBuf) -> Result<()> {
    let poly = run.input.polygon(run.options.tol.geom)?;
    let cert = report.result.certificates.first().context("no minimizer to draw")?;
    let dl = from_config(&cert.config)?;
    let half = window * 2.0 * poly.scale();
    let svg = render_svg(&poly, &dl, &cert.config, Rect::centered(poly.centroid(), half))?;
    fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}

fn summary(report: &Report) -> String {
    let r = &report.result;
    let mut s = format!(
        "status: {:?}\nminimal parallelogram area: {:.12}\ndensity: {:.12}\nminimizers: {}\n",
        r.status,
        r.min_area,
        r.density,
        r.certificates.len()
    );
    for (i, c) in r.certificates.iter().enumerate() {
        s += &format!("  [{i}] {:?}", c.status);
        if let Some(f) = &c.failure {
            s += &format!(" ({f})");
        }
        s.push('\n');
    }
    s
}

fn run(args: &Args) -> Result<Status> {
    let run = run_config(args)?;
    let report = build_report(&run)?;
    let json = report.to_json();
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("report.json"), &json)?;
        if args.svg {
            write_svg(&report, &run, args.window, &dir.join("packing.svg"))?;
        }
    }
    if args.json_only {
        println!("{json}");
    } else {
        print!("{}", summary(&report));
    }
    Ok(report.result.status)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(Status::StronglyExtreme) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
