//! Dual certificates of strong extremality for minimal half-length parallelograms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{CellFunctions, ConstraintForm, LinearizedProblem, Mat9, Vec9};
use crate::error::{Error, Result};
use crate::geom::ConvexPolygon;
use crate::halfplg::{
    canonicalize, classify_minimizer, minimize_area, CanonicalConfig, ConfigGeometry, ConfigKind, Minimizer,
    MinimizerClassification, ParallelogramConfig,
};
use crate::linalg::{det, max_abs, rank, svd9, to_array};
use crate::{Tolerances, INCONCLUSIVE_FACTOR};

/// Null vector of `G` that is 1 on the first odd-even pair and 0 on the last row.
pub const ETA0_CONTACT: [f64; 9] = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 0.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSpaces {
    pub rank: usize,
    pub singular_values: [f64; 9],
    /// Right null vector, unit length, largest component positive.
    pub z0: [f64; 9],
    /// Left null vector, scaled so its largest-magnitude component is +1.
    pub eta0: [f64; 9],
    pub g_z0_residual: f64,
    pub eta0_g_residual: f64,
}

pub fn null_spaces(g: &Mat9, rel_tol: f64) -> NullSpaces {
    let svd = svd9(g);
    let r = rank(&svd.sigma, rel_tol);
    let mut z0 = Vec9::from_column_slice(svd.v.column(8).as_slice());
    let mut e0 = Vec9::from_column_slice(svd.u.column(8).as_slice());
    let pivot = |v: &Vec9| v.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
    z0 /= pivot(&z0).signum();
    e0 /= pivot(&e0);
    NullSpaces {
        rank: r,
        singular_values: svd.sigma,
        g_z0_residual: max_abs(&(g * z0)),
        eta0_g_residual: max_abs(&(g.transpose() * e0)),
        z0: to_array(&z0),
        eta0: to_array(&e0),
    }
}

/// Scale `v` by the least-squares factor that best matches `target`.
pub fn align(v: &[f64; 9], target: &[f64; 9]) -> [f64; 9] {
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let vt: f64 = v.iter().zip(target).map(|(a, b)| a * b).sum();
    let s = vt / vv;
    v.map(|x| x * s)
}

/// Multipliers with `eta G = c` and `eta . eta0 = 0`.
pub fn solve_eta(lin: &LinearizedProblem, ns: &NullSpaces, tol: &Tolerances) -> Result<[f64; 9]> {
    if ns.rank != 8 {
        return Err(Error::RankDeficient { rank: ns.rank });
    }
    let z0 = Vec9::from(ns.z0);
    let e0 = Vec9::from(ns.eta0);
    let cz = lin.c.dot(&z0);
    if cz.abs() > tol.rank * lin.c.norm().max(1.0) * z0.norm() {
        return Err(Error::GradientNotInRowSpace { residual: cz });
    }
    // eta (G + eta0 z0^T) = c forces eta . eta0 = (c . z0) / |z0|^2 = 0.
    let shifted: Mat9 = lin.g + e0 * z0.transpose();
    let eta = shifted
        .transpose()
        .lu()
        .solve(&lin.c)
        .ok_or(Error::RankDeficient { rank: ns.rank })?;
    Ok(to_array(&eta))
}

/// Angle and length data of a configuration in the canonical frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleData {
    /// Edge angles `phi_i` (index `i - 1`).
    pub phi: [f64; 6],
    /// Contact half-lengths `l_i` (index `i - 1`).
    pub l: [f64; 6],
    pub h: f64,
    pub a: f64,
}

impl AngleData {
    pub fn new(canon: &CanonicalConfig) -> Self {
        let g = ConfigGeometry::new(&canon.polygon, &canon.config);
        AngleData { phi: g.phi, l: g.l, h: canon.h, a: canon.a }
    }

    fn ph(&self, i: usize) -> f64 {
        self.phi[i - 1]
    }

    fn sd(&self, i: usize, j: usize) -> f64 {
        (self.ph(i) - self.ph(j)).sin()
    }

    fn cot(&self, i: usize) -> f64 {
        1.0 / self.ph(i).tan()
    }

    /// Closed-form right null vector of the contact-form constraint matrix.
    pub fn z0_closed(&self) -> [f64; 9] {
        let (p3, p4, p5) = (self.ph(3), self.ph(4), self.ph(5));
        let k3 = self.sd(2, 4) / self.sd(2, 3);
        let k5 = self.sd(4, 6) / self.sd(5, 6);
        [p4.cos(), p4.sin(), 0.0, p3.cos() * k3, p3.sin() * k3, 0.0, p5.cos() * k5, p5.sin() * k5, 0.0]
    }

    /// Closed-form pair sums `eta1+eta2, eta3+eta4, eta5+eta6, eta7+eta8` and `eta9`.
    pub fn grouped_closed(&self) -> [f64; 5] {
        let l = |i: usize| self.l[i - 1];
        let (s2, s3, s5, s6, s4) = (self.ph(2).sin(), self.ph(3).sin(), self.ph(5).sin(), self.ph(6).sin(), self.ph(4).sin());
        let top = self.sd(3, 2);
        let bot = self.sd(6, 5);
        let eta9 = -(l(4) / s4) * (self.h - 1.0 / (self.cot(3) - self.cot(2)) - 1.0 / (self.cot(6) - self.cot(5)));
        [-l(2) * s3 / top, l(3) * s2 / top, l(5) * s6 / bot, -l(6) * s5 / bot, eta9]
    }

    /// Right-hand side of `det(G - eta0 z0^T) / |z0|^2` for the closed-form `z0`.
    pub fn det_closed(&self) -> f64 {
        let l = |i: usize| self.l[i - 1];
        2f64.powi(14) * self.sd(3, 2) * self.sd(6, 5) / (l(2) * l(3) * l(4) * l(5) * l(6))
    }

    /// Offset `a` predicted by first-order optimality of the area.
    pub fn a_stationary(&self) -> f64 {
        let s4 = self.ph(4).sin();
        self.h * self.cot(4) - self.ph(3).sin() * self.sd(4, 2) / (s4 * self.sd(3, 2))
            + self.ph(5).sin() * self.sd(6, 4) / (s4 * self.sd(6, 5))
    }

    /// Translation motion of the cell along the sweep, `(v4, 0, 2 p2' + v4, 0, 2 p6' + v4, 0)`
    /// with `p4' = v4`.
    pub fn z0_from_velocities(&self) -> [f64; 9] {
        let dirs = self.phi.map(crate::geom::Point2::from_angle);
        let vel = crate::halfplg::velocities_from_angles(&self.phi, &dirs);
        let c4 = vel.c[3];
        let q = |i: usize| dirs[i - 1] * (vel.c[i - 1] / c4);
        let v4 = q(4);
        let b2 = q(2) * 2.0 + v4;
        let b6 = q(6) * 2.0 + v4;
        [v4.x, v4.y, 0.0, b2.x, b2.y, 0.0, b6.x, b6.y, 0.0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedPositivity {
    pub sums: [f64; 5],
    pub closed_form: [f64; 5],
    pub closed_form_residual: f64,
    pub min_sum: f64,
}

pub fn grouped_positivity(eta: &[f64; 9], angles: &AngleData) -> GroupedPositivity {
    let sums = [eta[0] + eta[1], eta[2] + eta[3], eta[4] + eta[5], eta[6] + eta[7], eta[8]];
    let closed_form = angles.grouped_closed();
    let closed_form_residual = sums.iter().zip(&closed_form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let min_sum = sums.iter().copied().fold(f64::INFINITY, f64::min);
    GroupedPositivity { sums, closed_form, closed_form_residual, min_sum }
}

/// Shift `eta` by `mu` (with `mu_{2k} = -mu_{2k-1}`, `mu_9 = 0`) so that each contact pair
/// gets equal multipliers. Returns `(mu, eta')`.
pub fn balance_mu(eta: &[f64; 9]) -> ([f64; 9], [f64; 9]) {
    let mut mu = [0.0; 9];
    for k in 0..4 {
        let m = (eta[2 * k + 1] - eta[2 * k]) / 2.0;
        mu[2 * k] = m;
        mu[2 * k + 1] = -m;
    }
    let eta_prime = std::array::from_fn(|i| eta[i] + mu[i]);
    (mu, eta_prime)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrder {
    /// `d^2 A / dy^2` along the sweep at the minimum (interior minima only).
    pub area_second_derivative: Option<f64>,
    /// Leading coefficient of `f(t z0)`, which is exactly quadratic in `t`.
    pub f_along_z0: f64,
    pub a: f64,
    pub a_predicted: f64,
    pub stationarity_residual: f64,
}

pub fn second_order_and_stationarity(
    cells: &CellFunctions,
    z0: &[f64; 9],
    angles: &AngleData,
    minimizer: &Minimizer,
) -> SecondOrder {
    let fp = cells.f(z0);
    let fm = cells.f(&z0.map(|x| -x));
    let a_predicted = angles.a_stationary();
    SecondOrder {
        area_second_derivative: minimizer.second_derivative_y,
        f_along_z0: 0.5 * (fp + fm),
        a: angles.a,
        a_predicted,
        stationarity_residual: angles.a - a_predicted,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub trials: usize,
    pub radius: f64,
    pub seed: u64,
    pub feasible: usize,
    pub violations: usize,
    /// Smallest `f'(z) / |z|^2` over feasible samples.
    pub min_ratio: Option<f64>,
}

/// Random feasible perturbations near the cell; any with `f + mu . g < 0` is a violation.
pub fn perturbation_oracle(
    cells: &CellFunctions,
    lin: &LinearizedProblem,
    ns: &NullSpaces,
    mu: &[f64; 9],
    trials: usize,
    radius: f64,
    seed: u64,
) -> OracleResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pinv = lin.g.pseudo_inverse(1e-12).unwrap_or_else(|_| Mat9::zeros());
    let e0 = Vec9::from(ns.eta0);
    let z0 = Vec9::from(ns.z0);
    let feas_tol = 1e-13;
    let mut feasible = 0;
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for k in 0..trials {
        let z: Vec9 = match k % 3 {
            0 => {
                // Uniform in the ball.
                let dir = Vec9::from_fn(|_, _| gaussian(&mut rng));
                let r = radius * rng.random::<f64>().powf(1.0 / 9.0);
                dir.normalize() * r
            }
            1 => {
                // Along the linearized feasible cone: G z = w with w >= 0, eta0 . w = 0.
                let mut w = Vec9::from_fn(|_, _| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random::<f64>() });
                balance_against(&mut w, &e0);
                let t = gaussian(&mut rng);
                let z = pinv * w + z0 * t;
                let n = z.norm();
                if n == 0.0 {
                    continue;
                }
                z * (radius * rng.random::<f64>() / n)
            }
            _ => {
                // Near the null direction.
                let t = radius * (2.0 * rng.random::<f64>() - 1.0);
                let noise = Vec9::from_fn(|_, _| gaussian(&mut rng)) * (radius * 1e-3 * rng.random::<f64>());
                z0 * t + noise
            }
        };
        let za = to_array(&z);
        let g = cells.g(&za);
        if g.iter().any(|x| *x < -feas_tol) {
            continue;
        }
        feasible += 1;
        let f = cells.f(&za) + g.iter().zip(mu).map(|(a, b)| a * b).sum::<f64>();
        let n2 = z.norm_squared();
        if n2 > 0.0 {
            min_ratio = min_ratio.min(f / n2);
        }
        if f < -feas_tol {
            violations += 1;
        }
    }
    OracleResult { trials, radius, seed, feasible, violations, min_ratio: min_ratio.is_finite().then_some(min_ratio) }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Make `eta0 . w = 0` while keeping `w >= 0`, by scaling down the dominant sign class.
fn balance_against(w: &mut Vec9, e0: &Vec9) {
    let pos: f64 = (0..9).filter(|&i| e0[i] > 0.0).map(|i| e0[i] * w[i]).sum();
    let neg: f64 = (0..9).filter(|&i| e0[i] < 0.0).map(|i| -e0[i] * w[i]).sum();
    if pos <= 0.0 || neg <= 0.0 {
        for i in 0..9 {
            if e0[i] != 0.0 {
                w[i] = 0.0;
            }
        }
        return;
    }
    let (scale_pos, scale_neg) = if pos > neg { (neg / pos, 1.0) } else { (1.0, pos / neg) };
    for i in 0..9 {
        if e0[i] > 0.0 {
            w[i] *= scale_pos;
        } else if e0[i] < 0.0 {
            w[i] *= scale_neg;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    StronglyExtreme,
    ExceptionalTypeI,
    ExceptionalTypeII,
    Pivotal,
    NotIsolatedMinimum,
    NumericallyInconclusive,
    /// A certificate condition fails outright (see `failure`).
    CertificateFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub g: [[f64; 9]; 9],
    pub c: [f64; 9],
    pub rank: usize,
    pub singular_values: [f64; 9],
    pub z0: [f64; 9],
    pub z0_closed_form: [f64; 9],
    pub z0_residual: f64,
    pub eta0: [f64; 9],
    pub eta: [f64; 9],
    pub mu: [f64; 9],
    pub eta_prime: [f64; 9],
    /// Gradient of the modified objective `f + mu . g`.
    pub c_prime: [f64; 9],
    pub eta_residual: f64,
    pub eta_prime_residual: f64,
    pub grouped: GroupedPositivity,
    pub det_shifted: f64,
    pub det_closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub rank_gap: f64,
    pub rank_cut: f64,
    pub positivity: f64,
    pub second_order: f64,
    pub stationarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: Status,
    pub classification: MinimizerClassification,
    pub config: ParallelogramConfig,
    pub canonical_config: ParallelogramConfig,
    pub area: f64,
    pub density: f64,
    pub angles: Option<AngleData>,
    pub dual: Option<DualCertificate>,
    pub second_order: Option<SecondOrder>,
    pub oracle: Option<OracleResult>,
    pub margins: Option<Margins>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub tol: Tolerances,
    pub trials: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { tol: Tolerances::default(), trials: 30_000, radius: 1e-3, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub status: Status,
    pub min_area: f64,
    pub density: f64,
    pub certificates: Vec<Certificate>,
}

/// Minimize, classify and certify every global minimizer of `poly`.
pub fn certify(poly: &ConvexPolygon, opts: &CertifyOptions) -> Result<CertificationReport> {
    let res = minimize_area(poly, opts.tol.geom)?;
    let mut certificates = Vec::new();
    for m in res.global_minimizers() {
        certificates.push(certify_minimizer(poly, m, opts)?);
    }
    let status = certificates
        .iter()
        .map(|c| c.status)
        .find(|s| *s != Status::StronglyExtreme)
        .unwrap_or(Status::StronglyExtreme);
    Ok(CertificationReport { status, min_area: res.min_area, density: poly.area() / (2.0 * res.min_area), certificates })
}

/// Certify a given half-length parallelogram, assumed to be an isolated minimizer.
pub fn certify_config(poly: &ConvexPolygon, cfg: &ParallelogramConfig, opts: &CertifyOptions) -> Result<Certificate> {
    let area = cfg.area();
    // Second derivative along the sweep is unknown here; the curvature of f along z0 stands in.
    let m = Minimizer {
        area,
        config: cfg.clone(),
        piece: 0,
        s: 0.0,
        location: crate::halfplg::MinimumLocation::Interior,
        isolated: true,
        second_derivative_y: None,
    };
    certify_minimizer(poly, &m, opts)
}

/// Certify one minimizer found by the sweep.
pub fn certify_minimizer(poly: &ConvexPolygon, m: &Minimizer, opts: &CertifyOptions) -> Result<Certificate> {
    let classification = classify_minimizer(poly, m, opts.tol.geom)?;
    let canon = canonicalize(poly, &m.config, opts.tol.geom)?;
    let mut cert = Certificate {
        status: Status::CertificateFailed,
        classification: classification.clone(),
        config: m.config.clone(),
        canonical_config: canon.config.clone(),
        area: m.area,
        density: poly.area() / (2.0 * m.area),
        angles: None,
        dual: None,
        second_order: None,
        oracle: None,
        margins: None,
        failure: None,
    };
    let gate = match classification.kind {
        ConfigKind::ExceptionalTypeI => Some(Status::ExceptionalTypeI),
        ConfigKind::ExceptionalTypeII => Some(Status::ExceptionalTypeII),
        ConfigKind::Pivotal => Some(Status::Pivotal),
        ConfigKind::NotIsolated => Some(Status::NotIsolatedMinimum),
        ConfigKind::Generic => None,
    };
    if let Some(s) = gate {
        cert.status = s;
        return Ok(cert);
    }
    let angles = AngleData::new(&canon);
    cert.angles = Some(angles.clone());
    let cells = match CellFunctions::build(&canon.polygon, &canon.config, ConstraintForm::Contact) {
        Ok(c) => c,
        Err(e) => {
            cert.failure = Some(e.to_string());
            return Ok(cert);
        }
    };
    let lin = cells.linearize();
    let mut ns = null_spaces(&lin.g, opts.tol.rank);
    ns.z0 = align(&ns.z0, &angles.z0_closed());
    ns.eta0 = align(&ns.eta0, &ETA0_CONTACT);

    let rank_cut = opts.tol.rank * ns.singular_values[0];
    let margins_rank = (ns.singular_values[7] / rank_cut).min(rank_cut / ns.singular_values[8].max(f64::MIN_POSITIVE));
    let eta = match solve_eta(&lin, &ns, &opts.tol) {
        Ok(e) => e,
        Err(e) => {
            cert.failure = Some(e.to_string());
            return Ok(cert);
        }
    };
    let grouped = grouped_positivity(&eta, &angles);
    let (mu, eta_prime) = balance_mu(&eta);
    let g = lin.g;
    let mu_v = Vec9::from(mu);
    let c_prime = lin.c + g.transpose() * mu_v;
    let resid = |v: &[f64; 9], c: &Vec9| max_abs(&(g.transpose() * Vec9::from(*v) - c));
    let z0c = angles.z0_closed();
    let z0v = Vec9::from(z0c);
    let shifted = g - Vec9::from(ETA0_CONTACT) * z0v.transpose();
    let dual = DualCertificate {
        g: std::array::from_fn(|r| std::array::from_fn(|c| g[(r, c)])),
        c: to_array(&lin.c),
        rank: ns.rank,
        singular_values: ns.singular_values,
        z0: ns.z0,
        z0_closed_form: z0c,
        z0_residual: ns.z0.iter().zip(&z0c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        eta0: ns.eta0,
        eta,
        mu,
        eta_prime,
        c_prime: to_array(&c_prime),
        eta_residual: resid(&eta, &lin.c),
        eta_prime_residual: resid(&eta_prime, &c_prime),
        grouped,
        det_shifted: det(&shifted) / z0v.norm_squared(),
        det_closed_form: angles.det_closed(),
    };
    let so = second_order_and_stationarity(&cells, &ns.z0, &angles, m);
    let oracle = perturbation_oracle(&cells, &lin, &ns, &mu, opts.trials, opts.radius, opts.seed);

    let positivity = eta_prime.iter().copied().fold(f64::INFINITY, f64::min);
    let margins = Margins {
        rank_gap: margins_rank,
        rank_cut,
        positivity,
        second_order: so.area_second_derivative.unwrap_or(so.f_along_z0).min(so.f_along_z0),
        stationarity: so.stationarity_residual.abs(),
    };
    let tol = &opts.tol;
    let mut failures = Vec::new();
    let mut inconclusive = Vec::new();
    if ns.rank != 8 {
        failures.push(format!("rank {}", ns.rank));
    } else if margins.rank_gap < INCONCLUSIVE_FACTOR {
        inconclusive.push("rank gap".to_string());
    }
    if dual.eta_residual > tol.stat {
        failures.push(format!("eta G - c residual {:e}", dual.eta_residual));
    }
    if positivity <= tol.pos {
        failures.push(format!("multiplier {positivity:e} not positive"));
    } else if positivity < INCONCLUSIVE_FACTOR * tol.pos {
        inconclusive.push("positivity margin".to_string());
    }
    if !(margins.second_order > tol.pos) {
        failures.push(format!("second-order coefficient {:e}", margins.second_order));
    } else if margins.second_order < INCONCLUSIVE_FACTOR * tol.pos {
        inconclusive.push("second-order margin".to_string());
    }
    if margins.stationarity > tol.stat {
        failures.push(format!("stationarity residual {:e}", margins.stationarity));
    } else if margins.stationarity * INCONCLUSIVE_FACTOR > tol.stat {
        inconclusive.push("stationarity margin".to_string());
    }
    if oracle.violations > 0 {
        failures.push(format!("{} perturbations decrease the cell area", oracle.violations));
    }
    cert.status = if !failures.is_empty() {
        cert.failure = Some(failures.join("; "));
        Status::CertificateFailed
    } else if !inconclusive.is_empty() {
        cert.failure = Some(inconclusive.join("; "));
        Status::NumericallyInconclusive
    } else {
        Status::StronglyExtreme
    };
    cert.dual = Some(dual);
    cert.second_order = Some(so);
    cert.oracle = Some(oracle);
    cert.margins = Some(margins);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balancing_equalizes_pairs() {
        let eta = [-0.04, 0.15, 0.3, 0.08, 0.2, 0.18, 0.01, 0.09, 0.7];
        let (mu, ep) = balance_mu(&eta);
        for k in 0..4 {
            assert!((ep[2 * k] - ep[2 * k + 1]).abs() < 1e-15);
            assert_eq!(mu[2 * k], -mu[2 * k + 1]);
        }
        assert_eq!(mu[8], 0.0);
        assert_eq!(ep[8], eta[8]);
    }

    #[test]
    fn pentagon_certifies() {
        let poly = ConvexPolygon::regular(5, 1.0).unwrap();
        let rep = certify(&poly, &CertifyOptions { trials: 3000, ..Default::default() }).unwrap();
        let c = &rep.certificates[0];
        assert_eq!(rep.status, Status::StronglyExtreme, "{:?}", c.failure);
        let d = c.dual.as_ref().unwrap();
        assert!(d.z0_residual < 1e-9);
        assert!(d.grouped.closed_form_residual < 1e-9);
        assert!((d.det_shifted / d.det_closed_form - 1.0).abs() < 1e-6);
    }
}
