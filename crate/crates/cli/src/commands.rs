use std::io::Write;
use std::path::Path;

use serde::Serialize;

use rcom::certificate::{
    contained_ball_radius, corollary_certificate, theorem_com_certificate, tilde_r_max,
};
use rcom::chart::{karcher_mean_with, shared_facet_check_with, FacetCheckOptions, FacetVerdict};
use rcom::verification::grid_minimize;
use rcom::{
    BarycentricChart, Certificate, CurvatureBounds, Error, ModelPoint, ModelSpace, SignedDiscreteMeasure,
    SolverOptions,
};

use crate::input::MeasureFile;
use crate::{BallArgs, Failure};

/// Ratio between successive radii in the default-ρ search.
const RHO_LADDER_RATIO: f64 = 1.05;
const RHO_LADDER_STEPS: i32 = 400;

pub fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::numeric(format!("cannot serialize: {e}")))?;
    write_stdout(format!("{text}\n").as_bytes())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
pub fn write_stdout(bytes: &[u8]) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(bytes) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::numeric(format!("cannot write output: {e}"))),
        _ => Ok(()),
    }
}

fn coords(p: &ModelPoint) -> Vec<f64> {
    p.coords().iter().copied().collect()
}

/// Curvature bounds and injectivity radius, validated against the space.
fn geometry(space: ModelSpace, ball: &BallArgs) -> Result<(CurvatureBounds, f64), Failure> {
    let kappa = space.curvature();
    let bounds = CurvatureBounds::new(ball.lambda_lo.unwrap_or(kappa), ball.lambda_hi.unwrap_or(kappa))
        .map_err(Failure::parse)?;
    if !bounds.contains(kappa) {
        return Err(Failure::parse(format!(
            "curvature bounds [{}, {}] do not contain κ = {kappa}",
            bounds.lambda_lo(),
            bounds.lambda_hi()
        )));
    }
    let limit = space.injectivity_radius();
    let iota = ball.iota.unwrap_or(limit);
    if !(iota > 0.0 && iota <= limit) {
        return Err(Failure::parse(format!("injectivity radius {iota} must lie in (0, {limit}]")));
    }
    Ok((bounds, iota))
}

/// First radius `r·1.05ᵏ` whose certificate holds; the first rung if none does.
fn search_rho(m: &SignedDiscreteMeasure, c: &ModelPoint, bounds: &CurvatureBounds, iota: f64) -> Result<f64, Failure> {
    let r = m.support_radius(c)?;
    let base = if r > 0.0 { r } else { 1e-3 * iota.min(1.0) };
    let rung = |k: i32| base * RHO_LADDER_RATIO.powi(k);
    for k in 1..=RHO_LADDER_STEPS {
        if theorem_com_certificate(m, c, rung(k), bounds, iota).is_ok_and(|cert| cert.satisfied) {
            return Ok(rung(k));
        }
    }
    Ok(rung(1))
}

struct Problem {
    measure: SignedDiscreteMeasure,
    center: ModelPoint,
    rho: f64,
    bounds: CurvatureBounds,
    iota: f64,
}

fn load_problem(path: &Path, ball: &BallArgs) -> Result<Problem, Failure> {
    let file = MeasureFile::load(path)?;
    let measure = file.measure()?;
    let center = file.center(&measure)?;
    let (bounds, iota) = geometry(measure.space(), ball)?;
    let rho = match ball.rho.or(file.rho) {
        Some(rho) if rho > 0.0 => rho,
        Some(rho) => return Err(Failure::parse(format!("ρ = {rho} must be positive"))),
        None => search_rho(&measure, &center, &bounds, iota)?,
    };
    Ok(Problem { measure, center, rho, bounds, iota })
}

#[derive(Serialize)]
struct MeanReport {
    point: Vec<f64>,
    energy: f64,
    gradient_norm: f64,
    iterations: usize,
    rho: f64,
    center: Vec<f64>,
    certificate: Option<Certificate>,
}

pub fn mean(path: &Path, ball: &BallArgs, force: bool) -> Result<(), Failure> {
    let p = load_problem(path, ball)?;
    let options = SolverOptions { force, ..SolverOptions::default() };
    let solution = karcher_mean_with(&p.measure, &p.center, p.rho, &p.bounds, &options).map_err(|e| match &e {
        Error::CertificateFailed(cert) => Failure::certificate(format!(
            "certificate failed at ρ = {}: `{}` does not hold (margin {:e})",
            p.rho,
            cert.failing_component(),
            cert.margin
        )),
        _ => e.into(),
    })?;
    print_json(&MeanReport {
        point: coords(&solution.point),
        energy: solution.energy,
        gradient_norm: solution.gradient_norm,
        iterations: solution.iterations,
        rho: p.rho,
        center: coords(&p.center),
        certificate: solution.certificate,
    })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CertifyReport {
    Measure {
        rho: f64,
        support_radius: f64,
        center: Vec<f64>,
        certificates: Vec<Certificate>,
    },
    Simplex {
        edge_bound: f64,
        thickness: f64,
        scale: f64,
        rho: f64,
        orientation: Option<i8>,
        contained_ball_radius: f64,
        negative_part_radius: Option<f64>,
        distortion_bound: Option<f64>,
        certificates: Vec<Certificate>,
    },
}

pub fn certify(path: &Path, ball: &BallArgs, scale: f64) -> Result<(), Failure> {
    let file = MeasureFile::load(path)?;
    if file.weights.is_empty() {
        return certify_simplex(&file, ball, scale);
    }
    let p = load_problem(path, ball)?;
    let r = p.measure.support_radius(&p.center)?;
    let theorem = theorem_com_certificate(&p.measure, &p.center, p.rho, &p.bounds, p.iota)
        .map_err(|e| Failure::certificate(format!("certificate not evaluable at ρ = {}: {e}", p.rho)))?;
    let satisfied = theorem.satisfied;
    let mut certificates = vec![theorem];
    let masses = p.measure.jordan_masses();
    if masses.total() > 0.0 {
        certificates.push(corollary_certificate(masses.minus / masses.total(), r, p.rho, p.bounds.lambda_abs()));
    }
    print_json(&CertifyReport::Measure { rho: p.rho, support_radius: r, center: coords(&p.center), certificates })?;
    if satisfied {
        Ok(())
    } else {
        Err(Failure::certificate(format!("centre-of-mass certificate fails at ρ = {}", p.rho)))
    }
}

fn certify_simplex(file: &MeasureFile, ball: &BallArgs, scale: f64) -> Result<(), Failure> {
    if ball.iota.is_some() || ball.lambda_lo.is_some() || ball.lambda_hi.is_some() {
        return Err(Failure::parse("--iota and --lambda-* apply to measure files only"));
    }
    let mut builder = BarycentricChart::builder(file.model_points()?).scale(scale).force(true);
    if let Some(rho) = ball.rho.or(file.rho) {
        builder = builder.rho(rho);
    }
    let chart = builder.build()?;
    let lambda = chart.space().curvature().abs();
    let (l, t) = (chart.edge_bound(), chart.thickness());
    let satisfied = chart.is_certified();
    print_json(&CertifyReport::Simplex {
        edge_bound: l,
        thickness: t,
        scale,
        rho: chart.rho(),
        orientation: chart.orientation().ok(),
        contained_ball_radius: contained_ball_radius(scale, l),
        negative_part_radius: tilde_r_max(l, t, lambda).ok(),
        distortion_bound: chart.distortion_bound().ok(),
        certificates: vec![chart.certificate().clone()],
    })?;
    if satisfied {
        Ok(())
    } else {
        Err(Failure::certificate(format!("chart certificate fails (margin {:e})", chart.certificate().margin)))
    }
}

#[derive(Serialize)]
struct OracleReport {
    point: Vec<f64>,
    value: f64,
    local_min_count: usize,
    spacing: f64,
    rho: f64,
    center: Vec<f64>,
}

pub fn oracle(path: &Path, ball: &BallArgs, resolution: Option<f64>) -> Result<(), Failure> {
    let p = load_problem(path, ball)?;
    let resolution = resolution.unwrap_or(1e-3 * p.rho);
    if !(resolution > 0.0) {
        return Err(Failure::parse("resolution must be positive"));
    }
    let grid = grid_minimize(&p.measure, &p.center, p.rho, resolution)?;
    print_json(&OracleReport {
        point: coords(&grid.point),
        value: grid.value,
        local_min_count: grid.local_min_count,
        spacing: grid.spacing,
        rho: p.rho,
        center: coords(&p.center),
    })
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
enum FacetReport {
    Pass { worst_violation: f64, samples: usize },
    Violation { worst_violation: f64, samples: usize, worst_weights: Vec<f64> },
    NotApplicable { reason: String },
}

pub fn facet_check(first: &Path, second: &Path, samples: usize, seed: u64, scale: f64) -> Result<(), Failure> {
    let a = MeasureFile::load(first)?.model_points()?;
    let b = MeasureFile::load(second)?.model_points()?;
    let longest = |pts: &[ModelPoint]| -> Result<f64, Failure> {
        let mut l: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                l = l.max(pts[i].distance(&pts[j])?);
            }
        }
        Ok(l)
    };
    let l = longest(&a)?.max(longest(&b)?);
    let build = |pts: Vec<ModelPoint>| BarycentricChart::builder(pts).scale(scale).edge_bound(l).build();
    let verdict = match (build(a), build(b)) {
        (Ok(ca), Ok(cb)) => {
            let options = FacetCheckOptions { random_samples: samples, seed, ..FacetCheckOptions::default() };
            shared_facet_check_with(&ca, &cb, &options)?
        }
        (Err(Error::CertificateFailed(cert)), _) | (_, Err(Error::CertificateFailed(cert))) => {
            FacetVerdict::NotApplicable(format!("chart certificate fails (margin {:e})", cert.margin))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    let (report, outcome) = match verdict {
        FacetVerdict::Pass { worst_violation, samples } => (FacetReport::Pass { worst_violation, samples }, Ok(())),
        FacetVerdict::Violation { worst_violation, samples, worst_weights } => (
            FacetReport::Violation { worst_violation, samples, worst_weights },
            Err(Failure::numeric(format!("charts overlap across the facet (violation {worst_violation:e})"))),
        ),
        FacetVerdict::NotApplicable(reason) => {
            let failure = Failure::certificate(format!("facet check not applicable: {reason}"));
            (FacetReport::NotApplicable { reason }, Err(failure))
        }
    };
    print_json(&report)?;
    outcome
}
