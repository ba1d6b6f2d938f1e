//! Parameter sweeps: certificate verdicts against empirical convexity and
//! uniqueness on synthetic measures.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use rand::Rng;
use rayon::prelude::*;

use rcom::certificate::{corollary_certificate, theorem_com_certificate};
use rcom::sampling::{random_in_ball, random_point_near, random_unit_vector, seeded_rng};
use rcom::verification::{grid_minimize, numeric_second_derivative};
use rcom::{CurvatureBounds, ModelPoint, ModelSpace, SignedDiscreteMeasure};

use crate::Failure;

pub const MAX_CELLS: usize = 1_000_000;

const HEADER: &str =
    "kappa,rho,mu_minus,t,s,cert_thm31,margin_thm31,cert_cor41,empirical_convex,empirical_unique";

/// Values along one grid axis: `a`, `a,b,c` or `start:end:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis(pub Vec<f64>);

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number `{x}`: {e}"));
        let values = if let [a, b, n] = s.split(':').collect::<Vec<_>>()[..] {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|e| format!("bad count `{n}`: {e}"))?;
            match n {
                0 => return Err("an axis needs at least one value".into()),
                1 => vec![a],
                _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            }
        } else if s.contains(':') {
            return Err(format!("range `{s}` must be start:end:count"));
        } else {
            s.split(',').map(num).collect::<Result<_, _>>()?
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("axis `{s}` has a non-finite value"));
        }
        Ok(Axis(values))
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    kappa: Axis,
    #[arg(long, default_value = "0.3")]
    rho: Axis,
    /// Negative mass of the normalized measure.
    #[arg(long, default_value = "0")]
    mu_minus: Axis,
    /// Thickness; with `s` it sets the support radius `r = ρt/(t + 2s)`.
    #[arg(long, default_value = "0.5")]
    t: Axis,
    #[arg(long, default_value = "1")]
    s: Axis,
    #[arg(long, default_value_t = 2)]
    dimension: usize,
    /// Fixed support radius, overriding the one derived from `t` and `s`.
    #[arg(long)]
    support_radius: Option<f64>,
    /// Fixed curvature bounds for every cell; default is the exact curvature.
    #[arg(long, allow_hyphen_values = true)]
    lambda_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_hi: Option<f64>,
    /// Injectivity radius; defaults to that of each cell's space.
    #[arg(long)]
    iota: Option<f64>,
    /// Second-derivative probes per cell.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Grid-oracle spacing as a fraction of ρ.
    #[arg(long, default_value_t = 1e-2)]
    resolution: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    kappa: f64,
    rho: f64,
    mu_minus: f64,
    t: f64,
    s: f64,
}

#[derive(Debug, Clone, Copy)]
struct Row {
    cell: Cell,
    cert_thm31: bool,
    margin_thm31: f64,
    cert_cor41: bool,
    empirical_convex: bool,
    empirical_unique: bool,
}

impl Row {
    fn csv(&self) -> String {
        let c = self.cell;
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{},{},{}",
            c.kappa,
            c.rho,
            c.mu_minus,
            c.t,
            c.s,
            self.cert_thm31,
            self.margin_thm31,
            self.cert_cor41,
            self.empirical_convex,
            self.empirical_unique
        )
    }
}

fn validate(args: &SweepArgs) -> Result<Vec<Cell>, Failure> {
    let axes = [&args.kappa, &args.rho, &args.mu_minus, &args.t, &args.s];
    let cells = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.0.len()));
    match cells {
        Some(n) if n <= MAX_CELLS => {}
        _ => return Err(Failure::parse(format!("grid exceeds {MAX_CELLS} cells"))),
    }
    if !(1..=3).contains(&args.dimension) {
        return Err(Failure::parse("the grid oracle supports dimensions 1 to 3"));
    }
    let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Failure::parse(msg)) };
    check(args.rho.0.iter().all(|&r| r > 0.0), "ρ must be positive")?;
    check(args.mu_minus.0.iter().all(|&m| m >= 0.0), "μ₋ must be nonnegative")?;
    check(args.t.0.iter().all(|&t| t > 0.0 && t <= 1.0), "t must lie in (0, 1]")?;
    check(args.s.0.iter().all(|&s| s >= 1.0), "s must be at least 1")?;
    check(args.resolution > 0.0 && args.resolution < 1.0, "resolution must lie in (0, 1)")?;
    check(args.support_radius.is_none_or(|r| r >= 0.0), "support radius must be nonnegative")?;
    check(args.iota.is_none_or(|i| i > 0.0), "injectivity radius must be positive")?;
    for &kappa in &args.kappa.0 {
        let b = bounds(args, kappa)?;
        check(b.contains(kappa), "curvature bounds must contain every κ of the grid")?;
    }

    let mut out = Vec::new();
    for &kappa in &args.kappa.0 {
        for &rho in &args.rho.0 {
            for &mu_minus in &args.mu_minus.0 {
                for &t in &args.t.0 {
                    for &s in &args.s.0 {
                        out.push(Cell { kappa, rho, mu_minus, t, s });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn bounds(args: &SweepArgs, kappa: f64) -> Result<CurvatureBounds, Failure> {
    CurvatureBounds::new(args.lambda_lo.unwrap_or(kappa), args.lambda_hi.unwrap_or(kappa)).map_err(Failure::parse)
}

/// Normalized measure with negative mass `μ₋` and support radius exactly
/// `r` about `center`: three positive atoms, two negative ones when `μ₋ > 0`.
fn synthetic_measure(rng: &mut impl Rng, center: &ModelPoint, r: f64, mu_minus: f64) -> rcom::Result<SignedDiscreteMeasure> {
    let n = center.space().dimension();
    let frame = center.frame();
    let mut points = vec![frame.point_at((random_unit_vector(rng, n) * r).as_slice())?];
    for _ in 0..2 {
        points.push(frame.point_at(random_in_ball(rng, n, r).as_slice())?);
    }
    let mut raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..1.5)).collect();
    let plus: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / plus * (1.0 + mu_minus)).collect();
    if mu_minus > 0.0 {
        for _ in 0..2 {
            points.push(frame.point_at(random_in_ball(rng, n, r).as_slice())?);
        }
        raw = (0..2).map(|_| rng.random_range(0.5..1.5)).collect();
        let minus: f64 = raw.iter().sum();
        weights.extend(raw.iter().map(|w| -w / minus * mu_minus));
    }
    SignedDiscreteMeasure::new(points, weights)
}

fn probe_convexity(rng: &mut impl Rng, m: &SignedDiscreteMeasure, c: &ModelPoint, rho: f64, samples: usize) -> bool {
    let n = c.space().dimension();
    (0..samples).all(|_| {
        let Ok(x) = random_point_near(rng, c, rho) else { return false };
        let u = random_unit_vector(rng, n);
        numeric_second_derivative(m, &x, &u).is_ok_and(|d| d > 0.0)
    })
}

fn evaluate(args: &SweepArgs, index: usize, cell: Cell) -> Row {
    let mut row = Row {
        cell,
        cert_thm31: false,
        margin_thm31: f64::NAN,
        cert_cor41: false,
        empirical_convex: false,
        empirical_unique: false,
    };
    let r = args.support_radius.unwrap_or(cell.rho * cell.t / (cell.t + 2.0 * cell.s));
    row.cert_cor41 = corollary_certificate(cell.mu_minus, r, cell.rho, cell.kappa.abs()).satisfied;

    let Ok(space) = ModelSpace::new(cell.kappa, args.dimension) else { return row };
    let Ok(bounds) = bounds(args, cell.kappa) else { return row };
    let center = space.origin();
    let mut rng = seeded_rng(args.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let Ok(measure) = synthetic_measure(&mut rng, &center, r, cell.mu_minus) else { return row };

    let iota = args.iota.unwrap_or(space.injectivity_radius());
    if let Ok(cert) = theorem_com_certificate(&measure, &center, cell.rho, &bounds, iota) {
        row.cert_thm31 = cert.satisfied;
        row.margin_thm31 = cert.margin;
    }
    row.empirical_convex = probe_convexity(&mut rng, &measure, &center, cell.rho, args.samples);
    row.empirical_unique = grid_minimize(&measure, &center, cell.rho, args.resolution * cell.rho)
        .is_ok_and(|g| g.local_min_count == 1);
    row
}

pub fn run(args: &SweepArgs) -> Result<(), Failure> {
    let cells = validate(args)?;
    // Cells are independent and seeded by index, so the output does not
    // depend on scheduling.
    let rows: Vec<Row> = cells.par_iter().enumerate().map(|(i, &cell)| evaluate(args, i, cell)).collect();

    let mut text = String::with_capacity(128 * (rows.len() + 1));
    text.push_str(HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv());
        text.push('\n');
    }
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::parse(format!("cannot write {}: {e}", path.display()))),
        None => crate::commands::write_stdout(text.as_bytes()),
    }
}
