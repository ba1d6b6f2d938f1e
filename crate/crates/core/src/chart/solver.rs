//! Damped fixed-point iteration for the minimizer of the energy in `B_ρ(c)`.

use crate::certificate::{theorem_com_certificate, Certificate};
use crate::energy::{energy, energy_noise_floor, gradient, CurvatureBounds};
use crate::error::{Error, Result};
use crate::measure::SignedDiscreteMeasure;
use crate::model_space::ModelPoint;

pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;
pub const DEFAULT_GRADIENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once `‖grad E‖ ≤ gradient_tolerance · ρ · (μ₊ + μ₋)`, or at the
    /// rounding floor of the gradient if that is larger.
    pub gradient_tolerance: f64,
    /// Run even when the centre-of-mass certificate fails.
    pub force: bool,
    /// Keep the energy of every accepted iterate.
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            gradient_tolerance: DEFAULT_GRADIENT_TOLERANCE,
            force: false,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KarcherSolution {
    pub point: ModelPoint,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// `None` only when forced past a certificate that could not be evaluated.
    pub certificate: Option<Certificate>,
    /// Energies of accepted iterates, starting at `c`.
    pub trace: Vec<f64>,
}

/// Minimizer of `E_μ` in `B_ρ(c)`, refusing uncertified instances.
pub fn karcher_mean(
    m: &SignedDiscreteMeasure,
    c: &ModelPoint,
    rho: f64,
    bounds: &CurvatureBounds,
) -> Result<ModelPoint> {
    karcher_mean_with(m, c, rho, bounds, &SolverOptions::default()).map(|s| s.point)
}

pub fn karcher_mean_with(
    m: &SignedDiscreteMeasure,
    c: &ModelPoint,
    rho: f64,
    bounds: &CurvatureBounds,
    options: &SolverOptions,
) -> Result<KarcherSolution> {
    if m.space() != c.space() {
        return Err(Error::SpaceMismatch);
    }
    let iota = c.space().injectivity_radius();
    let certificate = match theorem_com_certificate(m, c, rho, bounds, iota) {
        Ok(cert) if cert.satisfied || options.force => Some(cert),
        Ok(cert) => return Err(Error::CertificateFailed(Box::new(cert))),
        Err(_) if options.force => None,
        Err(e) => return Err(e),
    };
    let mut solution = descend(m, c, rho, options)?;
    solution.certificate = certificate;
    Ok(solution)
}

fn descend(
    m: &SignedDiscreteMeasure,
    c: &ModelPoint,
    rho: f64,
    options: &SolverOptions,
) -> Result<KarcherSolution> {
    let variation = m.jordan_masses().variation();
    if !(variation > 0.0) {
        return Err(Error::Domain("measure has no mass".into()));
    }
    let space = c.space();
    let tau0 = 1.0 / variation;
    let weight_scale = if space.is_flat() {
        m.points().iter().fold(c.coords().amax(), |s, p| s.max(p.coords().amax()))
    } else {
        space.radius()
    };
    let tolerance = (options.gradient_tolerance * rho * variation).max(64.0 * f64::EPSILON * variation * weight_scale);

    let mut x = c.clone();
    let mut e = energy(m, &x)?;
    let mut g = gradient(m, &x)?;
    let mut trace = if options.record_trace { vec![e] } else { Vec::new() };
    let mut tau = tau0;
    let mut iterations = 0;
    loop {
        let gnorm = g.norm();
        if gnorm <= tolerance {
            return Ok(KarcherSolution {
                point: x,
                energy: e,
                gradient_norm: gnorm,
                iterations,
                certificate: None,
                trace,
            });
        }
        if iterations >= options.max_iterations {
            return Err(Error::MaxIterations { iterations, gradient_norm: gnorm });
        }
        iterations += 1;
        let floor = energy_noise_floor(m, &x)?;
        // Backtrack until the step stays in the closed ball and does not raise
        // the energy beyond rounding noise.
        loop {
            if tau < tau0 * 1e-20 {
                return Err(Error::StepCollapsed { iteration: iterations });
            }
            let candidate = match x.exp(&g.scaled(-tau)) {
                Ok(p) => p,
                Err(Error::BeyondInjectivityRadius { .. }) => {
                    tau *= 0.5;
                    continue;
                }
                Err(err) => return Err(err),
            };
            if c.distance(&candidate)? > rho {
                tau *= 0.5;
                continue;
            }
            let e_new = energy(m, &candidate)?;
            if e_new > e + floor {
                tau *= 0.5;
                continue;
            }
            x = candidate;
            e = e_new;
            g = gradient(m, &x)?;
            if options.record_trace {
                trace.push(e);
            }
            tau = (2.0 * tau).min(tau0);
            break;
        }
    }
}
