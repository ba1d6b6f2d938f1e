//! Explicit sufficient conditions for existence and uniqueness of centres of
//! mass and for barycentric coordinate charts, evaluated with their margins.
//!
//! Every certificate reports the slack of its decisive inequality (left-hand
//! side minus right-hand side, in the inequality's own units) so callers can
//! map how far a configuration is from the boundary of the certified region.
//! All inequalities are strict and evaluated without epsilon.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::energy::{theta_over_tan, theta_over_tanh, CurvatureBounds};
use crate::error::{Error, Result};
use crate::measure::{JordanMasses, SignedDiscreteMeasure};
use crate::model_space::ModelPoint;

/// `C = 1 + π/2`, the constant trading curvature radius for negative mass.
pub const NEGATIVE_MASS_CONSTANT: f64 = 1.0 + FRAC_PI_2;

pub mod names {
    pub const RADIUS_CAP: &str = "radius_cap";
    pub const CONVEXITY: &str = "convexity";
    pub const GRADIENT_OUTWARD: &str = "gradient_outward";
    pub const CENTRE_OF_MASS: &str = "centre_of_mass";
    pub const COROLLARY: &str = "signed_mass_corollary";
    pub const CHART: &str = "barycentric_chart";
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub satisfied: bool,
    pub margin: f64,
    pub inputs: BTreeMap<String, f64>,
    /// Admissible `ρ`-interval for interval-type certificates. An infinite
    /// upper end serializes as `null`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Certificate>,
}

impl Certificate {
    fn new(name: &str, margin: f64, inputs: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_owned(),
            satisfied: margin > 0.0,
            margin,
            inputs: inputs.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            interval: None,
            components: Vec::new(),
        }
    }

    /// Name of the first failing component, or of the certificate itself.
    pub fn failing_component(&self) -> &str {
        self.components
            .iter()
            .find(|c| !c.satisfied)
            .map(|c| c.failing_component())
            .unwrap_or(&self.name)
    }

    pub fn component(&self, name: &str) -> Option<&Certificate> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn interval_is_nonempty(&self) -> bool {
        self.interval.is_some_and(|(lo, hi)| lo < hi)
    }
}

/// `ρ₀ = min{ι/2, π/(4√Λu)}`, the second term infinite when `Λu ≤ 0`.
pub fn rho0(iota: f64, lambda_hi: f64) -> f64 {
    let curvature_cap = if lambda_hi > 0.0 {
        FRAC_PI_4 / lambda_hi.sqrt()
    } else {
        f64::INFINITY
    };
    (iota / 2.0).min(curvature_cap)
}

/// Strict convexity of the energy on `B_ρ`, picking the case that matches the
/// signs of the curvature bounds.
pub fn convexity_certificate(
    mu_plus: f64,
    mu_minus: f64,
    rho: f64,
    bounds: &CurvatureBounds,
) -> Result<Certificate> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("radius {rho} must be positive")));
    }
    let (lo, hi) = (bounds.lambda_lo(), bounds.lambda_hi());
    let theta_lo = 2.0 * rho * lo.abs().sqrt();
    let theta_hi = 2.0 * rho * hi.abs().sqrt();
    if hi > 0.0 && theta_hi >= FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "radius {rho} reaches π/(4√Λu); ϑu = {theta_hi} must stay below π/2"
        )));
    }
    let margin = if lo >= 0.0 {
        theta_over_tan(theta_hi) * mu_plus - mu_minus
    } else if hi >= 0.0 {
        theta_over_tan(theta_hi) * mu_plus - theta_over_tanh(theta_lo) * mu_minus
    } else {
        mu_plus - theta_over_tanh(theta_lo) * mu_minus
    };
    Ok(Certificate::new(
        names::CONVEXITY,
        margin,
        &[
            ("mu_plus", mu_plus),
            ("mu_minus", mu_minus),
            ("rho", rho),
            ("lambda_lo", lo),
            ("lambda_hi", hi),
            ("theta_lo", theta_lo),
            ("theta_hi", theta_hi),
        ],
    ))
}

/// Outward-pointing gradient on `∂B_ρ`: `(ρ − r)μ₊ − (ρ + r)μ₋ > 0`.
pub fn gradient_outward_certificate(
    mu_plus: f64,
    mu_minus: f64,
    rho: f64,
    r: f64,
) -> Result<Certificate> {
    if !(r >= 0.0) || !(r < rho) {
        return Err(Error::Domain(format!("support radius {r} must lie in [0, ρ = {rho})")));
    }
    let margin = (rho - r) * mu_plus - (rho + r) * mu_minus;
    Ok(Certificate::new(
        names::GRADIENT_OUTWARD,
        margin,
        &[("mu_plus", mu_plus), ("mu_minus", mu_minus), ("rho", rho), ("r", r)],
    ))
}

/// Unique centre of mass in `B_ρ(c)` for a signed measure.
pub fn theorem_com_certificate(
    m: &SignedDiscreteMeasure,
    c: &ModelPoint,
    rho: f64,
    bounds: &CurvatureBounds,
    iota: f64,
) -> Result<Certificate> {
    let r = m.support_radius(c)?;
    centre_of_mass_certificate(m.jordan_masses(), r, rho, bounds, iota)
}

/// [`theorem_com_certificate`] from the measure's summary numbers.
///
/// The composite margin is the minimum of the radius-cap margin
/// `(ρ₀ − ρ)/ρ₀`, the outwardness margin divided by `ρ(μ₊ + μ₋)`, and the
/// convexity margin.
pub fn centre_of_mass_certificate(
    masses: JordanMasses,
    r: f64,
    rho: f64,
    bounds: &CurvatureBounds,
    iota: f64,
) -> Result<Certificate> {
    let (mu_plus, mu_minus) = (masses.plus, masses.minus);
    let outward = gradient_outward_certificate(mu_plus, mu_minus, rho, r)?;

    let cap = rho0(iota, bounds.lambda_hi());
    let cap_margin = if cap.is_finite() { (cap - rho) / cap } else { 1.0 };
    let mut radius_cap = Certificate::new(names::RADIUS_CAP, cap_margin, &[("rho", rho), ("iota", iota)]);
    if cap.is_finite() {
        radius_cap.inputs.insert("rho0".into(), cap);
    }

    let variation = masses.variation();
    let outward_scaled = if variation > 0.0 {
        outward.margin / (rho * variation)
    } else {
        outward.margin
    };
    let mut margin = cap_margin.min(outward_scaled);
    let mut components = vec![radius_cap];
    // Beyond π/(4√Λu) the convexity bound is undefined; the cap already fails.
    if let Ok(convexity) = convexity_certificate(mu_plus, mu_minus, rho, bounds) {
        margin = margin.min(convexity.margin);
        components.push(convexity);
    }
    components.push(outward);

    let mut cert = Certificate::new(
        names::CENTRE_OF_MASS,
        margin,
        &[
            ("mu_plus", mu_plus),
            ("mu_minus", mu_minus),
            ("r", r),
            ("rho", rho),
            ("lambda_lo", bounds.lambda_lo()),
            ("lambda_hi", bounds.lambda_hi()),
        ],
    );
    cert.satisfied = components.len() == 3 && components.iter().all(|c| c.satisfied);
    cert.components = components;
    Ok(cert)
}

/// Both sides of the secant-line bounds `1 − 2ϑ/π ≤ ϑ/tan ϑ` and
/// `1 + ϑ ≥ ϑ/tanh ϑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearTanBounds {
    pub lhs_tan: f64,
    pub rhs_tan: f64,
    pub lhs_tanh: f64,
    pub rhs_tanh: f64,
}

impl LinearTanBounds {
    pub fn holds(&self) -> bool {
        self.lhs_tan <= self.rhs_tan && self.lhs_tanh >= self.rhs_tanh
    }
}

pub fn linear_tan_bounds_check(theta: f64) -> Result<LinearTanBounds> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!("ϑ = {theta} outside [0, π/2)")));
    }
    Ok(LinearTanBounds {
        lhs_tan: 1.0 - theta / FRAC_PI_2,
        rhs_tan: theta_over_tan(theta),
        lhs_tanh: 1.0 + theta,
        rhs_tanh: theta_over_tanh(theta),
    })
}

/// `π/(4√Λ) (1 + C x)⁻¹`, infinite when `Λ = 0`.
fn curvature_radius_bound(lambda_abs: f64, x: f64) -> f64 {
    if lambda_abs > 0.0 {
        FRAC_PI_4 / lambda_abs.sqrt() / (1.0 + NEGATIVE_MASS_CONSTANT * x)
    } else {
        f64::INFINITY
    }
}

/// Simplified condition for a normalized signed measure under `|K| ≤ Λ`:
/// `(1 + 2μ₋) r < ρ < π/(4√Λ) (1 + C μ₋)⁻¹`.
pub fn corollary_certificate(mu_minus: f64, r: f64, rho: f64, lambda_abs: f64) -> Certificate {
    let lo = (1.0 + 2.0 * mu_minus) * r;
    let hi = curvature_radius_bound(lambda_abs, mu_minus);
    let margin = (rho - lo).min(hi - rho);
    let mut cert = Certificate::new(
        names::COROLLARY,
        margin,
        &[("mu_minus", mu_minus), ("r", r), ("rho", rho), ("lambda_abs", lambda_abs)],
    );
    cert.satisfied = lo < rho && rho < hi;
    cert.interval = Some((lo, hi));
    cert
}

/// Barycentric chart condition `t² ≥ 25 s² L √Λ` with the admissible
/// interval `(1 + 2s/t) L < ρ < π/(4√Λ) (1 + C s/t)⁻¹`.
///
/// The margin is `t² − 25 s² L √Λ`. The thickness condition is non-strict,
/// so a zero margin still certifies.
pub fn chart_certificate(edge_bound: f64, thickness: f64, scale: f64, lambda_abs: f64) -> Result<Certificate> {
    if !(scale >= 1.0) {
        return Err(Error::Domain(format!("scale {scale} must be at least 1")));
    }
    // A segment has thickness exactly 1.
    if !(thickness > 0.0 && thickness <= 1.0) {
        return Err(Error::Domain(format!("thickness {thickness} must lie in (0, 1]")));
    }
    if !(edge_bound > 0.0) || !(lambda_abs >= 0.0) {
        return Err(Error::Domain("edge bound must be positive and Λ nonnegative".into()));
    }
    let ratio = scale / thickness;
    let lo = (1.0 + 2.0 * ratio) * edge_bound;
    let hi = curvature_radius_bound(lambda_abs, ratio);
    let margin = thickness * thickness - 25.0 * scale * scale * edge_bound * lambda_abs.sqrt();
    let mut cert = Certificate::new(
        names::CHART,
        margin,
        &[("L", edge_bound), ("t", thickness), ("s", scale), ("lambda_abs", lambda_abs)],
    );
    cert.satisfied = margin >= 0.0 && lo < hi;
    debug_assert!(margin < 0.0 || lo < hi, "thickness condition holds but ρ-interval is empty");
    cert.interval = Some((lo, hi));
    Ok(cert)
}

/// Radius `r̃` of a parameter ball about a reference vertex on which the
/// barycentric map is well defined:
/// `(L t / 3)(−1 + √(−3 + π/(4 L √Λ)))`. Infinite for `Λ = 0`.
pub fn tilde_r_max(edge_bound: f64, thickness: f64, lambda_abs: f64) -> Result<f64> {
    if !(edge_bound > 0.0 && thickness > 0.0 && lambda_abs >= 0.0) {
        return Err(Error::Domain("L, t must be positive and Λ nonnegative".into()));
    }
    if lambda_abs == 0.0 {
        return Ok(f64::INFINITY);
    }
    let scaled = edge_bound * lambda_abs.sqrt();
    if scaled > std::f64::consts::PI / 16.0 {
        return Err(Error::Domain(format!("L√Λ = {scaled} exceeds π/16")));
    }
    let root = (-3.0 + FRAC_PI_4 / scaled).sqrt();
    Ok((edge_bound * thickness / 3.0 * (root - 1.0)).max(0.0))
}

/// `r̄ = (s − 18/(25 s)) L`: radius of a geodesic ball about the anchor vertex
/// contained in the chart image. Meaningful for `s ≥ 1`.
pub fn contained_ball_radius(scale: f64, edge_bound: f64) -> f64 {
    (scale - 18.0 / (25.0 * scale)) * edge_bound
}

/// Relative metric distortion `50 Λ ρ² / t²` of a certified chart; requires
/// `ρ ≤ t/(6√Λ)`.
pub fn distortion_bound(lambda_abs: f64, rho: f64, thickness: f64) -> Result<f64> {
    if !(lambda_abs >= 0.0 && rho >= 0.0 && thickness > 0.0) {
        return Err(Error::Domain("Λ, ρ must be nonnegative and t positive".into()));
    }
    if lambda_abs == 0.0 {
        return Ok(0.0);
    }
    let limit = thickness / (6.0 * lambda_abs.sqrt());
    if rho > limit {
        return Err(Error::Domain(format!("ρ = {rho} exceeds t/(6√Λ) = {limit}")));
    }
    Ok(50.0 * lambda_abs * rho * rho / (thickness * thickness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn rho0_examples() {
        assert_relative_eq!(rho0(10.0, 1.0), PI / 4.0);
        assert_eq!(rho0(1.0, -2.0), 0.5);
        assert_relative_eq!(rho0(PI, 1.0), PI / 4.0);
        assert!(rho0(f64::INFINITY, 0.0).is_infinite());
    }

    #[test]
    fn convexity_examples() {
        let b = CurvatureBounds::new(0.5, 1.0).unwrap();
        let c = convexity_certificate(1.0, 0.0, 0.3, &b).unwrap();
        assert!(c.satisfied);
        assert_relative_eq!(c.margin, 0.6 / 0.6f64.tan());

        let c = convexity_certificate(1.7, 0.4, 0.3, &CurvatureBounds::exact(0.0)).unwrap();
        assert_relative_eq!(c.margin, 1.3, epsilon = 1e-15);

        let c = convexity_certificate(1.2, 0.2, 0.1, &CurvatureBounds::symmetric(1.0).unwrap()).unwrap();
        let expected = (0.2 / 0.2f64.tan()) * 1.2 - (0.2 / 0.2f64.tanh()) * 0.2;
        assert_relative_eq!(c.margin, expected, epsilon = 1e-15);
        assert!((c.margin - 0.9813).abs() < 5e-5);
        assert!(c.satisfied);

        let c = convexity_certificate(1.0, 0.5, 0.5, &CurvatureBounds::new(-4.0, -1.0).unwrap()).unwrap();
        assert_relative_eq!(c.margin, 1.0 - 0.5 * 2.0 / 2f64.tanh(), epsilon = 1e-15);

        assert!(convexity_certificate(1.0, 0.0, 0.8, &CurvatureBounds::exact(1.0)).is_err());
        assert!(convexity_certificate(1.0, 0.0, 0.0, &CurvatureBounds::exact(1.0)).is_err());
    }

    #[test]
    fn outward_examples() {
        assert!(gradient_outward_certificate(1.0, 0.0, 0.5, 0.49).unwrap().satisfied);
        let c = gradient_outward_certificate(1.1, 0.1, 0.5, 0.2).unwrap();
        assert_relative_eq!(c.margin, 0.26, epsilon = 1e-15);
        assert!(c.satisfied);
        let c = gradient_outward_certificate(1.0, 0.5, 0.5, 0.2).unwrap();
        assert_relative_eq!(c.margin, -0.05, epsilon = 1e-15);
        assert!(!c.satisfied);
        assert!(gradient_outward_certificate(1.0, 0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn centre_of_mass_examples() {
        let bounds = CurvatureBounds::symmetric(1.0).unwrap();
        let masses = JordanMasses { plus: 1.2, minus: 0.2 };
        let c = centre_of_mass_certificate(masses, 0.01, 0.1, &bounds, f64::INFINITY).unwrap();
        assert!(c.satisfied);
        assert_eq!(c.components.len(), 3);

        let heavy = JordanMasses { plus: 3.0, minus: 2.0 };
        let c = centre_of_mass_certificate(heavy, 0.05, 0.1, &bounds, f64::INFINITY).unwrap();
        assert!(!c.satisfied);
        assert_eq!(c.failing_component(), names::GRADIENT_OUTWARD);
        assert!(c.margin < 0.0);

        let unsigned = JordanMasses { plus: 1.0, minus: 0.0 };
        let c = centre_of_mass_certificate(unsigned, 0.1, 0.9, &CurvatureBounds::exact(1.0), PI).unwrap();
        assert!(!c.satisfied);
        assert_eq!(c.failing_component(), names::RADIUS_CAP);
        assert!(centre_of_mass_certificate(unsigned, 0.2, 0.1, &bounds, PI).is_err());
    }

    #[test]
    fn linear_tan_bound_examples() {
        let b = linear_tan_bounds_check(0.0).unwrap();
        assert_eq!((b.lhs_tan, b.rhs_tan, b.lhs_tanh, b.rhs_tanh), (1.0, 1.0, 1.0, 1.0));
        let b = linear_tan_bounds_check(PI / 4.0).unwrap();
        assert_relative_eq!(b.lhs_tan, 0.5, epsilon = 1e-15);
        assert_relative_eq!(b.rhs_tan, PI / 4.0, epsilon = 1e-15);
        let b = linear_tan_bounds_check(1.0).unwrap();
        assert_eq!(b.lhs_tanh, 2.0);
        assert_relative_eq!(b.rhs_tanh, 1.0 / 1f64.tanh(), epsilon = 1e-15);
        assert!(b.holds());
        assert!(linear_tan_bounds_check(-0.1).is_err());
        assert!(linear_tan_bounds_check(FRAC_PI_2).is_err());
    }

    #[test]
    fn corollary_examples() {
        let c = corollary_certificate(0.0, 0.1, 0.5, 1.0);
        assert!(c.satisfied);
        assert_eq!(c.interval, Some((0.1, FRAC_PI_4)));

        let c = corollary_certificate(0.2, 0.01, 0.1, 1.0);
        let (lo, hi) = c.interval.unwrap();
        assert_relative_eq!(lo, 0.014, epsilon = 1e-15);
        assert!((hi - 0.51870).abs() < 5e-6);
        assert!(c.satisfied);

        let c = corollary_certificate(0.2, 0.4, 0.5, 1.0);
        let (lo, hi) = c.interval.unwrap();
        assert_relative_eq!(lo, 0.56, epsilon = 1e-15);
        assert!(lo > hi);
        assert!(!c.satisfied);
        assert!(!c.interval_is_nonempty());
    }

    #[test]
    fn chart_examples() {
        let t = 3f64.sqrt() / 4.0;
        let c = chart_certificate(0.007, t, 1.0, 1.0).unwrap();
        assert!(c.satisfied);
        let (lo, hi) = c.interval.unwrap();
        assert!((lo - 0.0393).abs() < 5e-5);
        assert!((hi - 0.1132).abs() < 5e-5);
        assert_relative_eq!(c.margin, 0.1875 - 0.175, epsilon = 1e-15);

        let c = chart_certificate(0.008, t, 1.0, 1.0).unwrap();
        assert!(!c.satisfied);
        assert!(c.margin < 0.0);

        let c = chart_certificate(5.0, t, 2.0, 0.0).unwrap();
        assert!(c.satisfied);
        assert!(c.interval.unwrap().1.is_infinite());

        assert!(chart_certificate(0.007, t, 0.9, 1.0).is_err());
        assert!(chart_certificate(0.007, 1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn tilde_r_examples() {
        let (l, t) = (PI / 48.0, 0.3);
        assert_relative_eq!(tilde_r_max(l, t, 1.0).unwrap(), 2.0 * l * t / 3.0, epsilon = 1e-14);
        assert_eq!(tilde_r_max(PI / 16.0, t, 1.0).unwrap(), 0.0);
        assert!(tilde_r_max(0.2, t, 1.0).is_err());
        assert!(tilde_r_max(0.2, t, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn contained_ball_examples() {
        assert_relative_eq!(contained_ball_radius(1.5, 1.0), 1.02, epsilon = 1e-15);
        assert_relative_eq!(contained_ball_radius(1.0, 1.0), 0.28, epsilon = 1e-15);
        assert_relative_eq!(contained_ball_radius(3.0, 2.0), 5.52, epsilon = 1e-15);
    }

    #[test]
    fn distortion_examples() {
        assert_eq!(distortion_bound(0.0, 10.0, 0.1).unwrap(), 0.0);
        let t = 0.433;
        assert_relative_eq!(distortion_bound(1.0, t / 6.0, t).unwrap(), 50.0 / 36.0, epsilon = 1e-14);
        assert_relative_eq!(distortion_bound(1.0, 0.02, t).unwrap(), 0.02 / (t * t), epsilon = 1e-14);
        assert!((distortion_bound(1.0, 0.02, t).unwrap() - 0.10667).abs() < 1e-4);
        assert!(distortion_bound(1.0, 0.08, t).is_err());
    }
}
