//! The energy `E(x) = ½ Σ wᵢ d(x, pᵢ)²`, its gradient, and the comparison
//! lower bound on its second derivative along geodesics.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::SignedDiscreteMeasure;
use crate::model_space::{ModelPoint, TangentVector};

/// Sectional curvature bounds `Λℓ ≤ K ≤ Λu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureBounds {
    lambda_lo: f64,
    lambda_hi: f64,
}

impl CurvatureBounds {
    pub fn new(lambda_lo: f64, lambda_hi: f64) -> Result<Self> {
        if !(lambda_lo.is_finite() && lambda_hi.is_finite()) || lambda_lo > lambda_hi {
            return Err(Error::Domain(format!(
                "curvature bounds [{lambda_lo}, {lambda_hi}] are not an interval"
            )));
        }
        Ok(Self { lambda_lo, lambda_hi })
    }

    /// Tight bounds for a model space of curvature `kappa`.
    pub fn exact(kappa: f64) -> Self {
        Self { lambda_lo: kappa, lambda_hi: kappa }
    }

    /// `|K| ≤ lambda`.
    pub fn symmetric(lambda: f64) -> Result<Self> {
        Self::new(-lambda.abs(), lambda.abs())
    }

    pub fn lambda_lo(&self) -> f64 {
        self.lambda_lo
    }

    pub fn lambda_hi(&self) -> f64 {
        self.lambda_hi
    }

    /// `Λ = max(|Λℓ|, |Λu|)`.
    pub fn lambda_abs(&self) -> f64 {
        self.lambda_lo.abs().max(self.lambda_hi.abs())
    }

    pub fn contains(&self, kappa: f64) -> bool {
        self.lambda_lo <= kappa && kappa <= self.lambda_hi
    }
}

pub fn energy(m: &SignedDiscreteMeasure, x: &ModelPoint) -> Result<f64> {
    let mut e = 0.0;
    for (p, w) in m.iter() {
        let d = x.distance(p)?;
        e += w * d * d;
    }
    Ok(0.5 * e)
}

/// Bound on the rounding noise of [`energy`] at `x`; used to tell a real
/// energy increase from evaluation noise.
pub fn energy_noise_floor(m: &SignedDiscreteMeasure, x: &ModelPoint) -> Result<f64> {
    let space = m.space();
    let scale = if space.is_flat() { x.coords().amax() } else { space.radius() };
    let mut s = 0.0;
    for (p, w) in m.iter() {
        let d = x.distance(p)?;
        s += w.abs() * (d * d + d * scale.max(d));
    }
    Ok(32.0 * f64::EPSILON * s)
}

/// `grad E(x) = −Σ wᵢ log_x(pᵢ)`.
pub fn gradient(m: &SignedDiscreteMeasure, x: &ModelPoint) -> Result<TangentVector> {
    let mut g = x.zero_tangent();
    for (p, w) in m.iter() {
        if w != 0.0 {
            g.add_scaled(-w, &x.log(p)?);
        }
    }
    Ok(g)
}

/// `f_κ(α, z) = cos²α + (ϑ / tan ϑ) sin²α` for `κ ≥ 0`, with `tanh` for
/// `κ ≤ 0`, where `ϑ = z √|κ|`.
pub fn f_kappa(kappa: f64, alpha: f64, z: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain(format!("angle {alpha} outside [0, π]")));
    }
    if !(z >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("invalid distance {z} or curvature {kappa}")));
    }
    let theta = z * kappa.abs().sqrt();
    let ratio = if kappa > 0.0 {
        if theta >= FRAC_PI_2 {
            return Err(Error::Domain(format!("ϑ = {theta} must stay below π/2")));
        }
        theta_over_tan(theta)
    } else {
        theta_over_tanh(theta)
    };
    let (s, c) = alpha.sin_cos();
    Ok(c * c + ratio * s * s)
}

/// `ϑ / tan ϑ`, continuous at 0.
pub fn theta_over_tan(theta: f64) -> f64 {
    if theta.abs() < 1e-6 {
        1.0 - theta * theta / 3.0
    } else {
        theta / theta.tan()
    }
}

/// `ϑ / tanh ϑ`, continuous at 0.
pub fn theta_over_tanh(theta: f64) -> f64 {
    if theta.abs() < 1e-6 {
        1.0 + theta * theta / 3.0
    } else {
        theta / theta.tanh()
    }
}

/// Lower bound on `d²/dt² E(exp_x(t u))` at `t = 0` for a unit vector `u`:
/// positive weights are compared against curvature `Λu`, negative weights
/// against `Λℓ`.
pub fn second_derivative_lower_bound(
    m: &SignedDiscreteMeasure,
    x: &ModelPoint,
    u: &TangentVector,
    bounds: &CurvatureBounds,
) -> Result<f64> {
    if (u.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("direction has norm {}, expected 1", u.norm())));
    }
    let mut bound = 0.0;
    for (p, w) in m.iter() {
        if w == 0.0 {
            continue;
        }
        let v = x.log(p)?;
        let d = v.norm();
        let alpha = if d == 0.0 { 0.0 } else { u.angle_to(&v)? };
        if w > 0.0 {
            bound += w * f_kappa(bounds.lambda_hi, alpha, d)?;
        } else {
            bound += w * f_kappa(bounds.lambda_lo, alpha, d)?;
        }
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_space::ModelSpace;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn pt(space: ModelSpace, c: &[f64]) -> ModelPoint {
        space.point(DVector::from_column_slice(c)).unwrap()
    }

    #[test]
    fn energy_examples() {
        let e2 = ModelSpace::euclidean(2).unwrap();
        let p = pt(e2, &[0.0, 0.0]);
        let single = SignedDiscreteMeasure::new(vec![p.clone()], vec![1.0]).unwrap();
        assert_eq!(energy(&single, &p).unwrap(), 0.0);

        let m = SignedDiscreteMeasure::new(vec![p, pt(e2, &[2.0, 0.0])], vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(energy(&m, &pt(e2, &[1.0, 0.0])).unwrap(), 0.5);
        let g = gradient(&m, &pt(e2, &[1.0, 0.0])).unwrap();
        assert_eq!(g.norm(), 0.0);

        let s2 = ModelSpace::sphere(2).unwrap();
        let pole = SignedDiscreteMeasure::new(vec![s2.origin()], vec![1.0]).unwrap();
        let x = pt(s2, &[0.2f64.sin(), 0.0, 0.2f64.cos()]);
        assert_relative_eq!(energy(&pole, &x).unwrap(), 0.02, epsilon = 1e-15);
        let g = gradient(&pole, &x).unwrap();
        assert_relative_eq!(g.norm(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn f_kappa_examples() {
        for k in [-3.0, 0.0, 1.0] {
            assert_eq!(f_kappa(k, 0.0, 0.7).unwrap(), 1.0);
        }
        assert_relative_eq!(f_kappa(1.0, FRAC_PI_2, PI / 4.0).unwrap(), PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(f_kappa(-1.0, FRAC_PI_2, 1.0).unwrap(), 1.0 / 1f64.tanh(), epsilon = 1e-15);
        assert_relative_eq!(f_kappa(-1.0, FRAC_PI_2, 1.0).unwrap(), 1.313035285499331, epsilon = 1e-12);
        assert_eq!(f_kappa(1.0, 1.0, 0.0).unwrap(), 1.0);
        assert!(f_kappa(1.0, 1.0, 1.6).is_err());
        assert!(f_kappa(1.0, -0.1, 0.5).is_err());
    }

    #[test]
    fn small_theta_branches_join_smoothly() {
        for t in [0.9e-6, 1.1e-6] {
            assert!((theta_over_tan(t) - (1.0 - t * t / 3.0)).abs() < 1e-15);
            assert!((theta_over_tanh(t) - (1.0 + t * t / 3.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_bound_is_total_mass() {
        let e2 = ModelSpace::euclidean(2).unwrap();
        let m = SignedDiscreteMeasure::new(
            vec![pt(e2, &[0.0, 0.0]), pt(e2, &[1.0, 0.3]), pt(e2, &[-0.2, 0.5])],
            vec![0.3, 0.5, 0.2],
        )
        .unwrap();
        let x = pt(e2, &[0.1, 0.1]);
        let u = x.tangent(DVector::from_vec(vec![0.6, 0.8])).unwrap();
        let b = second_derivative_lower_bound(&m, &x, &u, &CurvatureBounds::exact(0.0)).unwrap();
        assert_relative_eq!(b, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn aligned_single_weight_bound_is_one() {
        let s2 = ModelSpace::sphere(2).unwrap();
        let x = s2.origin();
        let p = pt(s2, &[0.4f64.sin(), 0.0, 0.4f64.cos()]);
        let m = SignedDiscreteMeasure::new(vec![p], vec![1.0]).unwrap();
        let u = x.tangent(DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        for bounds in [CurvatureBounds::exact(1.0), CurvatureBounds::new(-2.0, 3.0).unwrap()] {
            let b = second_derivative_lower_bound(&m, &x, &u, &bounds).unwrap();
            assert_relative_eq!(b, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bounds_validation() {
        assert!(CurvatureBounds::new(1.0, -1.0).is_err());
        let b = CurvatureBounds::new(-2.0, 0.5).unwrap();
        assert_eq!(b.lambda_abs(), 2.0);
        assert!(b.contains(0.0));
        assert!(!b.contains(1.0));
    }
}
