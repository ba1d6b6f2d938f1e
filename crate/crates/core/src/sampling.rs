//! Seeded random generators for test instances: directions, points, certified
//! signed measures and certified charts.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::certificate::{theorem_com_certificate, Certificate};
use crate::chart::BarycentricChart;
use crate::energy::CurvatureBounds;
use crate::error::{Error, Result};
use crate::measure::SignedDiscreteMeasure;
use crate::model_space::{ModelPoint, ModelSpace};
use crate::simplex::EuclideanSimplex;

const MAX_ATTEMPTS: usize = 10_000;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Uniform in the open Euclidean ball of the given radius.
pub fn random_in_ball<R: Rng>(rng: &mut R, n: usize, radius: f64) -> DVector<f64> {
    let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
    random_unit_vector(rng, n) * r
}

/// A point at normal-coordinate distance below `radius` from `center`.
pub fn random_point_near<R: Rng>(rng: &mut R, center: &ModelPoint, radius: f64) -> Result<ModelPoint> {
    let v = random_in_ball(rng, center.space().dimension(), radius);
    center.frame().point_at(v.as_slice())
}

/// A certified signed-measure instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub measure: SignedDiscreteMeasure,
    pub center: ModelPoint,
    pub rho: f64,
    pub bounds: CurvatureBounds,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceOptions {
    /// `ρ` is drawn uniformly from this range, clipped below the radius cap.
    pub rho_range: (f64, f64),
    pub max_points: usize,
    /// Probability that a weight is negative.
    pub negative_probability: f64,
    /// Distance of the centre from the space's origin.
    pub center_spread: f64,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        Self { rho_range: (0.05, 0.7), max_points: 6, negative_probability: 0.35, center_spread: 1.0 }
    }
}

/// Draws normalized signed measures on `space` until one is certified with
/// exact curvature bounds.
pub fn random_certified_instance<R: Rng>(rng: &mut R, space: ModelSpace, options: &InstanceOptions) -> Result<Instance> {
    let bounds = CurvatureBounds::exact(space.curvature());
    let iota = space.injectivity_radius();
    let cap = if space.curvature() > 0.0 {
        std::f64::consts::FRAC_PI_4 / space.curvature().sqrt()
    } else {
        f64::INFINITY
    };
    let n = space.dimension();
    for _ in 0..MAX_ATTEMPTS {
        let center = random_point_near(rng, &space.origin(), options.center_spread)?;
        let (lo, hi) = options.rho_range;
        let rho = rng.random_range(lo..hi).min(0.999 * cap);
        let r = rho * rng.random_range(0.05..0.7);
        let count = rng.random_range(1..=options.max_points.max(1));
        let frame = center.frame();
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for _ in 0..count {
            points.push(frame.point_at(random_in_ball(rng, n, r).as_slice())?);
            weights.push(if rng.random_bool(options.negative_probability) {
                -rng.random_range(0.0..0.4)
            } else {
                rng.random_range(0.1..1.0)
            });
        }
        let Ok(measure) = SignedDiscreteMeasure::new(points, weights) else { continue };
        if measure.total_mass() < 0.1 {
            continue;
        }
        let measure = measure.normalize()?;
        let Ok(certificate) = theorem_com_certificate(&measure, &center, rho, &bounds, iota) else { continue };
        if certificate.satisfied {
            return Ok(Instance { measure, center, rho, bounds, certificate });
        }
    }
    Err(Error::Domain("no certified instance found".into()))
}

/// Vertices of a random `n`-simplex in `Eⁿ` with longest edge 1 and
/// thickness at least `min_thickness`.
pub fn random_reference_simplex<R: Rng>(rng: &mut R, n: usize, min_thickness: f64) -> Result<Vec<DVector<f64>>> {
    for _ in 0..MAX_ATTEMPTS {
        let vertices: Vec<DVector<f64>> = (0..=n).map(|_| random_in_ball(rng, n, 1.0)).collect();
        let Ok(s) = EuclideanSimplex::from_vertices(vertices.clone()) else { continue };
        if s.thickness() >= min_thickness {
            let l = s.edge_bound();
            return Ok(vertices.into_iter().map(|v| v / l).collect());
        }
    }
    Err(Error::Domain("no simplex of the requested thickness found".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartOptions {
    pub scale: f64,
    pub min_thickness: f64,
    /// The longest edge is this fraction of the largest certified `L`.
    pub size_range: (f64, f64),
    pub center_spread: f64,
}

impl Default for ChartOptions {
    fn default() -> Self {
        Self { scale: 1.0, min_thickness: 0.15, size_range: (0.2, 0.9), center_spread: 1.0 }
    }
}

/// A certified chart whose vertices are a random reference simplex placed in
/// normal coordinates about a random point. For `κ = 0` the size is drawn
/// from `size_range` directly.
pub fn random_certified_chart<R: Rng>(rng: &mut R, space: ModelSpace, options: &ChartOptions) -> Result<BarycentricChart> {
    let n = space.dimension();
    let lambda = space.curvature().abs();
    for _ in 0..MAX_ATTEMPTS {
        let shape = random_reference_simplex(rng, n, options.min_thickness)?;
        let t = EuclideanSimplex::from_vertices(shape.clone())?.thickness();
        let fraction = rng.random_range(options.size_range.0..options.size_range.1);
        let size = if lambda > 0.0 {
            fraction * t * t / (25.0 * options.scale * options.scale * lambda.sqrt())
        } else {
            fraction
        };
        let center = random_point_near(rng, &space.origin(), options.center_spread)?;
        let frame = center.frame();
        let sigma: Vec<ModelPoint> =
            shape.iter().map(|v| frame.point_at((v * size).as_slice())).collect::<Result<_>>()?;
        match BarycentricChart::builder(sigma).scale(options.scale).build() {
            Ok(chart) => return Ok(chart),
            Err(Error::CertificateFailed(_)) | Err(Error::NotRealizable(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Domain("no certified chart found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_certified_and_reproducible() {
        for kappa in [1.0, 0.0, -1.0] {
            let space = ModelSpace::new(kappa, 2).unwrap();
            let a = random_certified_instance(&mut seeded_rng(7), space, &InstanceOptions::default()).unwrap();
            let b = random_certified_instance(&mut seeded_rng(7), space, &InstanceOptions::default()).unwrap();
            assert!(a.certificate.satisfied);
            assert_eq!(a.measure, b.measure);
            assert!((a.measure.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn charts_are_certified() {
        let mut rng = seeded_rng(3);
        for kappa in [1.0, -1.0, 0.0] {
            let chart = random_certified_chart(&mut rng, ModelSpace::new(kappa, 2).unwrap(), &ChartOptions::default()).unwrap();
            assert!(chart.is_certified());
        }
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = seeded_rng(0);
        for _ in 0..100 {
            assert!(random_in_ball(&mut rng, 3, 0.5).norm() < 0.5);
        }
    }
}
