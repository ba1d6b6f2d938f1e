//! Barycentric coordinate charts: a Euclidean reference simplex mapped onto a
//! model space by taking centres of mass with the affine barycentric weights.

mod facet;
mod solver;

pub use facet::{shared_facet_check, shared_facet_check_with, FacetCheckOptions, FacetVerdict};
pub use solver::{
    karcher_mean, karcher_mean_with, KarcherSolution, SolverOptions, DEFAULT_GRADIENT_TOLERANCE,
    DEFAULT_MAX_ITERATIONS,
};

use nalgebra::{DMatrix, DVector};

use crate::certificate::{chart_certificate, distortion_bound, Certificate};
use crate::energy::CurvatureBounds;
use crate::error::{Error, Result};
use crate::measure::SignedDiscreteMeasure;
use crate::model_space::{ModelPoint, ModelSpace, TangentFrame};
use crate::simplex::{realize_from_edge_lengths, EdgeLengthMatrix, EuclideanSimplex};

/// Relative gradient tolerance used by chart solves. Tighter than the solver
/// default so that inverse round trips reach `1e-8` in the weights.
pub const CHART_GRADIENT_TOLERANCE: f64 = 1e-13;

/// Finite-difference step for Jacobians, in units of `L`.
pub const JACOBIAN_STEP: f64 = 1e-5;

/// Smallest `|det|` accepted when orienting a chart.
pub const ORIENTATION_TOLERANCE: f64 = 1e-10;

/// Relative slack on the closed domain ball, so vertices at distance exactly
/// `sL` from the anchor are accepted despite rounding.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ChartBuilder {
    sigma: Vec<ModelPoint>,
    scale: f64,
    anchor: usize,
    rho: Option<f64>,
    edge_bound: Option<f64>,
    force: bool,
}

impl ChartBuilder {
    pub fn new(sigma: Vec<ModelPoint>) -> Self {
        Self { sigma, scale: 1.0, anchor: 0, rho: None, edge_bound: None, force: false }
    }

    /// Domain scale `s ≥ 1`: the map is defined on `B(ṽ, sL)`.
    pub fn scale(mut self, s: f64) -> Self {
        self.scale = s;
        self
    }

    pub fn anchor(mut self, index: usize) -> Self {
        self.anchor = index;
        self
    }

    pub fn rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    /// Use `L` larger than the longest edge, e.g. one shared by several charts.
    pub fn edge_bound(mut self, l: f64) -> Self {
        self.edge_bound = Some(l);
        self
    }

    /// Build even if the chart certificate fails.
    pub fn force(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn build(self) -> Result<BarycentricChart> {
        let k = self.sigma.len();
        if k < 2 {
            return Err(Error::DegenerateSimplex);
        }
        let space = self.sigma[0].space();
        if self.sigma.iter().any(|p| p.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        let n = space.dimension();
        if k != n + 1 {
            return Err(Error::Domain(format!("an {n}-dimensional chart needs {} points, got {k}", n + 1)));
        }
        if self.anchor >= k {
            return Err(Error::Domain(format!("anchor {} out of range", self.anchor)));
        }
        let reference = realize_from_edge_lengths(&EdgeLengthMatrix::from_points(&self.sigma)?)?;
        let edge_bound = match self.edge_bound {
            Some(l) if l >= reference.edge_bound() => l,
            Some(l) => {
                return Err(Error::Domain(format!(
                    "edge bound {l} is below the longest edge {}",
                    reference.edge_bound()
                )))
            }
            None => reference.edge_bound(),
        };
        let thickness = reference.min_altitude() / (n as f64 * edge_bound);
        let lambda_abs = space.curvature().abs();
        let certificate = chart_certificate(edge_bound, thickness, self.scale, lambda_abs)?;
        if !certificate.satisfied && !self.force {
            return Err(Error::CertificateFailed(Box::new(certificate)));
        }
        let (lo, hi) = certificate.interval.expect("chart certificates carry an interval");
        let rho = match self.rho {
            Some(rho) => {
                if !(lo < rho && rho < hi) && !self.force {
                    let mut cert = certificate;
                    cert.satisfied = false;
                    cert.margin = (rho - lo).min(hi - rho);
                    cert.inputs.insert("rho".into(), rho);
                    return Err(Error::CertificateFailed(Box::new(cert)));
                }
                rho
            }
            None if hi.is_finite() && lo < hi => lo + 1e-3 * (hi - lo),
            None if hi.is_finite() => lo * (1.0 + 1e-3),
            None => 2.0 * lo,
        };
        let solver = SolverOptions {
            gradient_tolerance: CHART_GRADIENT_TOLERANCE,
            force: self.force,
            ..SolverOptions::default()
        };
        Ok(BarycentricChart {
            space,
            sigma: self.sigma,
            reference,
            scale: self.scale,
            anchor: self.anchor,
            rho,
            edge_bound,
            thickness,
            bounds: CurvatureBounds::symmetric(lambda_abs)?,
            certificate,
            solver,
        })
    }
}

/// Where a point sits in a chart.
#[derive(Debug, Clone)]
pub struct Located {
    pub lambda: DVector<f64>,
    /// Reference-simplex point with barycentric coordinates `lambda`.
    pub parameter: DVector<f64>,
    /// Whether `parameter` lies in the domain ball `B(ṽ, sL)`.
    pub in_domain: bool,
    /// `d(forward(parameter), x)`; infinite when the forward map failed.
    pub round_trip_error: f64,
}

#[derive(Debug, Clone)]
pub struct BarycentricChart {
    space: ModelSpace,
    sigma: Vec<ModelPoint>,
    reference: EuclideanSimplex,
    scale: f64,
    anchor: usize,
    rho: f64,
    edge_bound: f64,
    thickness: f64,
    bounds: CurvatureBounds,
    certificate: Certificate,
    solver: SolverOptions,
}

impl BarycentricChart {
    pub fn builder(sigma: Vec<ModelPoint>) -> ChartBuilder {
        ChartBuilder::new(sigma)
    }

    pub fn space(&self) -> ModelSpace {
        self.space
    }

    pub fn sigma(&self) -> &[ModelPoint] {
        &self.sigma
    }

    pub fn reference(&self) -> &EuclideanSimplex {
        &self.reference
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn center(&self) -> &ModelPoint {
        &self.sigma[self.anchor]
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn edge_bound(&self) -> f64 {
        self.edge_bound
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.satisfied
    }

    /// Radius `sL` of the parameter domain about the anchor vertex.
    pub fn domain_radius(&self) -> f64 {
        self.scale * self.edge_bound
    }

    pub fn anchor_parameter(&self) -> &DVector<f64> {
        self.reference.vertex(self.anchor)
    }

    /// Relative metric distortion bound `50Λρ²/t²`.
    pub fn distortion_bound(&self) -> Result<f64> {
        distortion_bound(self.space.curvature().abs(), self.rho, self.thickness)
    }

    pub fn solver_options(&self) -> &SolverOptions {
        &self.solver
    }

    pub fn with_solver_options(mut self, options: SolverOptions) -> Self {
        self.solver = options;
        self
    }

    fn check_domain(&self, u: &DVector<f64>) -> Result<()> {
        let n = self.space.dimension();
        if u.len() != n {
            return Err(Error::AmbientLength { expected: n, found: u.len() });
        }
        let distance = (u - self.anchor_parameter()).norm();
        let radius = self.domain_radius();
        if distance > radius * (1.0 + DOMAIN_SLACK) {
            return Err(Error::OutsideDomain { distance, radius });
        }
        Ok(())
    }

    /// `b(u)`: the centre of mass of the vertices weighted by `λ(u)`.
    pub fn forward_map(&self, u: &DVector<f64>) -> Result<ModelPoint> {
        self.check_domain(u)?;
        let lambda = self.reference.barycentric_coords(u)?;
        self.forward_weights(lambda.as_slice())
    }

    /// Centre of mass for explicit weights summing to one; no domain check.
    pub fn forward_weights(&self, lambda: &[f64]) -> Result<ModelPoint> {
        self.solve(lambda).map(|s| s.point)
    }

    pub fn solve(&self, lambda: &[f64]) -> Result<KarcherSolution> {
        let m = SignedDiscreteMeasure::new(self.sigma.clone(), lambda.to_vec())?;
        karcher_mean_with(&m, self.center(), self.rho, &self.bounds, &self.solver)
    }

    /// Weights `λ` with `Σ λᵢ log_x(pᵢ) = 0` and `Σ λᵢ = 1`.
    pub fn inverse_map(&self, x: &ModelPoint) -> Result<DVector<f64>> {
        if x.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        let n = self.space.dimension();
        let frame = x.frame();
        let logs: Vec<DVector<f64>> = self.sigma.iter().map(|p| frame.coords_of(p)).collect::<Result<_>>()?;
        let mean_length = logs.iter().map(|v| v.norm()).sum::<f64>() / logs.len() as f64;
        let row_scale = if mean_length > 0.0 { mean_length } else { 1.0 };
        let mut a = DMatrix::from_element(n + 1, n + 1, row_scale);
        for (j, v) in logs.iter().enumerate() {
            a.view_mut((0, j), (n, 1)).copy_from(v);
        }
        let svd = a.svd(true, true);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        if !(smin > 1e-12 * smax) {
            return Err(Error::SingularSystem(smax / smin));
        }
        let mut rhs = DVector::zeros(n + 1);
        rhs[n] = row_scale;
        let mut lambda = svd.solve(&rhs, 0.0).map_err(|e| Error::Domain(e.to_owned()))?;
        lambda[n] = 1.0 - lambda.rows(0, n).sum();
        Ok(lambda)
    }

    /// Inverse map plus a forward round trip.
    pub fn locate(&self, x: &ModelPoint) -> Result<Located> {
        let lambda = self.inverse_map(x)?;
        let parameter = self.reference.point_at(lambda.as_slice());
        let distance = (&parameter - self.anchor_parameter()).norm();
        let in_domain = distance <= self.domain_radius() * (1.0 + DOMAIN_SLACK);
        let round_trip_error = match self.forward_weights(lambda.as_slice()) {
            Ok(y) => y.distance(x)?,
            Err(_) => f64::INFINITY,
        };
        Ok(Located { lambda, parameter, in_domain, round_trip_error })
    }

    /// Central-difference Jacobian of `b` at `u` in the normal frame `frame`.
    pub fn jacobian_in(&self, u: &DVector<f64>, frame: &TangentFrame) -> Result<DMatrix<f64>> {
        self.check_domain(u)?;
        let n = self.space.dimension();
        let h = JACOBIAN_STEP * self.edge_bound;
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut plus = u.clone();
            plus[j] += h;
            let mut minus = u.clone();
            minus[j] -= h;
            let xp = self.forward_weights(self.reference.barycentric_coords(&plus)?.as_slice())?;
            let xm = self.forward_weights(self.reference.barycentric_coords(&minus)?.as_slice())?;
            let column = (frame.coords_of(&xp)? - frame.coords_of(&xm)?) / (2.0 * h);
            jac.set_column(j, &column);
        }
        Ok(jac)
    }

    /// Jacobian of `b` at `u` in normal coordinates at `b(u)`.
    pub fn differential(&self, u: &DVector<f64>) -> Result<DMatrix<f64>> {
        let base = self.forward_map(u)?;
        self.jacobian_in(u, &base.frame())
    }

    pub fn differential_min_singular_value(&self, u: &DVector<f64>) -> Result<f64> {
        Ok(self.differential(u)?.singular_values().min())
    }

    /// Sign of the Jacobian determinant at the anchor vertex, in the frame
    /// [`ModelPoint::frame`] of that vertex.
    pub fn orientation(&self) -> Result<i8> {
        let u = self.anchor_parameter().clone();
        let det = self.jacobian_in(&u, &self.center().frame())?.determinant();
        if det.abs() < ORIENTATION_TOLERANCE {
            return Err(Error::DegenerateSimplex);
        }
        Ok(if det > 0.0 { 1 } else { -1 })
    }
}
