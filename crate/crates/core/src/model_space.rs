//! Simply connected spaces of constant sectional curvature.
//!
//! Points live in an ambient vector space:
//!
//! - `κ > 0`: the sphere of radius `1/√κ` in `R^{n+1}`, Euclidean form.
//! - `κ = 0`: `R^n` itself.
//! - `κ < 0`: the upper sheet of the hyperboloid `⟨x,x⟩ = 1/κ` in `R^{1,n}`
//!   with the Minkowski form `(−,+,…,+)` and `x₀ > 0`.
//!
//! Every map that produces a point projects it back onto the model surface,
//! so repeated `exp`/`log` round trips do not drift off the surface.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for the point and tangent invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-12;

/// Distance (in units of the space's radius) below the antipode at which
/// the spherical logarithm is rejected.
pub const ANTIPODAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpace {
    curvature: f64,
    dimension: usize,
}

impl ModelSpace {
    pub fn new(curvature: f64, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if !curvature.is_finite() {
            return Err(Error::InvalidSpace(format!("curvature {curvature} is not finite")));
        }
        Ok(Self { curvature, dimension })
    }

    /// Unit sphere `S^n`.
    pub fn sphere(dimension: usize) -> Result<Self> {
        Self::new(1.0, dimension)
    }

    pub fn euclidean(dimension: usize) -> Result<Self> {
        Self::new(0.0, dimension)
    }

    /// Hyperbolic space of curvature −1.
    pub fn hyperbolic(dimension: usize) -> Result<Self> {
        Self::new(-1.0, dimension)
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_flat(&self) -> bool {
        self.curvature == 0.0
    }

    pub fn ambient_dimension(&self) -> usize {
        if self.is_flat() {
            self.dimension
        } else {
            self.dimension + 1
        }
    }

    /// `1/√|κ|`; infinite for the flat space.
    pub fn radius(&self) -> f64 {
        if self.is_flat() {
            f64::INFINITY
        } else {
            1.0 / self.curvature.abs().sqrt()
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        if self.curvature > 0.0 {
            PI / self.curvature.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// The ambient bilinear form: Euclidean for `κ ≥ 0`, Minkowski for `κ < 0`.
    pub fn ambient_inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        if self.curvature < 0.0 {
            let mut s = -a[0] * b[0];
            for i in 1..a.len() {
                s += a[i] * b[i];
            }
            s
        } else {
            a.dot(b)
        }
    }

    fn check_length(&self, v: &DVector<f64>) -> Result<()> {
        let expected = self.ambient_dimension();
        if v.len() != expected {
            return Err(Error::AmbientLength { expected, found: v.len() });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        Ok(())
    }

    /// Wraps ambient coordinates that already satisfy the surface equation.
    pub fn point(&self, coords: impl Into<DVector<f64>>) -> Result<ModelPoint> {
        let coords = coords.into();
        self.check_length(&coords)?;
        let p = ModelPoint { space: *self, coords };
        let residual = p.surface_residual();
        if residual > INVARIANT_TOLERANCE {
            return Err(Error::OffSurface { residual });
        }
        Ok(p)
    }

    /// Projects arbitrary ambient coordinates onto the model surface.
    ///
    /// On the hyperboloid the spatial coordinates are kept and `x₀` is
    /// recomputed.
    pub fn project(&self, coords: impl Into<DVector<f64>>) -> Result<ModelPoint> {
        let coords = coords.into();
        self.check_length(&coords)?;
        if self.curvature > 0.0 && coords.norm() == 0.0 {
            return Err(Error::Domain("cannot project the zero vector onto a sphere".into()));
        }
        Ok(ModelPoint { space: *self, coords: self.renormalize(coords) })
    }

    fn renormalize(&self, mut x: DVector<f64>) -> DVector<f64> {
        if self.curvature > 0.0 {
            let scale = self.radius() / x.norm();
            x *= scale;
        } else if self.curvature < 0.0 {
            let r = self.radius();
            let spatial: f64 = x.iter().skip(1).map(|c| c * c).sum();
            x[0] = (r * r + spatial).sqrt();
        }
        x
    }

    /// The distinguished base point: the origin of `R^n`, the north pole
    /// `(0,…,0,R)` of the sphere, or the apex `(R,0,…,0)` of the hyperboloid.
    pub fn origin(&self) -> ModelPoint {
        let mut coords = DVector::zeros(self.ambient_dimension());
        if self.curvature > 0.0 {
            coords[self.dimension] = self.radius();
        } else if self.curvature < 0.0 {
            coords[0] = self.radius();
        }
        ModelPoint { space: *self, coords }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    space: ModelSpace,
    coords: DVector<f64>,
}

impl ModelPoint {
    pub fn space(&self) -> ModelSpace {
        self.space
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Relative violation of the surface equation `⟨x,x⟩ = 1/κ`.
    pub fn surface_residual(&self) -> f64 {
        let k = self.space.curvature;
        if k == 0.0 {
            return 0.0;
        }
        let q = self.space.ambient_inner(&self.coords, &self.coords);
        let scale = (1.0 / k.abs()).max(self.coords.norm_squared());
        let mut residual = (q - 1.0 / k).abs() / scale;
        if k < 0.0 && self.coords[0] <= 0.0 {
            residual = residual.max(1.0);
        }
        residual
    }

    fn same_space(&self, other: &ModelPoint) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Projects ambient coordinates onto `T_xM` (orthogonal complement of `x`).
    fn tangent_projection(&self, mut v: DVector<f64>) -> DVector<f64> {
        let k = self.space.curvature;
        if k != 0.0 {
            let xx = self.space.ambient_inner(&self.coords, &self.coords);
            let xv = self.space.ambient_inner(&self.coords, &v);
            v.axpy(-xv / xx, &self.coords, 1.0);
        }
        v
    }

    pub fn tangent(&self, coords: impl Into<DVector<f64>>) -> Result<TangentVector> {
        let coords = coords.into();
        self.space.check_length(&coords)?;
        let t = TangentVector { base: self.clone(), coords };
        let residual = t.tangent_residual();
        if residual > INVARIANT_TOLERANCE {
            return Err(Error::NotTangent { residual });
        }
        Ok(t)
    }

    pub fn project_tangent(&self, coords: impl Into<DVector<f64>>) -> Result<TangentVector> {
        let coords = coords.into();
        self.space.check_length(&coords)?;
        Ok(TangentVector { base: self.clone(), coords: self.tangent_projection(coords) })
    }

    pub fn zero_tangent(&self) -> TangentVector {
        TangentVector {
            base: self.clone(),
            coords: DVector::zeros(self.space.ambient_dimension()),
        }
    }

    /// An orthonormal frame of `T_xM`, oriented so that `(x, e₁, …, e_n)` is a
    /// positively oriented ambient basis. Depends only on the point.
    pub fn frame(&self) -> TangentFrame {
        let space = self.space;
        let n = space.dimension;
        let dim = space.ambient_dimension();
        if space.is_flat() {
            let axes = (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }));
            return TangentFrame { base: self.clone(), axes: axes.collect() };
        }

        let mut candidates: Vec<DVector<f64>> = (0..dim)
            .map(|i| {
                let e = DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 });
                self.tangent_projection(e)
            })
            .collect();
        let mut axes: Vec<DVector<f64>> = Vec::with_capacity(n);
        while axes.len() < n {
            // Pivoted Gram-Schmidt: take the candidate with the largest residual.
            let (best, _) = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, space.ambient_inner(c, c)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let mut axis = candidates.swap_remove(best);
            // Second pass of orthogonalization for stability.
            for a in &axes {
                let p = space.ambient_inner(a, &axis);
                axis.axpy(-p, a, 1.0);
            }
            let norm = space.ambient_inner(&axis, &axis).max(0.0).sqrt();
            axis /= norm;
            for c in candidates.iter_mut() {
                let p = space.ambient_inner(&axis, c);
                c.axpy(-p, &axis, 1.0);
            }
            axes.push(axis);
        }

        let mut m = DMatrix::zeros(dim, dim);
        m.set_column(0, &self.coords);
        for (i, a) in axes.iter().enumerate() {
            m.set_column(i + 1, a);
        }
        if m.determinant() < 0.0 {
            let last = axes.last_mut().expect("dimension >= 1");
            *last *= -1.0;
        }
        TangentFrame { base: self.clone(), axes }
    }

    pub fn distance(&self, other: &ModelPoint) -> Result<f64> {
        self.same_space(other)?;
        let k = self.space.curvature;
        let diff = &self.coords - &other.coords;
        if k == 0.0 {
            return Ok(diff.norm());
        }
        let r = self.space.radius();
        if k > 0.0 {
            let sum = &self.coords + &other.coords;
            Ok(2.0 * r * diff.norm().atan2(sum.norm()))
        } else {
            // ⟨x−y, x−y⟩ = 4R² sinh²(d / 2R) on the hyperboloid.
            let q = self.space.ambient_inner(&diff, &diff).max(0.0);
            Ok(2.0 * r * (q.sqrt() / (2.0 * r)).asinh())
        }
    }

    pub fn exp(&self, v: &TangentVector) -> Result<ModelPoint> {
        if v.base.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        let k = self.space.curvature;
        if k == 0.0 {
            return Ok(ModelPoint { space: self.space, coords: &self.coords + &v.coords });
        }
        let len = v.norm();
        let limit = self.space.injectivity_radius();
        if len >= limit {
            return Err(Error::BeyondInjectivityRadius { length: len, limit });
        }
        let r = self.space.radius();
        let t = len / r;
        let (c, s_over_t) = if k > 0.0 {
            (t.cos(), sinc(t))
        } else {
            (t.cosh(), sinhc(t))
        };
        // exp_x(v) = C(t) x + R S(t) v/|v|, with t = |v|/R.
        let mut y = self.coords.scale(c);
        y.axpy(s_over_t, &v.coords, 1.0);
        Ok(ModelPoint { space: self.space, coords: self.space.renormalize(y) })
    }

    pub fn log(&self, y: &ModelPoint) -> Result<TangentVector> {
        self.same_space(y)?;
        let k = self.space.curvature;
        if k == 0.0 {
            return Ok(TangentVector { base: self.clone(), coords: &y.coords - &self.coords });
        }
        let d = self.distance(y)?;
        if d == 0.0 {
            return Ok(self.zero_tangent());
        }
        let r = self.space.radius();
        if k > 0.0 && d > (PI - ANTIPODAL_TOLERANCE) * r {
            return Err(Error::Antipodal);
        }
        // The projection of y onto T_xM has length R·S(d/R); rescale to d.
        let u = self.tangent_projection(y.coords.clone());
        let t = d / r;
        let factor = if k > 0.0 { 1.0 / sinc(t) } else { 1.0 / sinhc(t) };
        let v = self.tangent_projection(u.scale(factor));
        Ok(TangentVector { base: self.clone(), coords: v })
    }

    /// Angle at `self` between the geodesics to `y` and `z`, in `[0, π]`.
    pub fn angle(&self, y: &ModelPoint, z: &ModelPoint) -> Result<f64> {
        let u = self.log(y)?;
        let v = self.log(z)?;
        u.angle_to(&v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: ModelPoint,
    coords: DVector<f64>,
}

impl TangentVector {
    pub fn base(&self) -> &ModelPoint {
        &self.base
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn inner(&self, other: &TangentVector) -> Result<f64> {
        self.same_base(other)?;
        Ok(self.base.space.ambient_inner(&self.coords, &other.coords))
    }

    pub fn norm(&self) -> f64 {
        self.base.space.ambient_inner(&self.coords, &self.coords).max(0.0).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> TangentVector {
        TangentVector { base: self.base.clone(), coords: self.coords.scale(factor) }
    }

    pub fn plus(&self, other: &TangentVector) -> Result<TangentVector> {
        self.same_base(other)?;
        Ok(TangentVector { base: self.base.clone(), coords: &self.coords + &other.coords })
    }

    pub fn minus(&self, other: &TangentVector) -> Result<TangentVector> {
        self.same_base(other)?;
        Ok(TangentVector { base: self.base.clone(), coords: &self.coords - &other.coords })
    }

    /// In-place `self += factor · other` without checking bases.
    pub(crate) fn add_scaled(&mut self, factor: f64, other: &TangentVector) {
        self.coords.axpy(factor, &other.coords, 1.0);
    }

    /// `|⟨x, v⟩|` relative to `|x|·|v|` in the ambient Euclidean norm.
    pub fn tangent_residual(&self) -> f64 {
        let space = self.base.space;
        if space.is_flat() {
            return 0.0;
        }
        let scale = self.base.coords.norm() * self.coords.norm();
        if scale == 0.0 {
            return 0.0;
        }
        space.ambient_inner(&self.base.coords, &self.coords).abs() / scale
    }

    pub fn angle_to(&self, other: &TangentVector) -> Result<f64> {
        self.same_base(other)?;
        let (a, b) = (self.norm(), other.norm());
        if a == 0.0 || b == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateLeg);
        }
        let ua = self.coords.scale(1.0 / a);
        let ub = other.coords.scale(1.0 / b);
        let space = self.base.space;
        let diff = &ua - &ub;
        let sum = &ua + &ub;
        let dn = space.ambient_inner(&diff, &diff).max(0.0).sqrt();
        let sn = space.ambient_inner(&sum, &sum).max(0.0).sqrt();
        Ok(2.0 * dn.atan2(sn))
    }

    fn same_base(&self, other: &TangentVector) -> Result<()> {
        if self.base.space != other.base.space {
            return Err(Error::SpaceMismatch);
        }
        if self.base.coords != other.base.coords {
            return Err(Error::Domain("tangent vectors have different base points".into()));
        }
        Ok(())
    }
}

/// Orthonormal frame of a tangent space; converts between ambient tangent
/// vectors and Riemann normal coordinates.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    base: ModelPoint,
    axes: Vec<DVector<f64>>,
}

impl TangentFrame {
    pub fn base(&self) -> &ModelPoint {
        &self.base
    }

    pub fn axes(&self) -> &[DVector<f64>] {
        &self.axes
    }

    pub fn to_coords(&self, v: &TangentVector) -> DVector<f64> {
        let space = self.base.space;
        DVector::from_iterator(
            self.axes.len(),
            self.axes.iter().map(|a| space.ambient_inner(a, &v.coords)),
        )
    }

    pub fn from_coords(&self, c: &[f64]) -> TangentVector {
        let mut v = DVector::zeros(self.base.space.ambient_dimension());
        for (a, ci) in self.axes.iter().zip(c) {
            v.axpy(*ci, a, 1.0);
        }
        TangentVector { base: self.base.clone(), coords: v }
    }

    /// `exp_x` of normal coordinates.
    pub fn point_at(&self, c: &[f64]) -> Result<ModelPoint> {
        self.base.exp(&self.from_coords(c))
    }

    /// Normal coordinates of `log_x(y)`.
    pub fn coords_of(&self, y: &ModelPoint) -> Result<DVector<f64>> {
        Ok(self.to_coords(&self.base.log(y)?))
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0 * (1.0 - t * t / 20.0)
    } else {
        t.sin() / t
    }
}

fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 + t * t / 6.0 * (1.0 + t * t / 20.0)
    } else {
        t.sinh() / t
    }
}

/// `S_κ(x)`: `sin(√κ x)/√κ`, `x`, or `sinh(√−κ x)/√−κ`.
pub(crate) fn sin_kappa(kappa: f64, x: f64) -> f64 {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        (s * x).sin() / s
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        (s * x).sinh() / s
    } else {
        x
    }
}

/// Generalized haversine `H_κ(x)`: `sin²(√κ x/2)/κ`, `x²/4`, or
/// `sinh²(√−κ x/2)/(−κ)`. Every constant-curvature cosine rule reads
/// `H(a) = H(b − c) + S(b) S(c) sin²(α/2)`.
pub(crate) fn haversine_kappa(kappa: f64, x: f64) -> f64 {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        let h = (s * x / 2.0).sin();
        h * h / kappa
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        let h = (s * x / 2.0).sinh();
        h * h / -kappa
    } else {
        x * x / 4.0
    }
}

fn inverse_haversine_kappa(kappa: f64, h: f64) -> f64 {
    let h = h.max(0.0);
    if kappa > 0.0 {
        let s = kappa.sqrt();
        2.0 * (s * h.sqrt()).min(1.0).asin() / s
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        2.0 * (s * h.sqrt()).asinh() / s
    } else {
        2.0 * h.sqrt()
    }
}

/// Third side `a` of the hinge with legs `c`, `delta` and included angle
/// `alpha` in the model space of curvature `kappa`.
pub fn cosine_rule_side(kappa: f64, c: f64, delta: f64, alpha: f64) -> Result<f64> {
    if !(kappa.is_finite() && c.is_finite() && delta.is_finite()) {
        return Err(Error::Domain("non-finite hinge data".into()));
    }
    if c < 0.0 || delta < 0.0 {
        return Err(Error::Domain("hinge legs must be nonnegative".into()));
    }
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain(format!("hinge angle {alpha} outside [0, π]")));
    }
    if kappa > 0.0 {
        let s = kappa.sqrt();
        if c * s >= FRAC_PI_2 || delta * s >= FRAC_PI_2 {
            return Err(Error::Domain("spherical hinge legs must be shorter than π/(2√κ)".into()));
        }
    }
    let half = (alpha / 2.0).sin();
    let h = haversine_kappa(kappa, c - delta)
        + sin_kappa(kappa, c) * sin_kappa(kappa, delta) * half * half;
    Ok(inverse_haversine_kappa(kappa, h))
}

/// Angle opposite side `a` in the triangle with sides `a`, `b`, `c` in the
/// model space of curvature `kappa`.
pub fn triangle_angle(kappa: f64, a: f64, b: f64, c: f64) -> Result<f64> {
    if [a, b, c].iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Domain("triangle sides must be finite and nonnegative".into()));
    }
    if kappa > 0.0 && (a + b + c) * kappa.sqrt() > 2.0 * PI {
        return Err(Error::Domain("spherical triangle perimeter exceeds 2π/√κ".into()));
    }
    let ha = haversine_kappa(kappa, a);
    let sin2 = ha - haversine_kappa(kappa, b - c);
    let cos2 = haversine_kappa(kappa, b + c) - ha;
    let scale = haversine_kappa(kappa, b + c).max(f64::MIN_POSITIVE);
    let slack = 1e-14 * scale;
    if sin2 < -slack || cos2 < -slack {
        return Err(Error::Domain(format!("sides ({a}, {b}, {c}) violate the triangle inequality")));
    }
    if b == 0.0 || c == 0.0 {
        return Err(Error::DegenerateLeg);
    }
    Ok(2.0 * sin2.max(0.0).sqrt().atan2(cos2.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    #[test]
    fn distance_examples() {
        let e2 = ModelSpace::euclidean(2).unwrap();
        let d = e2.point(v(&[0.0, 0.0])).unwrap().distance(&e2.point(v(&[3.0, 4.0])).unwrap());
        assert_relative_eq!(d.unwrap(), 5.0, epsilon = 1e-15);

        let s2 = ModelSpace::sphere(2).unwrap();
        let d = s2
            .point(v(&[0.0, 0.0, 1.0]))
            .unwrap()
            .distance(&s2.point(v(&[1.0, 0.0, 0.0])).unwrap());
        assert_relative_eq!(d.unwrap(), FRAC_PI_2, epsilon = 1e-15);

        let h2 = ModelSpace::hyperbolic(2).unwrap();
        let y = h2.point(v(&[1f64.cosh(), 1f64.sinh(), 0.0])).unwrap();
        assert_relative_eq!(h2.origin().distance(&y).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn distance_rejects_mixed_spaces() {
        let a = ModelSpace::sphere(2).unwrap().origin();
        let b = ModelSpace::hyperbolic(2).unwrap().origin();
        assert!(matches!(a.distance(&b), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn exp_examples() {
        let e2 = ModelSpace::euclidean(2).unwrap();
        let x = e2.point(v(&[1.0, 1.0])).unwrap();
        let y = x.exp(&x.tangent(v(&[2.0, 0.0])).unwrap()).unwrap();
        assert_eq!(y.coords(), &v(&[3.0, 1.0]));

        let s2 = ModelSpace::sphere(2).unwrap();
        let n = s2.origin();
        let y = n.exp(&n.tangent(v(&[FRAC_PI_2, 0.0, 0.0])).unwrap()).unwrap();
        assert!((y.coords() - v(&[1.0, 0.0, 0.0])).norm() < 1e-15);

        let h2 = ModelSpace::hyperbolic(2).unwrap();
        let o = h2.origin();
        let y = o.exp(&o.tangent(v(&[0.0, 2.0, 0.0])).unwrap()).unwrap();
        assert!((y.coords() - v(&[2f64.cosh(), 2f64.sinh(), 0.0])).norm() < 1e-14);
    }

    #[test]
    fn exp_rejects_long_vectors_on_sphere() {
        let s2 = ModelSpace::sphere(2).unwrap();
        let n = s2.origin();
        let t = n.tangent(v(&[PI, 0.0, 0.0])).unwrap();
        assert!(matches!(n.exp(&t), Err(Error::BeyondInjectivityRadius { .. })));
    }

    #[test]
    fn log_examples() {
        let s2 = ModelSpace::sphere(2).unwrap();
        let n = s2.origin();
        assert_eq!(n.log(&n).unwrap().norm(), 0.0);
        let l = n.log(&s2.point(v(&[1.0, 0.0, 0.0])).unwrap()).unwrap();
        assert!((l.coords() - v(&[FRAC_PI_2, 0.0, 0.0])).norm() < 1e-15);

        let e3 = ModelSpace::euclidean(3).unwrap();
        let a = e3.point(v(&[1.0, 2.0, 3.0])).unwrap();
        let b = e3.point(v(&[0.0, -1.0, 5.0])).unwrap();
        assert_eq!(a.log(&b).unwrap().coords(), &v(&[-1.0, -3.0, 2.0]));
    }

    #[test]
    fn log_rejects_antipodes() {
        let s2 = ModelSpace::sphere(2).unwrap();
        let south = s2.point(v(&[0.0, 0.0, -1.0])).unwrap();
        assert!(matches!(s2.origin().log(&south), Err(Error::Antipodal)));
    }

    #[test]
    fn angle_examples() {
        let s2 = ModelSpace::sphere(2).unwrap();
        let x = s2.origin();
        let y = s2.point(v(&[1.0, 0.0, 0.0])).unwrap();
        let z = s2.point(v(&[0.0, 1.0, 0.0])).unwrap();
        assert_relative_eq!(x.angle(&y, &z).unwrap(), FRAC_PI_2, epsilon = 1e-15);

        let e2 = ModelSpace::euclidean(2).unwrap();
        let o = e2.origin();
        let a = e2.point(v(&[1.0, 0.0])).unwrap();
        let b = e2.point(v(&[1.0, 1.0])).unwrap();
        let c = e2.point(v(&[2.0, 0.0])).unwrap();
        assert_relative_eq!(o.angle(&a, &b).unwrap(), PI / 4.0, epsilon = 1e-15);
        assert_eq!(o.angle(&a, &c).unwrap(), 0.0);
        assert!(matches!(o.angle(&o, &a), Err(Error::DegenerateLeg)));
    }

    #[test]
    fn cosine_rule_examples() {
        assert_relative_eq!(cosine_rule_side(0.0, 3.0, 4.0, FRAC_PI_2).unwrap(), 5.0, epsilon = 1e-14);
        let a = cosine_rule_side(1.0, PI / 4.0, PI / 4.0, FRAC_PI_2).unwrap();
        assert_relative_eq!(a, PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(cosine_rule_side(-1.0, 1.0, 0.4, 0.0).unwrap(), 0.6, epsilon = 1e-14);
        assert!(cosine_rule_side(1.0, 1.6, 0.1, 0.3).is_err());
        assert!(cosine_rule_side(0.0, 1.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn cosine_rule_is_continuous_at_zero_curvature() {
        for &(c, d, a) in &[(3.0, 4.0, 1.0), (0.1, 2.0, 2.5), (1.0, 1.0, 0.01)] {
            let flat = cosine_rule_side(0.0, c, d, a).unwrap();
            for k in [1e-8, -1e-8] {
                let side = cosine_rule_side(k, c, d, a).unwrap();
                assert!(((side - flat) / flat).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn triangle_angles() {
        assert_relative_eq!(triangle_angle(0.0, 1.0, 1.0, 1.0).unwrap(), PI / 3.0, epsilon = 1e-15);
        assert_relative_eq!(triangle_angle(0.0, 2.0, 1.0, 1.0).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(triangle_angle(0.0, 5.0, 3.0, 4.0).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert!(triangle_angle(0.0, 3.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn frames_are_orthonormal_and_oriented() {
        for k in [1.0, -1.0, 0.0, 4.0, -0.25] {
            for n in 1..=3 {
                let space = ModelSpace::new(k, n).unwrap();
                let o = space.origin();
                let mut c = vec![0.0; n];
                c[0] = 0.3;
                let x = o.exp(&o.frame().from_coords(&c)).unwrap();
                let f = x.frame();
                for (i, a) in f.axes().iter().enumerate() {
                    let t = x.tangent(a.clone()).unwrap();
                    assert!((t.norm() - 1.0).abs() < 1e-14);
                    for b in &f.axes()[i + 1..] {
                        assert!(space.ambient_inner(a, b).abs() < 1e-14);
                    }
                }
                if k != 0.0 {
                    let dim = n + 1;
                    let mut m = DMatrix::zeros(dim, dim);
                    m.set_column(0, x.coords());
                    for (i, a) in f.axes().iter().enumerate() {
                        m.set_column(i + 1, a);
                    }
                    assert!(m.determinant() > 0.0);
                }
            }
        }
    }

    #[test]
    fn projection_restores_invariants() {
        let h = ModelSpace::hyperbolic(2).unwrap();
        let p = h.project(v(&[0.0, 3.0, -4.0])).unwrap();
        assert!(p.surface_residual() < 1e-15);
        assert!(h.point(v(&[1.0, 1.0, 0.0])).is_err());
        assert!(ModelSpace::sphere(2).unwrap().project(v(&[0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn injectivity_radius_closed_form() {
        assert_relative_eq!(ModelSpace::new(4.0, 2).unwrap().injectivity_radius(), PI / 2.0);
        assert!(ModelSpace::hyperbolic(3).unwrap().injectivity_radius().is_infinite());
        assert!(ModelSpace::euclidean(1).unwrap().injectivity_radius().is_infinite());
        assert!(ModelSpace::new(1.0, 0).is_err());
        assert!(ModelSpace::new(f64::NAN, 2).is_err());
    }
}
