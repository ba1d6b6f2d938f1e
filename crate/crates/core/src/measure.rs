//! Signed discrete measures on a model space.

use crate::error::{Error, Result};
use crate::model_space::{ModelPoint, ModelSpace};

/// Smallest total mass accepted by [`SignedDiscreteMeasure::normalize`].
pub const MIN_TOTAL_MASS: f64 = 1e-12;

/// Weighted support points in a single model space. Weights may have any
/// sign; zero weights are kept but belong to neither Jordan part.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDiscreteMeasure {
    points: Vec<ModelPoint>,
    weights: Vec<f64>,
}

/// Masses of the positive and negative parts, `μ = μ₊ − μ₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanMasses {
    pub plus: f64,
    pub minus: f64,
}

impl JordanMasses {
    pub fn total(&self) -> f64 {
        self.plus - self.minus
    }

    /// Total variation `μ₊ + μ₋`.
    pub fn variation(&self) -> f64 {
        self.plus + self.minus
    }
}

impl SignedDiscreteMeasure {
    pub fn new(points: Vec<ModelPoint>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch { points: points.len(), weights: weights.len() });
        }
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let space = points[0].space();
        if points.iter().any(|p| p.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("weights must be finite".into()));
        }
        Ok(Self { points, weights })
    }

    pub fn space(&self) -> ModelSpace {
        self.points[0].space()
    }

    pub fn points(&self) -> &[ModelPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModelPoint, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn jordan_masses(&self) -> JordanMasses {
        let plus = self.weights.iter().filter(|w| **w > 0.0).fold(0.0, |acc, w| acc + w);
        let minus = self.weights.iter().filter(|w| **w < 0.0).fold(0.0, |acc, w| acc - w);
        JordanMasses { plus, minus }
    }

    /// Total mass, computed as `μ₊ − μ₋` so that it matches the Jordan masses.
    pub fn total_mass(&self) -> f64 {
        self.jordan_masses().total()
    }

    /// Radius of the smallest closed ball about `center` containing the support.
    pub fn support_radius(&self, center: &ModelPoint) -> Result<f64> {
        self.points.iter().try_fold(0.0_f64, |r, p| Ok(r.max(center.distance(p)?)))
    }

    /// Rescales the weights so the total mass is 1.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.total_mass();
        if total.abs() <= MIN_TOTAL_MASS {
            return Err(Error::ZeroMass(total));
        }
        Ok(self.scaled(1.0 / total))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self.points.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.points.clone(), weights)
    }
}
