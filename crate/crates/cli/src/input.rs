//! JSON input files for measures and simplices.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use rcom::{ModelPoint, ModelSpace, SignedDiscreteMeasure};

use crate::Failure;

/// Points may be off the model surface by this much (relative to the
/// radius) and are projected back; anything larger is rejected.
const SURFACE_SLACK: f64 = 1e-9;

/// A measure (`weights` nonempty) or a point set such as a simplex.
/// Points are ambient coordinates: `n` numbers for `κ = 0`, `n + 1`
/// otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub curvature: f64,
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl MeasureFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
    }

    pub fn space(&self) -> Result<ModelSpace, Failure> {
        ModelSpace::new(self.curvature, self.dimension).map_err(Failure::parse)
    }

    pub fn model_points(&self) -> Result<Vec<ModelPoint>, Failure> {
        let space = self.space()?;
        if self.points.is_empty() {
            return Err(Failure::parse("no points given"));
        }
        self.points.iter().map(|p| to_point(space, p)).collect()
    }

    pub fn measure(&self) -> Result<SignedDiscreteMeasure, Failure> {
        if self.weights.is_empty() {
            return Err(Failure::parse("a measure needs weights"));
        }
        SignedDiscreteMeasure::new(self.model_points()?, self.weights.clone()).map_err(Failure::parse)
    }

    /// The file's centre, or else the support point with the smallest
    /// support radius.
    pub fn center(&self, measure: &SignedDiscreteMeasure) -> Result<ModelPoint, Failure> {
        if let Some(c) = &self.center {
            return to_point(measure.space(), c);
        }
        let mut best: Option<(f64, &ModelPoint)> = None;
        for p in measure.points() {
            let r = measure.support_radius(p).map_err(Failure::parse)?;
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, p));
            }
        }
        Ok(best.expect("measures are nonempty").1.clone())
    }
}

fn to_point(space: ModelSpace, coords: &[f64]) -> Result<ModelPoint, Failure> {
    let v = DVector::from_column_slice(coords);
    if v.len() != space.ambient_dimension() {
        return Err(Failure::parse(format!(
            "point {coords:?} has {} coordinates, expected {}",
            v.len(),
            space.ambient_dimension()
        )));
    }
    let projected = space.project(v.clone()).map_err(Failure::parse)?;
    let scale = if space.is_flat() { 1.0 } else { space.radius() };
    if (projected.coords() - &v).amax() > SURFACE_SLACK * scale {
        return Err(Failure::parse(format!("point {coords:?} is not on the model surface")));
    }
    Ok(projected)
}
