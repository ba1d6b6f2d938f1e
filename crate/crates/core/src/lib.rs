//! Riemannian centres of mass of signed discrete measures on constant-curvature
//! model spaces, with explicit existence/uniqueness certificates and
//! barycentric coordinate charts built on top of them.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod chart;
pub mod energy;
pub mod error;
pub mod measure;
pub mod model_space;
pub mod sampling;
pub mod simplex;
pub mod verification;

pub use certificate::Certificate;
pub use chart::{karcher_mean, BarycentricChart, ChartBuilder, SolverOptions};
pub use energy::CurvatureBounds;
pub use error::{Error, Result};
pub use measure::{JordanMasses, SignedDiscreteMeasure};
pub use model_space::{ModelPoint, ModelSpace, TangentFrame, TangentVector};
pub use simplex::{EdgeLengthMatrix, EuclideanSimplex};
