//! Tightness radii of Reeb orbits in three-dimensional contact
//! sub-Riemannian structures.
//!
//! The pipeline traces contact Jacobi curves along the geodesic flow from a
//! Reeb orbit, locates first singular and focal radii, and evaluates the
//! Schwarzian and canonical-curvature comparison estimates.

pub mod curvature;
pub mod error;
pub mod ode;
pub mod expr;
pub mod flow;
pub mod jacobi;
pub mod linalg;
pub mod report;
pub mod roots;
pub mod riem_compare;
pub mod scalar;
pub mod structures;
pub mod sturm;
pub mod tightness;

pub use error::{Error, Result};
