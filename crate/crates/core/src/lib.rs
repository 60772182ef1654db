//! Exact mesh booleans.
//!
//! The pipeline resolves all intersections of the input triangle soup into
//! a conforming arrangement whose new vertices are kept as implicit points,
//! splits it into patches bounded by intersection curves, classifies each
//! patch against every input solid by exact ray casting and finally keeps
//! the patches selected by the operator.

pub mod arrangement;
pub mod booleans;
pub mod classification;
mod error;
pub mod io;
pub mod kernel;
pub mod labels;
pub mod mesh;
pub mod report;
pub mod shapes;
pub mod spatial;
pub mod topology;

pub use error::Error;
pub use labels::LabelSet;
pub use mesh::{Mesh, RigidTransform};
pub use booleans::{boolean, BooleanOp, BooleanOptions, BooleanResult};
pub use report::RunReport;
