//! Crossed cube `CQ_n`: construction, component structure of vertex-deleted
//! cubes, exact extra connectivity for small `n`, explicit extremal
//! constructions, and PMC / MM* diagnosability.

pub mod combin;
pub mod diagnosis;
pub mod error;
pub mod extremal;
pub mod structure;
pub mod sweep;
pub mod topology;
pub mod vertex_set;

pub use diagnosis::{DiagnosisModel, FaultPair, Syndrome, Test};
pub use error::{Error, Refusal, Result};
pub use structure::{ComponentProfile, ComponentShape};
pub use topology::{Construction, CrossedCube, Dimension, Vertex};
pub use vertex_set::VertexSet;
