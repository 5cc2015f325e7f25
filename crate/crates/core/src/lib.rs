//! Jet-based differential geometry of Euclidean hypersurfaces, Ricci soliton
//! checks along the tangential position field, and product foliation analysis.

pub mod catalog;
pub mod error;
pub mod extrinsic;
pub mod intrinsic;
pub mod jets;
pub mod linalg;
pub mod products;
pub mod sampling;
pub mod soliton;
pub mod suites;
pub mod tolerances;

pub use error::{GeomError, Result};
pub use jets::{ChartPoint, Interval, Jet3, MapSpec, ScalarJet};
pub use tolerances::Tolerances;
