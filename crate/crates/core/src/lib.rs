//! Finite-dimensional hyperkähler quotients and the hyperholomorphic line bundle.
//!
//! Everything numerical is generic over [`scalar::Real`]; the aliases below fix `f64`.

pub mod action;
pub mod error;
pub mod hk;
pub mod linalg;
pub mod nahm;
pub mod prequant;
pub mod quiver;
pub mod reduction;
pub mod scalar;
pub mod twistor;

pub use action::HkAction;
pub use error::{Error, Result};
pub use hk::Structure;
pub use prequant::{LatticeCoord, Which};
pub use quiver::{FramedDims, Quiver};
pub use twistor::StereographicMap;

pub type Complex = scalar::Cx<f64>;
pub type HkSpace = hk::HkSpace<f64>;
pub type TwoForm = hk::TwoForm<f64>;
pub type SphereDirection = hk::SphereDirection<f64>;
pub type CotangentModel = hk::CotangentModel<f64>;
pub type StabilityParams = quiver::StabilityParams<f64>;
pub type QuiverProblem = quiver::QuiverProblem<f64>;
pub type RepPoint = quiver::RepPoint<f64>;
pub type FlatS1Problem = reduction::FlatS1Problem<f64>;
pub type LevelSetPoint = reduction::LevelSetPoint<f64>;
pub type ReducedChart<'a, P> = reduction::ReducedChart<'a, f64, P>;
pub type SuAlgebra = nahm::SuAlgebra<f64>;
pub type NahmConfig = nahm::NahmConfig<f64>;
pub type NahmPath = nahm::NahmPath<f64>;
pub type GaugePathElement = nahm::GaugePathElement<f64>;
pub type Laurent = twistor::Laurent<f64>;
