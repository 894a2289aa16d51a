pub mod cfs;
pub mod dirac_box;
pub mod gauge_fix;
pub mod krein;
pub mod linalg;
pub mod manifold;
pub mod perturbation;
pub mod random;
pub mod spectral;
pub mod tolerances;

pub use krein::{KreinError, KreinSpace, Polar, SqrtMethod, SqrtPair};
pub use linalg::CMat;
pub use tolerances::Tolerances;
pub use cfs::{CfsError, CorrelationOperator, SpinSpaceData};
pub use manifold::{ChartCoordinates, ChartFrame, ManifoldError};
pub use gauge_fix::{GaugeError, GaugeMap, WaveChartPoint};
pub use dirac_box::{BoxError, DiracBox, DiracBoxConfig, MomentumMode, SpacetimePoint};
pub use spectral::{SpectralError, VectorKernel};
pub use perturbation::{GaugeFunction, PerturbationError};
