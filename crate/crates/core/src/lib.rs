//! Isometries between open subgroups of invertible groups in
//! finite-dimensional unital Banach algebras.
//!
//! The crate validates algebras given by structure constants, computes
//! spectra, radicals and numerical ranges from the norm, and extends a
//! group isometry `T` to a real-linear isometry `a -> T~0(a) + u0` with
//! every step measured as a residual.

pub mod algebra;
pub mod catalog;
pub mod classify;
pub mod isometry;
pub mod linalg;
pub mod numrange;
pub mod radical;
pub mod sampling;
pub mod scenario;
pub mod spectral;

pub use algebra::{validate_algebra, Algebra, AlgebraError, AlgebraSpec, Element, NormRule, Tolerances};
pub use classify::{ClassificationResult, ClassifyError, Form, MultVerdict, MultiplicativityReport};
pub use isometry::{EngineConfig, EngineError, ExtensionReport, ExtensionVerdict, LinearCandidate, PartialIsometry};
pub use linalg::{CMatrix, C64};
pub use spectral::SpectralError;
