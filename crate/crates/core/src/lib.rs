//! Finite-N Dyson Brownian motion and its hydrodynamic limit.
//!
//! The particle side lives in [`particle`]. The limit side is computed from
//! the Green's function functional equation ([`spectral`]), the characteristic
//! map ([`characteristics`]) and Hilbert-transform checks of the continuity
//! equation ([`hilbert`]). [`verify`] bundles the numerical checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod characteristics;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod measure;
pub mod particle;
pub mod profile;
pub mod quad;
pub mod roots;
pub mod spectral;
pub mod verify;

pub use characteristics::{CharacteristicCurve, Interval, SupportSet};
pub use error::{Error, Result};
pub use hilbert::{PdeResidual, SampledFunction, UniformGrid};
pub use measure::{Atom, AtomicMeasure};
pub use particle::{EmpiricalDensity, HistogramGrid, ParticleState, SimParams};
pub use profile::AnalyticProfile;
pub use spectral::{ComplexPoint, GreenEval, GreenFunction, HalfPlane};
