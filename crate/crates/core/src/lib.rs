//! Inhomogeneous Besov objects and their traces, at desk scale.
//!
//! Capacities (cascades, Gibbs measures, products), Daubechies wavelet
//! tables, saturating coefficient fields, hyperplane traces and
//! wavelet-leader estimators of pointwise exponents and spectra.

// NaN must fail the checks, which `!(x >= lo)` does and `x < lo` does not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod capacity;
pub mod dyadic;
pub mod error;
pub mod numeric;
pub mod synthesis;
pub mod trace;
pub mod wavelet;

pub use analysis::{LeaderField, SpectrumEstimate};
pub use capacity::{CapacityModel, CapacitySpec, ScalingTable};
pub use dyadic::DyadicCube;
pub use error::{Error, Result};
pub use synthesis::{CoefficientField, CoefficientSource, SaturatingField};
pub use trace::{TraceResult, TraceRoute};
pub use wavelet::{OffsetSchedule, WaveletSpec};
