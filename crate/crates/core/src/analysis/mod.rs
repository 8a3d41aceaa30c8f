//! Wavelet leaders, pointwise exponents, spectrum estimators and the
//! predicted spectra of traces.

mod leaders;
mod spectrum;

pub use leaders::{leaders, pointwise_exponent, LeaderField};
pub use spectrum::{
    default_window, histogram_spectrum, leader_spectrum, predicted_curves, shift_value, PredictedCurve, Shift,
    SpectrumEstimate, SpectrumMethod, MIN_LEADERS_PER_LEVEL,
};
