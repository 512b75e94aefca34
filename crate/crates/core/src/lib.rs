//! Simulation of three Gauss-sum factoring schemes driven by chirped laser
//! pulses, and readout of the factors of an encoded integer from the
//! resulting fluorescence traces.
//!
//! * [`tpt`]: chirped two-photon transition through an equidistant ladder.
//! * [`floquet`]: chirped one-photon transition into a sinusoidally
//!   modulated excited state (Floquet sidebands).
//! * [`pulsetrain`]: linearly swept two-level system driven by a train of
//!   delta pulses.
//!
//! The closed-form amplitudes are cross-checked by the numerical routines in
//! [`oracle`]. [`analysis`] turns sampled traces into factor reports.

// NaN-rejecting guards are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod analysis;
mod error;
pub mod floquet;
pub mod gauss_core;
pub mod oracle;
pub mod pulse;
pub mod pulsetrain;
pub mod specfun;
pub mod tpt;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analysis::{FactorReport, Scheme, SignalModel, SignalTrace};
pub use floquet::FloquetSystem;
pub use pulse::ChirpedPulse;
pub use pulsetrain::PulseTrainSystem;
pub use tpt::TptSystem;
