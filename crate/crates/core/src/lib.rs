//! Uncoded binary signaling over the scalar modulo-Δ AWGN channel.
//!
//! The received sample is `ỹ = (x + w) mod Δ`, reduced into `[-Δ/2, Δ/2)`,
//! with `w ~ N(0, σ²)` and `x ∈ {h0, h1}`. The crate provides:
//!
//! - [`wrapped_gauss`]: the Δ-wrapped Gaussian density (direct image sum and
//!   Fourier series), band probabilities and the standard normal tail.
//! - [`channel`]: bit generation, symbol mapping, noise injection and the
//!   modulo reduction.
//! - [`decision`]: MAP, ML and estimated-prior decision rules together with
//!   their decision thresholds.
//! - [`analysis`]: closed-form error probabilities, an independent
//!   numerical-integration oracle and a grid search over constellations.
//! - [`estimator`]: empirical prior estimation from blind ML decisions and
//!   the two-step decoder built on it.

pub mod analysis;
pub mod channel;
pub mod decision;
mod error;
pub mod estimator;
pub mod quad;
pub mod seed;
pub mod wrapped_gauss;

pub use analysis::{MapSearch, PeReport, Regime};
pub use channel::{BitSource, ChannelParams, SymbolMap};
pub use decision::{DecisionRule, DecisionThresholds, Interval, MapThresholds};
pub use error::{Error, Result};
pub use estimator::{PriorEstimate, TwoStepOutcome};
pub use wrapped_gauss::{q_tail, WrappedGaussian};

/// A decoded or transmitted bit, always `0` or `1`.
pub type Bit = u8;
