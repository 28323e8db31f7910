//! Prior estimation from blind ML decisions, and the two-step decoder.
//!
//! Each ML decision is Bernoulli with `P(δ = 1) = π0·Pe + (1 − π0)(1 − Pe)`
//! where `Pe` is the ML error probability, so the fraction of ones in a block
//! inverts to a method-of-moments estimate of π0.

use crate::analysis::class_errors;
use crate::channel::SymbolMap;
use crate::decision::{decide_sequence, DecisionRule};
use crate::error::{Error, Result};
use crate::wrapped_gauss::WrappedGaussian;
use crate::Bit;

/// `pe_ml` values within this distance of 1/2 make the inversion singular.
pub const ILL_CONDITIONED_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorEstimate {
    /// Estimate clamped to `[0, 1]`.
    pub pi0_hat: f64,
    /// Estimate before clamping; may fall outside `[0, 1]` on short blocks.
    pub raw: f64,
    pub n_used: usize,
    pub pe_ml_assumed: f64,
}

fn fraction_of_ones(decisions: &[Bit]) -> f64 {
    decisions.iter().filter(|&&b| b != 0).count() as f64 / decisions.len() as f64
}

/// `π̂0 = (mean(δ) − (1 − Pe)) / (2·Pe − 1)`, clamped to `[0, 1]`.
pub fn estimate_prior(decisions: &[Bit], pe_ml: f64) -> Result<PriorEstimate> {
    if decisions.is_empty() {
        return Err(Error::EmptyInput);
    }
    if pe_ml.is_nan() || pe_ml < 0.0 {
        return Err(Error::InvalidParameter { name: "pe_ml", reason: format!("must be ≥ 0, got {pe_ml}") });
    }
    if pe_ml >= 0.5 - ILL_CONDITIONED_MARGIN {
        return Err(Error::IllConditioned { pe: pe_ml });
    }
    let mean = fraction_of_ones(decisions);
    let raw = (mean - (1.0 - pe_ml)) / (2.0 * pe_ml - 1.0);
    Ok(PriorEstimate { pi0_hat: raw.clamp(0.0, 1.0), raw, n_used: decisions.len(), pe_ml_assumed: pe_ml })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepOutcome {
    pub decisions: Vec<Bit>,
    pub estimate: PriorEstimate,
    /// Set when `pe_ml` was too close to 1/2 and the ML decisions were
    /// returned unchanged with `π̂0 = 1/2`.
    pub degraded: bool,
    /// Number of estimate-then-decode passes actually run.
    pub iterations: usize,
}

/// ML pass, prior estimate, then MAP with the estimate over the same samples.
pub fn two_step_decode(
    g: &WrappedGaussian,
    map: &SymbolMap,
    y_tilde: &[f64],
    pe_ml: f64,
) -> Result<TwoStepOutcome> {
    two_step_decode_with(g, map, y_tilde, pe_ml, 1)
}

/// Like [`two_step_decode`], with `iterations − 1` additional refinement
/// passes. Each extra pass re-inverts the fraction of ones using the
/// class-conditional error rates of the MAP rule just applied, which needs a
/// constellation with `|h1 − h0| = Δ/2`. Refinement stops early if that
/// inversion becomes singular (an always-one or always-zero rule).
pub fn two_step_decode_with(
    g: &WrappedGaussian,
    map: &SymbolMap,
    y_tilde: &[f64],
    pe_ml: f64,
    iterations: usize,
) -> Result<TwoStepOutcome> {
    if y_tilde.is_empty() {
        return Err(Error::EmptyInput);
    }
    if iterations == 0 {
        return Err(Error::InvalidParameter { name: "iterations", reason: "must be ≥ 1".into() });
    }
    let blind = decide_sequence(&DecisionRule::Ml, g, map, y_tilde)?;
    let mut estimate = match estimate_prior(&blind, pe_ml) {
        Ok(e) => e,
        Err(Error::IllConditioned { .. }) => {
            let estimate = PriorEstimate { pi0_hat: 0.5, raw: 0.5, n_used: blind.len(), pe_ml_assumed: pe_ml };
            return Ok(TwoStepOutcome { decisions: blind, estimate, degraded: true, iterations: 0 });
        }
        Err(e) => return Err(e),
    };
    let mut decisions = decide_sequence(&DecisionRule::estimated(estimate.pi0_hat)?, g, map, y_tilde)?;
    let mut done = 1;
    while done < iterations {
        let (miss_zero, miss_one) = class_errors(g, map, estimate.pi0_hat)?;
        let denom = miss_zero + miss_one - 1.0;
        if denom.abs() < ILL_CONDITIONED_MARGIN {
            break;
        }
        let raw = (fraction_of_ones(&decisions) - (1.0 - miss_one)) / denom;
        estimate = PriorEstimate { pi0_hat: raw.clamp(0.0, 1.0), raw, ..estimate };
        decisions = decide_sequence(&DecisionRule::estimated(estimate.pi0_hat)?, g, map, y_tilde)?;
        done += 1;
    }
    Ok(TwoStepOutcome { decisions, estimate, degraded: false, iterations: done })
}
