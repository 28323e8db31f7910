//! Analytic reference curves and per-cell statistics over repeats.

use modawgn::analysis::{pe_map, pe_ml};
use modawgn::{SymbolMap, WrappedGaussian};

use crate::config::RuleKind;
use crate::error::Result;
use crate::sweep::TrialRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPoint {
    pub pi0: f64,
    pub delta_over_sigma: f64,
    pub pe_map: f64,
    pub pe_ml: f64,
}

/// Closed-form MAP and ML error at each prior, for the ±Δ/4 constellation.
pub fn analytic_curve(delta: f64, sigma: f64, pi0s: &[f64]) -> Result<Vec<AnalyticPoint>> {
    let g = WrappedGaussian::new(delta, sigma)?;
    let ml = pe_ml(&g, &SymbolMap::antipodal(delta)?)?;
    pi0s.iter()
        .map(|&pi0| {
            Ok(AnalyticPoint { pi0, delta_over_sigma: delta / sigma, pe_map: pe_map(&g, pi0)?.pe, pe_ml: ml })
        })
        .collect()
}

/// Statistics of one `(π0, rule)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub pi0: f64,
    pub rule: RuleKind,
    pub repeats: usize,
    pub mean_ber: f64,
    /// Sample standard deviation over repeats (0 for a single repeat).
    pub std_ber: f64,
    pub mean_pi0_hat: Option<f64>,
    pub std_pi0_hat: Option<f64>,
}

impl CellSummary {
    /// Pooled BER equals the mean over repeats when every trial has the same N.
    pub fn pooled_ber(&self) -> f64 {
        self.mean_ber
    }
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups sorted records by `(π0, rule)`.
pub fn summarize(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let key = (records[start].pi0, records[start].rule);
        let end = records[start..].iter().position(|r| (r.pi0, r.rule) != key).map_or(records.len(), |k| start + k);
        let cell = &records[start..end];
        let bers: Vec<f64> = cell.iter().map(|r| r.ber).collect();
        let hats: Vec<f64> = cell.iter().filter_map(|r| r.pi0_hat).collect();
        let (mean_ber, std_ber) = mean_std(&bers);
        let (mean_pi0_hat, std_pi0_hat) = if hats.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_std(&hats);
            (Some(m), Some(s))
        };
        out.push(CellSummary { pi0: key.0, rule: key.1, repeats: cell.len(), mean_ber, std_ber, mean_pi0_hat, std_pi0_hat });
        start = end;
    }
    out
}
