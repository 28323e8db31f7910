//! Monte Carlo experiments for binary signaling over the modulo-AWGN channel.
//!
//! A sweep runs every `(π0, rule, trial)` combination of an
//! [`ExperimentConfig`] with its own derived seed, then writes CSV tables,
//! analytic reference curves and SVG charts.

pub mod config;
mod error;
pub mod figures;
pub mod output;
pub mod selfcheck;
pub mod summary;
pub mod svg;
pub mod sweep;

pub use config::{Emit, ExperimentConfig, RuleKind};
pub use error::{HarnessError, Result};
pub use output::{emit_csv, emit_summary_csv};
pub use summary::{analytic_curve, summarize, AnalyticPoint, CellSummary};
pub use svg::emit_svg;
pub use sweep::{run_sweep, run_sweep_with, run_trial, Execution, TrialRecord};

use std::path::PathBuf;

/// Runs a sweep and writes whatever `cfg.emit` asks for. Returns the files
/// written.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<PathBuf>> {
    let records = run_sweep_with(cfg, exec)?;
    let analytic = if cfg.emit.analytic { analytic_curve(cfg.delta, cfg.sigma, &cfg.pi0_list)? } else { Vec::new() };
    let mut written = Vec::new();
    if cfg.emit.csv {
        written.extend(emit_csv(&records, &analytic, &cfg.output_path)?);
        let p = cfg.sibling("_summary", "csv");
        emit_summary_csv(&records, &p)?;
        written.push(p);
    } else if cfg.emit.analytic {
        let p = cfg.sibling("_analytic", "csv");
        output::emit_analytic_csv(&analytic, &p)?;
        written.push(p);
    }
    if cfg.emit.svg {
        let p = cfg.sibling("", "svg");
        emit_svg(&records, &analytic, &p)?;
        written.push(p);
    }
    let p = cfg.sibling("_meta", "txt");
    output::emit_metadata(cfg, &p)?;
    written.push(p);
    Ok(written)
}
