//! Seeded Monte Carlo trials and sweeps.

use std::fs::OpenOptions;
use std::path::Path;

use modawgn::analysis::pe_ml;
use modawgn::channel::{generate_bits, map_bits, transmit};
use modawgn::decision::decide_sequence;
use modawgn::estimator::two_step_decode_with;
use modawgn::seed::derive_seed;
use modawgn::{BitSource, ChannelParams, DecisionRule, SymbolMap, WrappedGaussian};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, RuleKind};
use crate::error::{io_err, HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub pi0: f64,
    pub rule: RuleKind,
    pub trial_index: usize,
    pub ber: f64,
    /// Only the estimated rule produces a prior estimate.
    pub pi0_hat: Option<f64>,
    pub seed_used: u64,
}

/// How a sweep schedules its trials. Output is identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Rayon pool with this many workers; `0` uses the global pool.
    Parallel(usize),
}

/// Seed of one trial. Keyed on the π0 value itself rather than its list
/// position, so any sub-sweep redraws exactly the streams of the full one.
pub fn trial_seed(master: u64, pi0: f64, rule: RuleKind, trial_index: usize) -> u64 {
    derive_seed(master, &[pi0.to_bits(), rule.index(), trial_index as u64])
}

/// One trial: bits, ±Δ/4 mapping, channel, decoding, bit error fraction.
pub fn run_trial(cfg: &ExperimentConfig, pi0: f64, rule: RuleKind, trial_index: usize) -> Result<TrialRecord> {
    let g = WrappedGaussian::new(cfg.delta, cfg.sigma)?;
    let map = SymbolMap::antipodal(cfg.delta)?;
    let seed_used = trial_seed(cfg.master_seed, pi0, rule, trial_index);
    let bits = generate_bits(&BitSource::new(pi0, derive_seed(seed_used, &[0]))?, cfg.n_bits)?;
    let received = transmit(&map_bits(&bits, &map)?, &ChannelParams::new(cfg.delta, cfg.sigma, derive_seed(seed_used, &[1]))?)?;
    let (decisions, pi0_hat) = match rule {
        RuleKind::Map => (decide_sequence(&DecisionRule::map(pi0)?, &g, &map, &received)?, None),
        RuleKind::Ml => (decide_sequence(&DecisionRule::Ml, &g, &map, &received)?, None),
        RuleKind::Estimated => {
            let pe = pe_ml(&g, &map)?;
            let out = two_step_decode_with(&g, &map, &received, pe, cfg.estimator_iterations)?;
            (out.decisions, Some(out.estimate.pi0_hat))
        }
    };
    let errors = decisions.iter().zip(&bits).filter(|(d, b)| d != b).count();
    Ok(TrialRecord { pi0, rule, trial_index, ber: errors as f64 / bits.len() as f64, pi0_hat, seed_used })
}

/// Fails early if `path` cannot be created or written.
pub fn check_writable(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let existed = path.exists();
    OpenOptions::new().write(true).create(true).truncate(false).open(path).map_err(io_err(path))?;
    if !existed {
        std::fs::remove_file(path).map_err(io_err(path))?;
    }
    Ok(())
}

/// Every `(π0, rule, trial)` of the config, sorted by that key.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_sweep_with(cfg, Execution::Parallel(0))
}

pub fn run_sweep_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    if cfg.emit.csv || cfg.emit.svg || cfg.emit.analytic {
        check_writable(&cfg.output_path)?;
    }
    simulate(cfg, exec)
}

/// The trial loop without any output-path checks.
pub fn simulate(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let jobs: Vec<(f64, RuleKind, usize)> = cfg
        .pi0_list
        .iter()
        .flat_map(|&p| cfg.rules.iter().flat_map(move |&r| (0..cfg.repeats).map(move |t| (p, r, t))))
        .collect();
    let mut records: Vec<TrialRecord> = match exec {
        Execution::Serial => jobs.iter().map(|&(p, r, t)| run_trial(cfg, p, r, t)).collect::<Result<_>>()?,
        Execution::Parallel(0) => jobs.par_iter().map(|&(p, r, t)| run_trial(cfg, p, r, t)).collect::<Result<_>>()?,
        Execution::Parallel(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?
            .install(|| jobs.par_iter().map(|&(p, r, t)| run_trial(cfg, p, r, t)).collect::<Result<_>>())?,
    };
    records.sort_by(|a, b| {
        a.pi0.total_cmp(&b.pi0).then(a.rule.cmp(&b.rule)).then(a.trial_index.cmp(&b.trial_index))
    });
    Ok(records)
}
