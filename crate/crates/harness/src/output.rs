//! CSV and metadata files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{sibling, ExperimentConfig};
use crate::error::{io_err, HarnessError, Result};
use crate::summary::{summarize, AnalyticPoint};
use crate::sweep::TrialRecord;

pub const RECORD_HEADER: [&str; 6] = ["pi0", "rule", "trial", "ber", "pi0_hat", "seed"];
pub const ANALYTIC_HEADER: [&str; 4] = ["pi0", "delta_over_sigma", "pe_map", "pe_ml"];
pub const SUMMARY_HEADER: [&str; 8] =
    ["pi0", "rule", "repeats", "mean_ber", "std_ber", "pooled_ber", "mean_pi0_hat", "std_pi0_hat"];

/// Shortest `%.12g`-style rendering: 12 significant digits, trailing zeros
/// dropped, exponent form outside `[1e-4, 1e12)`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file)))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let csv_err = |source| HarnessError::Csv { path: path.to_path_buf(), source };
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes the trial records to `path` and, when `analytic` is nonempty, the
/// curves to `<stem>_analytic.csv`. Returns the files written.
pub fn emit_csv(records: &[TrialRecord], analytic: &[AnalyticPoint], path: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    write_rows(
        path,
        &RECORD_HEADER,
        records.iter().map(|r| {
            [
                fmt_sig(r.pi0),
                r.rule.label().to_string(),
                r.trial_index.to_string(),
                fmt_sig(r.ber),
                r.pi0_hat.map(fmt_sig).unwrap_or_default(),
                r.seed_used.to_string(),
            ]
        }),
    )?;
    let mut written = vec![path.to_path_buf()];
    if !analytic.is_empty() {
        let apath = sibling(path, "_analytic", "csv");
        emit_analytic_csv(analytic, &apath)?;
        written.push(apath);
    }
    Ok(written)
}

pub fn emit_analytic_csv(analytic: &[AnalyticPoint], path: &Path) -> Result<()> {
    write_rows(
        path,
        &ANALYTIC_HEADER,
        analytic.iter().map(|a| [fmt_sig(a.pi0), fmt_sig(a.delta_over_sigma), fmt_sig(a.pe_map), fmt_sig(a.pe_ml)]),
    )
}

/// Per-cell mean and standard deviation of BER and `π̂0`.
pub fn emit_summary_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
    write_rows(
        path,
        &SUMMARY_HEADER,
        summarize(records).into_iter().map(|c| {
            [
                fmt_sig(c.pi0),
                c.rule.label().to_string(),
                c.repeats.to_string(),
                fmt_sig(c.mean_ber),
                fmt_sig(c.std_ber),
                fmt_sig(c.pooled_ber()),
                opt(c.mean_pi0_hat),
                opt(c.std_pi0_hat),
            ]
        }),
    )
}

/// `key=value` run description, including the Gaussian sampler in use.
pub fn emit_metadata(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let pi0s: Vec<String> = cfg.pi0_list.iter().map(|&p| fmt_sig(p)).collect();
    let rules: Vec<&str> = cfg.rules.iter().map(|r| r.label()).collect();
    let lines = [
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("delta", fmt_sig(cfg.delta)),
        ("sigma", fmt_sig(cfg.sigma)),
        ("pi0", pi0s.join(",")),
        ("n_bits", cfg.n_bits.to_string()),
        ("repeats", cfg.repeats.to_string()),
        ("rules", rules.join(",")),
        ("seed", cfg.master_seed.to_string()),
        ("estimator_iterations", cfg.estimator_iterations.to_string()),
        ("constellation", format!("{},{}", fmt_sig(-0.25 * cfg.delta), fmt_sig(0.25 * cfg.delta))),
        ("gaussian_sampler", modawgn::channel::GAUSSIAN_SAMPLER.to_string()),
        ("seed_derivation", "splitmix64 hash of (seed, pi0 bits, rule index, trial)".to_string()),
    ];
    for (k, v) in lines {
        writeln!(w, "{k}={v}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
