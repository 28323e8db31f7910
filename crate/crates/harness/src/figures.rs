//! Preset figures: MAP error curves, prior estimates and the rule comparison.
//!
//! The π0 grids and Δ/σ sets are readable presets, not values read off the
//! original plots.

use std::path::{Path, PathBuf};

use crate::config::{parse_pi0_spec, Emit, ExperimentConfig, RuleKind};
use crate::error::{io_err, Result};
use crate::output::{emit_analytic_csv, emit_csv, emit_summary_csv};
use crate::summary::{analytic_curve, summarize, AnalyticPoint};
use crate::svg::{color, sweep_chart, write_chart, Chart, Series};
use crate::sweep::{simulate, Execution, TrialRecord};

pub const FIG2_RATIOS: [f64; 5] = [1.0, 2.0, 3.0, 5.0, 8.0];

/// Analytic MAP error against π0 ∈ [0, 1/2] for several Δ/σ (σ = 1).
pub fn map_error_curves(ratios: &[f64]) -> Result<(Chart, Vec<AnalyticPoint>)> {
    let pi0s = parse_pi0_spec("0:0.5:0.005")?;
    let mut series = Vec::new();
    let mut all = Vec::new();
    for (i, &r) in ratios.iter().enumerate() {
        let curve = analytic_curve(r, 1.0, &pi0s)?;
        series.push(Series::line(
            format!("Δ/σ = {}", crate::output::fmt_sig(r)),
            color(i),
            curve.iter().map(|a| (a.pi0, a.pe_map)).collect(),
        ));
        all.extend(curve);
    }
    let chart = Chart {
        title: "MAP error probability".into(),
        x_label: "π0".into(),
        y_label: "probability of error".into(),
        series,
    };
    Ok((chart, all))
}

/// Sweep records for one block length.
pub type PriorRun = (usize, Vec<TrialRecord>);

/// Estimated prior against the true one, ±1 std over repeats, per block length.
pub fn prior_estimate_chart(base: &ExperimentConfig, lengths: &[usize], exec: Execution) -> Result<(Chart, Vec<PriorRun>)> {
    let mut series = vec![Series::line("true π0", "#555555", base.pi0_list.iter().map(|&p| (p, p)).collect())];
    series[0].dashed = true;
    let mut runs = Vec::new();
    for (i, &n) in lengths.iter().enumerate() {
        let cfg = ExperimentConfig { n_bits: n, rules: vec![RuleKind::Estimated], ..base.clone() };
        let records = simulate(&cfg, exec)?;
        let cells = summarize(&records);
        let pts: Vec<(f64, f64, f64)> = cells
            .iter()
            .map(|c| {
                let (m, s) = (c.mean_pi0_hat.unwrap_or(f64::NAN), c.std_pi0_hat.unwrap_or(0.0));
                (c.pi0, m, s)
            })
            .collect();
        series.push(Series {
            label: format!("N = {n}"),
            color: color(i).into(),
            points: pts.iter().map(|&(p, m, _)| (p, m)).collect(),
            band: pts.iter().map(|&(p, m, s)| (p, m - s, m + s)).collect(),
            dashed: false,
            markers: true,
        });
        runs.push((n, records));
    }
    let chart = Chart {
        title: format!("Estimated prior, Δ/σ = {}", crate::output::fmt_sig(base.delta / base.sigma)),
        x_label: "π0".into(),
        y_label: "estimated π0".into(),
        series,
    };
    Ok((chart, runs))
}

/// Writes all three preset figures with their data files into `dir`.
pub fn write_figures(dir: &Path, master_seed: u64, repeats: usize, exec: Execution) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let (chart, curves) = map_error_curves(&FIG2_RATIOS)?;
    let p = dir.join("map_error.svg");
    write_chart(&chart, &p)?;
    written.push(p);
    let p = dir.join("map_error_analytic.csv");
    emit_analytic_csv(&curves, &p)?;
    written.push(p);

    let base = ExperimentConfig {
        delta: 5.0,
        sigma: 1.0,
        pi0_list: parse_pi0_spec("0.1:0.5:0.1")?,
        repeats,
        master_seed,
        emit: Emit { csv: true, svg: true, analytic: false },
        ..Default::default()
    };
    let (chart, runs) = prior_estimate_chart(&base, &[200, 1000], exec)?;
    let p = dir.join("prior_estimate.svg");
    write_chart(&chart, &p)?;
    written.push(p);
    for (n, records) in &runs {
        let p = dir.join(format!("prior_estimate_n{n}_summary.csv"));
        emit_summary_csv(records, &p)?;
        written.push(p);
    }

    let cfg = ExperimentConfig {
        pi0_list: parse_pi0_spec("0.05:0.5:0.05")?,
        n_bits: 1000,
        rules: RuleKind::ALL.to_vec(),
        output_path: dir.join("rules.csv"),
        ..base
    };
    let records = simulate(&cfg, exec)?;
    let analytic = analytic_curve(cfg.delta, cfg.sigma, &cfg.pi0_list)?;
    written.extend(emit_csv(&records, &analytic, &cfg.output_path)?);
    let p = dir.join("rules_summary.csv");
    emit_summary_csv(&records, &p)?;
    written.push(p);
    let p = dir.join("rules.svg");
    write_chart(&sweep_chart(&records, &analytic, "Error rate by decision rule, Δ/σ = 5")?, &p)?;
    written.push(p);
    Ok(written)
}
