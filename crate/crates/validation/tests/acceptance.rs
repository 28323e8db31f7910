//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use modawgn::analysis::{optimal_map_search, pe_map, pe_oracle, pe_uniform, tau};
use modawgn::decision::{likelihood, thresholds_map, thresholds_uniform};
use modawgn::seed::derive_seed;
use modawgn::{DecisionRule, MapThresholds, SymbolMap, WrappedGaussian};
use modawgn_harness::config::{parse_pi0_spec, Emit};
use modawgn_harness::output::emit_csv;
use modawgn_harness::sweep::simulate;
use modawgn_harness::{summarize, Execution, ExperimentConfig, RuleKind, TrialRecord};

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Uniform in `[0, 1)` from a hashed counter.
fn uniform(stream: u64, i: u64) -> f64 {
    (derive_seed(stream, &[i]) >> 11) as f64 / (1u64 << 53) as f64
}

/// Wrapped normal density by explicit images, independent of the library.
fn density_oracle(x: f64, delta: f64, sigma: f64) -> f64 {
    (-30..=30)
        .map(|k| {
            let z = (x + k as f64 * delta) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        })
        .sum()
}

/// Composite Simpson rule.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn config(pi0: &str, rules: Vec<RuleKind>, n_bits: usize, repeats: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        delta: 5.0,
        sigma: 1.0,
        pi0_list: parse_pi0_spec(pi0).unwrap(),
        n_bits,
        repeats,
        rules,
        master_seed: seed,
        emit: Emit { csv: true, svg: false, analytic: true },
        ..Default::default()
    }
}

/// Pooled BER per `(π0, rule)`, plus total bits.
fn pooled(records: &[TrialRecord], pi0: f64, rule: RuleKind, n_bits: usize) -> (f64, f64) {
    let cell: Vec<&TrialRecord> = records.iter().filter(|r| r.pi0 == pi0 && r.rule == rule).collect();
    let total = (cell.len() * n_bits) as f64;
    let errors: f64 = cell.iter().map(|r| r.ber * n_bits as f64).sum();
    (errors / total, total)
}

fn binomial_sd(p: f64, n: f64) -> f64 {
    (p * (1.0 - p) / n).sqrt()
}

fn c1_density_cross_validation() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for ratio in [0.5, 1.0, 3.0, 5.0, 10.0] {
        let g = WrappedGaussian::new(ratio, 1.0).unwrap();
        for i in 0..10_000 {
            let x = -0.5 * ratio + ratio * i as f64 / 10_000.0;
            let d = (g.density_direct(x) - g.density_fourier(x)).abs();
            if d > worst {
                worst = d;
                at = ratio;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-9 && elapsed < Duration::from_secs(5),
        format!("max |direct - fourier| = {worst:.2e} (at Δ/σ = {at}), {elapsed:.2?}"),
    )
}

fn c2_uniform_prior_error() -> Outcome {
    let start = Instant::now();
    let g = WrappedGaussian::new(5.0, 1.0).unwrap();
    let pe = pe_uniform(&g);
    let oracle = simpson(|y| density_oracle(y, 5.0, 1.0), 1.25, 3.75, 200_000);
    // mpmath, 30 digits: 0.21112271324...
    let frozen = 0.211_122_713_2;
    let cfg = config("0.5", vec![RuleKind::Ml], 100_000, 100, 0xacce_0002);
    let records = simulate(&cfg, Execution::Parallel(0)).unwrap();
    let (ber, bits) = pooled(&records, 0.5, RuleKind::Ml, cfg.n_bits);
    let band = 4.0 * binomial_sd(pe, bits);
    let elapsed = start.elapsed();
    verdict(
        (pe - oracle).abs() <= 1e-6
            && (pe - frozen).abs() <= 1e-6
            && (ber - pe).abs() <= band
            && elapsed < Duration::from_secs(60),
        format!(
            "pe_uniform {pe:.10}, oracle {oracle:.10}, MC {ber:.6} over {bits:.0} bits (±{band:.6}), {elapsed:.2?}"
        ),
    )
}

fn c3_map_error_formula() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_at = (0.0, 0.0);
    let mut boundary_gap: f64 = 0.0;
    for ratio in [1.0, 2.0, 3.0, 5.0, 8.0] {
        let g = WrappedGaussian::new(ratio, 1.0).unwrap();
        let map = SymbolMap::antipodal(ratio).unwrap();
        for i in 1..=99 {
            let pi0 = i as f64 / 100.0;
            let closed = pe_map(&g, pi0).unwrap().pe;
            let oracle = pe_oracle(&g, &map, pi0, &DecisionRule::map(pi0).unwrap()).unwrap();
            if (closed - oracle).abs() > worst {
                worst = (closed - oracle).abs();
                worst_at = (ratio, pi0);
            }
        }
        // Continuity: the inner branch at each boundary against the
        // degenerate branch just outside it.
        let t = tau(&g);
        for (edge, outside) in [(1.0 / (1.0 + t), 1.0 / (1.0 + t) + 1e-13), (t / (1.0 + t), t / (1.0 + t) - 1e-13)] {
            let a = pe_map(&g, edge).unwrap().pe;
            let b = pe_map(&g, outside).unwrap().pe;
            boundary_gap = boundary_gap.max((a - b).abs());
        }
    }
    let g5 = WrappedGaussian::new(5.0, 1.0).unwrap();
    let t5 = tau(&g5);
    let upper = 1.0 / (1.0 + t5);
    verdict(
        worst <= 1e-7 && boundary_gap <= 1e-9 && (t5 - 0.087_874).abs() <= 1e-6 && (upper - 0.9192).abs() < 5e-5,
        format!(
            "max |pe_map - oracle| = {worst:.2e} (Δ/σ = {}, π0 = {}), max boundary jump {boundary_gap:.2e}, τ(5) = {t5:.7}, 1/(1+τ) = {upper:.4}",
            worst_at.0, worst_at.1
        ),
    )
}

fn c4_optimal_constellation() -> Outcome {
    let start = Instant::now();
    let g = WrappedGaussian::new(5.0, 1.0).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for pi0 in [0.5, 0.3] {
        let s = optimal_map_search(&g, pi0, 5.0 / 200.0).unwrap();
        let m = s.power_minimal;
        ok &= s.ridge_confirmed && s.antipodal_is_power_minimal;
        parts.push(format!(
            "π0 = {pi0}: ridge {}, power-minimal ({}, {}) with P = {:.4}{}",
            if s.ridge_confirmed { "confirmed" } else { "NOT confirmed" },
            m.h0(),
            m.h1(),
            s.power_minimal_power,
            if s.antipodal_is_power_minimal { "" } else { " (not ±Δ/4; P(±Δ/4) = 1.5625)" }
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    verdict(ok, format!("{}; {elapsed:.2?}", parts.join("; ")))
}

fn c5_level_sets() -> Outcome {
    let mut worst = 0;
    for (s, ratio) in [0.5, 1.0, 5.0].into_iter().enumerate() {
        let g = WrappedGaussian::new(ratio, 1.0).unwrap();
        let n = 20_000;
        // density − z has the sign of (f − 1/Δ) − (z − 1/Δ); the deviation
        // form keeps the nearly flat Δ/σ = 0.5 density resolvable.
        let vals: Vec<f64> = (0..n).map(|i| g.deviation(-0.5 * ratio + ratio * i as f64 / n as f64)).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for j in 0..1000 {
            // Strictly inside (min, max).
            let u = uniform(0xacce_0005 + s as u64, j).max(f64::EPSILON);
            let z = lo + (hi - lo) * u;
            let changes = vals.windows(2).filter(|w| (w[0] > z) != (w[1] > z)).count();
            if changes > 2 {
                return Err(format!("Δ/σ = {ratio}: {changes} sign changes at level 1/Δ + {z:e}"));
            }
            worst = worst.max(changes);
        }
    }
    Ok(format!("3000 random levels, at most {worst} sign changes"))
}

fn c6_threshold_crossings() -> Outcome {
    let mut worst: f64 = 0.0;
    let ratios = [1.0, 3.0, 5.0, 8.0];
    for i in 0..1000u64 {
        let delta = ratios[(i % 4) as usize];
        let g = WrappedGaussian::new(delta, 1.0).unwrap();
        let h0 = -0.5 * delta + delta * uniform(0xacce_0006, 2 * i);
        let mut h1 = -0.5 * delta + delta * uniform(0xacce_0006, 2 * i + 1);
        if h1 == h0 {
            h1 = -h0;
        }
        let map = SymbolMap::new(h0, h1, delta).unwrap();
        let t = thresholds_uniform(&map).unwrap();
        for c in [t.c1(), t.c2()] {
            let gap = 0.5 * (likelihood(&g, c, h0).unwrap() - likelihood(&g, c, h1).unwrap());
            worst = worst.max(gap.abs());
        }
    }
    let uniform_worst = worst;
    // Prior-weighted crossings on the optimal map, inside the non-degenerate band.
    for i in 0..1000u64 {
        let delta = ratios[1 + (i % 3) as usize];
        let g = WrappedGaussian::new(delta, 1.0).unwrap();
        let map = SymbolMap::antipodal(delta).unwrap();
        let t = tau(&g);
        let pi0 = t / (1.0 + t) + (1.0 - 2.0 * t / (1.0 + t)) * uniform(0xacce_0016, i);
        if let MapThresholds::Regions { thresholds, .. } = thresholds_map(&g, &map, pi0).unwrap() {
            for c in [thresholds.c1(), thresholds.c2()] {
                let gap = pi0 * likelihood(&g, c, map.h0()).unwrap() - (1.0 - pi0) * likelihood(&g, c, map.h1()).unwrap();
                worst = worst.max(gap.abs());
            }
        }
    }
    verdict(
        worst <= 1e-10,
        format!("uniform prior: max gap {uniform_worst:.2e}; with priors: max gap {worst:.2e}; 2000 cases"),
    )
}

fn c7_prior_estimates() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut stds = Vec::new();
    for n in [200, 1000] {
        let cfg = config("0.1:0.5:0.1", vec![RuleKind::Estimated], n, 50, 0xacce_0007);
        let cells = summarize(&simulate(&cfg, Execution::Parallel(0)).unwrap());
        let mut row = Vec::new();
        for c in &cells {
            let (m, s) = (c.mean_pi0_hat.unwrap(), c.std_pi0_hat.unwrap());
            ok &= (m - c.pi0).abs() <= 0.03;
            row.push((c.pi0, m, s));
        }
        stds.push(row);
    }
    for (short, long) in stds[0].iter().zip(&stds[1]) {
        ok &= long.2 < short.2;
        parts.push(format!("π0 {}: mean {:.3}/{:.3}, std {:.4}/{:.4}", short.0, short.1, long.1, short.2, long.2));
    }
    verdict(ok, format!("N = 200/1000: {}", parts.join("; ")))
}

fn c8_rule_ordering() -> Outcome {
    let cfg = config("0.05:0.5:0.05", RuleKind::ALL.to_vec(), 1000, 50, 0xacce_0008);
    let records = simulate(&cfg, Execution::Parallel(0)).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    // Three standard deviations of the difference of two independent pooled rates.
    let within = |a: (f64, f64), b: (f64, f64)| 3.0 * (binomial_sd(a.0, a.1).powi(2) + binomial_sd(b.0, b.1).powi(2)).sqrt();
    for &pi0 in &cfg.pi0_list {
        let map = pooled(&records, pi0, RuleKind::Map, cfg.n_bits);
        let est = pooled(&records, pi0, RuleKind::Estimated, cfg.n_bits);
        let ml = pooled(&records, pi0, RuleKind::Ml, cfg.n_bits);
        if pi0 <= 0.3 + 1e-12 {
            let good = map.0 <= est.0 + within(map, est) && est.0 <= ml.0 + within(est, ml);
            ok &= good;
            if !good {
                notes.push(format!("π0 {pi0}: map {:.4} est {:.4} ml {:.4}", map.0, est.0, ml.0));
            }
        }
        if (pi0 - 0.5).abs() < 1e-12 {
            let same = (map.0 - est.0).abs() <= within(map, est)
                && (map.0 - ml.0).abs() <= within(map, ml)
                && (est.0 - ml.0).abs() <= within(est, ml);
            ok &= same;
            notes.push(format!("π0 0.5: map {:.4} est {:.4} ml {:.4}", map.0, est.0, ml.0));
        }
    }
    let low = |rule| pooled(&records, 0.1, rule, cfg.n_bits).0;
    notes.insert(
        0,
        format!("π0 0.1: map {:.4} est {:.4} ml {:.4}", low(RuleKind::Map), low(RuleKind::Estimated), low(RuleKind::Ml)),
    );
    verdict(ok, notes.join("; "))
}

fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("0.05:0.5:0.05", RuleKind::ALL.to_vec(), 1000, 50, 0xacce_0009);
    let write = |exec: Execution, name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let records = simulate(&cfg, exec).unwrap();
        emit_csv(&records, &[], Path::new(&path)).unwrap();
        std::fs::read(path).unwrap()
    };
    let serial = write(Execution::Serial, "serial.csv");
    let parallel = write(Execution::Parallel(4), "parallel.csv");
    let again = write(Execution::Parallel(2), "again.csv");
    verdict(
        serial == parallel && parallel == again && !serial.is_empty(),
        format!("{} bytes, {} rows; serial, 4 and 2 workers identical: {}", serial.len(), cfg.pi0_list.len() * 3 * 50, serial == parallel && parallel == again),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("wrapped-density cross-validation", c1_density_cross_validation),
        ("uniform-prior error probability", c2_uniform_prior_error),
        ("piecewise MAP error vs oracle", c3_map_error_formula),
        ("optimal constellation by search", c4_optimal_constellation),
        ("density level sets cross at most twice", c5_level_sets),
        ("threshold crossings equalize weighted likelihoods", c6_threshold_crossings),
        ("prior estimate mean and spread", c7_prior_estimates),
        ("decision rule ordering", c8_rule_ordering),
        ("serial and parallel sweeps byte-identical", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("acceptance {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
