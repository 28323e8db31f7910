//! Fast invariant suite behind the `self-check` subcommand.

use modawgn::analysis::{pe_map, pe_oracle, pe_uniform};
use modawgn::channel::mod_reduce;
use modawgn::decision::{likelihood, thresholds_uniform};
use modawgn::estimator::estimate_prior;
use modawgn::quad::integrate;
use modawgn::{DecisionRule, SymbolMap, WrappedGaussian};

use crate::config::ExperimentConfig;
use crate::sweep::{simulate, Execution};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn model<T>(r: modawgn::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn density_paths() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for ratio in [0.5, 1.0, 3.0, 5.0, 10.0] {
        let g = model(WrappedGaussian::new(ratio, 1.0))?;
        for i in 0..10_000 {
            let x = -0.5 * ratio + ratio * i as f64 / 10_000.0;
            worst = worst.max((g.density_direct(x) - g.density_fourier(x)).abs());
        }
    }
    ensure(worst <= 1e-9, format!("max |direct − fourier| = {worst:.3e}"))
}

fn uniform_error() -> Result<String, String> {
    let g = model(WrappedGaussian::new(5.0, 1.0))?;
    let quad = integrate(|y| g.density_direct(y), 1.25, 3.75, 1e-13).value;
    let pe = pe_uniform(&g);
    ensure((pe - quad).abs() <= 1e-9, format!("pe_uniform {pe:.10} vs quadrature {quad:.10}"))
}

fn map_error_vs_oracle() -> Result<String, String> {
    let g = model(WrappedGaussian::new(5.0, 1.0))?;
    let map = model(SymbolMap::antipodal(5.0))?;
    let mut worst: f64 = 0.0;
    for pi0 in [0.1, 0.3, 0.45, 0.6, 0.8, 0.97] {
        let closed = model(pe_map(&g, pi0))?.pe;
        let oracle = model(pe_oracle(&g, &map, pi0, &model(DecisionRule::map(pi0))?))?;
        worst = worst.max((closed - oracle).abs());
    }
    ensure(worst <= 1e-7, format!("max |pe_map − oracle| = {worst:.3e}"))
}

fn symmetry_and_dominance() -> Result<String, String> {
    let g = model(WrappedGaussian::new(3.0, 1.0))?;
    let uni = pe_uniform(&g);
    for i in 1..100 {
        let p = i as f64 / 100.0;
        let (a, b) = (model(pe_map(&g, p))?.pe, model(pe_map(&g, 1.0 - p))?.pe);
        if (a - b).abs() > 1e-10 {
            return Err(format!("pe_map({p}) = {a} but pe_map({}) = {b}", 1.0 - p));
        }
        if a > uni + 1e-12 {
            return Err(format!("pe_map({p}) = {a} exceeds pe_uniform {uni}"));
        }
    }
    Ok("99 priors at Δ/σ = 3".into())
}

fn uniform_thresholds() -> Result<String, String> {
    let g = model(WrappedGaussian::new(5.0, 1.0))?;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let h0 = -2.5 + 0.0937 * i as f64;
        let h1 = model(mod_reduce(h0 + 0.7 + 0.061 * i as f64, 5.0))?;
        let map = model(SymbolMap::new(h0, h1, 5.0))?;
        let t = model(thresholds_uniform(&map))?;
        for c in [t.c1(), t.c2()] {
            let diff = model(likelihood(&g, c, h0))? - model(likelihood(&g, c, h1))?;
            worst = worst.max(diff.abs());
        }
    }
    ensure(worst <= 1e-10, format!("max likelihood gap at thresholds = {worst:.3e}"))
}

fn level_sets() -> Result<String, String> {
    for ratio in [0.5, 1.0, 5.0] {
        let g = model(WrappedGaussian::new(ratio, 1.0))?;
        let vals: Vec<f64> = (0..4000).map(|i| g.deviation(-0.5 * ratio + ratio * i as f64 / 4000.0)).collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        for j in 1..50 {
            let z = lo + (hi - lo) * j as f64 / 50.0;
            let n = vals.windows(2).filter(|w| (w[0] > z) != (w[1] > z)).count();
            if n > 2 {
                return Err(format!("Δ/σ = {ratio}: {n} crossings of level {z:e}"));
            }
        }
    }
    Ok("at most two crossings".into())
}

fn estimator_fixed_point() -> Result<String, String> {
    let half: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
    let e = model(estimate_prior(&half, 0.2))?;
    ensure((e.pi0_hat - 0.5).abs() < 1e-12, format!("π̂0 = {}", e.pi0_hat))
}

fn sweep_determinism() -> Result<String, String> {
    let cfg = ExperimentConfig { pi0_list: vec![0.1, 0.4], n_bits: 400, repeats: 4, ..Default::default() };
    let a = simulate(&cfg, Execution::Serial).map_err(|e| e.to_string())?;
    let b = simulate(&cfg, Execution::Parallel(3)).map_err(|e| e.to_string())?;
    ensure(a == b, format!("{} records, serial vs 3 workers", a.len()))
}

const CHECKS: [(&str, Check); 8] = [
    ("density paths agree", density_paths),
    ("uniform-prior error vs quadrature", uniform_error),
    ("MAP error vs region oracle", map_error_vs_oracle),
    ("MAP symmetry and dominance", symmetry_and_dominance),
    ("ML thresholds equalize likelihoods", uniform_thresholds),
    ("density level sets", level_sets),
    ("estimator fixed point", estimator_fixed_point),
    ("sweep determinism", sweep_determinism),
];

pub fn run_self_check() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, f)| match f() {
            Ok(detail) => CheckOutcome { name, passed: true, detail },
            Err(detail) => CheckOutcome { name, passed: false, detail },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_self_check() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
