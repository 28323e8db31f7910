//! Experiment configuration, flat `key=value` config files and list parsing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{io_err, HarnessError, Result};

/// Decoding rule selected for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Map,
    Ml,
    Estimated,
}

impl RuleKind {
    pub const ALL: [RuleKind; 3] = [RuleKind::Map, RuleKind::Ml, RuleKind::Estimated];

    pub fn label(self) -> &'static str {
        match self {
            RuleKind::Map => "map",
            RuleKind::Ml => "ml",
            RuleKind::Estimated => "estimated",
        }
    }

    /// Fixed index used in seed derivation; independent of list order.
    pub fn index(self) -> u64 {
        match self {
            RuleKind::Map => 0,
            RuleKind::Ml => 1,
            RuleKind::Estimated => 2,
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RuleKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "map" => Ok(RuleKind::Map),
            "ml" => Ok(RuleKind::Ml),
            "estimated" | "est" => Ok(RuleKind::Estimated),
            other => Err(HarnessError::Config(format!("unknown rule `{other}` (map, ml, estimated)"))),
        }
    }
}

/// Which artifacts a sweep writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub csv: bool,
    pub svg: bool,
    pub analytic: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self { csv: true, svg: false, analytic: true }
    }
}

impl FromStr for Emit {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let mut e = Emit { csv: false, svg: false, analytic: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => e.csv = true,
                "svg" => e.svg = true,
                "analytic" => e.analytic = true,
                other => return Err(HarnessError::Config(format!("unknown emit target `{other}` (csv, svg, analytic)"))),
            }
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub delta: f64,
    pub sigma: f64,
    pub pi0_list: Vec<f64>,
    pub n_bits: usize,
    pub repeats: usize,
    pub rules: Vec<RuleKind>,
    pub master_seed: u64,
    pub output_path: PathBuf,
    pub emit: Emit,
    /// Estimate-then-decode passes for the estimated rule.
    pub estimator_iterations: usize,
}

impl Default for ExperimentConfig {
    /// The paper-style preset: σ = 1, Δ = 5, N = 1000, M = 50, all rules.
    fn default() -> Self {
        Self {
            delta: 5.0,
            sigma: 1.0,
            pi0_list: parse_pi0_spec("0.05:0.5:0.05").expect("preset grid"),
            n_bits: 1000,
            repeats: 50,
            rules: RuleKind::ALL.to_vec(),
            master_seed: 2024,
            output_path: PathBuf::from("results/sweep.csv"),
            emit: Emit::default(),
            estimator_iterations: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.pi0_list.is_empty() {
            return bad("pi0 list is empty".into());
        }
        if let Some(p) = self.pi0_list.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("pi0 {p} is outside [0, 1]"));
        }
        if self.n_bits == 0 {
            return bad("n_bits must be at least 1".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.rules.is_empty() {
            return bad("no decoding rules selected".into());
        }
        if self.estimator_iterations == 0 {
            return bad("estimator_iterations must be at least 1".into());
        }
        Ok(())
    }

    /// Applies one `key=value` setting. Keys mirror the CLI flag names, with
    /// `-` and `_` interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "delta" => self.delta = parse_num(key, value)?,
            "sigma" => self.sigma = parse_num(key, value)?,
            "pi0" | "pi0_list" => self.pi0_list = parse_pi0_spec(value)?,
            "n_bits" => self.n_bits = parse_num(key, value)?,
            "repeats" => self.repeats = parse_num(key, value)?,
            "rules" => self.rules = parse_rules(value)?,
            "seed" | "master_seed" => self.master_seed = parse_num(key, value)?,
            "out" | "output_path" => self.output_path = PathBuf::from(value),
            "emit" => self.emit = value.parse()?,
            "estimator_iterations" | "iterations" => self.estimator_iterations = parse_num(key, value)?,
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every entry of a config file on top of `self`.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        for (k, v) in read_config_file(path)? {
            self.set(&k, &v).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }

    /// Sibling path `<stem><suffix>.<ext>` next to the main output file.
    pub fn sibling(&self, suffix: &str, ext: &str) -> PathBuf {
        sibling(&self.output_path, suffix, ext)
    }
}

pub(crate) fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| HarnessError::Config(format!("{key} = `{value}`: {e}")))
}

/// Flat `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn parse_rules(s: &str) -> Result<Vec<RuleKind>> {
    let mut rules: Vec<RuleKind> =
        s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect::<Result<_>>()?;
    rules.sort();
    rules.dedup();
    Ok(rules)
}

/// Either a comma list (`0.1,0.3`) or an inclusive range `start:stop:step`.
pub fn parse_pi0_spec(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let num = |t: &str| parse_num::<f64>("pi0", t.trim());
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(HarnessError::Config(format!("range `{s}` must be start:stop:step")));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(HarnessError::Config(format!("range `{s}` needs step > 0 and stop ≥ start")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Rounded so 0.1 + 2·0.1 prints as 0.3.
        Ok((0..count).map(|i| ((start + step * i as f64) * 1e12).round() / 1e12).collect())
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect()
    }
}
