//! Per-symbol decision rules and their decision regions.
//!
//! Every rule compares weighted likelihoods
//! `p·f(ỹ − h0)` against `(1 − p)·f(ỹ − h1)` and decides 0 on ties, where
//! `f` is the wrapped density and `p` the prior the rule believes in.

use crate::channel::{check_fundamental, wrap, SymbolMap};
use crate::error::{check_probability, Error, Result};
use crate::wrapped_gauss::WrappedGaussian;
use crate::Bit;

/// Absolute tolerance on the MAP threshold half-width.
pub const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecisionRule {
    /// MAP with the true prior `P(bit = 0)`.
    Map { pi0: f64 },
    /// Maximum likelihood, i.e. MAP at a uniform prior.
    Ml,
    /// MAP with a prior estimated from the received block.
    EstimatedMap { pi0_hat: f64 },
}

impl DecisionRule {
    pub fn map(pi0: f64) -> Result<Self> {
        check_probability("pi0", pi0).map(|pi0| Self::Map { pi0 })
    }

    pub fn estimated(pi0_hat: f64) -> Result<Self> {
        check_probability("pi0_hat", pi0_hat).map(|pi0_hat| Self::EstimatedMap { pi0_hat })
    }

    /// Prior on bit 0 that the rule weighs the likelihoods with.
    pub fn prior(&self) -> f64 {
        match *self {
            Self::Map { pi0 } => pi0,
            Self::Ml => 0.5,
            Self::EstimatedMap { pi0_hat } => pi0_hat,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Map { .. } => "map",
            Self::Ml => "ml",
            Self::EstimatedMap { .. } => "estimated",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Map { pi0 } => check_probability("pi0", pi0).map(drop),
            Self::Ml => Ok(()),
            Self::EstimatedMap { pi0_hat } => check_probability("pi0_hat", pi0_hat).map(drop),
        }
    }
}

/// Closed interval `[lo, hi]` inside the fundamental interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }
}

/// Crossing points of the two weighted likelihoods and the resulting
/// partition of `[-Δ/2, Δ/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionThresholds {
    c1: f64,
    c2: f64,
    delta: f64,
    region_for_zero: Vec<Interval>,
}

impl DecisionThresholds {
    /// Thresholds for a zero-region arc of the given half-width centred at
    /// `center`, wrapped onto the fundamental interval.
    pub(crate) fn from_zero_arc(center: f64, half_width: f64, delta: f64) -> Self {
        let half = 0.5 * delta;
        if half_width >= half {
            let c = wrap(center + half, delta);
            return Self {
                c1: c,
                c2: c,
                delta,
                region_for_zero: vec![Interval { lo: -half, hi: half }],
            };
        }
        if half_width <= 0.0 {
            return Self { c1: center, c2: center, delta, region_for_zero: Vec::new() };
        }
        let (lo, hi) = (center - half_width, center + half_width);
        let mut region = if lo < -half {
            vec![Interval { lo: -half, hi }, Interval { lo: lo + delta, hi: half }]
        } else if hi >= half {
            vec![Interval { lo: -half, hi: hi - delta }, Interval { lo, hi: half }]
        } else {
            vec![Interval { lo, hi }]
        };
        region.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let (a, b) = (wrap(lo, delta), wrap(hi, delta));
        Self { c1: a.min(b), c2: a.max(b), delta, region_for_zero: region }
    }

    /// Thresholds from two crossing points; the zero region is whichever arc
    /// between them contains `h0`.
    fn from_crossings(a: f64, b: f64, h0: f64, delta: f64) -> Self {
        let half = 0.5 * delta;
        let (c1, c2) = (a.min(b), a.max(b));
        let region_for_zero = if (c1..=c2).contains(&h0) {
            vec![Interval { lo: c1, hi: c2 }]
        } else {
            vec![Interval { lo: -half, hi: c1 }, Interval { lo: c2, hi: half }]
        };
        Self { c1, c2, delta, region_for_zero }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn region_for_zero(&self) -> &[Interval] {
        &self.region_for_zero
    }

    /// Complement of the zero region within the fundamental interval.
    pub fn region_for_one(&self) -> Vec<Interval> {
        let half = 0.5 * self.delta;
        let mut out = Vec::new();
        let mut cursor = -half;
        for iv in &self.region_for_zero {
            if iv.lo > cursor {
                out.push(Interval { lo: cursor, hi: iv.lo });
            }
            cursor = cursor.max(iv.hi);
        }
        if cursor < half {
            out.push(Interval { lo: cursor, hi: half });
        }
        out
    }

    pub fn zero_region_length(&self) -> f64 {
        self.region_for_zero.iter().map(Interval::len).sum()
    }

    /// Decision by region lookup.
    pub fn label(&self, y: f64) -> Bit {
        if self.region_for_zero.iter().any(|iv| iv.contains(y)) {
            0
        } else {
            1
        }
    }

    /// Circular distance from `y` to the nearest threshold.
    pub fn distance_to_boundary(&self, y: f64) -> f64 {
        let circ = |c: f64| {
            let d = (y - c).abs();
            d.min(self.delta - d)
        };
        circ(self.c1).min(circ(self.c2))
    }
}

/// MAP thresholds for the antipodal constellation; the extreme priors make
/// one bit win everywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum MapThresholds {
    AllZero,
    AllOne,
    Regions {
        thresholds: DecisionThresholds,
        /// Half-width of the zero region around `h0`.
        half_width: f64,
    },
}

impl MapThresholds {
    pub fn label(&self, y: f64) -> Bit {
        match self {
            Self::AllZero => 0,
            Self::AllOne => 1,
            Self::Regions { thresholds, .. } => thresholds.label(y),
        }
    }

    pub fn zero_region_length(&self, delta: f64) -> f64 {
        match self {
            Self::AllZero => delta,
            Self::AllOne => 0.0,
            Self::Regions { thresholds, .. } => thresholds.zero_region_length(),
        }
    }

    pub fn half_width(&self, delta: f64) -> f64 {
        match self {
            Self::AllZero => 0.5 * delta,
            Self::AllOne => 0.0,
            Self::Regions { half_width, .. } => *half_width,
        }
    }
}

/// `f(ỹ − h)` for a received sample in the fundamental interval.
pub fn likelihood(g: &WrappedGaussian, y_tilde: f64, h: f64) -> Result<f64> {
    check_fundamental(y_tilde, g.delta())?;
    Ok(g.density_direct(y_tilde - h))
}

#[inline]
fn decide_unchecked(prior: f64, g: &WrappedGaussian, map: &SymbolMap, y: f64) -> Bit {
    let w0 = prior * g.density_direct(y - map.h0());
    let w1 = (1.0 - prior) * g.density_direct(y - map.h1());
    if w0 >= w1 {
        0
    } else {
        1
    }
}

pub fn decide(rule: &DecisionRule, g: &WrappedGaussian, map: &SymbolMap, y_tilde: f64) -> Result<Bit> {
    rule.validate()?;
    check_fundamental(y_tilde, g.delta())?;
    Ok(decide_unchecked(rule.prior(), g, map, y_tilde))
}

pub fn decide_sequence(
    rule: &DecisionRule,
    g: &WrappedGaussian,
    map: &SymbolMap,
    y_tilde: &[f64],
) -> Result<Vec<Bit>> {
    rule.validate()?;
    let prior = rule.prior();
    y_tilde
        .iter()
        .map(|&y| {
            check_fundamental(y, g.delta())?;
            Ok(decide_unchecked(prior, g, map, y))
        })
        .collect()
}

/// Modified sign with `sgn(0) = -1`.
fn modified_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Equal-prior crossing points `{m, m + sgn(m)·Δ/2}` with `m = (h0+h1)/2`,
/// reduced into the fundamental interval.
pub fn thresholds_uniform(map: &SymbolMap) -> Result<DecisionThresholds> {
    if map.h0() == map.h1() {
        return Err(Error::CoincidentSymbols(map.h0()));
    }
    let delta = map.delta();
    let mid = 0.5 * (map.h0() + map.h1());
    let other = wrap(mid + modified_sign(mid) * 0.5 * delta, delta);
    Ok(DecisionThresholds::from_crossings(wrap(mid, delta), other, map.h0(), delta))
}

/// `f(Δ/2) / f(0)`.
pub(crate) fn density_ratio(g: &WrappedGaussian) -> f64 {
    g.density_direct(0.5 * g.delta()) / g.density_direct(0.0)
}

pub(crate) fn check_half_period(map: &SymbolMap) -> Result<()> {
    let delta = map.delta();
    let sep = (map.h1() - map.h0()).abs();
    if (sep - 0.5 * delta).abs() > 1e-9 * delta {
        return Err(Error::UnsupportedConstellation { separation: map.h1() - map.h0(), delta });
    }
    Ok(())
}

/// Bisection for a root of a function that changes sign on `[lo, hi]`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
    }
    let lo_positive = f_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// MAP decision regions for a constellation with `|h1 − h0| = Δ/2`.
///
/// The zero region is the arc `[h0 − l, h0 + l]` where `l ∈ [0, Δ/2]` solves
/// `π0·f(l) = (1 − π0)·f(Δ/2 − l)`. Priors beyond `1/(1+τ)` (resp. below
/// `τ/(1+τ)`), `τ = f(Δ/2)/f(0)`, decide 0 (resp. 1) everywhere; the
/// boundary priors themselves take the non-degenerate branch.
pub fn thresholds_map(g: &WrappedGaussian, map: &SymbolMap, pi0: f64) -> Result<MapThresholds> {
    check_probability("pi0", pi0)?;
    check_half_period(map)?;
    let tau = density_ratio(g);
    if pi0 > 1.0 / (1.0 + tau) {
        return Ok(MapThresholds::AllZero);
    }
    if pi0 < tau / (1.0 + tau) {
        return Ok(MapThresholds::AllOne);
    }
    let delta = g.delta();
    let half = 0.5 * delta;
    // Decreasing in l: unimodality of the wrapped density on [0, Δ/2].
    let excess = |l: f64| pi0 * g.density_direct(l) - (1.0 - pi0) * g.density_direct(half - l);
    // The excess is flat at both ends, so a rounding-level residual there
    // would move the root by about its square root. Snap it to zero.
    let noise = 8.0 * f64::EPSILON * (pi0 * g.density_direct(0.0) + (1.0 - pi0) * g.density_direct(half));
    let snap = |v: f64| if v.abs() <= noise { 0.0 } else { v };
    let (at_lo, at_hi) = (snap(excess(0.0)), snap(excess(half)));
    let half_width = if at_hi >= 0.0 {
        half
    } else if at_lo <= 0.0 {
        0.0
    } else {
        bisect(excess, 0.0, half, THRESHOLD_TOL)?
    };
    Ok(MapThresholds::Regions {
        thresholds: DecisionThresholds::from_zero_arc(map.h0(), half_width, delta),
        half_width,
    })
}
