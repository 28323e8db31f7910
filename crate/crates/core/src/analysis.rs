//! Error probabilities of the decision rules.
//!
//! Closed forms are expressed through band probabilities of the wrapped
//! noise, `band(a, b) = Σ_k [Q((a+kΔ)/σ) − Q((b+kΔ)/σ)]`. The individual sums
//! `Σ_k Q((x+kΔ)/σ)` diverge, so they are never formed separately.
//!
//! [`pe_oracle`] is an independent route: it labels a dense grid with the
//! actual decision rule, refines each label change by bisection and
//! integrates the wrapped density over the resulting regions by adaptive
//! quadrature.

use rayon::prelude::*;

use crate::channel::{average_power, wrap, SymbolMap};
use crate::decision::{check_half_period, density_ratio, thresholds_map, DecisionRule, MapThresholds};
use crate::error::{check_probability, Error, Result};
use crate::quad::integrate;
use crate::wrapped_gauss::WrappedGaussian;
use crate::Bit;

/// Grid size used by the oracle to locate decision regions.
pub const ORACLE_GRID: usize = 100_000;

/// Boundary refinement tolerance of the oracle.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Per-region absolute quadrature tolerance of the oracle.
const REGION_QUAD_TOL: f64 = 1e-13;

/// Grid points within this distance of the minimum count as minimizers.
pub const ARGMIN_TOL: f64 = 1e-9;

/// `f(Δ/2) / f(0)`, which delimits the regimes where MAP ignores the
/// observation.
pub fn tau(g: &WrappedGaussian) -> f64 {
    density_ratio(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// π0 > 1/(1+τ): every sample decodes to 0.
    AlwaysZero,
    /// 1/(1+τ) ≥ π0 > 1/2.
    UpperMid,
    /// 1/2 > π0 ≥ τ/(1+τ).
    LowerMid,
    /// π0 < τ/(1+τ): every sample decodes to 1.
    AlwaysOne,
    /// π0 = 1/2.
    Uniform,
    /// ML rule on an arbitrary constellation.
    MlGeneral,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Self::AlwaysZero => "always-zero",
            Self::UpperMid => "upper-mid",
            Self::LowerMid => "lower-mid",
            Self::AlwaysOne => "always-one",
            Self::Uniform => "uniform",
            Self::MlGeneral => "ml-general",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeReport {
    pub pe: f64,
    pub regime: Regime,
    pub thresholds: MapThresholds,
}

/// Bit error probability of the antipodal constellation `±Δ/4` under a
/// uniform prior: `band(Δ/4, 3Δ/4)`.
pub fn pe_uniform(g: &WrappedGaussian) -> f64 {
    let d = g.delta();
    if g.sigma() / d >= 0.5 {
        // Integrated Fourier series: 1/2 − (2/π) Σ_j (−1)^j c_{2j+1} / (2j + 1).
        let mut sum = 0.0;
        let mut j = 0;
        loop {
            let k = 2 * j + 1;
            let c = g.fourier_coefficient(k);
            if c == 0.0 || c <= 1e-17 * g.fourier_coefficient(1) {
                break;
            }
            let term = c / k as f64;
            sum += if j % 2 == 0 { term } else { -term };
            j += 1;
        }
        return 0.5 - 2.0 / std::f64::consts::PI * sum;
    }
    g.band_unchecked(0.25 * d, 0.75 * d).clamp(0.0, 1.0)
}

/// ML bit error probability for an arbitrary constellation.
///
/// With `h0 < h1`, `η = (h1 − h0)/2` and midpoint `m`, the region decoded as
/// 1 is the half-period arc starting at `m` (when `m ≥ 0`) or the complement
/// of the arc ending at `m` (when `m < 0`); either way the error for each
/// bit is the wrapped mass of `[η, η + Δ/2]`.
pub fn pe_ml(g: &WrappedGaussian, map: &SymbolMap) -> Result<f64> {
    let (h0, h1) = match map.h0().partial_cmp(&map.h1()) {
        Some(std::cmp::Ordering::Less) => (map.h0(), map.h1()),
        Some(std::cmp::Ordering::Greater) => (map.h1(), map.h0()),
        _ => return Err(Error::CoincidentSymbols(map.h0())),
    };
    let d = g.delta();
    let eta = 0.5 * (h1 - h0);
    let mid = 0.5 * (h0 + h1);
    let pe = if mid >= 0.0 {
        g.band_unchecked(eta, eta + 0.5 * d)
    } else {
        1.0 - g.band_unchecked(eta - 0.5 * d, eta)
    };
    Ok(pe.clamp(0.0, 1.0))
}

/// MAP bit error probability of the antipodal constellation at prior `pi0`.
///
/// In the two middle regimes the zero region is `[h0 − l, h0 + l]` and
/// `Pe = π0·band(l, Δ − l) + (1 − π0)·band(Δ/2 − l, Δ/2 + l)`; in the outer
/// regimes the rule always answers the likelier bit.
pub fn pe_map(g: &WrappedGaussian, pi0: f64) -> Result<PeReport> {
    check_probability("pi0", pi0)?;
    let map = SymbolMap::antipodal(g.delta())?;
    let thresholds = thresholds_map(g, &map, pi0)?;
    let (pe, regime) = match &thresholds {
        MapThresholds::AllZero => (1.0 - pi0, Regime::AlwaysZero),
        MapThresholds::AllOne => (pi0, Regime::AlwaysOne),
        MapThresholds::Regions { half_width: l, .. } => {
            let (miss_zero, miss_one) = miss_rates(g, *l);
            let regime = if pi0 > 0.5 {
                Regime::UpperMid
            } else if pi0 < 0.5 {
                Regime::LowerMid
            } else {
                Regime::Uniform
            };
            (pi0 * miss_zero + (1.0 - pi0) * miss_one, regime)
        }
    };
    Ok(PeReport { pe: pe.clamp(0.0, 1.0), regime, thresholds })
}

/// Region integrator shared by [`pe_oracle`] and the grid search.
struct Oracle<'a> {
    g: &'a WrappedGaussian,
    h0: f64,
    h1: f64,
    true_pi0: f64,
    rule_prior: f64,
    grid: usize,
}

impl Oracle<'_> {
    fn grid_point(&self, i: usize) -> f64 {
        let d = self.g.delta();
        -0.5 * d + d * i as f64 / self.grid as f64
    }

    #[inline]
    fn label(&self, y: f64) -> Bit {
        let w0 = self.rule_prior * self.g.density_direct(y - self.h0);
        let w1 = (1.0 - self.rule_prior) * self.g.density_direct(y - self.h1);
        if w0 >= w1 {
            0
        } else {
            1
        }
    }

    /// Locates the label change inside grid cell `c` (between points `c` and
    /// `c + 1`), widening by one cell on each side if rounding disagrees
    /// with the labels that flagged the cell.
    fn refine(&self, c: usize) -> f64 {
        let step = self.g.delta() / self.grid as f64;
        let y = self.grid_point(c);
        for (lo, hi) in [(y, y + step), (y - step, y + 2.0 * step)] {
            let lab_lo = self.label(lo);
            if lab_lo != self.label(hi) {
                let (mut lo, mut hi) = (lo, hi);
                while hi - lo > BOUNDARY_TOL {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.label(mid) == lab_lo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        y + 0.5 * step
    }

    /// Error probability given the cells where the label changes and the
    /// label just after each change (cyclic on the grid).
    fn integrate(&self, changes: &[(usize, Bit)], label_at_start: Bit) -> f64 {
        let d = self.g.delta();
        let mass = |label: Bit, lo: f64, hi: f64| {
            // A 1-region costs bit-0 errors; a 0-region costs bit-1 errors.
            let (weight, h) = if label == 1 { (self.true_pi0, self.h0) } else { (1.0 - self.true_pi0, self.h1) };
            if weight == 0.0 {
                return 0.0;
            }
            weight * integrate(|y| self.g.density_direct(y - h), lo, hi, REGION_QUAD_TOL).value
        };
        if changes.is_empty() {
            return mass(label_at_start, -0.5 * d, 0.5 * d);
        }
        let bounds: Vec<f64> = changes.iter().map(|&(c, _)| self.refine(c)).collect();
        let mut total = 0.0;
        for j in 0..changes.len() {
            let lo = bounds[j];
            let mut hi = if j + 1 < changes.len() { bounds[j + 1] } else { bounds[0] + d };
            if hi < lo {
                hi = lo;
            }
            total += mass(changes[j].1, lo, hi);
        }
        total
    }
}

fn cyclic_changes(labels: &[Bit]) -> Vec<(usize, Bit)> {
    let n = labels.len();
    (0..n)
        .filter_map(|i| {
            let next = labels[(i + 1) % n];
            (labels[i] != next).then_some((i, next))
        })
        .collect()
}

/// Brute-force bit error probability of `rule` on `map` when bits carry the
/// prior `pi0`.
pub fn pe_oracle(g: &WrappedGaussian, map: &SymbolMap, pi0: f64, rule: &DecisionRule) -> Result<f64> {
    check_probability("pi0", pi0)?;
    let rule_prior = check_probability("rule prior", rule.prior())?;
    let oracle = Oracle { g, h0: map.h0(), h1: map.h1(), true_pi0: pi0, rule_prior, grid: ORACLE_GRID };
    let labels: Vec<Bit> = (0..ORACLE_GRID).into_par_iter().map(|i| oracle.label(oracle.grid_point(i))).collect();
    let changes = cyclic_changes(&labels);
    Ok(oracle.integrate(&changes, labels[0]).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub h0: f64,
    pub h1: f64,
    pub pe: f64,
}

/// Outcome of the exhaustive constellation search.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSearch {
    pub pi0: f64,
    /// Spacing actually used, `Δ/n` with `n = ⌈Δ/grid_step⌉`.
    pub grid_step: f64,
    pub min_pe: f64,
    /// All grid constellations within [`ARGMIN_TOL`] of the minimum.
    pub argmin: Vec<SymbolMap>,
    /// MAP error over every ordered pair `h0 ≠ h1` of grid symbols.
    pub surface: Vec<SurfacePoint>,
    /// Every minimizer has `|h1 − h0| = Δ/2` to within one grid step.
    pub ridge_confirmed: bool,
    /// Minimizer of `E[x²] = π0·h0² + (1−π0)·h1²` among the argmin set.
    pub power_minimal: SymbolMap,
    pub power_minimal_power: f64,
    /// `(−Δ/4, Δ/4)` is the power-minimal member, to within one grid step.
    pub antipodal_is_power_minimal: bool,
    /// Golden-section refinement of `|h1 − h0|` around the best cell.
    pub refined_separation: f64,
}

/// Grid search over `(h0, h1) ∈ [−Δ/2, Δ/2)²` of the MAP error at prior
/// `pi0`, evaluated with the region oracle.
///
/// Labels for a pair are a cyclic shift of the labels for `(−Δ/2, h1 − h0)`,
/// so the dense labeling is done once per symbol difference; boundary
/// refinement and integration are still carried out for every pair.
pub fn optimal_map_search(g: &WrappedGaussian, pi0: f64, grid_step: f64) -> Result<MapSearch> {
    check_probability("pi0", pi0)?;
    let d = g.delta();
    if !(grid_step > 0.0 && grid_step <= d / 200.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            reason: format!("must lie in (0, Δ/200 = {}], got {grid_step}", d / 200.0),
        });
    }
    let n = (d / grid_step - 1e-9).ceil() as usize;
    let per_cell = ORACLE_GRID.div_ceil(n);
    let grid = n * per_cell;
    let step = d / n as f64;
    let symbol = |a: usize| -0.5 * d + step * a as f64;

    // Density at every grid offset j·Δ/grid; offsets are periodic.
    let table: Vec<f64> = (0..grid).into_par_iter().map(|j| g.density_direct(d * j as f64 / grid as f64)).collect();

    // Label changes for h0 = −Δ/2, h1 = −Δ/2 + diff·step.
    let patterns: Vec<(Vec<(usize, Bit)>, Bit)> = (0..n)
        .into_par_iter()
        .map(|diff| {
            if diff == 0 {
                return (Vec::new(), 0);
            }
            let shift = diff * per_cell;
            let labels: Vec<Bit> = (0..grid)
                .map(|i| {
                    let w0 = pi0 * table[i];
                    let w1 = (1.0 - pi0) * table[(i + grid - shift) % grid];
                    if w0 >= w1 {
                        0
                    } else {
                        1
                    }
                })
                .collect();
            (cyclic_changes(&labels), labels[0])
        })
        .collect();

    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let surface: Vec<SurfacePoint> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let diff = (b + n - a) % n;
            let (base, base_start) = &patterns[diff];
            let offset = a * per_cell;
            let mut changes: Vec<(usize, Bit)> = base.iter().map(|&(c, next)| ((c + offset) % grid, next)).collect();
            changes.sort_unstable_by_key(|&(c, _)| c);
            let (h0, h1) = (symbol(a), symbol(b));
            let oracle = Oracle { g, h0, h1, true_pi0: pi0, rule_prior: pi0, grid };
            SurfacePoint { h0, h1, pe: oracle.integrate(&changes, *base_start).clamp(0.0, 1.0) }
        })
        .collect();

    let min_pe = surface.iter().map(|p| p.pe).fold(f64::INFINITY, f64::min);
    let argmin: Vec<SymbolMap> = surface
        .iter()
        .filter(|p| p.pe <= min_pe + ARGMIN_TOL)
        .map(|p| SymbolMap::new(p.h0, p.h1, d))
        .collect::<Result<_>>()?;
    let ridge_confirmed = argmin.iter().all(|m| ((m.h1() - m.h0()).abs() - 0.5 * d).abs() <= step * (1.0 + 1e-9));

    // Ties in power go to the h0 < h1 orientation, then to the smaller h0.
    let mut ranked: Vec<(f64, SymbolMap)> =
        argmin.iter().map(|m| Ok((average_power(m, pi0)?, *m))).collect::<Result<_>>()?;
    ranked.sort_by(|(pa, ma), (pb, mb)| {
        pa.total_cmp(pb)
            .then((ma.h0() > ma.h1()).cmp(&(mb.h0() > mb.h1())))
            .then(ma.h0().total_cmp(&mb.h0()))
    });
    let (power_minimal_power, power_minimal) = ranked[0];
    let antipodal_is_power_minimal = (power_minimal.h0() + 0.25 * d).abs() <= step * (1.0 + 1e-9)
        && (power_minimal.h1() - 0.25 * d).abs() <= step * (1.0 + 1e-9);

    let refined_separation = refine_separation(g, &power_minimal, pi0, step)?;

    Ok(MapSearch {
        pi0,
        grid_step: step,
        min_pe,
        argmin,
        surface,
        ridge_confirmed,
        power_minimal,
        power_minimal_power,
        antipodal_is_power_minimal,
        refined_separation,
    })
}

/// Golden-section search of `|h1 − h0|` within one grid step of the best
/// cell, holding `h0` fixed.
fn refine_separation(g: &WrappedGaussian, best: &SymbolMap, pi0: f64, step: f64) -> Result<f64> {
    let d = g.delta();
    let dir = if best.h1() >= best.h0() { 1.0 } else { -1.0 };
    let sep0 = (best.h1() - best.h0()).abs();
    let rule = DecisionRule::map(pi0)?;
    let pe_at = |sep: f64| -> Result<f64> {
        let h1 = wrap(best.h0() + dir * sep, d);
        pe_oracle(g, &SymbolMap::new(best.h0(), h1, d)?, pi0, &rule)
    };
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = ((sep0 - step).max(step), (sep0 + step).min(d - step));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (pe_at(x1)?, pe_at(x2)?);
    while hi - lo > 1e-6 * d {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = pe_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = pe_at(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Class-conditional error rates `(P(decide 1 | 0), P(decide 0 | 1))` of the
/// MAP rule with prior `pi0` on a half-period constellation.
pub fn class_errors(g: &WrappedGaussian, map: &SymbolMap, pi0: f64) -> Result<(f64, f64)> {
    check_half_period(map)?;
    let l = thresholds_map(g, map, pi0)?.half_width(g.delta());
    Ok(miss_rates(g, l))
}

/// Error rates for a zero region of half-width `l` around `h0`.
fn miss_rates(g: &WrappedGaussian, l: f64) -> (f64, f64) {
    let d = g.delta();
    let miss_zero = if l >= 0.5 * d { 0.0 } else { g.band_unchecked(l, d - l) };
    let miss_one = if l <= 0.0 { 0.0 } else { g.band_unchecked(0.5 * d - l, 0.5 * d + l) };
    (miss_zero.clamp(0.0, 1.0), miss_one.clamp(0.0, 1.0))
}
