//! Forward path of the modulo channel: bits, symbols, noise, wrap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_positive, check_probability, Error, Result};
use crate::Bit;

/// Name of the Gaussian sampler, recorded in run metadata.
pub const GAUSSIAN_SAMPLER: &str = "ziggurat (rand_distr::StandardNormal) over ChaCha8";

/// Reduction into `[-Δ/2, Δ/2)` without input checks.
#[inline]
pub(crate) fn wrap(x: f64, delta: f64) -> f64 {
    let half = 0.5 * delta;
    if (-half..half).contains(&x) {
        return x;
    }
    let mut r = x - delta * (x / delta + 0.5).floor();
    if r >= half {
        r -= delta;
    }
    if r < -half {
        r += delta;
    }
    r
}

/// `x mod Δ` into the half-open fundamental interval `[-Δ/2, Δ/2)`.
pub fn mod_reduce(x: f64, delta: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { value: x });
    }
    check_positive("delta", delta)?;
    Ok(wrap(x, delta))
}

/// Returns an error unless `y` lies in `[-Δ/2, Δ/2)`.
pub(crate) fn check_fundamental(y: f64, delta: f64) -> Result<f64> {
    let half = 0.5 * delta;
    if (-half..half).contains(&y) {
        Ok(y)
    } else {
        Err(Error::OutsideInterval { value: y, lo: -half, hi: half })
    }
}

/// The binary constellation `{h0, h1}` inside `[-Δ/2, Δ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolMap {
    h0: f64,
    h1: f64,
    delta: f64,
}

impl SymbolMap {
    pub fn new(h0: f64, h1: f64, delta: f64) -> Result<Self> {
        check_positive("delta", delta)?;
        for (name, h) in [("h0", h0), ("h1", h1)] {
            if !h.is_finite() {
                return Err(Error::NonFinite { value: h });
            }
            if !(-0.5 * delta..0.5 * delta).contains(&h) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{h} is outside [-{d}, {d})", d = 0.5 * delta),
                });
            }
        }
        if h0 == h1 {
            return Err(Error::CoincidentSymbols(h0));
        }
        Ok(Self { h0, h1, delta })
    }

    /// The power-minimal error-optimal constellation `(-Δ/4, Δ/4)`.
    pub fn antipodal(delta: f64) -> Result<Self> {
        Self::new(-0.25 * delta, 0.25 * delta, delta)
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn symbol(&self, bit: Bit) -> f64 {
        if bit == 0 {
            self.h0
        } else {
            self.h1
        }
    }

    /// Circular distance between the two symbols, in `(0, Δ/2]`.
    pub fn separation(&self) -> f64 {
        let d = (self.h1 - self.h0).abs();
        d.min(self.delta - d)
    }
}

/// I.i.d. bit source with `P(bit = 0) = pi0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitSource {
    pub pi0: f64,
    pub seed: u64,
}

impl BitSource {
    pub fn new(pi0: f64, seed: u64) -> Result<Self> {
        check_probability("pi0", pi0)?;
        Ok(Self { pi0, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub delta: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(delta: f64, sigma: f64, seed: u64) -> Result<Self> {
        check_positive("delta", delta)?;
        check_positive("sigma", sigma)?;
        Ok(Self { delta, sigma, seed })
    }
}

/// Draws `n` bits, each 0 with probability `src.pi0`.
pub fn generate_bits(src: &BitSource, n: usize) -> Result<Vec<Bit>> {
    check_probability("pi0", src.pi0)?;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(src.seed);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            if u < src.pi0 {
                0
            } else {
                1
            }
        })
        .collect())
}

pub fn map_bits(bits: &[Bit], map: &SymbolMap) -> Result<Vec<f64>> {
    if bits.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(bits.iter().map(|&b| map.symbol(b)).collect())
}

/// `ỹ_n = (x_n + w_n) mod Δ` with `w_n ~ N(0, σ²)` drawn from `ch.seed`.
pub fn transmit(symbols: &[f64], ch: &ChannelParams) -> Result<Vec<f64>> {
    check_positive("delta", ch.delta)?;
    check_positive("sigma", ch.sigma)?;
    if let Some(&bad) = symbols.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite { value: bad });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ch.seed);
    Ok(symbols
        .iter()
        .map(|&x| {
            let w: f64 = rng.sample(StandardNormal);
            wrap(x + ch.sigma * w, ch.delta)
        })
        .collect())
}

/// `E[x²] = π0·h0² + (1 − π0)·h1²`.
pub fn average_power(map: &SymbolMap, pi0: f64) -> Result<f64> {
    check_probability("pi0", pi0)?;
    Ok(pi0 * map.h0 * map.h0 + (1.0 - pi0) * map.h1 * map.h1)
}
