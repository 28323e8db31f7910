//! The Δ-wrapped zero-mean Gaussian.
//!
//! For noise `W ~ N(0, σ²)` the wrapped density is
//! `f(x) = Σ_k φ_σ(x + kΔ)`, a Δ-periodic, even function. Two evaluation
//! paths are provided: the direct image sum, which converges fast when σ is
//! small relative to Δ, and its Fourier (Poisson-summed) series
//! `(1/Δ)(1 + 2 Σ_{k≥1} exp(−2π²σ²k²/Δ²) cos(2πkx/Δ))`, which converges fast
//! in the opposite regime. Both truncate at an order derived from an absolute
//! tolerance rather than a fixed term count.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{check_positive, Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_9;

/// Beyond this magnitude `q_tail` returns exactly 0 or 1.
const Q_SATURATION: f64 = 38.0;

/// Upper bound on the Fourier order; only reached for Δ/σ far beyond the
/// regime where the Fourier path is used.
const FOURIER_ORDER_CAP: usize = 1 << 22;

/// Upper tail of the standard normal, `P(Z > x)`.
pub fn q_tail(x: f64) -> f64 {
    if x > Q_SATURATION {
        0.0
    } else if x < -Q_SATURATION {
        1.0
    } else {
        0.5 * libm::erfc(x / SQRT_2)
    }
}

#[inline]
fn normal_pdf(x: f64, sigma: f64) -> f64 {
    let z = x / sigma;
    INV_SQRT_2PI / sigma * (-0.5 * z * z).exp()
}

/// Wrapped Gaussian with interval length `delta` and noise deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrappedGaussian {
    delta: f64,
    sigma: f64,
    tail_eps: f64,
    direct_order: usize,
    fourier_order: usize,
}

impl WrappedGaussian {
    pub const DEFAULT_TAIL_EPS: f64 = 1e-15;
    pub const MAX_TAIL_EPS: f64 = 1e-10;

    pub fn new(delta: f64, sigma: f64) -> Result<Self> {
        Self::with_tail_eps(delta, sigma, Self::DEFAULT_TAIL_EPS)
    }

    pub fn with_tail_eps(delta: f64, sigma: f64, tail_eps: f64) -> Result<Self> {
        check_positive("delta", delta)?;
        check_positive("sigma", sigma)?;
        check_positive("tail_eps", tail_eps)?;
        if tail_eps > Self::MAX_TAIL_EPS {
            return Err(Error::InvalidParameter {
                name: "tail_eps",
                reason: format!("must be ≤ {}, got {tail_eps}", Self::MAX_TAIL_EPS),
            });
        }
        Ok(Self {
            delta,
            sigma,
            tail_eps,
            direct_order: direct_order(delta, sigma, tail_eps),
            fourier_order: fourier_order(delta, sigma, tail_eps),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    /// Δ/σ, the only quantity the error probabilities depend on.
    pub fn ratio(&self) -> f64 {
        self.delta / self.sigma
    }

    /// Largest |k| kept in the direct image sum.
    pub fn direct_order(&self) -> usize {
        self.direct_order
    }

    /// Largest harmonic kept in the Fourier series.
    pub fn fourier_order(&self) -> usize {
        self.fourier_order
    }

    /// Reduces `x` into `[-Δ/2, Δ/2)`. Non-finite input passes through.
    #[inline]
    pub(crate) fn reduce(&self, x: f64) -> f64 {
        crate::channel::wrap(x, self.delta)
    }

    /// Direct image sum `Σ_{|k|≤K} φ_σ(x + kΔ)` after reducing `x` into the
    /// fundamental interval.
    pub fn density_direct(&self, x: f64) -> f64 {
        let x = self.reduce(x);
        let mut sum = normal_pdf(x, self.sigma);
        for k in 1..=self.direct_order {
            let shift = k as f64 * self.delta;
            sum += normal_pdf(x + shift, self.sigma) + normal_pdf(x - shift, self.sigma);
        }
        sum
    }

    /// Poisson-summed Fourier series of the wrapped density.
    pub fn density_fourier(&self, x: f64) -> f64 {
        (1.0 + 2.0 * self.cosine_sum(self.reduce(x), self.fourier_order, 0.0)) / self.delta
    }

    /// `Σ_{k=1..order} e^{−2π²σ²k²/Δ²} cos(2πkx/Δ)`, stopping early once a
    /// coefficient drops to `rel` times the first one.
    fn cosine_sum(&self, x: f64, order: usize, rel: f64) -> f64 {
        let phase = 2.0 * PI * x / self.delta;
        let floor = rel * self.fourier_coefficient(1);
        let mut sum = 0.0;
        for k in 1..=order {
            let kf = k as f64;
            let c = self.fourier_coefficient(k);
            if c == 0.0 || c <= floor {
                break;
            }
            sum += c * (kf * phase).cos();
        }
        sum
    }

    /// `e^{−2π²σ²k²/Δ²}`.
    pub(crate) fn fourier_coefficient(&self, k: usize) -> f64 {
        let r = self.sigma / self.delta;
        let kf = k as f64;
        (-2.0 * PI * PI * r * r * kf * kf).exp()
    }

    /// `f(x) − 1/Δ`. When σ/Δ is large the density is flat to far below
    /// machine precision around `1/Δ`; this form keeps the shape resolvable.
    pub fn deviation(&self, x: f64) -> f64 {
        if self.sigma / self.delta >= 0.5 {
            2.0 * self.cosine_sum(self.reduce(x), FOURIER_ORDER_CAP, 1e-17) / self.delta
        } else {
            self.density_direct(x) - 1.0 / self.delta
        }
    }

    /// Wrapped density using whichever path converges faster:
    /// Fourier for σ/Δ ≥ 0.5, direct otherwise.
    pub fn density(&self, x: f64) -> f64 {
        if self.sigma / self.delta >= 0.5 {
            self.density_fourier(x)
        } else {
            self.density_direct(x)
        }
    }

    /// Probability that the wrapped noise lands in `[a, b]`, computed as the
    /// pairwise-convergent sum `Σ_k [Q((a+kΔ)/σ) − Q((b+kΔ)/σ)]`.
    pub fn band_probability(&self, a: f64, b: f64) -> Result<f64> {
        if !a.is_finite() {
            return Err(Error::NonFinite { value: a });
        }
        if !b.is_finite() {
            return Err(Error::NonFinite { value: b });
        }
        if a > b {
            return Err(Error::InvalidBand { a, b, reason: "lower edge exceeds upper edge" });
        }
        if b - a > self.delta * (1.0 + 1e-12) {
            return Err(Error::InvalidBand { a, b, reason: "band is wider than one period" });
        }
        if a == b {
            return Ok(0.0);
        }
        Ok(self.band_unchecked(a, b).clamp(0.0, 1.0))
    }

    pub(crate) fn band_unchecked(&self, a: f64, b: f64) -> f64 {
        let (d, s) = (self.delta, self.sigma);
        // Image of the band closest to the origin.
        let k0 = (-(a + b) / (2.0 * d)).round();
        let term = |k: f64| {
            let u = (a + k * d) / s;
            let v = (b + k * d) / s;
            if v <= 0.0 {
                q_tail(-v) - q_tail(-u)
            } else if u >= 0.0 {
                q_tail(u) - q_tail(v)
            } else {
                1.0 - q_tail(-u) - q_tail(v)
            }
        };
        // Remaining mass of images whose nearest edge is at distance ≥ r from 0.
        let tail_bound = |r: f64| {
            let z = r / s;
            2.0 * (q_tail(z) + s / d * INV_SQRT_2PI * (-0.5 * z * z).exp())
        };
        let mut sum = term(k0);
        let mut step = 1.0;
        loop {
            let up = k0 + step;
            let down = k0 - step;
            let up_dist = a + up * d;
            let down_dist = -(b + down * d);
            let up_done = up_dist > 0.0 && tail_bound(up_dist) < self.tail_eps;
            let down_done = down_dist > 0.0 && tail_bound(down_dist) < self.tail_eps;
            if up_done && down_done {
                break;
            }
            if !up_done {
                sum += term(up);
            }
            if !down_done {
                sum += term(down);
            }
            step += 1.0;
        }
        sum
    }
}

/// Smallest K whose omitted direct-sum remainder, for any reduced x, is below
/// `eps`. Images with |k| > K sit at distance ≥ (|k| − ½)Δ; a decreasing sum
/// is bounded by its first term plus the integral of the tail.
fn direct_order(delta: f64, sigma: f64, eps: f64) -> usize {
    let mut k = 0usize;
    loop {
        let r = (k as f64 + 0.5) * delta;
        let bound = 2.0 * (normal_pdf(r, sigma) + q_tail(r / sigma) / delta);
        if bound < eps {
            return k;
        }
        k += 1;
    }
}

/// Smallest K' whose omitted Fourier coefficients sum below `eps`, bounding
/// Σ_{k>K'} e^{−a k²} by a geometric series.
fn fourier_order(delta: f64, sigma: f64, eps: f64) -> usize {
    let a = 2.0 * PI * PI * sigma * sigma / (delta * delta);
    // Jump near the answer, then walk.
    let target = ((2.0 / (delta * eps)).max(1.0).ln() / a).sqrt();
    let mut k = if target.is_finite() {
        (target.floor() as usize).saturating_sub(2).min(FOURIER_ORDER_CAP)
    } else {
        FOURIER_ORDER_CAP
    };
    while k < FOURIER_ORDER_CAP {
        let next = (k + 1) as f64;
        let ratio = (-a * (2.0 * k as f64 + 3.0)).exp();
        let bound = 2.0 / delta * (-a * next * next).exp() / (1.0 - ratio).max(f64::MIN_POSITIVE);
        if bound < eps {
            break;
        }
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    /// Independent direct sum with a fixed, generous image count.
    fn density_oracle(x: f64, delta: f64, sigma: f64) -> f64 {
        (-20..=20)
            .map(|k| {
                let z = (x + k as f64 * delta) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            })
            .sum()
    }

    fn g(delta: f64, sigma: f64) -> WrappedGaussian {
        WrappedGaussian::new(delta, sigma).unwrap()
    }

    #[test]
    fn q_tail_values() {
        assert_eq!(q_tail(0.0), 0.5);
        assert!(q_tail(40.0).abs() <= 1e-15);
        assert_eq!(q_tail(-40.0), 1.0);
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let oracle = integrate(phi, 1.25, 40.0, 1e-16).value;
        assert!((q_tail(1.25) - oracle).abs() <= 1e-15, "{} vs {oracle}", q_tail(1.25));
        assert!((q_tail(1.25) - 0.105_649_8).abs() < 5e-8);
        for &x in &[-5.0, -1.0, 0.3, 2.0, 7.5] {
            assert!((q_tail(x) + q_tail(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WrappedGaussian::new(0.0, 1.0).is_err());
        assert!(WrappedGaussian::new(1.0, -1.0).is_err());
        assert!(WrappedGaussian::new(f64::NAN, 1.0).is_err());
        assert!(WrappedGaussian::with_tail_eps(1.0, 1.0, 1e-9).is_err());
        assert!(WrappedGaussian::with_tail_eps(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn direct_examples() {
        let w = g(5.0, 1.0);
        assert!((w.density_direct(0.0) - 0.398_945_3).abs() < 5e-8);
        assert!((w.density_direct(2.5) - 0.035_056_6).abs() < 5e-8);
        for &x in &[0.0, 0.7, 1.25, 2.5, -2.5, 2.4999] {
            assert!((w.density_direct(x) - density_oracle(x, 5.0, 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn fourier_examples() {
        let w = g(5.0, 1.0);
        assert!((w.density_fourier(0.0) - 0.398_945_3).abs() < 5e-8);
        assert!((w.density_fourier(0.0) - w.density_direct(0.0)).abs() < 1e-9);
        assert!((w.density_fourier(1.25) - w.density_direct(1.25)).abs() < 1e-10);

        let flat = g(1.0, 5.0);
        for i in 0..100 {
            let x = -0.5 + i as f64 / 100.0;
            assert!((flat.density_fourier(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_orders_grow_with_ratio() {
        assert!(g(0.05, 5.0).direct_order() > g(5.0, 1.0).direct_order());
        assert!(g(10.0, 1.0).fourier_order() > g(1.0, 1.0).fourier_order());
        // Noiseless limit must not blow up either path's construction.
        let tiny = g(5.0, 1e-12);
        assert_eq!(tiny.direct_order(), 0);
        assert!(tiny.fourier_order() <= FOURIER_ORDER_CAP);
    }

    #[test]
    fn two_path_agreement_grid() {
        for &ratio in &[0.5, 1.0, 3.0, 5.0, 10.0] {
            let w = g(ratio, 1.0);
            let mut worst: f64 = 0.0;
            for i in 0..10_000 {
                let x = -ratio / 2.0 + ratio * i as f64 / 10_000.0;
                worst = worst.max((w.density_direct(x) - w.density_fourier(x)).abs());
            }
            assert!(worst <= 1e-9, "Δ/σ = {ratio}: {worst}");
        }
    }

    #[test]
    fn deviation_matches_density() {
        for &(d, s) in &[(5.0, 1.0), (1.0, 1.0), (0.5, 1.0)] {
            let w = g(d, s);
            for i in 0..100 {
                let x = -d / 2.0 + d * i as f64 / 100.0;
                assert!((w.deviation(x) + 1.0 / d - w.density(x)).abs() < 1e-13);
            }
        }
        // Flat regime: still strictly larger at the centre than at the edge.
        let w = g(0.5, 1.0);
        assert!(w.deviation(0.0) > 0.0 && w.deviation(-0.25) < 0.0);
    }

    #[test]
    fn periodic_and_even() {
        let w = g(3.0, 1.3);
        for i in 0..200 {
            let x = -7.0 + 14.0 * i as f64 / 200.0;
            let f = w.density_direct(x);
            assert!(f > 0.0);
            for k in -3..=3 {
                assert!((f - w.density_direct(x + k as f64 * 3.0)).abs() <= 1e-12);
            }
            assert!((f - w.density_direct(-x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn nonincreasing_on_half_period() {
        for &(d, s) in &[(5.0, 1.0), (1.0, 1.0), (0.5, 1.0), (10.0, 1.0)] {
            let w = g(d, s);
            let mut prev = w.deviation(0.0);
            for i in 1..=20_000 {
                let f = w.deviation(0.5 * d * i as f64 / 20_000.0);
                assert!(f <= prev + 1e-13 * prev.abs(), "Δ={d}: rises at step {i}");
                prev = f;
            }
        }
    }

    #[test]
    fn band_examples() {
        let w = g(5.0, 1.0);
        assert!((w.band_probability(-2.5, 2.5).unwrap() - 1.0).abs() < 1e-12);
        // Full wrapped sum; see the pe_uniform value for the same band.
        assert!((w.band_probability(1.25, 3.75).unwrap() - 0.211_122_713_2).abs() < 1e-9);
        assert_eq!(w.band_probability(0.3, 0.3).unwrap(), 0.0);
        assert!(w.band_probability(1.0, 0.0).is_err());
        assert!(w.band_probability(-3.0, 2.5).is_err());
        assert!(w.band_probability(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn band_normalizes_over_any_period() {
        for &(d, s) in &[(5.0, 1.0), (0.5, 1.0), (0.05, 5.0), (20.0, 1.0)] {
            let w = g(d, s);
            for i in 0..50 {
                let a = -3.0 * d + 0.137 * d * i as f64;
                let p = w.band_probability(a, a + d).unwrap();
                assert!((p - 1.0).abs() < 1e-10, "Δ={d} σ={s} a={a}: {p}");
            }
        }
    }

    #[test]
    fn band_matches_quadrature() {
        for &(d, s) in &[(5.0, 1.0), (1.0, 1.0), (3.0, 0.7)] {
            let w = g(d, s);
            for &(a, b) in &[(0.1, 0.9), (-0.5, 0.4), (0.2, 0.2 + 0.99 * d), (-d, -0.3 * d)] {
                let band = w.band_probability(a, b).unwrap();
                let quad = integrate(|x| w.density_direct(x), a, b, 1e-13).value;
                assert!((band - quad).abs() <= 1e-10, "Δ={d} [{a},{b}]: {band} vs {quad}");
            }
        }
    }

    #[test]
    fn level_sets_cross_at_most_twice() {
        for &ratio in &[0.5, 1.0, 5.0] {
            let w = g(ratio, 1.0);
            let n = 10_000;
            let vals: Vec<f64> =
                (0..n).map(|i| w.deviation(-ratio / 2.0 + ratio * i as f64 / n as f64)).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for j in 1..100 {
                let z = lo + (hi - lo) * j as f64 / 100.0;
                let changes = vals.windows(2).filter(|p| (p[0] > z) != (p[1] > z)).count();
                assert!(changes <= 2, "Δ/σ={ratio} z={z}: {changes}");
            }
        }
    }
}
