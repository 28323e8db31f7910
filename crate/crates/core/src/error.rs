use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} is not finite")]
    NonFinite { value: f64 },

    #[error("sample {value} lies outside the fundamental interval [{lo}, {hi})")]
    OutsideInterval { value: f64, lo: f64, hi: f64 },

    #[error("band [{a}, {b}] is ill-posed: {reason}")]
    InvalidBand { a: f64, b: f64, reason: &'static str },

    #[error("empty input sequence")]
    EmptyInput,

    #[error("symbols must be distinct (h0 = h1 = {0})")]
    CoincidentSymbols(f64),

    #[error("closed-form MAP thresholds need h1 - h0 = ±Δ/2, got separation {separation} for Δ = {delta}")]
    UnsupportedConstellation { separation: f64, delta: f64 },

    #[error("ML error probability {pe} is too close to 1/2 to invert")]
    IllConditioned { pe: f64 },

    #[error("bisection bracket invalid: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {v}"),
        })
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must lie in [0, 1], got {p}"),
        })
    }
}
