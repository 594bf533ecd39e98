//! Even, real, nonnegative forcing profiles `φ̂(ξ)` shared by the strip,
//! Hadamard and annulus drivers.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid forcing: {0}")]
pub struct ForcingError(pub String);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Forcing {
    /// Indicator of `xi_lo <= |ξ| < xi_hi`.
    BandFlat { xi_lo: f64, xi_hi: f64 },
    /// `1 / (1 + ξ²)`.
    Rational,
    /// `exp(-(ξ/σ)²)`.
    Gaussian { sigma: f64 },
}

impl Forcing {
    pub fn band_flat(xi_lo: f64, xi_hi: f64) -> Result<Self, ForcingError> {
        Self::BandFlat { xi_lo, xi_hi }.validated()
    }

    pub fn gaussian(sigma: f64) -> Result<Self, ForcingError> {
        Self::Gaussian { sigma }.validated()
    }

    pub fn validated(self) -> Result<Self, ForcingError> {
        match self {
            Forcing::BandFlat { xi_lo, xi_hi } => {
                if !(xi_lo.is_finite() && xi_lo >= 0.0 && !xi_hi.is_nan() && xi_hi >= xi_lo) {
                    return Err(ForcingError(format!(
                        "band needs 0 <= xi_lo <= xi_hi, got [{xi_lo}, {xi_hi})"
                    )));
                }
            }
            Forcing::Rational => {}
            Forcing::Gaussian { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(ForcingError(format!("sigma must be positive, got {sigma}")));
                }
            }
        }
        Ok(self)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let a = xi.abs();
        match *self {
            Forcing::BandFlat { xi_lo, xi_hi } => {
                if a >= xi_lo && a < xi_hi {
                    1.0
                } else {
                    0.0
                }
            }
            Forcing::Rational => 1.0 / (1.0 + xi * xi),
            Forcing::Gaussian { sigma } => (-(xi / sigma).powi(2)).exp(),
        }
    }

    /// `ln φ̂(ξ)`, `-inf` where the profile vanishes.
    pub fn log_eval(&self, xi: f64) -> f64 {
        match *self {
            Forcing::Rational => -(xi * xi).ln_1p(),
            Forcing::Gaussian { sigma } => -(xi / sigma).powi(2),
            Forcing::BandFlat { .. } => {
                if self.eval(xi) > 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Whether `φ̂(ξ) e^{|ξ| y}` stays bounded as `|ξ| -> ∞`.
    pub fn tempered_against_exp(&self, y: f64) -> bool {
        match *self {
            Forcing::BandFlat { xi_hi, .. } => xi_hi.is_finite() || y <= 0.0,
            Forcing::Gaussian { .. } => true,
            Forcing::Rational => y <= 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Forcing::BandFlat { .. } => "band_flat",
            Forcing::Rational => "rational",
            Forcing::Gaussian { .. } => "gaussian",
        }
    }
}

impl fmt::Display for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::BandFlat { xi_lo, xi_hi } => write!(f, "band_flat[{xi_lo}, {xi_hi})"),
            Forcing::Rational => f.write_str("rational"),
            Forcing::Gaussian { sigma } => write!(f, "gaussian(sigma={sigma})"),
        }
    }
}
