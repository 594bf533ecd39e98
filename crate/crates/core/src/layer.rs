//! Boundary-layer corrector near the inner boundary and the energy identities
//! that define the tangential symbols `P` and `Q`.
//!
//! Everything is per tangential frequency `ξ1`: profiles in the normal
//! variable `y2 >= 0` are sums of `poly(y2) e^{r y2}` ([`ExpPoly`]), which are
//! differentiated exactly and integrated numerically on `[0, ∞)`.

use std::sync::OnceLock;

use gauss_quad::GaussLaguerre;
use num_complex::Complex64;
use thiserror::Error;

/// Relative agreement required between the two quadrature orders.
pub const QUADRATURE_TOL: f64 = 1e-10;
const LOW_ORDER: usize = 32;
const HIGH_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayerError {
    #[error("y2 = {0} must be nonnegative")]
    NegativeY(f64),
    #[error("xi1 must be nonzero")]
    ZeroFrequency,
    #[error("non-finite input {0}")]
    NonFinite(&'static str),
    #[error("cutoff needs xi_low > 0 and ramp_width > 0, got ({xi_low}, {ramp_width})")]
    BadCutoff { xi_low: f64, ramp_width: f64 },
    #[error("quadrature did not converge: orders disagree by {rel_diff:e}")]
    QuadratureNotConverged { rel_diff: f64 },
}

/// Smooth monotone frequency cutoff: zero for `|ξ| <= xi_low`, one for
/// `|ξ| >= xi_low + ramp_width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSpec {
    xi_low: f64,
    ramp_width: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            xi_low: 2.0,
            ramp_width: 2.0,
        }
    }
}

impl CutoffSpec {
    pub fn new(xi_low: f64, ramp_width: f64) -> Result<Self, LayerError> {
        if !(xi_low.is_finite() && ramp_width.is_finite() && xi_low > 0.0 && ramp_width > 0.0) {
            return Err(LayerError::BadCutoff { xi_low, ramp_width });
        }
        Ok(Self { xi_low, ramp_width })
    }

    pub fn xi_low(&self) -> f64 {
        self.xi_low
    }

    pub fn ramp_width(&self) -> f64 {
        self.ramp_width
    }

    /// `ψ(t) / (ψ(t) + ψ(1 - t))` with `ψ(t) = e^{-1/t}`, a C∞ step.
    pub fn h(&self, xi: f64) -> f64 {
        let t = (xi.abs() - self.xi_low) / self.ramp_width;
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// `Σ_i p_i(y) e^{r_i y}` with real polynomial coefficients in ascending order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    pub terms: Vec<(Vec<f64>, f64)>,
}

impl ExpPoly {
    pub fn term(poly: Vec<f64>, rate: f64) -> Self {
        Self {
            terms: vec![(poly, rate)],
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(p, r)| {
                let poly = p.iter().rev().fold(0.0, |acc, c| acc * y + c);
                if poly == 0.0 {
                    0.0
                } else {
                    poly * (r * y).exp()
                }
            })
            .sum()
    }

    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(p, r)| {
                let mut d: Vec<f64> = p.iter().map(|c| c * r).collect();
                for (k, c) in p.iter().enumerate().skip(1) {
                    d[k - 1] += k as f64 * c;
                }
                (d, *r)
            })
            .collect();
        Self { terms }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derivative())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(p, r)| (p.iter().map(|c| c * s).collect(), *r))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    /// `(∂² - ξ²)` applied to the profile.
    pub fn apply_mode_operator(&self, xi: f64) -> Self {
        self.nth_derivative(2).add(&self.scale(-xi * xi))
    }
}

/// Corrector profile `-y2 e^{-|ξ1| y2} h(ξ1)`.
pub fn corrector_profile(xi1: f64, cutoff: &CutoffSpec) -> ExpPoly {
    ExpPoly::term(vec![0.0, -cutoff.h(xi1)], -xi1.abs())
}

pub fn corrector_symbol(xi1: f64, y2: f64, cutoff: &CutoffSpec) -> Result<f64, LayerError> {
    if y2.is_nan() || xi1.is_nan() {
        return Err(LayerError::NonFinite("xi1 or y2"));
    }
    if y2 < 0.0 {
        return Err(LayerError::NegativeY(y2));
    }
    Ok(-y2 * (-xi1.abs() * y2).exp() * cutoff.h(xi1))
}

/// `sinh(|ξ1| y2)/|ξ1| - y2 e^{-|ξ1| y2}` as an exponential polynomial.
pub fn corrected_mode_profile(xi1: f64) -> ExpPoly {
    let a = xi1.abs();
    if a == 0.0 {
        return ExpPoly::default();
    }
    let half = 0.5 / a;
    ExpPoly {
        terms: vec![(vec![half], a), (vec![-half, -1.0], -a)],
    }
}

/// `g (sinh(|ξ1| y2)/|ξ1| - y2 e^{-|ξ1| y2})`; the value and first
/// `y2`-derivative vanish at `y2 = 0`.
pub fn corrected_mode(xi1: f64, y2: f64, g: Complex64) -> Complex64 {
    let a = xi1.abs();
    if a == 0.0 || g == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    // sinh(a y)/a = y e^{a y} (1 - e^{-2 a y}) / (2 a y), written with expm1.
    let s = if y2 == 0.0 {
        0.0
    } else {
        -(-2.0 * a * y2).exp_m1() * (a * y2).exp() / (2.0 * a)
    };
    g * (s - y2 * (-a * y2).exp())
}

fn laguerre(order: usize) -> &'static GaussLaguerre {
    static LOW: OnceLock<GaussLaguerre> = OnceLock::new();
    static HIGH: OnceLock<GaussLaguerre> = OnceLock::new();
    let cell = if order == LOW_ORDER { &LOW } else { &HIGH };
    cell.get_or_init(|| {
        GaussLaguerre::new(
            order.try_into().expect("nonzero order"),
            0.0.try_into().expect("alpha = 0 is valid"),
        )
    })
}

/// `∫_0^∞ f(y) dy` for integrands decaying like `e^{-rate y}`, by
/// Gauss–Laguerre after `y = s / rate`. Two orders must agree.
pub fn half_line_integral<F: Fn(f64) -> f64>(rate: f64, f: F) -> Result<f64, LayerError> {
    let g = |s: f64| f(s / rate) * s.exp() / rate;
    let lo = laguerre(LOW_ORDER).integrate(g);
    let hi = laguerre(HIGH_ORDER).integrate(g);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(LayerError::QuadratureNotConverged {
            rel_diff: f64::INFINITY,
        });
    }
    let scale = hi.abs().max(f64::MIN_POSITIVE);
    let rel_diff = (hi - lo).abs() / scale;
    if hi != 0.0 && rel_diff > QUADRATURE_TOL {
        return Err(LayerError::QuadratureNotConverged { rel_diff });
    }
    Ok(hi)
}

/// `∫_0^∞ |(∂² - ξ1²)(δσ g)|² dy2`.
pub fn a_energy_density(xi1: f64, g: Complex64, cutoff: &CutoffSpec) -> Result<f64, LayerError> {
    if !(xi1.is_finite() && g.re.is_finite() && g.im.is_finite()) {
        return Err(LayerError::NonFinite("xi1 or g"));
    }
    if xi1 == 0.0 || cutoff.h(xi1) == 0.0 || g.norm_sqr() == 0.0 {
        return Ok(0.0);
    }
    let l = corrector_profile(xi1, cutoff).apply_mode_operator(xi1);
    let integral = half_line_integral(2.0 * xi1.abs(), |y| l.eval(y).powi(2))?;
    Ok(g.norm_sqr() * integral)
}

/// `∫_0^∞ (ξ1⁴|ŵ|² + 2ξ1²|∂ŵ|² + |∂²ŵ|²) dy2` for `ŵ = w e^{-|ξ1| y2}`.
pub fn b_energy_density(xi1: f64, w: Complex64) -> Result<f64, LayerError> {
    if !(xi1.is_finite() && w.re.is_finite() && w.im.is_finite()) {
        return Err(LayerError::NonFinite("xi1 or w"));
    }
    if xi1 == 0.0 {
        return Err(LayerError::ZeroFrequency);
    }
    if w.norm_sqr() == 0.0 {
        return Ok(0.0);
    }
    let f0 = ExpPoly::term(vec![1.0], -xi1.abs());
    let f1 = f0.derivative();
    let f2 = f1.derivative();
    let x2 = xi1 * xi1;
    let integral = half_line_integral(2.0 * xi1.abs(), |y| {
        x2 * x2 * f0.eval(y).powi(2) + 2.0 * x2 * f1.eval(y).powi(2) + f2.eval(y).powi(2)
    })?;
    Ok(w.norm_sqr() * integral)
}

/// `(2|ξ1|)^{1/2} h(ξ1)`.
pub fn p_symbol(xi1: f64, cutoff: &CutoffSpec) -> f64 {
    (2.0 * xi1.abs()).sqrt() * cutoff.h(xi1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QVariant {
    /// `√2 |ξ1|^{3/2}`.
    Homogeneous,
    /// `√2 (1 + ξ1²)^{3/4}`.
    Regularized,
}

pub fn q_symbol(xi1: f64, variant: QVariant) -> f64 {
    match variant {
        QVariant::Homogeneous => std::f64::consts::SQRT_2 * xi1.abs().powf(1.5),
        QVariant::Regularized => std::f64::consts::SQRT_2 * (1.0 + xi1 * xi1).powf(0.75),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Corrector,
    P,
    Q(QVariant),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerSymbol {
    pub kind: SymbolKind,
    pub cutoff: CutoffSpec,
}

impl LayerSymbol {
    /// `y2` is only used by the corrector.
    pub fn eval(&self, xi1: f64, y2: f64) -> Result<f64, LayerError> {
        match self.kind {
            SymbolKind::Corrector => corrector_symbol(xi1, y2, &self.cutoff),
            SymbolKind::P => Ok(p_symbol(xi1, &self.cutoff)),
            SymbolKind::Q(v) => Ok(q_symbol(xi1, v)),
        }
    }
}

/// One row of the energy-identity table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerCheck {
    pub xi1: f64,
    pub a_density: f64,
    pub p_squared: f64,
    pub b_density: f64,
    pub q_squared: f64,
    pub rel_err_a: f64,
    pub rel_err_b: f64,
}

/// Compares both densities (unit data) with the squared symbols at `xi1`.
pub fn verify_identities(xi1: f64, cutoff: &CutoffSpec) -> Result<LayerCheck, LayerError> {
    let one = Complex64::new(1.0, 0.0);
    let a_density = a_energy_density(xi1, one, cutoff)?;
    let p_squared = p_symbol(xi1, cutoff).powi(2);
    let b_density = b_energy_density(xi1, one)?;
    let q_squared = q_symbol(xi1, QVariant::Homogeneous).powi(2);
    let rel = |got: f64, want: f64| {
        if want == 0.0 {
            got.abs()
        } else {
            ((got - want) / want).abs()
        }
    };
    Ok(LayerCheck {
        xi1,
        a_density,
        p_squared,
        b_density,
        q_squared,
        rel_err_a: rel(a_density, p_squared),
        rel_err_b: rel(b_density, q_squared),
    })
}
