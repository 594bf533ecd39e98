//! Exact Fourier-domain solution of the strip model
//!
//! ```text
//! Δu = 0 in 0 < y < 1,   u = 0 on y = 0,   ∂_x u + (i + ε²) ∂_y u = φ on y = 1
//! ```
//!
//! whose trace spectrum is `β̂^ε(ξ) = φ̂(ξ) / D(ξ)` with
//! `D(ξ) = -iξ(1 - coth ξ) + ε² ξ coth ξ`, together with the Hadamard Cauchy
//! example and the truncated-cosh sequence.
//!
//! `D` is evaluated for `ξ > 0` and extended by `D(-ξ) = conj(D(ξ))`, which
//! makes the trace real for even real forcing. All values are carried as
//! [`LogComplex`] because `|β̂^0|` grows like `e^{2ξ}`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use num_complex::Complex64;
use thiserror::Error;

use crate::forcing::{Forcing, ForcingError};
use crate::spectral::{
    count_zero_crossings, inverse_transform, least_squares_slope, log_sum_exp, peak_and_envelope,
    FreqGrid, LogComplex, LogPolarSpectrum, Signal, SpectralError, XGrid,
};

/// Node count of the default and synthesis grids.
pub const DEFAULT_SAMPLES: usize = 1 << 14;
pub const SYNTHESIS_SAMPLES: usize = 1 << 15;
/// Largest `λ` for which `e^λ` is safely representable.
pub const COSH_LAMBDA_MAX: f64 = 700.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StripError {
    #[error("D(ξ) is singular at ξ = 0 when ε = 0")]
    SingularPoint,
    #[error("epsilon must be finite and nonnegative, got {0}")]
    BadEpsilon(f64),
    #[error("epsilon {0} is outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("y = {0} is outside [0, 1]")]
    YOutOfRange(f64),
    #[error("y = {0} must be nonnegative")]
    NegativeY(f64),
    #[error("non-finite input {0}")]
    NonFinite(&'static str),
    #[error("forcing vanishes on the grid, no peak")]
    NoPeak,
    #[error("spectral peak at ξ = {peak_xi} is outside the grid interior (xi_max = {xi_max})")]
    PeakOutsideGrid { peak_xi: f64, xi_max: f64 },
    #[error("forcing vanishes at the balance frequency {0}")]
    ForcingVanishesAtBalance(f64),
    #[error("ε = 0 synthesis needs an explicit frequency cutoff")]
    CutoffRequired,
    #[error("lambda = {0} must lie in (0, {COSH_LAMBDA_MAX}]")]
    LambdaOutOfRange(f64),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Strip problem for one `ε` and forcing, discretised on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StripProblem {
    pub epsilon: f64,
    pub phi_hat: Forcing,
    pub grid: FreqGrid,
}

/// `4 + 2 ln(√2/ε)`, never below 4.
pub fn default_xi_max(epsilon: f64) -> f64 {
    4.0 + 2.0 * balance_frequency(epsilon).max(0.0)
}

/// Wider band used before inverse transforms: the sharp spectral edge of the
/// default grid rings into the trace and corrupts zero-crossing counts.
pub fn synthesis_xi_max(epsilon: f64) -> f64 {
    4.0 + 8.0 * balance_frequency(epsilon).max(0.0)
}

impl StripProblem {
    /// Problem on the default grid. `ε = 0` has no default grid; use
    /// [`StripProblem::with_grid`].
    pub fn new(epsilon: f64, phi_hat: Forcing) -> Result<Self, StripError> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(if epsilon == 0.0 {
                StripError::CutoffRequired
            } else {
                StripError::BadEpsilon(epsilon)
            });
        }
        let grid = FreqGrid::new(default_xi_max(epsilon), DEFAULT_SAMPLES)?;
        Self::with_grid(epsilon, phi_hat, grid)
    }

    pub fn with_grid(epsilon: f64, phi_hat: Forcing, grid: FreqGrid) -> Result<Self, StripError> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(StripError::BadEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            phi_hat: phi_hat.validated()?,
            grid,
        })
    }
}

/// `D(ξ)` in log-polar form.
pub fn denominator(epsilon: f64, xi: f64) -> Result<LogComplex, StripError> {
    if !xi.is_finite() {
        return Err(StripError::NonFinite("xi"));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(StripError::BadEpsilon(epsilon));
    }
    let a = xi.abs();
    let e2 = epsilon * epsilon;
    let (log_mod, arg) = if a == 0.0 {
        if epsilon == 0.0 {
            return Err(StripError::SingularPoint);
        }
        // Limit of ξ coth ξ and ξ(coth ξ - 1) at the origin: both -> 1.
        (0.5 * (e2 * e2).ln_1p(), 1f64.atan2(e2))
    } else {
        // With t = e^{-2ξ}: D = ξ (ε²(1 + t) + 2 i t) / (1 - t).
        let t = (-2.0 * a).exp();
        let log_one_minus_t = (-(-2.0 * a).exp_m1()).ln();
        let log_imag = LN_2 - 2.0 * a;
        if epsilon == 0.0 {
            (a.ln() - log_one_minus_t + log_imag, PI / 2.0)
        } else {
            let log_real = e2.ln() + t.ln_1p();
            let log_abs = 0.5 * log_sum_exp([2.0 * log_real, 2.0 * log_imag]);
            (
                a.ln() - log_one_minus_t + log_abs,
                (2.0 * t).atan2(e2 * (1.0 + t)),
            )
        }
    };
    let arg = if xi < 0.0 { -arg } else { arg };
    Ok(LogComplex::new(log_mod, arg))
}

/// `β̂^ε(ξ) = φ̂(ξ) / D(ξ)`.
pub fn beta_hat(p: &StripProblem, xi: f64) -> Result<LogComplex, StripError> {
    let d = denominator(p.epsilon, xi)?;
    let lphi = p.phi_hat.log_eval(xi);
    if lphi.is_nan() {
        return Err(StripError::NonFinite("forcing"));
    }
    Ok(LogComplex::new(lphi, 0.0) / d)
}

/// `ln(sinh(|ξ| y) / sinh|ξ|)`; equals `ln y` at `ξ = 0`.
fn log_sinh_ratio(xi: f64, y: f64) -> f64 {
    let a = xi.abs();
    if y == 0.0 {
        return f64::NEG_INFINITY;
    }
    if a == 0.0 {
        return y.ln();
    }
    -a * (1.0 - y) + (-(-2.0 * a * y).exp_m1()).ln() - (-(-2.0 * a).exp_m1()).ln()
}

/// `û(ξ, y) = β̂^ε(ξ) sinh(ξ y) / sinh ξ`.
pub fn u_hat_field(p: &StripProblem, xi: f64, y: f64) -> Result<LogComplex, StripError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(StripError::YOutOfRange(y));
    }
    let b = beta_hat(p, xi)?;
    Ok(b.scale_log(log_sinh_ratio(xi, y)))
}

/// `ln(√2/ε)`, the frequency where `2e^{-2ξ} = ε²`, with no range check.
pub fn balance_frequency(epsilon: f64) -> f64 {
    (SQRT_2 / epsilon).ln()
}

/// Predicted spectral peak `ln(√2/ε)` for `0 < ε < 1`.
pub fn predicted_peak(epsilon: f64) -> Result<f64, StripError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(StripError::EpsilonOutOfRange(epsilon));
    }
    Ok(balance_frequency(epsilon))
}

/// `β̂^ε` sampled on the problem grid.
pub fn trace_spectrum(p: &StripProblem) -> Result<LogPolarSpectrum, StripError> {
    spectrum_at(p, 1.0)
}

/// `û(·, y)` sampled on the problem grid.
pub fn spectrum_at(p: &StripProblem, y: f64) -> Result<LogPolarSpectrum, StripError> {
    let values = p
        .grid
        .nodes()
        .into_iter()
        .map(|xi| u_hat_field(p, xi, y))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LogPolarSpectrum::new(p.grid.clone(), values)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceAsymptotics {
    pub epsilon: f64,
    /// Grid argmax of `|β̂^ε|` over `ξ > 0`.
    pub peak_xi: f64,
    /// `ln(√2/ε)`.
    pub balance_xi: f64,
    /// `√2 ε² ξ* |β̂(ξ*)| / φ̂(ξ*)` at the balance frequency `ξ*`.
    pub compensated_amp: f64,
    /// Same ratio evaluated at `peak_xi`.
    pub compensated_amp_at_peak: f64,
}

fn compensated(p: &StripProblem, xi: f64) -> Result<f64, StripError> {
    let phi = p.phi_hat.eval(xi);
    if phi == 0.0 {
        return Err(StripError::ForcingVanishesAtBalance(xi));
    }
    let b = beta_hat(p, xi)?;
    Ok(SQRT_2 * p.epsilon * p.epsilon * xi * (b.log_mod - phi.ln()).exp())
}

/// Peak location and compensated amplitude of the trace spectrum.
pub fn trace_asymptotics(p: &StripProblem) -> Result<TraceAsymptotics, StripError> {
    let balance_xi = predicted_peak(p.epsilon)?;
    let spec = trace_spectrum(p)?;
    let peak = match peak_and_envelope(&spec) {
        Ok(pk) => pk,
        Err(SpectralError::AllZero) => return Err(StripError::NoPeak),
        Err(e) => return Err(e.into()),
    };
    if peak.at_grid_edge || balance_xi >= p.grid.xi_max() {
        return Err(StripError::PeakOutsideGrid {
            peak_xi: peak.peak_xi,
            xi_max: p.grid.xi_max(),
        });
    }
    Ok(TraceAsymptotics {
        epsilon: p.epsilon,
        peak_xi: peak.peak_xi,
        balance_xi,
        compensated_amp: compensated(p, balance_xi)?,
        compensated_amp_at_peak: compensated(p, peak.peak_xi)?,
    })
}

/// Regression slope of `peak_xi` against `ln(1/ε)`.
pub fn peak_law_slope(records: &[TraceAsymptotics]) -> Option<f64> {
    let xs: Vec<f64> = records.iter().map(|r| (1.0 / r.epsilon).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.peak_xi).collect();
    least_squares_slope(&xs, &ys)
}

/// What a synthesized signal represents.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceProvenance {
    Regular {
        epsilon: f64,
        y: f64,
        forcing: Forcing,
    },
    /// `ε = 0` has no tempered limit; the signal is a band-limited truncation.
    Truncated {
        y: f64,
        forcing: Forcing,
        xi_cutoff: f64,
    },
}

impl TraceProvenance {
    pub fn label(&self) -> String {
        match self {
            TraceProvenance::Regular {
                epsilon,
                y,
                forcing,
            } => {
                format!("strip field at y = {y}, epsilon = {epsilon}, forcing {forcing}")
            }
            TraceProvenance::Truncated {
                y,
                forcing,
                xi_cutoff,
            } => format!(
                "truncated representation of a non-distributional limit \
                 (epsilon = 0, y = {y}, forcing {forcing}, |xi| <= {xi_cutoff})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSignal {
    pub signal: Signal,
    pub provenance: TraceProvenance,
}

/// Inverse transform of `û(·, y)` on `x`.
///
/// For `ε > 0` the band is `[-synthesis_xi_max(ε), synthesis_xi_max(ε)]`.
/// For `ε = 0` a cutoff is mandatory and the result is labelled truncated.
pub fn synthesize_trace(
    epsilon: f64,
    forcing: Forcing,
    y: f64,
    x: &XGrid,
    xi_cutoff: Option<f64>,
) -> Result<TraceSignal, StripError> {
    let xi_max = match (epsilon, xi_cutoff) {
        (e, Some(c)) if e >= 0.0 => c,
        (e, None) if e > 0.0 => synthesis_xi_max(e),
        (0.0, None) => return Err(StripError::CutoffRequired),
        (e, _) => return Err(StripError::BadEpsilon(e)),
    };
    let grid = FreqGrid::new(xi_max, SYNTHESIS_SAMPLES)?;
    let p = StripProblem::with_grid(epsilon, forcing, grid)?;
    let spec = spectrum_at(&p, y)?;
    let signal = inverse_transform(&p.grid, &spec.to_complex(), x)?;
    let provenance = if epsilon == 0.0 {
        TraceProvenance::Truncated {
            y,
            forcing: p.phi_hat,
            xi_cutoff: xi_max,
        }
    } else {
        TraceProvenance::Regular {
            epsilon,
            y,
            forcing: p.phi_hat,
        }
    };
    Ok(TraceSignal { signal, provenance })
}

/// One row of an `ε` sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSweepRecord {
    pub asymptotics: TraceAsymptotics,
    pub zero_crossings: usize,
    pub log10_max_amp: f64,
    /// `max |Im u| / max |u|` of the synthesized trace.
    pub trace_imag_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripSweepSpec {
    /// Forcing used for the spectral peak and compensated amplitude.
    pub forcing: Forcing,
    /// Forcing used for the synthesized trace.
    pub trace_forcing: Forcing,
    pub window: (f64, f64),
    pub x_samples: usize,
}

impl Default for StripSweepSpec {
    fn default() -> Self {
        Self {
            forcing: Forcing::BandFlat {
                xi_lo: 0.5,
                xi_hi: 1000.0,
            },
            trace_forcing: Forcing::Rational,
            window: (0.0, 4.0),
            x_samples: 401,
        }
    }
}

pub fn strip_sweep_point(
    epsilon: f64,
    spec: &StripSweepSpec,
) -> Result<StripSweepRecord, StripError> {
    let p = StripProblem::new(epsilon, spec.forcing)?;
    let asymptotics = trace_asymptotics(&p)?;
    let x = XGrid::new(spec.window.0, spec.window.1, spec.x_samples)?;
    let trace = synthesize_trace(epsilon, spec.trace_forcing, 1.0, &x, None)?;
    let zero_crossings = count_zero_crossings(&trace.signal, spec.window.0, spec.window.1)?;
    let max_re = trace
        .signal
        .values
        .iter()
        .map(|z| z.re.abs())
        .fold(0.0, f64::max);
    Ok(StripSweepRecord {
        asymptotics,
        zero_crossings,
        log10_max_amp: max_re.log10(),
        trace_imag_ratio: trace.signal.relative_imag(),
    })
}

/// `ψ̂(ξ) cosh(ξ y)` in log-polar form.
pub fn hadamard_field(psi_hat: &Forcing, xi: f64, y: f64) -> Result<LogComplex, StripError> {
    if !(xi.is_finite() && y.is_finite()) {
        return Err(StripError::NonFinite("xi or y"));
    }
    if y < 0.0 {
        return Err(StripError::NegativeY(y));
    }
    let psi = psi_hat.validated()?.log_eval(xi);
    let a = (xi * y).abs();
    // ln cosh a = a - ln 2 + ln(1 + e^{-2a}).
    let log_cosh = a - LN_2 + (-2.0 * a).exp().ln_1p();
    Ok(LogComplex::new(psi, 0.0).scale_log(log_cosh))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemperednessReport {
    /// `|ψ̂(ξ)| e^{|ξ| y}` stays bounded as `|ξ| -> ∞`.
    pub tempered: bool,
    /// `d/dξ ln|ψ̂(ξ) cosh(ξ y)|` at the grid edge, by a one-sided difference.
    pub edge_log_slope: f64,
}

pub fn hadamard_temperedness(
    psi_hat: &Forcing,
    y: f64,
    grid: &FreqGrid,
) -> Result<TemperednessReport, StripError> {
    let top = grid.node(grid.len() - 1);
    let prev = grid.node(grid.len() - 2);
    let a = hadamard_field(psi_hat, top, y)?.log_mod;
    let b = hadamard_field(psi_hat, prev, y)?.log_mod;
    let edge_log_slope = if a.is_finite() && b.is_finite() {
        (a - b) / (top - prev)
    } else {
        f64::NEG_INFINITY
    };
    Ok(TemperednessReport {
        tempered: psi_hat.tempered_against_exp(y),
        edge_log_slope,
    })
}

/// `ln ‖v(·, y)‖_{L²}` for the field truncated to `|ξ| <= λ`, by Parseval and
/// a log-space trapezoid rule on `n` nodes.
pub fn hadamard_truncated_log_norm(
    psi_hat: &Forcing,
    y: f64,
    lambda: f64,
    n: usize,
) -> Result<f64, StripError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(StripError::LambdaOutOfRange(lambda));
    }
    let grid = FreqGrid::new(lambda, n)?;
    let terms = (0..grid.len())
        .map(|k| {
            let v = hadamard_field(psi_hat, grid.node(k), y)?;
            Ok(2.0 * v.log_mod + grid.weight(k).ln())
        })
        .collect::<Result<Vec<_>, StripError>>()?;
    Ok(0.5 * (log_sum_exp(terms) - (2.0 * PI).ln()))
}

/// Slope of the truncated log-norm against `λ`.
pub fn hadamard_growth_slope(
    psi_hat: &Forcing,
    y: f64,
    lambdas: &[f64],
    n: usize,
) -> Result<(Vec<f64>, Option<f64>), StripError> {
    let norms = lambdas
        .iter()
        .map(|&l| hadamard_truncated_log_norm(psi_hat, y, l, n))
        .collect::<Result<Vec<_>, _>>()?;
    let slope = least_squares_slope(lambdas, &norms);
    Ok((norms, slope))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoshSample {
    pub exact: Complex64,
    /// `(e^λ / 2π)(cos λx + x sin λx) / (1 + x²)`.
    pub leading_approx: f64,
}

fn check_lambda(lambda: f64) -> Result<(), StripError> {
    if !(lambda > 0.0 && lambda <= COSH_LAMBDA_MAX) {
        return Err(StripError::LambdaOutOfRange(lambda));
    }
    Ok(())
}

/// `(1/2π) ∫_{-λ}^{λ} cosh ξ e^{i x ξ} dξ` in closed form, with its leading
/// large-`λ` approximation.
pub fn cosh_sequence(lambda: f64, x: f64) -> Result<CoshSample, StripError> {
    check_lambda(lambda)?;
    if !x.is_finite() {
        return Err(StripError::NonFinite("x"));
    }
    let c = Complex64::new(1.0, x);
    let d = Complex64::new(-1.0, x);
    let exact = ((c * lambda).sinh() / c + (d * lambda).sinh() / d) / (2.0 * PI);
    let (s, co) = (lambda * x).sin_cos();
    let leading_approx = lambda.exp() / (2.0 * PI) * (co + x * s) / (1.0 + x * x);
    Ok(CoshSample {
        exact,
        leading_approx,
    })
}

/// Quadrature of the same integral on an `n`-node grid over `[-λ, λ]`.
pub fn cosh_numeric(lambda: f64, x: &XGrid, n: usize) -> Result<Signal, StripError> {
    check_lambda(lambda)?;
    let grid = FreqGrid::new(lambda, n)?;
    let spec: Vec<Complex64> = grid
        .nodes()
        .into_iter()
        .map(|xi| Complex64::new(xi.cosh(), 0.0))
        .collect();
    Ok(inverse_transform(&grid, &spec, x)?)
}
