//! Frequency grids, log-polar spectra, quadrature inverse Fourier transform and
//! oscillation diagnostics.
//!
//! Transform convention: `u(x) = (1/2π) ∫ û(ξ) e^{i x ξ} dξ`.

use std::f64::consts::{LN_10, PI};
use std::io::Write;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid needs an even number of nodes >= 2, got {0}")]
    BadNodeCount(usize),
    #[error("grid half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("spectrum has {got} samples but the grid has {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("spectrum sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("x spacing {dx} exceeds the Nyquist limit {limit} for this frequency band")]
    CoarseXGrid { dx: f64, limit: f64 },
    #[error("window [{0}, {1}] is empty or outside the signal")]
    EmptyWindow(f64, f64),
    #[error("spectrum vanishes identically")]
    AllZero,
    #[error("invalid x grid: {0}")]
    BadXGrid(String),
}

/// Complex number stored as `(ln |z|, arg z)` so values far outside the `f64`
/// range stay representable. Zero is `log_mod = -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    pub log_mod: f64,
    /// In `(-π, π]`.
    pub phase: f64,
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mod: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub fn new(log_mod: f64, phase: f64) -> Self {
        if log_mod == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_mod,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.norm() == 0.0 {
            return Self::ZERO;
        }
        Self::new(z.norm().ln(), z.arg())
    }

    /// Positive real `x` (zero allowed).
    pub fn from_positive(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(x.ln(), 0.0)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mod == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mod.exp(), self.phase)
    }

    pub fn modulus(self) -> f64 {
        self.log_mod.exp()
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_mod, -self.phase)
    }

    pub fn scale_log(self, shift: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.log_mod + shift, self.phase)
    }
}

/// Uniform symmetric grid on `[-xi_max, xi_max]`. With an even node count
/// the origin is never a node.
impl Mul for LogComplex {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mod + other.log_mod, self.phase + other.phase)
    }
}

impl Div for LogComplex {
    type Output = Self;
    fn div(self, other: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mod - other.log_mod, self.phase - other.phase)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreqGrid {
    xi_max: f64,
    n: usize,
}

impl FreqGrid {
    pub fn new(xi_max: f64, n: usize) -> Result<Self, SpectralError> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(SpectralError::BadNodeCount(n));
        }
        if !(xi_max.is_finite() && xi_max > 0.0) {
            return Err(SpectralError::BadHalfWidth(xi_max));
        }
        Ok(Self { xi_max, n })
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.xi_max / (self.n - 1) as f64
    }

    /// Node `k`, computed so that node `k` and node `n-1-k` are exact negatives.
    pub fn node(&self, k: usize) -> f64 {
        let m = (self.n - 1) as f64;
        self.xi_max * (2.0 * k as f64 - m) / m
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    /// Trapezoid weight of node `k`.
    pub fn weight(&self, k: usize) -> f64 {
        let h = self.spacing();
        if k == 0 || k == self.n - 1 {
            0.5 * h
        } else {
            h
        }
    }
}

/// Uniform grid of `n` points from `start` to `end` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct XGrid {
    start: f64,
    end: f64,
    n: usize,
}

impl XGrid {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self, SpectralError> {
        if !(start.is_finite() && end.is_finite()) || n < 2 || end <= start {
            return Err(SpectralError::BadXGrid(format!(
                "need finite start < end and n >= 2, got [{start}, {end}] with n = {n}"
            )));
        }
        Ok(Self { start, end, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.end - self.start) / (self.n - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        let t = k as f64 / (self.n - 1) as f64;
        self.start + (self.end - self.start) * t
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogPolarSpectrum {
    pub grid: FreqGrid,
    pub values: Vec<LogComplex>,
}

impl LogPolarSpectrum {
    pub fn new(grid: FreqGrid, values: Vec<LogComplex>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                got: values.len(),
                want: grid.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| v.log_mod.is_nan() || v.log_mod == f64::INFINITY || !v.phase.is_finite())
        {
            return Err(SpectralError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| v.to_complex()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub x: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Signal {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|Im| / max|u|`, zero for the zero signal.
    pub fn relative_imag(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / m
    }
}

/// Trapezoid quadrature of `(1/2π) ∫ û(ξ) e^{i x ξ} dξ` on the grid.
///
/// Each `x` is summed in ascending `ξ`, so results do not depend on the
/// thread count.
pub fn inverse_transform(
    grid: &FreqGrid,
    spectrum: &[Complex64],
    x: &XGrid,
) -> Result<Signal, SpectralError> {
    if spectrum.len() != grid.len() {
        return Err(SpectralError::LengthMismatch {
            got: spectrum.len(),
            want: grid.len(),
        });
    }
    if let Some(index) = spectrum
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(SpectralError::NonFinite { index });
    }
    let limit = PI / grid.xi_max();
    if x.spacing() > limit * (1.0 + 1e-12) {
        return Err(SpectralError::CoarseXGrid {
            dx: x.spacing(),
            limit,
        });
    }
    let weighted: Vec<(f64, Complex64)> = (0..grid.len())
        .map(|k| (grid.node(k), spectrum[k] * grid.weight(k)))
        .collect();
    let xs = x.nodes();
    let values = xs
        .par_iter()
        .map(|&xv| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(xi, w) in &weighted {
                let (s, c) = (xv * xi).sin_cos();
                acc += w * Complex64::new(c, s);
            }
            acc / (2.0 * PI)
        })
        .collect();
    Ok(Signal { x: xs, values })
}

/// Counts sign changes of `Re u` on `[a, b]`, ignoring wiggles below
/// `1e-3 * max |Re u|` on the window: a crossing is registered only between
/// consecutive excursions that exceed the threshold with opposite signs.
pub fn count_zero_crossings(sig: &Signal, a: f64, b: f64) -> Result<usize, SpectralError> {
    let first = *sig.x.first().ok_or(SpectralError::EmptyWindow(a, b))?;
    let last = *sig.x.last().unwrap();
    let slack = 1e-9 * (last - first).abs().max(1.0);
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) || a < first - slack || b > last + slack
    {
        return Err(SpectralError::EmptyWindow(a, b));
    }
    let window: Vec<f64> = sig
        .x
        .iter()
        .zip(&sig.values)
        .filter(|(x, _)| **x >= a - slack && **x <= b + slack)
        .map(|(_, z)| z.re)
        .collect();
    if window.is_empty() {
        return Err(SpectralError::EmptyWindow(a, b));
    }
    let max = window.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    let thr = 1e-3 * max;
    let mut last_sign = 0.0;
    let mut count = 0;
    for v in window {
        if v.abs() > thr {
            let s = v.signum();
            if last_sign != 0.0 && s != last_sign {
                count += 1;
            }
            last_sign = s;
        }
    }
    Ok(count)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPeak {
    /// Location of the largest modulus among positive frequencies.
    pub peak_xi: f64,
    pub peak_log_mod: f64,
    /// Half width at half maximum around the peak, averaged over the sides
    /// where the modulus drops to one half inside the grid; infinite if it
    /// never does.
    pub envelope_halfwidth: f64,
    /// Whether the peak sits on the last grid node.
    pub at_grid_edge: bool,
}

/// Peak of `|û|` over `ξ > 0` with its half-maximum half width.
pub fn peak_and_envelope(spec: &LogPolarSpectrum) -> Result<SpectralPeak, SpectralError> {
    let pos: Vec<(f64, f64)> = (0..spec.grid.len())
        .map(|k| (spec.grid.node(k), spec.values[k].log_mod))
        .filter(|(xi, _)| *xi > 0.0)
        .collect();
    let (ipk, &(peak_xi, peak_log_mod)) = pos
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .ok_or(SpectralError::AllZero)?;
    if peak_log_mod == f64::NEG_INFINITY {
        return Err(SpectralError::AllZero);
    }
    let half = peak_log_mod - std::f64::consts::LN_2;
    let crossing = |i: usize, j: usize| -> f64 {
        let (x0, l0) = pos[i];
        let (x1, l1) = pos[j];
        if !l1.is_finite() {
            return x1;
        }
        x0 + (x1 - x0) * (l0 - half) / (l0 - l1)
    };
    let right = (ipk + 1..pos.len())
        .find(|&j| pos[j].1 <= half)
        .map(|j| crossing(j - 1, j) - peak_xi);
    let left = (0..ipk)
        .rev()
        .find(|&j| pos[j].1 <= half)
        .map(|j| peak_xi - crossing(j + 1, j));
    let envelope_halfwidth = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (l + r),
        (Some(w), None) | (None, Some(w)) => w,
        (None, None) => f64::INFINITY,
    };
    Ok(SpectralPeak {
        peak_xi,
        peak_log_mod,
        envelope_halfwidth,
        at_grid_edge: ipk + 1 == pos.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillationReport {
    pub zero_crossings: usize,
    pub peak_xi: f64,
    pub peak_value: f64,
    pub envelope_halfwidth: f64,
}

pub fn oscillation_report(
    sig: &Signal,
    window: (f64, f64),
    spec: &LogPolarSpectrum,
) -> Result<OscillationReport, SpectralError> {
    let zero_crossings = count_zero_crossings(sig, window.0, window.1)?;
    let peak = peak_and_envelope(spec)?;
    Ok(OscillationReport {
        zero_crossings,
        peak_xi: peak.peak_xi,
        peak_value: peak.peak_log_mod.exp(),
        envelope_halfwidth: peak.envelope_halfwidth,
    })
}

/// Ordinary least-squares slope of `ys` against `xs`; `None` with fewer than
/// two distinct abscissae.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// `ln(sum exp(a_k))` without overflow; `-inf` for an empty or all-zero sum.
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|a| (a - m).exp()).sum::<f64>().ln()
}

/// Writes `x,re,im` rows.
pub fn write_signal_csv<W: Write>(mut w: W, sig: &Signal) -> std::io::Result<()> {
    writeln!(w, "x,re,im")?;
    for (x, z) in sig.x.iter().zip(&sig.values) {
        writeln!(w, "{x:e},{:e},{:e}", z.re, z.im)?;
    }
    Ok(())
}

/// Writes `xi,log10_mod,phase` rows; zero samples print `-inf`.
pub fn write_spectrum_csv<W: Write>(mut w: W, spec: &LogPolarSpectrum) -> std::io::Result<()> {
    writeln!(w, "xi,log10_mod,phase")?;
    for (k, v) in spec.values.iter().enumerate() {
        writeln!(
            w,
            "{:e},{:e},{:e}",
            spec.grid.node(k),
            v.log_mod / LN_10,
            v.phase
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_avoids_origin() {
        let g = FreqGrid::new(3.0, 8).unwrap();
        for k in 0..8 {
            assert_eq!(g.node(k), -g.node(7 - k));
            assert_ne!(g.node(k), 0.0);
        }
        assert_eq!(g.node(0), -3.0);
        assert_eq!(g.node(7), 3.0);
        assert!(FreqGrid::new(3.0, 7).is_err());
        assert!(FreqGrid::new(0.0, 8).is_err());
    }

    #[test]
    fn log_complex_round_trip() {
        let z = Complex64::new(-3.0, 4.0);
        let l = LogComplex::from_complex(z);
        assert!((l.to_complex() - z).norm() < 1e-14);
        assert!(LogComplex::from_complex(Complex64::new(0.0, 0.0)).is_zero());
        assert_eq!(LogComplex::new(0.0, -PI).phase, PI);
        let p = l * l.conj();
        assert!((p.to_complex() - Complex64::new(25.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gaussian_transform() {
        // û = e^{-ξ²/2} gives u = e^{-x²/2} / sqrt(2π).
        let g = FreqGrid::new(12.0, 2048).unwrap();
        let spec: Vec<Complex64> = g
            .nodes()
            .iter()
            .map(|xi| Complex64::new((-xi * xi / 2.0).exp(), 0.0))
            .collect();
        let x = XGrid::new(-3.0, 3.0, 61).unwrap();
        let sig = inverse_transform(&g, &spec, &x).unwrap();
        for (xv, u) in sig.x.iter().zip(&sig.values) {
            let want = (-xv * xv / 2.0).exp() / (2.0 * PI).sqrt();
            assert!((u - want).norm() < 1e-12);
        }
    }

    #[test]
    fn nyquist_guard() {
        let g = FreqGrid::new(100.0, 64).unwrap();
        let spec = vec![Complex64::new(1.0, 0.0); 64];
        let x = XGrid::new(0.0, 10.0, 11).unwrap();
        assert!(matches!(
            inverse_transform(&g, &spec, &x),
            Err(SpectralError::CoarseXGrid { .. })
        ));
    }

    #[test]
    fn cosine_crossings() {
        let x = XGrid::new(0.0, 10.0, 1001).unwrap();
        let xs = x.nodes();
        let sig = Signal {
            values: xs
                .iter()
                .map(|&t| Complex64::new((3.0 * t).cos(), 0.0))
                .collect(),
            x: xs,
        };
        // cos(3x) vanishes at (2k+1)π/6 < 10, that is k = 0..=9.
        assert_eq!(count_zero_crossings(&sig, 0.0, 10.0).unwrap(), 10);
        assert!(count_zero_crossings(&sig, 5.0, 11.0).is_err());
        assert!(count_zero_crossings(&sig, 5.0, 5.0).is_err());
    }

    #[test]
    fn small_wiggles_are_ignored() {
        let x = XGrid::new(0.0, 1.0, 101).unwrap();
        let xs = x.nodes();
        let values = xs
            .iter()
            .map(|&t| {
                Complex64::new(
                    if t < 0.5 {
                        1.0
                    } else {
                        1e-5 * (200.0 * t).sin()
                    },
                    0.0,
                )
            })
            .collect();
        let sig = Signal { x: xs, values };
        assert_eq!(count_zero_crossings(&sig, 0.0, 1.0).unwrap(), 0);
    }

    #[test]
    fn peak_is_taken_on_positive_axis() {
        let g = FreqGrid::new(10.0, 1000).unwrap();
        let values = g
            .nodes()
            .iter()
            .map(|&xi| LogComplex::from_positive((-(xi.abs() - 4.0).powi(2)).exp()))
            .collect();
        let spec = LogPolarSpectrum::new(g, values).unwrap();
        let pk = peak_and_envelope(&spec).unwrap();
        assert!(pk.peak_xi > 0.0);
        assert!((pk.peak_xi - 4.0).abs() < 0.02);
        // e^{-w²} = 1/2 at w = sqrt(ln 2).
        assert!((pk.envelope_halfwidth - std::f64::consts::LN_2.sqrt()).abs() < 1e-3);
        assert!(!pk.at_grid_edge);
    }

    #[test]
    fn all_zero_spectrum_has_no_peak() {
        let g = FreqGrid::new(1.0, 4).unwrap();
        let spec = LogPolarSpectrum::new(g, vec![LogComplex::ZERO; 4]).unwrap();
        assert_eq!(peak_and_envelope(&spec), Err(SpectralError::AllZero));
    }

    #[test]
    fn slope_and_lse() {
        assert_eq!(
            least_squares_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]),
            Some(2.0)
        );
        assert_eq!(least_squares_slope(&[1.0], &[1.0]), None);
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        write_signal_csv(
            &mut buf,
            &Signal {
                x: vec![0.0],
                values: vec![Complex64::new(1.0, -2.0)],
            },
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,re,im\n0e0,1e0,-2e0\n");
    }
}
