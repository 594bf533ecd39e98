//! Diagonal model of the reduced problem `(A + ε²B) v = F` on the outer circle
//! of the annulus `r0 < r < 1`.
//!
//! Each angular mode `n` is independent: the harmonic extension with zero
//! inner trace is `g_n(r) e^{inθ}`, the inner normal derivative gives the
//! smoothing symbol `σ_R0(n) = g_n'(r0)`, and
//! `σ_A(n) = 2|n| h(n)² σ_R0(n)²`, `σ_B(n) = 2|n|³`.
//!
//! Measure factors (`2π`, `2π r0`) are dropped throughout; see
//! [`NORMALIZATION`].

use thiserror::Error;

use crate::layer::{p_symbol, CutoffSpec};
use crate::spectral::least_squares_slope;

/// Recorded in every output that carries annulus numbers.
pub const NORMALIZATION: &str =
    "unit-measure: arc-length factors 2*pi and 2*pi*r0 are dropped from A, B and all norms";

/// Modes required past the crossover.
pub const CROSSOVER_MARGIN: i64 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnulusError {
    #[error("r0 = {0} must lie in (0, 1)")]
    BadRadius(f64),
    #[error("r = {r} is outside [{r0}, 1]")]
    OutsideAnnulus { r: f64, r0: f64 },
    #[error("epsilon = {0} must be positive and finite")]
    BadEpsilon(f64),
    #[error("n_max = {0} must be at least 1")]
    BadNMax(i64),
    #[error("epsilon list must be nonempty, positive and strictly decreasing")]
    BadEpsilonList,
    #[error(
        "n_max = {n_max} leaves fewer than {CROSSOVER_MARGIN} modes past crossover {crossover}"
    )]
    NMaxTooSmall { n_max: i64, crossover: i64 },
}

/// Mode forcing `F̂(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeForcing {
    /// `(1 + n²)^{-1}`.
    Rational,
    /// `F̂ ≡ 0`.
    Zero,
    /// `(1 + n²)^{-s/2}`.
    Sobolev { s: f64 },
}

impl ModeForcing {
    pub fn eval(&self, n: i64) -> f64 {
        let n2 = (n * n) as f64;
        match *self {
            ModeForcing::Rational => 1.0 / (1.0 + n2),
            ModeForcing::Zero => 0.0,
            ModeForcing::Sobolev { s } => (1.0 + n2).powf(-0.5 * s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusModel {
    pub r0: f64,
    pub epsilon: f64,
    pub n_max: i64,
    pub forcing: ModeForcing,
    pub cutoff: CutoffSpec,
}

impl AnnulusModel {
    pub fn new(r0: f64, epsilon: f64, n_max: i64) -> Result<Self, AnnulusError> {
        let m = Self {
            r0,
            epsilon,
            n_max,
            forcing: ModeForcing::Rational,
            cutoff: CutoffSpec::default(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), AnnulusError> {
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return Err(AnnulusError::BadRadius(self.r0));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(AnnulusError::BadEpsilon(self.epsilon));
        }
        if self.n_max < 1 {
            return Err(AnnulusError::BadNMax(self.n_max));
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    pub fn sigma_a(&self, n: i64) -> f64 {
        a_symbol(n, self.r0, &self.cutoff)
    }
}

fn check_r0(r0: f64) -> Result<(), AnnulusError> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(AnnulusError::BadRadius(r0));
    }
    Ok(())
}

/// Radial profile of the mode-`n` harmonic function vanishing at `r0` and
/// equal to one at `r = 1`.
pub fn harmonic_mode_profile(n: i64, r0: f64, r: f64) -> Result<f64, AnnulusError> {
    check_r0(r0)?;
    if !(r >= r0 && r <= 1.0) {
        return Err(AnnulusError::OutsideAnnulus { r, r0 });
    }
    if n == 0 {
        return Ok((r / r0).ln() / (1.0 / r0).ln());
    }
    let k = n.unsigned_abs() as i32;
    let inner = r0.powi(2 * k);
    Ok((r.powi(k) - (r0 * r0 / r).powi(k)) / (1.0 - inner))
}

/// `g_n'(r0)`.
pub fn r0_symbol(n: i64, r0: f64) -> Result<f64, AnnulusError> {
    check_r0(r0)?;
    if n == 0 {
        return Ok(1.0 / (r0 * (1.0 / r0).ln()));
    }
    let k = n.unsigned_abs() as i32;
    Ok(2.0 * k as f64 * r0.powi(k - 1) / (1.0 - r0.powi(2 * k)))
}

/// `σ_A(n) = σ_P(n)² σ_R0(n)²` with `σ_P(n)² = 2|n| h(n)²`.
pub fn a_symbol(n: i64, r0: f64, cutoff: &CutoffSpec) -> f64 {
    let p = p_symbol(n as f64, cutoff);
    if p == 0.0 {
        return 0.0;
    }
    let r = r0_symbol(n, r0).expect("radius validated by caller");
    (p * r).powi(2)
}

/// `σ_B(n) = σ_Q(n)² = 2|n|³`, evaluated without the square root.
pub fn b_symbol(n: i64) -> f64 {
    2.0 * (n.unsigned_abs() as f64).powi(3)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeEntry {
    pub n: i64,
    pub sigma_r0: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub f_hat: f64,
    /// `None` when both symbols vanish (the mode is excluded).
    pub v_hat: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    /// Modes `-n_max..=n_max` in ascending order.
    pub modes: Vec<ModeEntry>,
    pub crossover_n: i64,
    pub excluded: Vec<i64>,
}

impl ModeSolution {
    pub fn mode(&self, n: i64) -> Option<&ModeEntry> {
        self.modes.iter().find(|m| m.n == n)
    }
}

/// One past the largest `n >= 1` where `σ_A(n) > ε² σ_B(n)`: from there on
/// the regularising term dominates. Equals 1 when `A` never dominates.
pub fn crossover(model: &AnnulusModel) -> i64 {
    let e2 = model.epsilon * model.epsilon;
    (1..=model.n_max)
        .filter(|&n| model.sigma_a(n) > e2 * b_symbol(n))
        .max()
        .map_or(1, |n| n + 1)
}

/// `ln(2/(ε r0)) / ln(1/r0)`, the continuous balance point for large `n`.
pub fn crossover_estimate(epsilon: f64, r0: f64) -> f64 {
    (2.0 / (epsilon * r0)).ln() / (1.0 / r0).ln()
}

pub fn mode_solve(model: &AnnulusModel) -> Result<ModeSolution, AnnulusError> {
    model.validate()?;
    let e2 = model.epsilon * model.epsilon;
    let mut modes = Vec::with_capacity(2 * model.n_max as usize + 1);
    let mut excluded = Vec::new();
    for n in -model.n_max..=model.n_max {
        let sigma_a = model.sigma_a(n);
        let sigma_b = b_symbol(n);
        let f_hat = model.forcing.eval(n);
        let denom = sigma_a + e2 * sigma_b;
        let v_hat = if denom > 0.0 {
            Some(f_hat / denom)
        } else {
            excluded.push(n);
            None
        };
        modes.push(ModeEntry {
            n,
            sigma_r0: r0_symbol(n, model.r0)?,
            sigma_a,
            sigma_b,
            f_hat,
            v_hat,
        });
    }
    Ok(ModeSolution {
        modes,
        crossover_n: crossover(model),
        excluded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceRecord {
    pub epsilon: f64,
    pub crossover_n: i64,
    /// `log10 sup |v̂(n)|` over modes where the cutoff is fully open.
    pub log10_sup_vhat: f64,
    /// `log10 Σ |v̂(n)|² (1 + n²)^{-m}` over the same modes, `m = 0..=3`.
    pub log10_hm: [f64; 4],
}

/// Modes counted in the sweep norms: those with `h(n) = 1`. The ramp region
/// is where the symbols are an artefact of the cutoff.
fn in_open_band(model: &AnnulusModel, n: i64) -> bool {
    model.cutoff.h(n as f64) >= 1.0
}

pub fn divergence_sweep(
    model: &AnnulusModel,
    eps_list: &[f64],
) -> Result<Vec<DivergenceRecord>, AnnulusError> {
    let ok = !eps_list.is_empty()
        && eps_list.iter().all(|e| e.is_finite() && *e > 0.0)
        && eps_list.windows(2).all(|w| w[1] < w[0]);
    if !ok {
        return Err(AnnulusError::BadEpsilonList);
    }
    eps_list
        .iter()
        .map(|&epsilon| {
            let m = model.with_epsilon(epsilon);
            let sol = mode_solve(&m)?;
            if sol.crossover_n + CROSSOVER_MARGIN > m.n_max {
                return Err(AnnulusError::NMaxTooSmall {
                    n_max: m.n_max,
                    crossover: sol.crossover_n,
                });
            }
            let band: Vec<(i64, f64)> = sol
                .modes
                .iter()
                .filter(|e| in_open_band(&m, e.n))
                .filter_map(|e| e.v_hat.map(|v| (e.n, v)))
                .collect();
            let sup = band.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
            let mut log10_hm = [0.0; 4];
            for (mm, slot) in log10_hm.iter_mut().enumerate() {
                let s: f64 = band
                    .iter()
                    .map(|&(n, v)| v * v * (1.0 + (n * n) as f64).powi(-(mm as i32)))
                    .sum();
                *slot = s.log10();
            }
            Ok(DivergenceRecord {
                epsilon,
                crossover_n: sol.crossover_n,
                log10_sup_vhat: sup.log10(),
                log10_hm,
            })
        })
        .collect()
}

/// Regression slope of `ln sup|v̂|` against `ln(1/ε)`.
pub fn sup_growth_slope(records: &[DivergenceRecord]) -> Option<f64> {
    let xs: Vec<f64> = records.iter().map(|r| (1.0 / r.epsilon).ln()).collect();
    let ys: Vec<f64> = records
        .iter()
        .map(|r| r.log10_sup_vhat * std::f64::consts::LN_10)
        .collect();
    least_squares_slope(&xs, &ys)
}
