//! Flat key-value run configuration.
//!
//! Sources, lowest to highest precedence: TOML file, `SENSILAB_OUTPUT_DIR`
//! (output directory only), `--set key=value` flags, `--output-dir`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sensilab::annulus::ModeForcing;
use sensilab::layer::CutoffSpec;
use sensilab::opsym::parse_operator;
use sensilab::Forcing;
use thiserror::Error;
use toml::{Table, Value};

pub const OUTPUT_DIR_ENV: &str = "SENSILAB_OUTPUT_DIR";
/// Largest cutoff accepted for `ε = 0` synthesis; beyond it the summed
/// quadrature overflows.
pub const MAX_XI_CUTOFF: f64 = 300.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown subcommand '{0}' (expected one of: {list})", list = Subcommand::NAMES.join(", "))]
    UnknownSubcommand(String),
    #[error("missing required key '{0}'")]
    Missing(String),
    #[error("invalid value for '{key}': {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown key '{key}' for {subcommand}")]
    UnknownKey { key: String, subcommand: String },
    #[error("cannot read config file {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("malformed override '{0}', expected key=value")]
    BadOverride(String),
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    SlCheck,
    StripSolve,
    StripSweep,
    LayerVerify,
    AnnulusSolve,
    AnnulusSweep,
    Hadamard,
    CoshDemo,
}

impl Subcommand {
    pub const NAMES: [&'static str; 8] = [
        "sl-check",
        "strip-solve",
        "strip-sweep",
        "layer-verify",
        "annulus-solve",
        "annulus-sweep",
        "hadamard",
        "cosh-demo",
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::SlCheck => "sl-check",
            Subcommand::StripSolve => "strip-solve",
            Subcommand::StripSweep => "strip-sweep",
            Subcommand::LayerVerify => "layer-verify",
            Subcommand::AnnulusSolve => "annulus-solve",
            Subcommand::AnnulusSweep => "annulus-sweep",
            Subcommand::Hadamard => "hadamard",
            Subcommand::CoshDemo => "cosh-demo",
        }
    }
}

impl FromStr for Subcommand {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "sl-check" => Subcommand::SlCheck,
            "strip-solve" => Subcommand::StripSolve,
            "strip-sweep" => Subcommand::StripSweep,
            "layer-verify" => Subcommand::LayerVerify,
            "annulus-solve" => Subcommand::AnnulusSolve,
            "annulus-sweep" => Subcommand::AnnulusSweep,
            "hadamard" => Subcommand::Hadamard,
            "cosh-demo" => Subcommand::CoshDemo,
            other => return Err(ConfigError::UnknownSubcommand(other.to_string())),
        })
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlCase {
    pub label: String,
    pub operator: String,
    pub bconds: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlCheckParams {
    pub cases: Vec<SlCase>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripSolveParams {
    pub epsilon: f64,
    pub forcing: Forcing,
    pub y: f64,
    pub window: (f64, f64),
    pub x_samples: usize,
    pub xi_cutoff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripSweepParams {
    pub epsilon_list: Vec<f64>,
    pub forcing: Forcing,
    pub trace_forcing: Forcing,
    pub window: (f64, f64),
    pub x_samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams {
    pub xi_list: Vec<f64>,
    pub cutoff: CutoffSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusParams {
    pub r0: f64,
    pub epsilon_list: Vec<f64>,
    pub n_max: i64,
    pub forcing: ModeForcing,
    pub cutoff: CutoffSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HadamardParams {
    pub forcing: Forcing,
    pub y: f64,
    pub lambda_list: Vec<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoshParams {
    pub lambda: f64,
    pub window: (f64, f64),
    pub x_samples: usize,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    SlCheck(SlCheckParams),
    StripSolve(StripSolveParams),
    StripSweep(StripSweepParams),
    LayerVerify(LayerParams),
    /// `epsilon_list` holds the single solve value.
    AnnulusSolve(AnnulusParams),
    AnnulusSweep(AnnulusParams),
    Hadamard(HadamardParams),
    CoshDemo(CoshParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub output_dir: PathBuf,
    pub params: Params,
    /// Every key with the value actually used, defaults included.
    pub effective: Table,
}

/// Where configuration values come from.
#[derive(Clone, Debug, Default)]
pub struct ConfigSources {
    pub file: Option<PathBuf>,
    /// Raw `key=value` overrides in command-line order.
    pub overrides: Vec<String>,
    pub output_dir: Option<PathBuf>,
    /// Value of the output-directory environment variable, if set.
    pub env_output_dir: Option<String>,
}

/// Parses an override value as a TOML value, falling back to a plain string.
fn parse_override_value(text: &str) -> Value {
    let doc = format!("v = {text}");
    match doc.parse::<Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| Value::String(text.to_string())),
        Err(_) => Value::String(text.to_string()),
    }
}

pub fn apply_override(table: &mut Table, raw: &str) -> Result<(), ConfigError> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| ConfigError::BadOverride(raw.to_string()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::BadOverride(raw.to_string()));
    }
    table.insert(key.to_string(), parse_override_value(value.trim()));
    Ok(())
}

fn read_file(path: &Path) -> Result<Table, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    text.parse::<Table>().map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Typed reads from the merged table that record what was used.
struct Reader {
    table: Table,
    used: BTreeSet<String>,
    effective: Table,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.used.insert(key.to_string());
        self.table.get(key).cloned()
    }

    fn as_f64(key: &str, v: &Value) -> Result<f64, ConfigError> {
        match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            _ => Err(invalid(key, "expected a number")),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = match self.take(key) {
            Some(v) => Self::as_f64(key, &v)?,
            None => default,
        };
        if v.is_nan() {
            return Err(invalid(key, "NaN is not allowed"));
        }
        self.effective.insert(key.into(), Value::Float(v));
        Ok(v)
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            Some(v) => {
                let f = Self::as_f64(key, &v)?;
                self.effective.insert(key.into(), Value::Float(f));
                Ok(Some(f))
            }
            None => Ok(None),
        }
    }

    fn int_or(&mut self, key: &str, default: i64) -> Result<i64, ConfigError> {
        let v = match self.take(key) {
            Some(Value::Integer(i)) => i,
            Some(_) => return Err(invalid(key, "expected an integer")),
            None => default,
        };
        self.effective.insert(key.into(), Value::Integer(v));
        Ok(v)
    }

    fn f64_list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let v = match self.take(key) {
            Some(Value::Array(items)) => items
                .iter()
                .map(|it| Self::as_f64(key, it))
                .collect::<Result<Vec<_>, _>>()?,
            Some(other) => vec![Self::as_f64(key, &other)
                .map_err(|_| invalid(key, "expected a list of numbers"))?],
            None => default.to_vec(),
        };
        self.effective.insert(
            key.into(),
            Value::Array(v.iter().map(|f| Value::Float(*f)).collect()),
        );
        Ok(v)
    }

    fn opt_string(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.take(key) {
            Some(Value::String(s)) => {
                self.effective.insert(key.into(), Value::String(s.clone()));
                Ok(Some(s))
            }
            Some(_) => Err(invalid(key, "expected a string")),
            None => Ok(None),
        }
    }

    fn string_or(&mut self, key: &str, default: &str) -> Result<String, ConfigError> {
        let s = self.opt_string(key)?.unwrap_or_else(|| default.to_string());
        self.effective.insert(key.into(), Value::String(s.clone()));
        Ok(s)
    }

    fn opt_string_list(&mut self, key: &str) -> Result<Option<Vec<String>>, ConfigError> {
        let v = match self.take(key) {
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|it| match it {
                    Value::String(s) => Ok(s),
                    _ => Err(invalid(key, "expected a list of strings")),
                })
                .collect::<Result<Vec<_>, _>>()?,
            Some(Value::String(s)) => vec![s],
            Some(_) => return Err(invalid(key, "expected a list of strings")),
            None => return Ok(None),
        };
        self.effective.insert(
            key.into(),
            Value::Array(v.iter().cloned().map(Value::String).collect()),
        );
        Ok(Some(v))
    }

    fn window_or(&mut self, key: &str, default: (f64, f64)) -> Result<(f64, f64), ConfigError> {
        let v = self.f64_list_or(key, &[default.0, default.1])?;
        match v.as_slice() {
            [a, b] if a.is_finite() && b.is_finite() && a < b => Ok((*a, *b)),
            _ => Err(invalid(key, "expected [a, b] with a < b")),
        }
    }

    fn finish(self, sub: Subcommand) -> Result<Table, ConfigError> {
        if let Some(key) = self.table.keys().find(|k| !self.used.contains(*k)) {
            return Err(ConfigError::UnknownKey {
                key: key.clone(),
                subcommand: sub.to_string(),
            });
        }
        Ok(self.effective)
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn samples(key: &str, v: i64, min: i64, max: i64) -> Result<usize, ConfigError> {
    if v < min || v > max {
        return Err(invalid(key, format!("must lie in [{min}, {max}], got {v}")));
    }
    Ok(v as usize)
}

fn even_samples(key: &str, v: i64) -> Result<usize, ConfigError> {
    let n = samples(key, v, 2, 1 << 20)?;
    if n % 2 != 0 {
        return Err(invalid(key, format!("must be even, got {n}")));
    }
    Ok(n)
}

/// Positive, finite, strictly decreasing and nonempty.
fn epsilon_list(key: &str, v: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
    if v.is_empty() {
        return Err(invalid(key, "must not be empty"));
    }
    if let Some(bad) = v.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(invalid(
            key,
            format!("entries must be strictly positive, got {bad}"),
        ));
    }
    if v.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid(
            key,
            "entries must be sorted in strictly descending order",
        ));
    }
    Ok(v)
}

fn read_forcing(
    r: &mut Reader,
    key: &str,
    default: &str,
    lo_default: f64,
    hi_default: f64,
) -> Result<Forcing, ConfigError> {
    let kind = r.string_or(key, default)?;
    let forcing = match kind.as_str() {
        "band_flat" => {
            let lo = r.f64_or("xi_lo", lo_default)?;
            let hi = r.f64_or("xi_hi", hi_default)?;
            Forcing::band_flat(lo, hi)
        }
        "rational" => Ok(Forcing::Rational),
        "gaussian" => {
            let sigma = r.f64_or("sigma", 1.0)?;
            Forcing::gaussian(sigma)
        }
        other => {
            return Err(invalid(
                key,
                format!("unknown forcing '{other}' (band_flat, rational, gaussian)"),
            ))
        }
    };
    forcing.map_err(|e| invalid(key, e.to_string()))
}

fn read_cutoff(r: &mut Reader) -> Result<CutoffSpec, ConfigError> {
    let lo = r.f64_or("xi_low", 2.0)?;
    let w = r.f64_or("ramp_width", 2.0)?;
    CutoffSpec::new(lo, w).map_err(|e| invalid("xi_low", e.to_string()))
}

const DEFAULT_EPSILONS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// The built-in verdict suite run when no operator is configured.
pub fn builtin_sl_cases() -> Vec<SlCase> {
    let case = |label: &str, op: &str, bc: &[&str]| SlCase {
        label: label.to_string(),
        operator: op.to_string(),
        bconds: bc.iter().map(|s| s.to_string()).collect(),
    };
    vec![
        case("laplacian_dirichlet", "D1^2+D2^2", &["u"]),
        case("laplacian_neumann", "D1^2+D2^2", &["D2"]),
        case("laplacian_oblique_complex", "D1^2+D2^2", &["D1 - i*D2"]),
        case(
            "bilaplacian_free_like",
            "(D1^2+D2^2)^2",
            &["D1^2+D2^2", "D2*(D1^2+D2^2)"],
        ),
        case("bilaplacian_clamped", "(D1^2+D2^2)^2", &["u", "D2"]),
    ]
}

fn build_params(sub: Subcommand, r: &mut Reader) -> Result<Params, ConfigError> {
    Ok(match sub {
        Subcommand::SlCheck => {
            let operator = r.opt_string("operator")?;
            let bconds = r.opt_string_list("bconds")?;
            let cases = match (operator, bconds) {
                (Some(op), Some(bc)) => {
                    parse_operator(&op).map_err(|e| invalid("operator", e.to_string()))?;
                    for b in &bc {
                        parse_operator(b).map_err(|e| invalid("bconds", e.to_string()))?;
                    }
                    vec![SlCase {
                        label: "configured".into(),
                        operator: op,
                        bconds: bc,
                    }]
                }
                (Some(_), None) => return Err(ConfigError::Missing("bconds".into())),
                (None, Some(_)) => return Err(ConfigError::Missing("operator".into())),
                (None, None) => builtin_sl_cases(),
            };
            Params::SlCheck(SlCheckParams { cases })
        }
        Subcommand::StripSolve => {
            let epsilon = r.f64_or("epsilon", 1e-3)?;
            if !(epsilon.is_finite() && epsilon >= 0.0) {
                return Err(invalid("epsilon", format!("must be >= 0, got {epsilon}")));
            }
            let forcing = read_forcing(r, "forcing", "band_flat", 0.5, 1000.0)?;
            let y = r.f64_or("y", 1.0)?;
            if !(0.0..=1.0).contains(&y) {
                return Err(invalid("y", format!("must lie in [0, 1], got {y}")));
            }
            let window = r.window_or("window", (-4.0, 4.0))?;
            let x_samples = samples("x_samples", r.int_or("x_samples", 801)?, 2, 1 << 20)?;
            let xi_cutoff = r.opt_f64("xi_cutoff")?;
            if let Some(c) = xi_cutoff {
                if !(c > 0.0 && c <= MAX_XI_CUTOFF) {
                    return Err(invalid(
                        "xi_cutoff",
                        format!("must lie in (0, {MAX_XI_CUTOFF}], got {c}"),
                    ));
                }
            } else if epsilon == 0.0 {
                return Err(invalid(
                    "xi_cutoff",
                    "required when epsilon = 0 (the limit is not a tempered distribution)",
                ));
            }
            Params::StripSolve(StripSolveParams {
                epsilon,
                forcing,
                y,
                window,
                x_samples,
                xi_cutoff,
            })
        }
        Subcommand::StripSweep => {
            let eps = epsilon_list(
                "epsilon_list",
                r.f64_list_or("epsilon_list", &DEFAULT_EPSILONS)?,
            )?;
            if let Some(e) = eps.iter().find(|e| **e >= 1.0) {
                return Err(invalid(
                    "epsilon_list",
                    format!("entries must be below 1, got {e}"),
                ));
            }
            let forcing = read_forcing(r, "forcing", "band_flat", 0.5, 1000.0)?;
            let trace_forcing = read_forcing(r, "trace_forcing", "rational", 0.5, 1000.0)?;
            let window = r.window_or("window", (0.0, 4.0))?;
            let x_samples = samples("x_samples", r.int_or("x_samples", 401)?, 2, 1 << 20)?;
            Params::StripSweep(StripSweepParams {
                epsilon_list: eps,
                forcing,
                trace_forcing,
                window,
                x_samples,
            })
        }
        Subcommand::LayerVerify => {
            let xi_list = r.f64_list_or("xi_list", &[5.0, 10.0, 20.0])?;
            if xi_list.is_empty() {
                return Err(invalid("xi_list", "must not be empty"));
            }
            for &xi in &xi_list {
                if !(xi.is_finite() && xi != 0.0) {
                    return Err(invalid(
                        "xi_list",
                        format!("entries must be finite and nonzero, got {xi}"),
                    ));
                }
            }
            let cutoff = read_cutoff(r)?;
            Params::LayerVerify(LayerParams { xi_list, cutoff })
        }
        Subcommand::AnnulusSolve | Subcommand::AnnulusSweep => {
            let r0 = r.f64_or("r0", 0.5)?;
            if !(r0 > 0.0 && r0 < 1.0) {
                return Err(invalid("r0", format!("must lie in (0, 1), got {r0}")));
            }
            let epsilon_list = if sub == Subcommand::AnnulusSolve {
                vec![positive("epsilon", r.f64_or("epsilon", 1e-3)?)?]
            } else {
                epsilon_list(
                    "epsilon_list",
                    r.f64_list_or("epsilon_list", &DEFAULT_EPSILONS)?,
                )?
            };
            let n_max = r.int_or("n_max", 64)?;
            if !(1..=100_000).contains(&n_max) {
                return Err(invalid(
                    "n_max",
                    format!("must lie in [1, 100000], got {n_max}"),
                ));
            }
            let forcing = match r.string_or("forcing", "rational")?.as_str() {
                "rational" => ModeForcing::Rational,
                "zero" => ModeForcing::Zero,
                "sobolev" => {
                    let s = r.f64_or("forcing_order", 2.0)?;
                    if !s.is_finite() {
                        return Err(invalid("forcing_order", "must be finite"));
                    }
                    ModeForcing::Sobolev { s }
                }
                other => {
                    return Err(invalid(
                        "forcing",
                        format!("unknown mode forcing '{other}' (rational, zero, sobolev)"),
                    ))
                }
            };
            let cutoff = read_cutoff(r)?;
            let p = AnnulusParams {
                r0,
                epsilon_list,
                n_max,
                forcing,
                cutoff,
            };
            if sub == Subcommand::AnnulusSolve {
                Params::AnnulusSolve(p)
            } else {
                Params::AnnulusSweep(p)
            }
        }
        Subcommand::Hadamard => {
            let forcing = read_forcing(r, "forcing", "rational", 0.5, 1000.0)?;
            let y = r.f64_or("y", 1.0)?;
            if !(y.is_finite() && y >= 0.0) {
                return Err(invalid("y", format!("must be >= 0, got {y}")));
            }
            let lambda_list =
                r.f64_list_or("lambda_list", &[10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0])?;
            if lambda_list.is_empty() {
                return Err(invalid("lambda_list", "must not be empty"));
            }
            for &l in &lambda_list {
                positive("lambda_list", l)?;
            }
            let samples = even_samples("samples", r.int_or("samples", 1 << 14)?)?;
            Params::Hadamard(HadamardParams {
                forcing,
                y,
                lambda_list,
                samples,
            })
        }
        Subcommand::CoshDemo => {
            let lambda = r.f64_or("lambda", 20.0)?;
            if !(lambda > 0.0 && lambda <= sensilab::strip::COSH_LAMBDA_MAX) {
                return Err(invalid(
                    "lambda",
                    format!(
                        "must lie in (0, {}], got {lambda}",
                        sensilab::strip::COSH_LAMBDA_MAX
                    ),
                ));
            }
            let window = r.window_or("window", (-2.0, 2.0))?;
            let x_samples = samples("x_samples", r.int_or("x_samples", 401)?, 2, 1 << 20)?;
            let samples = even_samples("samples", r.int_or("samples", 1 << 16)?)?;
            Params::CoshDemo(CoshParams {
                lambda,
                window,
                x_samples,
                samples,
            })
        }
    })
}

/// Merges all sources and validates every parameter for `subcommand`.
pub fn load_config(subcommand: &str, sources: &ConfigSources) -> Result<RunConfig, ConfigError> {
    let sub: Subcommand = subcommand.parse()?;
    let mut table = match &sources.file {
        Some(p) => read_file(p)?,
        None => Table::new(),
    };
    if let Some(dir) = &sources.env_output_dir {
        table.insert("output_dir".into(), Value::String(dir.clone()));
    }
    for raw in &sources.overrides {
        apply_override(&mut table, raw)?;
    }
    if let Some(dir) = &sources.output_dir {
        table.insert(
            "output_dir".into(),
            Value::String(dir.display().to_string()),
        );
    }
    let mut reader = Reader {
        table,
        used: BTreeSet::new(),
        effective: Table::new(),
    };
    let output_dir = PathBuf::from(reader.string_or("output_dir", "sensilab-out")?);
    let params = build_params(sub, &mut reader)?;
    let effective = reader.finish(sub)?;
    Ok(RunConfig {
        subcommand: sub,
        output_dir,
        params,
        effective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(overrides: &[&str]) -> ConfigSources {
        ConfigSources {
            overrides: overrides.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn minimal_strip_sweep() {
        let c = load_config("strip-sweep", &with(&["epsilon_list=[1e-2, 1e-3]"])).unwrap();
        match c.params {
            Params::StripSweep(p) => assert_eq!(p.epsilon_list, vec![1e-2, 1e-3]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.effective.contains_key("trace_forcing"));
    }

    #[test]
    fn epsilon_list_with_zero_names_the_key() {
        let e = load_config("strip-sweep", &with(&["epsilon_list=[1e-2, 0.0]"])).unwrap_err();
        assert!(e.to_string().contains("epsilon_list"), "{e}");
        let e = load_config("annulus-sweep", &with(&["epsilon_list=[1e-3, 1e-2]"])).unwrap_err();
        assert!(e.to_string().contains("epsilon_list"), "{e}");
    }

    #[test]
    fn sl_check_carries_operator_text() {
        let c = load_config("sl-check", &with(&["operator=D1^2+D2^2", "bconds=[\"u\"]"])).unwrap();
        match c.params {
            Params::SlCheck(p) => {
                assert_eq!(p.cases.len(), 1);
                assert_eq!(p.cases[0].operator, "D1^2+D2^2");
                assert_eq!(p.cases[0].bconds, vec!["u".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let e = load_config("sl-check", &with(&["operator=D1 + D3", "bconds=u"])).unwrap_err();
        assert!(e.to_string().contains("operator"));
    }

    #[test]
    fn unknown_subcommand_and_key() {
        assert!(matches!(
            load_config("frobnicate", &ConfigSources::default()),
            Err(ConfigError::UnknownSubcommand(_))
        ));
        let e = load_config("cosh-demo", &with(&["epsilon=1"])).unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { ref key, .. } if key == "epsilon"));
    }

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join("sensilab-config-precedence.toml");
        std::fs::write(&dir, "lambda = 5.0\noutput_dir = \"from-file\"\n").unwrap();
        let mut src = with(&["lambda=7"]);
        src.file = Some(dir.clone());
        let c = load_config("cosh-demo", &src).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("from-file"));
        match c.params {
            Params::CoshDemo(p) => assert_eq!(p.lambda, 7.0),
            other => panic!("unexpected {other:?}"),
        }
        src.env_output_dir = Some("from-env".into());
        assert_eq!(
            load_config("cosh-demo", &src).unwrap().output_dir,
            PathBuf::from("from-env")
        );
        src.output_dir = Some("from-flag".into());
        assert_eq!(
            load_config("cosh-demo", &src).unwrap().output_dir,
            PathBuf::from("from-flag")
        );
        std::fs::remove_file(dir).unwrap();
    }

    #[test]
    fn zero_epsilon_needs_cutoff() {
        let e = load_config("strip-solve", &with(&["epsilon=0"])).unwrap_err();
        assert!(e.to_string().contains("xi_cutoff"));
        assert!(load_config("strip-solve", &with(&["epsilon=0", "xi_cutoff=40"])).is_ok());
        assert!(load_config("strip-solve", &with(&["epsilon=0", "xi_cutoff=400"])).is_err());
    }

    #[test]
    fn bad_override() {
        assert!(matches!(
            load_config("hadamard", &with(&["novalue"])),
            Err(ConfigError::BadOverride(_))
        ));
    }
}
