//! Executes a validated [`RunConfig`]: computes, writes CSV files and a JSON
//! summary, and reports built-in checks.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use sensilab::annulus::{
    crossover_estimate, divergence_sweep, mode_solve, sup_growth_slope, AnnulusModel, NORMALIZATION,
};
use sensilab::layer::verify_identities;
use sensilab::opsym::{check_sl, parse_operator, SlStatus, XiSign};
use sensilab::spectral::{write_signal_csv, write_spectrum_csv, FreqGrid, XGrid};
use sensilab::strip::{
    cosh_numeric, cosh_sequence, default_xi_max, hadamard_growth_slope, hadamard_temperedness,
    peak_law_slope, spectrum_at, strip_sweep_point, synthesize_trace, trace_asymptotics,
    StripProblem, StripSweepSpec, DEFAULT_SAMPLES,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{Params, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    /// A computation refused its inputs or missed its own tolerance.
    #[error("numerical contract failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn numerical<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Numerical(e.to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Float formatting shared by every CSV column: shortest round-trip
/// exponent form.
fn f(v: f64) -> String {
    format!("{v:e}")
}

fn jf(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(f(v)), Value::Number)
}

struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &str, rows: &[Vec<String>]) -> Result<(), RunError> {
        let mut s = String::new();
        s.push_str(header);
        s.push('\n');
        for row in rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        self.write(name, s.as_bytes())
    }
}

fn toml_to_json(v: &toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s.clone()),
        toml::Value::Integer(i) => json!(i),
        toml::Value::Float(x) => jf(*x),
        toml::Value::Boolean(b) => json!(b),
        toml::Value::Datetime(d) => Value::String(d.to_string()),
        toml::Value::Array(a) => Value::Array(a.iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => Value::Object(
            t.iter()
                .map(|(k, v)| (k.clone(), toml_to_json(v)))
                .collect(),
        ),
    }
}

fn sign_label(s: XiSign) -> &'static str {
    match s {
        XiSign::Plus => "+1",
        XiSign::Minus => "-1",
    }
}

fn status_label(s: SlStatus) -> &'static str {
    match s {
        SlStatus::Satisfied => "satisfied",
        SlStatus::Violated => "violated",
        SlStatus::NotElliptic => "not_elliptic",
        SlStatus::WrongCount => "wrong_count",
    }
}

/// Runs `config`, writing every output under its output directory.
pub fn run(config: &RunConfig) -> Result<RunReport, RunError> {
    let mut out = Outputs::new(&config.output_dir)?;
    let mut report = RunReport::default();
    let mut results = Map::new();
    match &config.params {
        Params::SlCheck(p) => {
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for case in &p.cases {
                let op = parse_operator(&case.operator).map_err(numerical)?;
                let bc = case
                    .bconds
                    .iter()
                    .map(|b| parse_operator(b))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(numerical)?;
                let v = check_sl(&op, &bc);
                let det = |s| v.report(s).map_or(f64::NAN, |r| r.det.norm());
                let witness = v.witness_sign.map_or("", sign_label);
                rows.push(vec![
                    case.label.clone(),
                    format!("\"{}\"", case.operator),
                    format!("\"{}\"", case.bconds.join("; ")),
                    status_label(v.status).to_string(),
                    witness.to_string(),
                    f(det(XiSign::Plus)),
                    f(det(XiSign::Minus)),
                ]);
                table.push(json!({
                    "label": case.label,
                    "operator": op.to_canonical_string(),
                    "bconds": bc.iter().map(|b| b.to_canonical_string()).collect::<Vec<_>>(),
                    "status": status_label(v.status),
                    "witness_sign": v.witness_sign.map(sign_label),
                    "violating_signs": v.violating_signs.iter().map(|s| sign_label(*s)).collect::<Vec<_>>(),
                    "abs_det_plus": jf(det(XiSign::Plus)),
                    "abs_det_minus": jf(det(XiSign::Minus)),
                    "null_vector": v.null_vector.as_ref().map(|nv| nv.iter().map(|z| json!([jf(z.re), jf(z.im)])).collect::<Vec<_>>()),
                }));
            }
            out.csv(
                "sl_check.csv",
                "case,operator,bconds,status,witness_sign,abs_det_plus,abs_det_minus",
                &rows,
            )?;
            results.insert("cases".into(), Value::Array(table));
        }
        Params::StripSolve(p) => {
            let grid = match p.xi_cutoff {
                Some(c) => FreqGrid::new(c, DEFAULT_SAMPLES),
                None => FreqGrid::new(default_xi_max(p.epsilon), DEFAULT_SAMPLES),
            }
            .map_err(numerical)?;
            let problem = StripProblem::with_grid(p.epsilon, p.forcing, grid).map_err(numerical)?;
            let spec = spectrum_at(&problem, p.y).map_err(numerical)?;
            let mut buf = Vec::new();
            write_spectrum_csv(&mut buf, &spec).expect("writing to memory");
            out.write("spectrum.csv", &buf)?;
            let x = XGrid::new(p.window.0, p.window.1, p.x_samples).map_err(numerical)?;
            let trace =
                synthesize_trace(p.epsilon, p.forcing, p.y, &x, p.xi_cutoff).map_err(numerical)?;
            let mut buf = Vec::new();
            write_signal_csv(&mut buf, &trace.signal).expect("writing to memory");
            out.write("signal.csv", &buf)?;
            let imag = trace.signal.relative_imag();
            report.check(
                "trace_is_real",
                imag < 1e-10,
                format!("max|Im u| / max|u| = {}", f(imag)),
            );
            results.insert("provenance".into(), json!(trace.provenance.label()));
            results.insert("max_abs_u".into(), jf(trace.signal.max_abs()));
            if p.epsilon > 0.0 && p.epsilon < 1.0 {
                match trace_asymptotics(&problem) {
                    Ok(a) => {
                        results.insert(
                            "asymptotics".into(),
                            json!({
                                "peak_xi": jf(a.peak_xi),
                                "balance_xi": jf(a.balance_xi),
                                "compensated_amp": jf(a.compensated_amp),
                                "compensated_amp_at_peak": jf(a.compensated_amp_at_peak),
                            }),
                        );
                    }
                    Err(e) => {
                        results.insert("asymptotics_unavailable".into(), json!(e.to_string()));
                    }
                }
            }
        }
        Params::StripSweep(p) => {
            let spec = StripSweepSpec {
                forcing: p.forcing,
                trace_forcing: p.trace_forcing,
                window: p.window,
                x_samples: p.x_samples,
            };
            let records = p
                .epsilon_list
                .par_iter()
                .map(|&e| strip_sweep_point(e, &spec))
                .collect::<Result<Vec<_>, _>>()
                .map_err(numerical)?;
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        f(r.asymptotics.epsilon),
                        f(r.asymptotics.peak_xi),
                        f(r.asymptotics.compensated_amp),
                        r.zero_crossings.to_string(),
                        f(r.log10_max_amp),
                    ]
                })
                .collect();
            out.csv(
                "strip_sweep.csv",
                "epsilon,peak_xi,compensated_amp,zero_crossings,log10_max_amp",
                &rows,
            )?;
            let asym: Vec<_> = records.iter().map(|r| r.asymptotics).collect();
            let slope = peak_law_slope(&asym);
            out.csv(
                "strip_sweep_fit.csv",
                "slope_fit,n_points",
                &[vec![
                    slope.map_or_else(|| "nan".into(), f),
                    records.len().to_string(),
                ]],
            )?;
            results.insert("slope_fit".into(), slope.map_or(Value::Null, jf));
            for r in &records {
                let c = r.asymptotics.compensated_amp;
                report.check(
                    &format!("compensated_amp[eps={}]", f(r.asymptotics.epsilon)),
                    (0.9..=1.1).contains(&c),
                    format!("{} in [0.9, 1.1]", f(c)),
                );
                report.check(
                    &format!("trace_is_real[eps={}]", f(r.asymptotics.epsilon)),
                    r.trace_imag_ratio < 1e-10,
                    format!("max|Im u| / max|u| = {}", f(r.trace_imag_ratio)),
                );
            }
            if let Some(s) = slope {
                report.check(
                    "peak_law_slope",
                    (s - 1.0).abs() <= 0.05,
                    format!("{} within 1 +/- 0.05", f(s)),
                );
            }
        }
        Params::LayerVerify(p) => {
            let checks = p
                .xi_list
                .iter()
                .map(|&xi| verify_identities(xi, &p.cutoff))
                .collect::<Result<Vec<_>, _>>()
                .map_err(numerical)?;
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        f(c.xi1),
                        f(c.a_density),
                        f(c.p_squared),
                        f(c.b_density),
                        f(c.q_squared),
                        f(c.rel_err_a),
                        f(c.rel_err_b),
                    ]
                })
                .collect();
            out.csv(
                "layer.csv",
                "xi1,a_density,p_squared,b_density,q_squared,rel_err_a,rel_err_b",
                &rows,
            )?;
            for c in &checks {
                report.check(
                    &format!("energy_identities[xi1={}]", f(c.xi1)),
                    c.rel_err_a < 1e-8 && c.rel_err_b < 1e-8,
                    format!(
                        "rel_err_a = {}, rel_err_b = {}",
                        f(c.rel_err_a),
                        f(c.rel_err_b)
                    ),
                );
            }
        }
        Params::AnnulusSolve(p) => {
            let model = AnnulusModel {
                r0: p.r0,
                epsilon: p.epsilon_list[0],
                n_max: p.n_max,
                forcing: p.forcing,
                cutoff: p.cutoff,
            };
            let sol = mode_solve(&model).map_err(numerical)?;
            let e2 = model.epsilon * model.epsilon;
            let mut worst = 0.0f64;
            let rows: Vec<Vec<String>> = sol
                .modes
                .iter()
                .map(|m| {
                    if let Some(v) = m.v_hat {
                        let res = ((m.sigma_a + e2 * m.sigma_b) * v - m.f_hat).abs()
                            / m.f_hat.abs().max(f64::MIN_POSITIVE);
                        if m.f_hat != 0.0 {
                            worst = worst.max(res);
                        }
                    }
                    vec![
                        m.n.to_string(),
                        f(m.sigma_r0),
                        f(m.sigma_a),
                        f(m.sigma_b),
                        f(m.f_hat),
                        m.v_hat.map_or_else(String::new, f),
                        (m.v_hat.is_none() as u8).to_string(),
                    ]
                })
                .collect();
            out.csv(
                "annulus_modes.csv",
                "n,sigma_r0,sigma_a,sigma_b,f_hat,v_hat,excluded",
                &rows,
            )?;
            report.check(
                "mode_residual",
                worst < 1e-12,
                format!("max relative residual {}", f(worst)),
            );
            results.insert("crossover_n".into(), json!(sol.crossover_n));
            results.insert(
                "crossover_estimate".into(),
                jf(crossover_estimate(model.epsilon, model.r0)),
            );
            results.insert("excluded_modes".into(), json!(sol.excluded));
            results.insert("normalization".into(), json!(NORMALIZATION));
        }
        Params::AnnulusSweep(p) => {
            let model = AnnulusModel {
                r0: p.r0,
                epsilon: p.epsilon_list[0],
                n_max: p.n_max,
                forcing: p.forcing,
                cutoff: p.cutoff,
            };
            let records = divergence_sweep(&model, &p.epsilon_list).map_err(numerical)?;
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let mut row =
                        vec![f(r.epsilon), r.crossover_n.to_string(), f(r.log10_sup_vhat)];
                    row.extend(r.log10_hm.iter().map(|v| f(*v)));
                    row
                })
                .collect();
            out.csv(
                "annulus_sweep.csv",
                "epsilon,crossover_n,log10_sup_vhat,log10_Hm0,log10_Hm1,log10_Hm2,log10_Hm3",
                &rows,
            )?;
            for r in &records {
                let est = crossover_estimate(r.epsilon, p.r0);
                report.check(
                    &format!("crossover[eps={}]", f(r.epsilon)),
                    (r.crossover_n as f64 - est).abs() <= 1.0,
                    format!("{} vs estimate {}", r.crossover_n, f(est)),
                );
            }
            if records.len() > 1 {
                let inc = |g: &dyn Fn(&sensilab::annulus::DivergenceRecord) -> f64| {
                    records.windows(2).all(|w| g(&w[1]) > g(&w[0]))
                };
                report.check(
                    "sup_increasing",
                    inc(&|r| r.log10_sup_vhat),
                    "log10 sup |v| strictly increasing as epsilon decreases",
                );
                for m in 0..4 {
                    report.check(
                        &format!("Hm{m}_increasing"),
                        inc(&|r| r.log10_hm[m]),
                        format!("log10 H^-{m} proxy strictly increasing as epsilon decreases"),
                    );
                }
            }
            let small: Vec<_> = records
                .iter()
                .copied()
                .filter(|r| r.epsilon <= 1e-3)
                .collect();
            let slope = sup_growth_slope(&small);
            if let Some(s) = slope {
                report.check(
                    "sup_growth_slope",
                    (1.5..=2.1).contains(&s),
                    format!("{} in [1.5, 2.1] over epsilon <= 1e-3", f(s)),
                );
            }
            results.insert("sup_growth_slope".into(), slope.map_or(Value::Null, jf));
            results.insert("normalization".into(), json!(NORMALIZATION));
        }
        Params::Hadamard(p) => {
            let (norms, slope) = hadamard_growth_slope(&p.forcing, p.y, &p.lambda_list, p.samples)
                .map_err(numerical)?;
            let rows: Vec<Vec<String>> = p
                .lambda_list
                .iter()
                .zip(&norms)
                .map(|(l, n)| vec![f(*l), f(*n)])
                .collect();
            out.csv("hadamard.csv", "lambda,ln_l2_norm", &rows)?;
            let top = p.lambda_list.iter().copied().fold(f64::MIN, f64::max);
            let grid = FreqGrid::new(top, p.samples).map_err(numerical)?;
            let t = hadamard_temperedness(&p.forcing, p.y, &grid).map_err(numerical)?;
            results.insert("slope".into(), slope.map_or(Value::Null, jf));
            results.insert("tempered".into(), json!(t.tempered));
            results.insert("edge_log_slope".into(), jf(t.edge_log_slope));
        }
        Params::CoshDemo(p) => {
            let x = XGrid::new(p.window.0, p.window.1, p.x_samples).map_err(numerical)?;
            let numeric = cosh_numeric(p.lambda, &x, p.samples).map_err(numerical)?;
            let samples = x
                .nodes()
                .iter()
                .map(|&xv| cosh_sequence(p.lambda, xv))
                .collect::<Result<Vec<_>, _>>()
                .map_err(numerical)?;
            let scale = samples.iter().map(|s| s.exact.norm()).fold(0.0, f64::max);
            let mut err_num = 0.0f64;
            let mut err_lead = 0.0f64;
            let rows: Vec<Vec<String>> = numeric
                .x
                .iter()
                .zip(&numeric.values)
                .zip(&samples)
                .map(|((xv, u), s)| {
                    err_num = err_num.max((u - s.exact).norm());
                    err_lead =
                        err_lead.max((Complex64::new(s.leading_approx, 0.0) - s.exact).norm());
                    vec![
                        f(*xv),
                        f(s.exact.re),
                        f(s.exact.im),
                        f(u.re),
                        f(u.im),
                        f(s.leading_approx),
                    ]
                })
                .collect();
            out.csv(
                "cosh_demo.csv",
                "x,exact_re,exact_im,numeric_re,numeric_im,leading_approx",
                &rows,
            )?;
            let (rn, rl) = (err_num / scale, err_lead / scale);
            report.check(
                "quadrature_vs_exact",
                rn < 1e-6,
                format!("sup relative error {}", f(rn)),
            );
            report.check(
                "leading_approx_vs_exact",
                rl < 1e-6,
                format!("sup relative error {}", f(rl)),
            );
        }
    }

    let summary = json!({
        "subcommand": config.subcommand.as_str(),
        "versions": {
            "sensilab": sensilab_version(),
            "sensilab-cli": env!("CARGO_PKG_VERSION"),
        },
        "config": toml_to_json(&toml::Value::Table(config.effective.clone())),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "all_checks_passed": report.all_passed(),
        "results": Value::Object(results),
        "outputs": out.files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("summary is serialisable");
    text.push('\n');
    out.write("summary.json", text.as_bytes())?;
    report.files = out.files;
    Ok(report)
}

fn sensilab_version() -> &'static str {
    sensilab::VERSION
}

/// One line per check, for terminal output.
pub fn render_checks(report: &RunReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "[{tag}] {}: {}", c.name, c.detail);
    }
    s
}
