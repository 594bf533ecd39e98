//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensilab::annulus::{
    crossover_estimate, divergence_sweep, harmonic_mode_profile, r0_symbol, sup_growth_slope,
    AnnulusModel,
};
use sensilab::layer::{verify_identities, CutoffSpec};
use sensilab::opsym::{
    check_sl, is_elliptic, parse_operator, polynomial_roots, ComplexBivarPoly, SlStatus, XiSign,
};
use sensilab::spectral::{FreqGrid, LogComplex, XGrid};
use sensilab::strip::{
    beta_hat, cosh_numeric, cosh_sequence, hadamard_growth_slope, hadamard_temperedness,
    peak_law_slope, strip_sweep_point, synthesize_trace, trace_asymptotics, StripProblem,
    StripSweepSpec,
};
use sensilab::Forcing;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn op(s: &str) -> ComplexBivarPoly {
    parse_operator(s).expect("valid operator")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let lap = op("D1^2+D2^2");
    let bi = op("(D1^2+D2^2)^2");
    let v1 = check_sl(&lap, &[op("u")]);
    let v2 = check_sl(&lap, &[op("D2")]);
    let v3 = check_sl(&lap, &[op("D1 - i*D2")]);
    let v4 = check_sl(&bi, &[op("D1^2+D2^2"), op("D2*(D1^2+D2^2)")]);
    let v5 = check_sl(&bi, &[op("u"), op("D2")]);
    let elapsed = start.elapsed().as_secs_f64();

    let ok1 = v1.status == SlStatus::Satisfied;
    let ok2 = v2.status == SlStatus::Satisfied;
    let ok3 = v3.status == SlStatus::Violated && v3.violating_signs == vec![XiSign::Plus];
    let ok4 = v4.status == SlStatus::Violated
        && v4
            .null_vector
            .as_ref()
            .is_some_and(|nv| nv.len() == 2 && nv[0].norm() > 0.5 && nv[1].norm() < 1e-8);
    let want = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    let ok5 = v5.status == SlStatus::Satisfied
        && XiSign::BOTH.iter().all(|&s| {
            let r = v5.report(s).expect("both signs reported");
            (r.det - 1.0).norm() < 1e-9
                && (0..2).all(|i| (0..2).all(|j| (r.matrix[(i, j)] - want[i][j]).norm() < 1e-9))
        });
    outcome(
        ok1 && ok2 && ok3 && ok4 && ok5 && elapsed < 1.0,
        format!(
            "verdicts [{:?}, {:?}, {:?} at {:?}, {:?}, {:?}], runtime {:.3}s",
            v1.status, v2.status, v3.status, v3.violating_signs, v4.status, v5.status, elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let unit = Forcing::BandFlat {
        xi_lo: 0.0,
        xi_hi: f64::INFINITY,
    };
    let grid = FreqGrid::new(300.0, 16).expect("grid");
    let p0 = StripProblem::with_grid(0.0, unit, grid.clone()).expect("problem");
    let xi = 15.0;
    let b0 = beta_hat(&p0, xi).expect("beta");
    // |β̂⁰ (-iξ) e^{2ξ} / (2 φ̂) - 1|, as written.
    let literal =
        (b0 * LogComplex::from_complex(Complex64::new(0.0, -xi))).scale_log(2.0 * xi - 2f64.ln());
    let dev_literal = (literal.to_complex() - 1.0).norm();
    // β̂⁰ against the stated asymptote 2 φ̂ e^{2ξ} / (-iξ).
    let stated = LogComplex::new(2.0 * xi + 2f64.ln(), 0.0)
        / LogComplex::from_complex(Complex64::new(0.0, -xi));
    let ratio_stated = (b0 / stated).to_complex();
    // β̂⁰ against φ̂ e^{2ξ} / (2iξ), which follows from the closed form.
    let exact =
        LogComplex::new(2.0 * xi, 0.0) / LogComplex::from_complex(Complex64::new(0.0, 2.0 * xi));
    let dev_exact = ((b0 / exact).to_complex() - 1.0).norm();

    let pe = StripProblem::with_grid(0.1, unit, grid).expect("problem");
    let be = beta_hat(&pe, 200.0).expect("beta").to_complex();
    let dev_reg = (be * 200.0 * 0.01 - 1.0).norm();

    let pass_a = dev_literal < 1e-6;
    let pass_b = dev_reg < 1e-4;
    outcome(
        pass_a && pass_b,
        format!(
            "limit asymptote at xi=15: deviation {dev_literal:.3e} (needs < 1e-6; ratio to the stated \
             asymptote is {:.6}{:+.1e}i, deviation from phi e^(2xi)/(2i xi) is {dev_exact:.1e}); \
             eps=0.1 asymptote at xi=200: deviation {dev_reg:.1e} (needs < 1e-4)",
            ratio_stated.re, ratio_stated.im
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let forcing = StripSweepSpec::default().forcing;
    let recs: Vec<_> = eps
        .iter()
        .map(|&e| {
            trace_asymptotics(&StripProblem::new(e, forcing).expect("problem"))
                .expect("asymptotics")
        })
        .collect();
    let slope = peak_law_slope(&recs).expect("slope");
    let amp = recs[2].compensated_amp;
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        (slope - 1.0).abs() <= 0.05 && (0.9..=1.1).contains(&amp) && elapsed < 10.0,
        format!("peak-law slope {slope:.4}, compensated amplitude at eps=1e-4 {amp:.6}, runtime {elapsed:.2}s"),
    )
}

fn criterion_4() -> Outcome {
    let spec = StripSweepSpec::default();
    let a = strip_sweep_point(1e-3, &spec).expect("sweep point");
    let b = strip_sweep_point(1e-5, &spec).expect("sweep point");
    let ratio = b.zero_crossings as f64 / a.zero_crossings as f64;
    let target = 5.0 / 3.0;
    outcome(
        (ratio / target - 1.0).abs() <= 0.1,
        format!(
            "crossings on [0, 4]: {} at 1e-3, {} at 1e-5, ratio {ratio:.4} (target 5/3 +/- 10%)",
            a.zero_crossings, b.zero_crossings
        ),
    )
}

fn criterion_5() -> Outcome {
    let eps = 1e-4;
    let forcing = StripSweepSpec::default().forcing;
    let peak = trace_asymptotics(&StripProblem::new(eps, forcing).expect("problem"))
        .expect("asymptotics")
        .peak_xi;
    let x = XGrid::new(-4.0, 4.0, 801).expect("x grid");
    let top = synthesize_trace(eps, forcing, 1.0, &x, None)
        .expect("trace")
        .signal
        .max_abs();
    let mid = synthesize_trace(eps, forcing, 0.5, &x, None)
        .expect("trace")
        .signal
        .max_abs();
    let ratio = mid / top;
    let bound = 2.0 * (-0.5 * peak).exp();
    outcome(
        ratio <= bound,
        format!(
            "max|u(.,0.5)| / max|u(.,1)| = {ratio:.3e}, bound 2 exp(-{peak:.3}/2) = {bound:.3e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    // Cutoff fully open on the whole test set.
    let cutoff = CutoffSpec::new(0.25, 0.5).expect("cutoff");
    let mut worst: f64 = 0.0;
    let mut closed_form: f64 = 0.0;
    for xi in [1.0, 3.0, 10.0] {
        let c = verify_identities(xi, &cutoff).expect("identities");
        worst = worst.max(c.rel_err_a).max(c.rel_err_b);
        closed_form = closed_form
            .max((c.a_density / (2.0 * xi) - 1.0).abs())
            .max((c.b_density / (2.0 * xi * xi * xi) - 1.0).abs());
    }
    outcome(
        worst < 1e-8 && closed_form < 1e-8,
        format!("max rel. error vs p^2, q^2: {worst:.2e}; vs 2|xi|, 2|xi|^3: {closed_form:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let mut pass = true;
    let mut parts = Vec::new();
    for r0 in [0.3, 0.5, 0.7] {
        let model = AnnulusModel::new(r0, eps[0], 64).expect("model");
        let recs = divergence_sweep(&model, &eps).expect("sweep");
        let max_off = recs
            .iter()
            .map(|r| (r.crossover_n as f64 - crossover_estimate(r.epsilon, r0)).abs())
            .fold(0.0, f64::max);
        let small: Vec<_> = recs.iter().copied().filter(|r| r.epsilon <= 1e-3).collect();
        let slope = sup_growth_slope(&small).expect("slope");
        let increasing =
            (0..4).all(|m| recs.windows(2).all(|w| w[1].log10_hm[m] > w[0].log10_hm[m]));
        pass &= max_off <= 1.0 && (1.5..=2.1).contains(&slope) && increasing;
        parts.push(format!(
            "r0={r0}: crossover offset <= {max_off:.2}, sup slope {slope:.3}, H^-m increasing {increasing}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let lambdas = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];
    let (_, slope) =
        hadamard_growth_slope(&Forcing::Rational, 1.0, &lambdas, 1 << 14).expect("norms");
    let slope = slope.expect("slope");
    let gauss = Forcing::Gaussian { sigma: 1.0 };
    let grid = FreqGrid::new(40.0, 1 << 14).expect("grid");
    let tempered = [0.0, 0.5, 1.0, 5.0].iter().all(|&y| {
        hadamard_temperedness(&gauss, y, &grid)
            .expect("classifier")
            .tempered
    });
    let rational = hadamard_temperedness(&Forcing::Rational, 1.0, &grid)
        .expect("classifier")
        .tempered;
    outcome(
        (0.8..=1.0).contains(&slope) && tempered && !rational,
        format!("ln-norm slope {slope:.4} for (1+xi^2)^-1; gaussian tempered: {tempered}; rational tempered: {rational}"),
    )
}

fn criterion_9() -> Outcome {
    let lambda = 20.0;
    let x = XGrid::new(-2.0, 2.0, 401).expect("x grid");
    let numeric = cosh_numeric(lambda, &x, 1 << 16).expect("quadrature");
    let samples: Vec<_> = x
        .nodes()
        .iter()
        .map(|&xv| cosh_sequence(lambda, xv).expect("closed form"))
        .collect();
    let scale = samples.iter().map(|s| s.exact.norm()).fold(0.0, f64::max);
    let err_num = numeric
        .values
        .iter()
        .zip(&samples)
        .map(|(u, s)| (u - s.exact).norm())
        .fold(0.0, f64::max)
        / scale;
    let err_lead = samples
        .iter()
        .map(|s| (s.exact - s.leading_approx).norm())
        .fold(0.0, f64::max)
        / scale;
    outcome(
        err_num < 1e-6 && err_lead < 1e-6,
        format!("quadrature vs exact {err_num:.2e}, leading approximation vs exact {err_lead:.2e}"),
    )
}

/// Fourth-order one-sided difference at the left end point.
fn forward_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-25.0 * f(x) + 48.0 * f(x + h) - 36.0 * f(x + 2.0 * h) + 16.0 * f(x + 3.0 * h)
        - 3.0 * f(x + 4.0 * h))
        / (12.0 * h)
}

fn criterion_10() -> Outcome {
    let mut worst_fd: f64 = 0.0;
    for r0 in [0.3, 0.5, 0.7] {
        for n in -30i64..=30 {
            let fd = forward_derivative(
                |r| harmonic_mode_profile(n, r0, r).expect("profile"),
                r0,
                1e-4,
            );
            let s = r0_symbol(n, r0).expect("symbol");
            worst_fd = worst_fd.max((fd / s - 1.0).abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_res: f64 = 0.0;
    let mut all_elliptic = true;
    for _ in 0..20 {
        let mut quad = || {
            let a: f64 = rng.gen_range(0.5..3.0);
            let c: f64 = rng.gen_range(0.5..3.0);
            let b: f64 = rng.gen_range(-0.9..0.9) * (a * c).sqrt();
            ComplexBivarPoly::from_terms([
                ((2, 0), Complex64::new(a, 0.0)),
                ((1, 1), Complex64::new(2.0 * b, 0.0)),
                ((0, 2), Complex64::new(c, 0.0)),
            ])
        };
        let p = &quad() * &quad();
        all_elliptic &= is_elliptic(&p).expect("ellipticity");
        for s in XiSign::BOTH {
            let coeffs = p.restrict_d1(s.d1_value());
            for lam in polynomial_roots(&coeffs).expect("roots") {
                let value: Complex64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * lam.powu(k as u32))
                    .sum();
                let scale: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a.norm() * lam.norm().powi(k as i32))
                    .sum();
                worst_res = worst_res.max(value.norm() / scale);
            }
        }
    }
    outcome(
        worst_fd < 1e-6 && worst_res < 1e-10 && all_elliptic,
        format!("r0_symbol vs finite difference {worst_fd:.2e}; max normalised root residual {worst_res:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Shapiro-Lopatinskii verdict suite", criterion_1),
        ("strip asymptotes", criterion_2),
        ("spectral peak law and compensated amplitude", criterion_3),
        ("zero-crossing count ratio", criterion_4),
        ("interior decay of the strip field", criterion_5),
        ("layer energy identities", criterion_6),
        ("annulus crossover, growth and H^-m proxies", criterion_7),
        ("Hadamard growth and temperedness", criterion_8),
        ("truncated cosh sequence", criterion_9),
        ("annulus symbol and root residual oracles", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {tag}: {name}: {}", i + 1, o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
