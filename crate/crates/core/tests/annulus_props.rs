use proptest::prelude::*;
use sensilab::annulus::{
    crossover, harmonic_mode_profile, mode_solve, r0_symbol, AnnulusModel, ModeForcing,
};

fn model(r0: f64, eps: f64) -> AnnulusModel {
    AnnulusModel::new(r0, eps, 64).unwrap()
}

proptest! {
    #[test]
    fn mode_profile_is_harmonic(n in -25i64..25, r0 in 0.2f64..0.8, t in 0.05f64..0.95) {
        // r² g'' + r g' - n² g = 0 by central differences.
        let r = r0 + t * (1.0 - r0);
        let h = 1e-4 * (1.0 - r0);
        prop_assume!(r - h > r0 && r + h < 1.0);
        let g = |x: f64| harmonic_mode_profile(n, r0, x).unwrap();
        let d1 = (g(r + h) - g(r - h)) / (2.0 * h);
        let d2 = (g(r + h) - 2.0 * g(r) + g(r - h)) / (h * h);
        let nn = (n * n) as f64;
        let residual = r * r * d2 + r * d1 - nn * g(r);
        let scale = r * r * d2.abs() + r * d1.abs() + nn * g(r).abs();
        prop_assert!(residual.abs() <= 1e-5 * scale.max(1e-12));
        prop_assert!(g(r0).abs() < 1e-14);
        prop_assert!((g(1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn modes_are_even(r0 in 0.2f64..0.8, eps in 1e-6f64..1.0) {
        let sol = mode_solve(&model(r0, eps)).unwrap();
        for n in 1..=64 {
            let a = sol.mode(n).unwrap();
            let b = sol.mode(-n).unwrap();
            prop_assert_eq!(a.v_hat, b.v_hat);
            prop_assert_eq!(a.sigma_a, b.sigma_a);
        }
    }

    #[test]
    fn modal_equation_holds(r0 in 0.2f64..0.8, eps in 1e-6f64..1.0) {
        let e2 = eps * eps;
        let sol = mode_solve(&model(r0, eps)).unwrap();
        for m in &sol.modes {
            if let Some(v) = m.v_hat {
                let res = (m.sigma_a + e2 * m.sigma_b) * v - m.f_hat;
                prop_assert!(res.abs() <= 1e-12 * m.f_hat.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn crossover_grows_as_epsilon_shrinks(r0 in 0.2f64..0.8, e in 1e-6f64..0.5, f in 1.0f64..100.0) {
        let big = crossover(&model(r0, e * f));
        let small = crossover(&model(r0, e));
        prop_assert!(small >= big);
    }
}

#[test]
fn past_crossover_the_regulariser_dominates() {
    for r0 in [0.3, 0.5] {
        let eps = 1e-4;
        let m = AnnulusModel::new(r0, eps, 80).unwrap();
        let sol = mode_solve(&m).unwrap();
        let n = 2 * sol.crossover_n;
        let entry = sol.mode(n).unwrap();
        let want = entry.f_hat / (2.0 * eps * eps * (n as f64).powi(3));
        assert!(
            (entry.v_hat.unwrap() / want - 1.0).abs() < 0.05,
            "r0={r0}, n={n}"
        );
    }
}

#[test]
fn zero_mode_is_excluded_and_zero_forcing_gives_zero() {
    let mut m = model(0.5, 1e-3);
    let sol = mode_solve(&m).unwrap();
    assert!(sol.excluded.contains(&0));
    assert!(sol.mode(0).unwrap().v_hat.is_none());
    m.forcing = ModeForcing::Zero;
    let sol = mode_solve(&m).unwrap();
    assert!(sol.modes.iter().all(|e| e.v_hat.is_none_or(|v| v == 0.0)));
}

#[test]
fn r0_symbol_of_mode_zero() {
    let r0: f64 = 0.5;
    let h = 1e-6;
    let fd = (harmonic_mode_profile(0, r0, r0 + h).unwrap()
        - harmonic_mode_profile(0, r0, r0).unwrap())
        / h;
    assert!((fd / r0_symbol(0, r0).unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn invalid_models_are_rejected() {
    assert!(AnnulusModel::new(1.0, 0.1, 10).is_err());
    assert!(AnnulusModel::new(0.5, 0.0, 10).is_err());
    assert!(AnnulusModel::new(0.5, 0.1, 0).is_err());
    assert!(harmonic_mode_profile(2, 0.5, 0.4).is_err());
}

/// Second-order finite-difference solve of `r² g'' + r g' - n² g = 0`,
/// `g(r0) = 0`, `g(1) = 1`, by the Thomas algorithm.
fn radial_fd_solve(n: i64, r0: f64, m: usize) -> Vec<(f64, f64)> {
    let h = (1.0 - r0) / m as f64;
    let nn = (n * n) as f64;
    let k = m - 1;
    let (mut a, mut b, mut c, mut d) = (vec![0.0; k], vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    for i in 0..k {
        let r = r0 + (i + 1) as f64 * h;
        a[i] = r * r / (h * h) - r / (2.0 * h);
        b[i] = -2.0 * r * r / (h * h) - nn;
        c[i] = r * r / (h * h) + r / (2.0 * h);
    }
    d[k - 1] = -c[k - 1];
    for i in 1..k {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    let mut g = vec![0.0; k];
    g[k - 1] = d[k - 1] / b[k - 1];
    for i in (0..k - 1).rev() {
        g[i] = (d[i] - c[i] * g[i + 1]) / b[i];
    }
    (0..k).map(|i| (r0 + (i + 1) as f64 * h, g[i])).collect()
}

#[test]
fn profile_matches_radial_finite_difference_solve() {
    for n in [1, 3, 8] {
        let fd = radial_fd_solve(n, 0.5, 4000);
        for (r, g) in fd.iter().step_by(400) {
            let exact = harmonic_mode_profile(n, 0.5, *r).unwrap();
            assert!((g - exact).abs() < 1e-5, "n={n}, r={r}");
        }
    }
    let v = harmonic_mode_profile(1, 0.5, 0.75).unwrap();
    assert!((v - (0.75 - 0.25 / 0.75) / 0.75).abs() < 1e-15);
}

#[test]
fn crossover_matches_integer_scan_of_symbol_ratio() {
    use sensilab::layer::CutoffSpec;
    for r0 in [0.3f64, 0.5, 0.7] {
        for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let mut m = model(r0, eps);
            m.cutoff = CutoffSpec::new(0.25, 0.5).unwrap();
            let scan = (1..=64i32)
                .filter(|&n| {
                    let ratio = 4.0 * r0.powi(2 * n - 2) / (1.0 - r0.powi(2 * n)).powi(2);
                    ratio > eps * eps
                })
                .max()
                .map_or(1, |n| n as i64 + 1);
            assert_eq!(crossover(&m), scan, "r0={r0}, eps={eps}");
        }
    }
    assert_eq!(crossover(&model(0.5, 1e-3)), 12);
}

#[test]
fn large_epsilon_favours_low_modes() {
    let sol = mode_solve(&model(0.5, 1.0)).unwrap();
    let best = sol
        .modes
        .iter()
        .filter_map(|m| m.v_hat.map(|v| (m.n, v.abs())))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    assert!(best.0.abs() <= 3, "argmax at n={}", best.0);
}

#[test]
fn single_epsilon_sweep_has_one_record_and_no_fit() {
    use sensilab::annulus::{divergence_sweep, sup_growth_slope};
    let recs = divergence_sweep(&model(0.5, 1e-3), &[1e-3]).unwrap();
    assert_eq!(recs.len(), 1);
    assert!(sup_growth_slope(&recs).is_none());
}
