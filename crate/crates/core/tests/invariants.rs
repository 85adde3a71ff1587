//! Cross-module invariants: kernel relations behind the optimal weights,
//! margin/objective agreement between independent routes, robustness
//! geometry of the perturbed weights, and sampled univalence.

use std::f64::consts::PI;

use dfc_core::coeffs::{
    epsilon_trick, mu_bound, optimal_coeffs_t1, optimal_coeffs_t2, ControlConfig,
};
use dfc_core::dynamics::{detect_cycles, MapSpec};
use dfc_core::oracle::{rho_t1, rho_t2};
use dfc_core::stability::{
    boundary_curve, build_char_poly, max_root_modulus, mu_margin, multiplier_region,
    self_intersections,
};
use dfc_core::trigpoly::{fejer_kernel, gamma_coefficients_t1, CoefficientVector, FejerKind};

/// Im{e^{it} p(e^{it})} for the cycle-length-1 optimum is a scaled
/// first-kind Fejér kernel times sin t.
#[test]
fn kernel_relation_t1() {
    for n in 2..=12usize {
        let a = optimal_coeffs_t1(n);
        let nf = n as f64;
        let scale = 2.0 * (1.0 - (PI / (nf + 1.0)).cos()) / (nf + 1.0);
        let mut worst = 0.0_f64;
        for k in 0..2048 {
            let t = 2.0 * PI * k as f64 / 2048.0;
            let s: f64 = a
                .weights()
                .iter()
                .enumerate()
                .map(|(j, &aj)| aj * ((j + 1) as f64 * t).sin())
                .sum();
            let rhs = scale * t.sin() * fejer_kernel(n - 1, FejerKind::First, t);
            worst = worst.max((s - rhs).abs());
        }
        assert!(worst < 1e-9, "n = {n}: residual {worst}");
    }
}

/// Re{e^{it} p(e^{2it})} for the cycle-length-2 optimum is a scaled
/// second-kind Fejér kernel times cos t.
#[test]
fn kernel_relation_t2() {
    for n in 2..=12usize {
        let a = optimal_coeffs_t2(n);
        let n2 = (n * n) as f64;
        let mut worst = 0.0_f64;
        for k in 0..2048 {
            let t = 2.0 * PI * k as f64 / 2048.0;
            let c: f64 = a
                .weights()
                .iter()
                .enumerate()
                .map(|(j, &aj)| aj * ((2 * j + 1) as f64 * t).cos())
                .sum();
            let rhs = t.cos() * fejer_kernel(n - 1, FejerKind::Second, 2.0 * t) / n2;
            worst = worst.max((c - rhs).abs());
        }
        assert!(worst < 1e-9, "n = {n}: residual {worst}");
    }
}

/// S(t)/sin t of the optimal vector is a nonnegative cosine polynomial,
/// so its coefficients obey |γ_2| <= cos(π/(n+1)) |γ_1|, with equality
/// for the extremal family.
#[test]
fn fejer_coefficient_bound_on_optimal_gammas() {
    for n in 2..=32usize {
        let g = gamma_coefficients_t1(&optimal_coeffs_t1(n));
        let bound = (PI / (n as f64 + 1.0)).cos() * g[0].abs();
        assert!(g[1].abs() <= bound + 1e-12, "n = {n}");
        assert!(g[1].abs() >= bound - 1e-12, "extremal equality, n = {n}");
    }
}

/// The bisection margin agrees with the curve-based objective computed
/// through an entirely different route (sign-change zeros of the
/// conjugate pair): μ_o = -1/ρ₁ for T = 1 and 1/ρ₂² for T = 2.
#[test]
fn margin_agrees_with_curve_objective() {
    let vectors = [
        vec![0.5, 0.3, 0.2],
        vec![0.8, -0.1, 0.3],
        vec![0.25, 0.25, 0.25, 0.25],
        vec![1.2, -0.4, 0.1, 0.1],
    ];
    for w in vectors {
        let a = CoefficientVector::new(w).unwrap();
        let m1 = mu_margin(&a, 1);
        let obj1 = -1.0 / rho_t1(&a);
        assert!(
            (m1 - obj1).abs() <= 1e-6 * m1,
            "T=1 {:?}: {m1} vs {obj1}",
            a.weights()
        );
        let m2 = mu_margin(&a, 2);
        let obj2 = 1.0 / rho_t2(&a).powi(2);
        assert!(
            (m2 - obj2).abs() <= 1e-6 * m2,
            "T=2 {:?}: {m2} vs {obj2}",
            a.weights()
        );
    }
}

/// The closed loop is stable at every sampled μ strictly inside
/// (-μ_o, 0) and unstable beyond it. (The raw max-root-modulus is not
/// monotone for the optimal vectors: it touches 1 at the isolated
/// tangency multipliers inside the interval and comes back; the margin
/// is the first exit, which the bisection bracket from 0 reports.)
#[test]
fn first_exit_is_the_margin() {
    for n in 1..=8usize {
        for t in [1usize, 2] {
            let a = if t == 1 {
                optimal_coeffs_t1(n)
            } else {
                optimal_coeffs_t2(n)
            };
            let mu_o = mu_bound(t, n).unwrap();
            assert!((mu_margin(&a, t) - mu_o).abs() <= 1e-6 * mu_o);
            for k in 1..=100 {
                let m = mu_o * (1.0 - 1e-6) * k as f64 / 100.0;
                let poly = build_char_poly(&a, t, -m);
                assert!(
                    max_root_modulus(&poly) < 1.0,
                    "T={t} n={n}: unstable inside the margin at mu=-{m}"
                );
            }
            for k in 1..=20 {
                let m = mu_o * (1.0 + 1e-3) + (1.0 - 1e-3) * k as f64 / 20.0;
                let poly = build_char_poly(&a, t, -m);
                assert!(
                    max_root_modulus(&poly) >= 1.0 - 1e-9,
                    "T={t} n={n}: stable beyond the margin at mu=-{m}"
                );
            }
        }
    }
}

/// The unperturbed n = 5 region boundary touches the real axis at the
/// tangency abscissas 1/C(t*) strictly inside (-μ_o, -1); the 0.005
/// perturbation lifts it clear.
#[test]
fn epsilon_trick_separates_region_from_axis() {
    let a = optimal_coeffs_t1(5);
    // Double zeros of S sit where cos 3t = 0.
    let touches = [PI / 2.0, 5.0 * PI / 6.0];
    let clearance = |coeffs: &CoefficientVector, x: f64| {
        multiplier_region(coeffs, 1, 65536)
            .iter()
            .filter(|s| (s.point.re - x).abs() <= 0.01 * x.abs())
            .map(|s| s.point.im.abs())
            .fold(f64::INFINITY, f64::min)
    };
    let perturbed = epsilon_trick(&a, 0.005);
    for t_star in touches {
        let c: f64 = a
            .weights()
            .iter()
            .enumerate()
            .map(|(j, &aj)| aj * ((j + 1) as f64 * t_star).cos())
            .sum();
        let abscissa = 1.0 / c;
        assert!(abscissa < -1.0 && abscissa > -mu_bound(1, 5).unwrap());
        let bare = clearance(&a, abscissa);
        let lifted = clearance(&perturbed, abscissa);
        assert!(bare < 1e-7, "expected a touch at {abscissa}: {bare}");
        assert!(lifted > 1e-3, "expected clearance at {abscissa}: {lifted}");
        assert!(lifted > bare);
    }
}

/// Sampled univalence of z (p(z))² for the cycle-length-2 optima: the
/// circle image has no self-intersections beyond conjugate symmetry.
#[test]
fn univalence_sampling_t2() {
    for n in 2..=8usize {
        let a = optimal_coeffs_t2(n);
        let pts: Vec<_> = boundary_curve(&a, 2, 8192)
            .iter()
            .map(|s| s.point)
            .collect();
        let crossings = self_intersections(&pts, 1e-7);
        assert_eq!(crossings, 0, "n = {n}: {crossings} self-intersections");
    }
}

/// The stability-module curve and the trigonometric pair describe the
/// same object: for cycle length 2, the curve point at ω is the square
/// of the pair value at t = ω/2.
#[test]
fn curve_is_square_of_pair_for_t2() {
    use dfc_core::stability::curve_point;
    use dfc_core::trigpoly::TrigPolyPair;
    let a = optimal_coeffs_t2(4);
    let pair = TrigPolyPair::new(a.clone(), 2).unwrap();
    for k in 0..=64 {
        let t = PI * k as f64 / 64.0;
        let (c, s) = pair.eval(t);
        let square = num_complex::Complex64::new(c, s).powi(2);
        let w = curve_point(&a, 2, 2.0 * t);
        assert!((square - w).norm() < 1e-12, "t = {t}");
    }
}

/// Objective values read directly off the sampled curves: the most
/// negative real-axis crossing is -tan²(π/(2(n+1))) for the T = 1
/// optimum and -1/n² for the T = 2 optimum (the curve of z(p(z))²).
#[test]
fn curve_crossings_match_objectives() {
    for n in [2usize, 5, 8] {
        let c1 = min_real_crossing(&boundary_curve(&optimal_coeffs_t1(n), 1, 1 << 16));
        let expect = -(PI / (2.0 * (n as f64 + 1.0))).tan().powi(2);
        assert!((c1 - expect).abs() < 1e-6, "T=1 n={n}: {c1} vs {expect}");

        let c2 = min_real_crossing(&boundary_curve(&optimal_coeffs_t2(n), 2, 1 << 16));
        let expect = -1.0 / (n * n) as f64;
        assert!((c2 - expect).abs() < 1e-6, "T=2 n={n}: {c2} vs {expect}");
    }
}

/// Most negative real value where the sampled curve crosses the axis
/// transversally (touch points sit below the noise floor and are skipped).
fn min_real_crossing(samples: &[dfc_core::stability::CurveSample]) -> f64 {
    let floor = 1e-11;
    let mut best = f64::INFINITY;
    let mut signed: Option<(f64, f64)> = None;
    for s in samples.iter().chain(samples.first()) {
        let (re, im) = (s.point.re, s.point.im);
        if im.abs() <= floor {
            continue;
        }
        if let Some((re_prev, im_prev)) = signed {
            if im_prev * im < 0.0 {
                best = best.min(0.5 * (re_prev + re));
            }
        }
        signed = Some((re, im));
    }
    best
}

/// Stabilized cycles attract most trials and multipliers of converged
/// cycles always lie in the stabilizable interval (-μ_n(T), 1).
#[test]
fn detected_cycles_have_admissible_multipliers() {
    let f = MapSpec::logistic(4.0).unwrap();
    let cfg = ControlConfig::optimal(1, 2).unwrap();
    let report = detect_cycles(&f, &cfg, 20, 3, 4);
    let margin = mu_bound(1, 2).unwrap();
    let mut attracted = 0;
    for c in report.reports.iter().filter(|c| c.converged) {
        assert!(
            c.multiplier > -margin && c.multiplier < 1.0,
            "inadmissible multiplier {}",
            c.multiplier
        );
        attracted += c.trial_hits;
    }
    assert!(attracted >= 18, "only {attracted}/20 trials converged");
}
