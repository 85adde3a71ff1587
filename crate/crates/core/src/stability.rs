//! Schur stability of the closed loop: characteristic polynomials, the
//! Jury reduction with a companion-matrix cross-check, numerical margins,
//! unit-circle image curves and the admissible multiplier region.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::trigpoly::CoefficientVector;

/// Default sample count for winding-number integrations.
pub const DEFAULT_WINDING_SAMPLES: usize = 8192;
/// Relative width at which the margin bisection stops.
const MARGIN_REL_TOL: f64 = 1e-10;
/// Relative threshold below which a Jury discriminant is treated as a
/// boundary decision and deferred to companion-matrix roots.
const JURY_BORDERLINE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("degenerate polynomial: leading coefficient {0:e}")]
    DegenerateLeadingCoefficient(f64),
}

/// Characteristic polynomial `λ^{T(n-1)} (λ - μ (p(1/λ))^T)` in monomial
/// form, ascending coefficients; degree `T(n-1) + 1`.
#[derive(Debug, Clone)]
pub struct CharPoly {
    coeffs: Vec<f64>,
    cycle_length: usize,
    mu: f64,
}

impl CharPoly {
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn cycle_length(&self) -> usize {
        self.cycle_length
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Expands `λ^{T(n-1)} (λ - μ (p(1/λ))^T)` by convolution. Clearing the
/// denominator turns `p(1/λ)` into the reversed-coefficient polynomial
/// `q(λ) = Σ a_j λ^{n-j}`, so the result is `λ^{T(n-1)+1} - μ q(λ)^T`.
pub fn build_char_poly(a: &CoefficientVector, cycle_length: usize, mu: f64) -> CharPoly {
    assert!(cycle_length >= 1, "cycle length must be positive");
    let rev: Vec<f64> = a.weights().iter().rev().copied().collect();
    let mut q_pow = vec![1.0];
    for _ in 0..cycle_length {
        q_pow = poly_mul(&q_pow, &rev);
    }
    let degree = q_pow.len(); // T(n-1) + 1
    let mut coeffs = vec![0.0; degree + 1];
    for (i, &c) in q_pow.iter().enumerate() {
        coeffs[i] = -mu * c;
    }
    coeffs[degree] += 1.0;
    CharPoly {
        coeffs,
        cycle_length,
        mu,
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JuryOutcome {
    Stable,
    Unstable,
    /// Some reduction step was within rounding of the unit circle; the
    /// caller should fall back to explicit roots.
    Borderline,
}

/// Schur–Cohn/Jury reduction on ascending coefficients. Decides whether
/// all roots lie strictly inside the unit disc without any iteration.
pub fn jury_test(coeffs: &[f64]) -> JuryOutcome {
    let mut c: Vec<f64> = coeffs.to_vec();
    normalize(&mut c);
    loop {
        let d = c.len() - 1;
        if d == 0 {
            return JuryOutcome::Stable;
        }
        let a0 = c[0];
        let ad = c[d];
        let disc = ad * ad - a0 * a0;
        let scale = (ad * ad + a0 * a0).max(f64::MIN_POSITIVE);
        if disc.abs() <= JURY_BORDERLINE * scale {
            return JuryOutcome::Borderline;
        }
        if disc < 0.0 {
            return JuryOutcome::Unstable;
        }
        let mut next = Vec::with_capacity(d);
        for k in 1..=d {
            next.push(ad * c[k] - a0 * c[d - k]);
        }
        normalize(&mut next);
        c = next;
    }
}

fn normalize(c: &mut [f64]) {
    let m = c.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if m > 0.0 {
        for v in c.iter_mut() {
            *v /= m;
        }
    }
}

/// All complex roots via the companion matrix (empty for constants).
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().abs() == 0.0 {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|e| Complex64::new(e.re, e.im))
        .collect()
}

/// Largest root modulus of the characteristic polynomial.
pub fn max_root_modulus(poly: &CharPoly) -> f64 {
    polynomial_roots(&poly.coeffs)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// True iff every root has modulus `< 1 - tol`. The Jury reduction
/// decides; within rounding of a boundary decision the companion-matrix
/// root moduli are consulted instead.
pub fn is_schur_stable(poly: &CharPoly, tol: f64) -> Result<bool, StabilityError> {
    let lead = *poly.coeffs.last().unwrap();
    if lead.abs() < 1e-300 {
        return Err(StabilityError::DegenerateLeadingCoefficient(lead));
    }
    // Roots of P((1-tol)λ) lie in the unit disc iff roots of P lie in
    // the disc of radius 1 - tol.
    let r = 1.0 - tol;
    let mut scaled = poly.coeffs.clone();
    let mut f = 1.0;
    for c in scaled.iter_mut() {
        *c *= f;
        f *= r;
    }
    Ok(match jury_test(&scaled) {
        JuryOutcome::Stable => true,
        JuryOutcome::Unstable => false,
        JuryOutcome::Borderline => max_root_modulus(poly) < 1.0 - tol,
    })
}

fn stable_at(a: &CoefficientVector, cycle_length: usize, magnitude: f64) -> bool {
    let poly = build_char_poly(a, cycle_length, -magnitude);
    match jury_test(&poly.coeffs) {
        JuryOutcome::Stable => true,
        JuryOutcome::Unstable => false,
        JuryOutcome::Borderline => max_root_modulus(&poly) < 1.0,
    }
}

/// Numerical stability margin `μ_o`: the largest `M` such that the closed
/// loop is Schur stable for every `μ ∈ (-M, 0)`. Brackets the first exit
/// by doubling from `1e-6`, then bisects to relative width `1e-10`.
pub fn mu_margin(a: &CoefficientVector, cycle_length: usize) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1e-6;
    while stable_at(a, cycle_length, hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return f64::INFINITY;
        }
    }
    while hi - lo > MARGIN_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if stable_at(a, cycle_length, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One point of a sampled curve in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub omega: f64,
    pub point: Complex64,
}

/// Samples `e^{iω} (p(e^{iω}))^T` for `ω` uniform on `[0, 2π)`. The
/// boundary of the image of the exterior of the unit disc under
/// `z (p(z))^T` lies inside this point set.
pub fn boundary_curve(
    a: &CoefficientVector,
    cycle_length: usize,
    samples: usize,
) -> Vec<CurveSample> {
    assert!(samples >= 16, "need at least 16 samples");
    (0..samples)
        .map(|k| {
            let omega = 2.0 * PI * k as f64 / samples as f64;
            CurveSample {
                omega,
                point: curve_point(a, cycle_length, omega),
            }
        })
        .collect()
}

pub fn curve_point(a: &CoefficientVector, cycle_length: usize, omega: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, omega);
    let p = a
        .weights()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    z * p.powu(cycle_length as u32)
}

/// Pointwise inversion `1/z` of [`boundary_curve`], skipping samples
/// within `1e-12` of the origin. The image bounds the set of multipliers
/// the control stabilizes.
pub fn multiplier_region(
    a: &CoefficientVector,
    cycle_length: usize,
    samples: usize,
) -> Vec<CurveSample> {
    boundary_curve(a, cycle_length, samples)
        .into_iter()
        .filter(|s| s.point.norm() > 1e-12)
        .map(|s| CurveSample {
            omega: s.omega,
            point: s.point.inv(),
        })
        .collect()
}

/// Winding number of a sampled closed curve around `target`, by angle
/// unwrapping. `None` when the curve passes within rounding of the
/// target, where the count is undefined.
pub fn winding_number(points: &[Complex64], target: Complex64) -> Option<i32> {
    let scale = points
        .iter()
        .fold(0.0_f64, |acc, p| acc.max((p - target).norm()));
    let mut total = 0.0;
    let mut prev = (points[points.len() - 1] - target).arg();
    for p in points {
        let w = *p - target;
        if w.norm() < 1e-12 * scale.max(1.0) {
            return None;
        }
        let arg = w.arg();
        let mut d = arg - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        total += d;
        prev = arg;
    }
    Some((total / (2.0 * PI)).round() as i32)
}

/// Whether the multiplier `μ` lies in the stabilizable region.
///
/// The characteristic roots are `λ = 1/w` over the solutions of
/// `F(w) = w (p(w))^T = 1/μ`; all of them sit inside the unit disc
/// exactly when no solution `w` lies in the closed disc, i.e. when the
/// winding number of the circle image around `1/μ` is zero. A target the
/// curve touches is counted as outside.
pub fn region_contains(a: &CoefficientVector, cycle_length: usize, mu: f64) -> bool {
    if mu.abs() < 1e-12 {
        return false;
    }
    let target = Complex64::new(1.0 / mu, 0.0);
    let pts: Vec<Complex64> = boundary_curve(a, cycle_length, DEFAULT_WINDING_SAMPLES)
        .iter()
        .map(|s| s.point)
        .collect();
    matches!(winding_number(&pts, target), Some(0))
}

/// Whether `F(z) = Σ w_j z^j` attains every point of the circle of the
/// given radius inside the open unit disc. Each probe is settled by the
/// argument principle on `samples` boundary points; a probe the curve
/// touches counts as not attained.
pub fn circle_coverage(
    weights: &[Complex64],
    radius: f64,
    probes: usize,
    samples: usize,
) -> bool {
    let curve: Vec<Complex64> = (0..samples)
        .map(|k| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64);
            weights
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
                * z
        })
        .collect();
    (0..probes).all(|k| {
        let gamma = Complex64::from_polar(radius, 2.0 * PI * k as f64 / probes as f64);
        matches!(winding_number(&curve, gamma), Some(w) if w >= 1)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageOutcome {
    /// Coverage at the guaranteed radius `Σ|a_j| / 2^n`.
    pub stated_bound: bool,
    /// Coverage at the sharper radius `Σ|a_j| / (2^n - 1)` that the
    /// inversion argument actually yields; reported for diagnostics.
    pub stronger_bound: bool,
}

/// Checks that the image of the unit disc under `F(z) = Σ w_j z^j`
/// (with `F(0) = 0`) covers the disc of radius `Σ|w_j| / 2^n`, probing
/// `probes` points of the bounding circle.
pub fn coverage_radius_check(weights: &[Complex64], probes: usize) -> CoverageOutcome {
    let n = weights.len();
    assert!(n >= 1 && weights.iter().any(|w| w.norm() > 0.0));
    let sum: f64 = weights.iter().map(|w| w.norm()).sum();
    let pow = (2.0_f64).powi(n as i32);
    CoverageOutcome {
        stated_bound: circle_coverage(weights, sum / pow, probes, DEFAULT_WINDING_SAMPLES),
        stronger_bound: circle_coverage(
            weights,
            sum / (pow - 1.0),
            probes,
            DEFAULT_WINDING_SAMPLES,
        ),
    }
}

/// Outcome of a randomized coverage survey.
#[derive(Debug, Clone, Copy)]
pub struct CoverageSurvey {
    pub tested: usize,
    pub stated_failures: usize,
    /// How many vectors also attained the sharper `Σ|a_j|/(2^n - 1)` radius.
    pub stronger_held: usize,
}

/// Runs [`coverage_radius_check`] on `count` random complex coefficient
/// vectors of depth `1..=max_depth` with `probes` circle probes each.
pub fn coverage_survey(count: usize, max_depth: usize, probes: usize, seed: u64) -> CoverageSurvey {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut survey = CoverageSurvey {
        tested: 0,
        stated_failures: 0,
        stronger_held: 0,
    };
    while survey.tested < count {
        let n = rng.gen_range(1..=max_depth);
        let weights: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if weights.iter().map(|w| w.norm()).sum::<f64>() < 0.05 {
            continue;
        }
        let out = coverage_radius_check(&weights, probes);
        if !out.stated_bound {
            survey.stated_failures += 1;
        }
        if out.stronger_bound {
            survey.stronger_held += 1;
        }
        survey.tested += 1;
    }
    survey
}

/// Whether `F(z) = (z+1)^n - 1`, the witness that the covering radius
/// cannot be improved, covers the circle of radius
/// `scale · Σ|a_j|/(2^n - 1)`. Its exceptional value -1 sits on that
/// circle at `scale = 1`, so any `scale > 1` loses coverage for
/// `n <= 2`, where the failing arc crosses the probe at angle π.
pub fn binomial_witness_covers(n: usize, scale: f64, probes: usize, samples: usize) -> bool {
    let weights: Vec<Complex64> = (1..=n)
        .map(|j| {
            let k = j.min(n - j);
            let mut b = 1.0;
            for i in 0..k {
                b = b * (n - i) as f64 / (i + 1) as f64;
            }
            Complex64::new(b, 0.0)
        })
        .collect();
    let sum: f64 = weights.iter().map(|w| w.norm()).sum();
    let radius = scale * sum / ((2.0_f64).powi(n as i32) - 1.0);
    circle_coverage(&weights, radius, probes, samples)
}

/// Margin and curve diagnostics for one coefficient vector.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub mu_o: f64,
    pub max_root_modulus_at_margin: f64,
    pub boundary_curve: Vec<CurveSample>,
    pub region_inversion: Vec<CurveSample>,
}

pub fn stability_report(
    a: &CoefficientVector,
    cycle_length: usize,
    samples: usize,
) -> StabilityReport {
    let mu_o = mu_margin(a, cycle_length);
    let at_margin = build_char_poly(a, cycle_length, -mu_o);
    StabilityReport {
        mu_o,
        max_root_modulus_at_margin: max_root_modulus(&at_margin),
        boundary_curve: boundary_curve(a, cycle_length, samples),
        region_inversion: multiplier_region(a, cycle_length, samples),
    }
}

/// Counts proper self-intersections of a sampled closed curve, ignoring
/// coincidences forced by conjugate symmetry (parameters `ω` and `2π-ω`
/// meeting on the real axis). Two segments closer than `spatial_tol`
/// count as intersecting unless their parameters are adjacent: boundary
/// images of extremal polynomials carry cusps, where the curve reverses
/// along itself and parameter-nearby segments pass arbitrarily close.
pub fn self_intersections(points: &[Complex64], spatial_tol: f64) -> usize {
    let n = points.len();
    let adjacency = (n / 256).max(1);
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    let mut count = 0;
    for i in 0..n {
        let (a1, a2) = seg(i);
        let (ax_lo, ax_hi) = minmax(a1.re, a2.re);
        let (ay_lo, ay_hi) = minmax(a1.im, a2.im);
        for j in (i + 2)..n {
            let gap = (j - i).min(n - (j - i));
            if gap <= adjacency {
                continue;
            }
            let (b1, b2) = seg(j);
            if b1.re.max(b2.re) < ax_lo - spatial_tol
                || b1.re.min(b2.re) > ax_hi + spatial_tol
                || b1.im.max(b2.im) < ay_lo - spatial_tol
                || b1.im.min(b2.im) > ay_hi + spatial_tol
            {
                continue;
            }
            let (touches, near_real) = segments_meet(a1, a2, b1, b2, spatial_tol);
            if !touches {
                continue;
            }
            // Conjugate partners: segment j is the mirror of segment i
            // when i + j + 1 ≡ 0 (mod n); meetings on the real axis
            // there are the symmetry, not a crossing.
            let d = (i + j + 1) % n;
            let conjugate_pair = d <= 3 || d >= n - 3;
            if conjugate_pair && near_real {
                continue;
            }
            count += 1;
        }
    }
    count
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Returns (whether the segments cross or come within `tol`, whether the
/// meeting point is within `1e-6` of the real axis).
fn segments_meet(
    a1: Complex64,
    a2: Complex64,
    b1: Complex64,
    b2: Complex64,
    tol: f64,
) -> (bool, bool) {
    let cross = |o: Complex64, p: Complex64, q: Complex64| {
        (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)
    };
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        // Proper crossing; intersection point by line parametrization.
        let t = d1 / (d1 - d2);
        let x = a1 + (a2 - a1) * t;
        return (true, x.im.abs() < 1e-6);
    }
    // No transversal crossing: check closest approach.
    let dist = segment_distance(a1, a2, b1, b2);
    if dist < tol {
        let mid = (a1 + a2 + b1 + b2) * 0.25;
        return (true, mid.im.abs() < 1e-6);
    }
    (false, false)
}

fn segment_distance(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> f64 {
    point_segment_distance(a1, b1, b2)
        .min(point_segment_distance(a2, b1, b2))
        .min(point_segment_distance(b1, a1, a2))
        .min(point_segment_distance(b2, a1, a2))
}

fn point_segment_distance(p: Complex64, s1: Complex64, s2: Complex64) -> f64 {
    let d = s2 - s1;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - s1).norm();
    }
    let t = (((p - s1).re * d.re + (p - s1).im * d.im) / len2).clamp(0.0, 1.0);
    (p - (s1 + d * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{mu_bound, optimal_coeffs_t1, optimal_coeffs_t2};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn vector(a: &[f64]) -> CoefficientVector {
        CoefficientVector::new(a.to_vec()).unwrap()
    }

    #[test]
    fn char_poly_open_loop() {
        let p = build_char_poly(&vector(&[1.0]), 1, -2.5);
        assert_eq!(p.coefficients(), &[2.5, 1.0]); // λ + 2.5
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn char_poly_hand_expansion() {
        // λ² - μ(2/3 λ + 1/3) at μ = -3 is λ² + 2λ + 1.
        let p = build_char_poly(&vector(&[2.0 / 3.0, 1.0 / 3.0]), 1, -3.0);
        let c = p.coefficients();
        assert_eq!(c.len(), 3);
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[1], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[2], 1.0, epsilon = 1e-14);
        let mut roots = polynomial_roots(c);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        for r in roots {
            assert_abs_diff_eq!(r.re, -1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn char_poly_reduces_to_monomial_at_zero_mu() {
        let a = optimal_coeffs_t2(4);
        let p = build_char_poly(&a, 2, 0.0);
        assert_eq!(p.degree(), 2 * 3 + 1);
        assert_eq!(&p.coefficients()[..p.degree()], vec![0.0; p.degree()]);
        assert_eq!(p.coefficients()[p.degree()], 1.0);
    }

    #[test]
    fn char_poly_t2_boundary_root() {
        let p = build_char_poly(&vector(&[5.0 / 9.0, 3.0 / 9.0, 1.0 / 9.0]), 2, -9.0);
        assert_eq!(p.degree(), 5);
        let max_mod = max_root_modulus(&p);
        assert_abs_diff_eq!(max_mod, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn schur_examples() {
        // λ - 0.5
        let p = CharPoly {
            coeffs: vec![-0.5, 1.0],
            cycle_length: 1,
            mu: 0.0,
        };
        assert!(is_schur_stable(&p, 1e-9).unwrap());
        // (λ + 1)²
        let p = CharPoly {
            coeffs: vec![1.0, 2.0, 1.0],
            cycle_length: 1,
            mu: 0.0,
        };
        assert!(!is_schur_stable(&p, 1e-9).unwrap());
        // inside the margin
        let p = build_char_poly(&vector(&[2.0 / 3.0, 1.0 / 3.0]), 1, -2.9);
        assert!(is_schur_stable(&p, 1e-9).unwrap());
        // degenerate leading coefficient
        let p = CharPoly {
            coeffs: vec![1.0, 0.0],
            cycle_length: 1,
            mu: 0.0,
        };
        assert!(is_schur_stable(&p, 0.0).is_err());
    }

    #[test]
    fn jury_agrees_with_companion_roots() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..10_000 {
            let d = rng.gen_range(1..=12usize);
            let mut c: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if c[d].abs() < 0.05 {
                c[d] = 0.5;
            }
            let max_mod = polynomial_roots(&c).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if (max_mod - 1.0).abs() < 1e-8 {
                continue; // boundary band
            }
            match jury_test(&c) {
                JuryOutcome::Stable => assert!(max_mod < 1.0, "jury stable but root {max_mod}"),
                JuryOutcome::Unstable => {
                    assert!(max_mod > 1.0, "jury unstable but root {max_mod}")
                }
                JuryOutcome::Borderline => continue,
            }
            checked += 1;
        }
        assert!(checked > 5_000);
    }

    #[test]
    fn margin_examples() {
        assert_abs_diff_eq!(mu_margin(&vector(&[1.0]), 1), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(
            mu_margin(&vector(&[2.0 / 3.0, 1.0 / 3.0]), 1),
            3.0,
            epsilon = 3e-6
        );
        assert_abs_diff_eq!(
            mu_margin(&vector(&[5.0 / 9.0, 3.0 / 9.0, 1.0 / 9.0]), 2),
            9.0,
            epsilon = 9e-6
        );
    }

    #[test]
    fn margin_matches_closed_form_small_n() {
        for n in 1..=6 {
            let m1 = mu_margin(&optimal_coeffs_t1(n), 1);
            assert!((m1 - mu_bound(1, n).unwrap()).abs() <= 1e-6 * m1);
            let m2 = mu_margin(&optimal_coeffs_t2(n), 2);
            assert!((m2 - mu_bound(2, n).unwrap()).abs() <= 1e-6 * m2);
        }
    }

    #[test]
    fn boundary_curve_unit_circle() {
        let curve = boundary_curve(&vector(&[1.0]), 1, 64);
        for s in &curve {
            assert_abs_diff_eq!(s.point.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn boundary_curve_conjugate_symmetric() {
        let a = optimal_coeffs_t1(5);
        let n = 512;
        let curve = boundary_curve(&a, 1, n);
        for k in 1..n {
            let p = curve[k].point;
            let q = curve[n - k].point;
            assert_abs_diff_eq!(p.re, q.re, epsilon = 1e-12);
            assert_abs_diff_eq!(p.im, -q.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn region_probes() {
        // μ = -2 with the depth-2 optimum (margin 3) is stabilizable.
        assert!(region_contains(&optimal_coeffs_t1(2), 1, -2.0));
        assert!(!region_contains(&optimal_coeffs_t1(2), 1, -3.5));
        // The interval (-μ_o, -1) lies inside the n = 5 region.
        let a = optimal_coeffs_t1(5);
        let mu_o = mu_bound(1, 5).unwrap();
        for k in 0..5 {
            let mu = -1.0 - (mu_o - 1.0) * (k as f64 + 0.5) / 5.0;
            assert!(region_contains(&a, 1, mu), "mu = {mu}");
        }
        assert!(region_contains(&a, 1, -13.9));
        assert!(!region_contains(&a, 1, -14.1));
    }

    #[test]
    fn multiplier_region_of_identity_map() {
        let region = multiplier_region(&vector(&[1.0]), 1, 64);
        for s in &region {
            assert_abs_diff_eq!(s.point.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coverage_simple_cases() {
        // F(z) = z covers the disc of radius 1/2 but its open image does
        // not contain the circle of radius exactly 1 (the sharper bound
        // is a supremum here, not attained).
        let id = [Complex64::new(1.0, 0.0)];
        assert!(circle_coverage(&id, 0.5, 16, 2048));
        let out = coverage_radius_check(&id, 16);
        assert!(out.stated_bound);
        assert!(!out.stronger_bound);
        assert!(circle_coverage(&id, 0.999, 16, 2048));
    }

    #[test]
    fn coverage_sharpness_witness() {
        // F(z) = (z+1)^n - 1 leaves γ = -1 unattained; scaling the sharp
        // radius Σ|a_j|/(2^n - 1) = 1 by 1.01 must break circle coverage
        // for n = 1, 2 (the failing arc contains the probe at angle π).
        for n in [1usize, 2] {
            let weights: Vec<Complex64> = (1..=n)
                .map(|j| Complex64::new(binom(n, j), 0.0))
                .collect();
            let sum: f64 = weights.iter().map(|w| w.norm()).sum();
            let radius = 1.01 * sum / ((2.0_f64).powi(n as i32) - 1.0);
            assert!(!circle_coverage(&weights, radius, 64, 8192), "n = {n}");
            // Just below the sharp radius the circle is covered.
            assert!(circle_coverage(&weights, 0.9, 64, 8192), "n = {n}");
        }
    }

    pub(super) fn binom(n: usize, k: usize) -> f64 {
        let k = k.min(n - k);
        let mut v = 1.0;
        for i in 0..k {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    }

    #[test]
    fn coverage_random_vectors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6usize);
            let weights: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            if weights.iter().map(|w| w.norm()).sum::<f64>() < 0.1 {
                continue;
            }
            let out = coverage_radius_check(&weights, 32);
            assert!(out.stated_bound);
        }
    }

    #[test]
    fn report_root_modulus_brackets_margin() {
        for (t, a) in [(1usize, optimal_coeffs_t1(4)), (2usize, optimal_coeffs_t2(4))] {
            let report = stability_report(&a, t, 256);
            let below = build_char_poly(&a, t, -report.mu_o * (1.0 - 1e-6));
            assert!(max_root_modulus(&below) < 1.0);
            let above = build_char_poly(&a, t, -report.mu_o * (1.0 + 1e-3));
            assert!(max_root_modulus(&above) >= 1.0 - 1e-9);
            assert!(report.max_root_modulus_at_margin > 1.0 - 1e-6);
            assert!(report.max_root_modulus_at_margin < 1.0 + 1e-6);
        }
    }

    #[test]
    fn winding_of_unit_circle() {
        let pts: Vec<Complex64> = (0..256)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 256.0))
            .collect();
        assert_eq!(winding_number(&pts, Complex64::new(0.0, 0.0)), Some(1));
        assert_eq!(winding_number(&pts, Complex64::new(2.0, 0.0)), Some(0));
        assert_eq!(winding_number(&pts, Complex64::new(1.0, 0.0)), None);
    }

    #[test]
    fn self_intersection_counts() {
        // A plain circle has none.
        let circle: Vec<Complex64> = (0..512)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 512.0))
            .collect();
        assert_eq!(self_intersections(&circle, 1e-7), 0);
        // A limaçon with an inner loop, r = 1 + 2 sin θ, crosses itself
        // at the origin at two unrelated parameters.
        let eight: Vec<Complex64> = (0..2048)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / 2048.0;
                let r = 1.0 + 2.0 * th.sin();
                Complex64::new(r * th.cos(), r * th.sin())
            })
            .collect();
        assert!(self_intersections(&eight, 1e-7) >= 1);
    }
}
