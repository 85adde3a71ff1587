//! Independent brute-force verification of the extremal closed forms at
//! small depths: grid search over the normalized coefficient simplex.
//!
//! These routines deliberately avoid the closed-form generators; they are
//! the ground truth the generators are checked against.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::trigpoly::{
    fejer_kernel, find_sign_changes, CoefficientVector, Component, FejerKind, TrigPolyPair,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("brute force supports depths 1..=3, got {0}")]
    UnsupportedDepth(usize),
    #[error("grid must have at least {min} points, got {got}")]
    GridTooCoarse { min: usize, got: usize },
}

/// Half-width of the search box for the free coordinates. The coefficient
/// sum bound `Σ|a_j| <= 2^n` keeps the optimum well inside for n <= 3.
const BOX: f64 = 2.0;

/// Objective of the equilibrium problem: the minimum of `C` over the
/// sign changes of `S` on `(0, π)` together with `t = π` (where `S`
/// always vanishes). Touch points of `S` are excluded.
pub fn rho_t1(coeffs: &CoefficientVector) -> f64 {
    let pair = TrigPolyPair::new(coeffs.clone(), 1).expect("cycle length 1");
    let mut best = pair.eval(PI).0;
    for t in find_sign_changes(&pair, Component::Sine, 0.0, PI) {
        best = best.min(pair.eval(t).0);
    }
    best
}

/// Objective of the 2-cycle problem: the maximum of `|S|` over the sign
/// changes of `C` on `(0, π/2)` together with `t = π/2` (where `C`
/// always vanishes).
pub fn rho_t2(coeffs: &CoefficientVector) -> f64 {
    let pair = TrigPolyPair::new(coeffs.clone(), 2).expect("cycle length 2");
    let mut best = pair.eval(PI / 2.0).1.abs();
    for t in find_sign_changes(&pair, Component::Cosine, 0.0, PI / 2.0) {
        best = best.max(pair.eval(t).1.abs());
    }
    best
}

/// Approximate supremum of [`rho_t1`] over the simplex `Σ a_j = 1`:
/// inclusive grid search with the first `n - 1` coordinates free in
/// `[-2, 2]` and the last determined, followed by one refinement pass of
/// the same resolution around the coarse argmax. Both passes only ever
/// evaluate the objective, so the result never exceeds the proven
/// supremum by more than rounding.
pub fn brute_force_j1(n: usize, grid: usize) -> Result<f64, OracleError> {
    brute_force(n, grid, rho_t1, true)
}

/// Approximate infimum of [`rho_t2`] over the simplex, same scheme.
pub fn brute_force_j2(n: usize, grid: usize) -> Result<f64, OracleError> {
    brute_force(n, grid, rho_t2, false)
}

fn brute_force(
    n: usize,
    grid: usize,
    objective: fn(&CoefficientVector) -> f64,
    maximize: bool,
) -> Result<f64, OracleError> {
    if n == 0 || n > 3 {
        return Err(OracleError::UnsupportedDepth(n));
    }
    if grid < 50 {
        return Err(OracleError::GridTooCoarse { min: 50, got: grid });
    }
    if n == 1 {
        return Ok(objective(&CoefficientVector::new(vec![1.0]).unwrap()));
    }
    let step = 2.0 * BOX / (grid - 1) as f64;
    let full = [(-BOX, BOX); 2];
    let (coarse_best, arg) = grid_pass(n, grid, &full, objective, maximize);
    // Refine once around the winning cell at the same point count.
    let refined = [
        (arg[0] - 2.0 * step, arg[0] + 2.0 * step),
        (arg[1] - 2.0 * step, arg[1] + 2.0 * step),
    ];
    let (fine_best, _) = grid_pass(n, grid, &refined, objective, maximize);
    Ok(if maximize {
        coarse_best.max(fine_best)
    } else {
        coarse_best.min(fine_best)
    })
}

fn grid_pass(
    n: usize,
    grid: usize,
    ranges: &[(f64, f64); 2],
    objective: fn(&CoefficientVector) -> f64,
    maximize: bool,
) -> (f64, [f64; 2]) {
    let coord = |axis: usize, i: usize| {
        let (lo, hi) = ranges[axis];
        lo + (hi - lo) * i as f64 / (grid - 1) as f64
    };
    let mut best = if maximize {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let mut arg = [0.0; 2];
    let consider = |value: f64, at: [f64; 2], best: &mut f64, arg: &mut [f64; 2]| {
        if (maximize && value > *best) || (!maximize && value < *best) {
            *best = value;
            *arg = at;
        }
    };
    if n == 2 {
        for i in 0..grid {
            let a1 = coord(0, i);
            let v = CoefficientVector::new(vec![a1, 1.0 - a1]).unwrap();
            consider(objective(&v), [a1, 0.0], &mut best, &mut arg);
        }
    } else {
        for i in 0..grid {
            let a1 = coord(0, i);
            for j in 0..grid {
                let a2 = coord(1, j);
                let v = CoefficientVector::new(vec![a1, a2, 1.0 - a1 - a2]).unwrap();
                consider(objective(&v), [a1, a2], &mut best, &mut arg);
            }
        }
    }
    (best, arg)
}

/// All grid points whose objective is within `band` of `value`; used to
/// check that near-optimal vectors cluster around the closed form.
pub fn near_optimal_t1(n: usize, grid: usize, value: f64, band: f64) -> Vec<Vec<f64>> {
    assert!(n == 2, "clustering check implemented for depth 2");
    let coord = |i: usize| -BOX + 2.0 * BOX * i as f64 / (grid - 1) as f64;
    let mut out = Vec::new();
    for i in 0..grid {
        let a1 = coord(i);
        let v = CoefficientVector::new(vec![a1, 1.0 - a1]).unwrap();
        if (rho_t1(&v) - value).abs() < band {
            out.push(v.weights().to_vec());
        }
    }
    out
}

/// Checks the coefficient inequality `|a_1| <= 2 cos(π/(n+2))` for
/// nonnegative cosine polynomials with `a_0 = 1`:
/// random polynomials are drawn by squaring (Fejér–Riesz), and the scaled
/// first-kind kernel must achieve the bound to within `1e-9`.
pub fn fejer_coefficient_inequality_check(samples: usize, n: usize, seed: u64) -> bool {
    let bound = 2.0 * (PI / (n as f64 + 2.0)).cos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        // |q(e^{it})|² with random real q of degree n is a nonnegative
        // cosine polynomial; its a_1/a_0 must respect the bound.
        let c: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b0: f64 = c.iter().map(|v| v * v).sum();
        if b0 < 1e-9 {
            continue;
        }
        let b1: f64 = 2.0 * c.windows(2).map(|w| w[0] * w[1]).sum::<f64>();
        if (b1 / b0).abs() > bound + 1e-10 {
            return false;
        }
    }
    (fejer_extremizer_gap(n)).abs() < 1e-9
}

/// `|a_1| - 2cos(π/(n+2))` for the extremal polynomial
/// `(2/(n+2)) sin²(π/(n+2)) Φ_n^{(1)}`, with the Fourier coefficients
/// recovered by quadrature (exact for trigonometric polynomials on a
/// uniform grid finer than twice the degree).
pub fn fejer_extremizer_gap(n: usize) -> f64 {
    let nf = n as f64;
    let scale = 2.0 / (nf + 2.0) * (PI / (nf + 2.0)).sin().powi(2);
    let grid = 4096;
    let mut a0 = 0.0;
    let mut a1 = 0.0;
    for k in 0..grid {
        let t = 2.0 * PI * k as f64 / grid as f64;
        let v = scale * fejer_kernel(n, FejerKind::First, t);
        a0 += v;
        a1 += 2.0 * v * t.cos();
    }
    a0 /= grid as f64;
    a1 /= grid as f64;
    debug_assert!((a0 - 1.0).abs() < 1e-9, "extremizer a_0 = {a0}");
    (a1 / a0).abs() - 2.0 * (PI / (nf + 2.0)).cos()
}
