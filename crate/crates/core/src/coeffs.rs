//! Closed-form optimal feedback weights, their stability margins, and the
//! bijection with the strength coefficients of the control law.
//!
//! For cycle length 1 the optimal depth-`n` weights are
//! `a_j = 2 tan(π/(2(n+1))) (1 - j/(n+1)) sin(πj/(n+1))` with margin
//! `μ_n(1) = cot²(π/(2(n+1)))`; for cycle length 2 they are
//! `a_j = (2(n-j)+1)/n²` with margin `μ_n(2) = n²`. Both families are
//! generated by the corresponding Fejér kernels.

use std::f64::consts::PI;

use thiserror::Error;

use crate::trigpoly::CoefficientVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffsError {
    #[error("no closed-form margin for cycle length {0}; only 1 and 2 are supported")]
    UnsupportedCycleLength(usize),
    #[error("cycle length must be positive")]
    InvalidCycleLength,
    #[error("Suffridge index k = {k} outside 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },
}

/// Optimal weights for stabilizing equilibria (cycle length 1).
///
/// All entries are strictly positive and sum to 1.
///
/// # Panics
/// Panics if `n == 0`.
pub fn optimal_coeffs_t1(n: usize) -> CoefficientVector {
    assert!(n >= 1, "depth must be positive");
    let nf = n as f64;
    let tan = (PI / (2.0 * (nf + 1.0))).tan();
    let a = (1..=n)
        .map(|j| {
            let jf = j as f64;
            2.0 * tan * (1.0 - jf / (nf + 1.0)) * (PI * jf / (nf + 1.0)).sin()
        })
        .collect();
    CoefficientVector::new(a).expect("closed form sums to 1")
}

/// Optimal weights for stabilizing 2-cycles: `a_j = (2(n-j)+1)/n²`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn optimal_coeffs_t2(n: usize) -> CoefficientVector {
    assert!(n >= 1, "depth must be positive");
    let n2 = (n * n) as f64;
    let a = (1..=n)
        .map(|j| (2 * (n - j) + 1) as f64 / n2)
        .collect();
    CoefficientVector::new(a).expect("closed form sums to 1")
}

/// Closed-form stability margin `μ_n(T)` for `T ∈ {1, 2}`.
pub fn mu_bound(cycle_length: usize, n: usize) -> Result<f64, CoeffsError> {
    assert!(n >= 1, "depth must be positive");
    let nf = n as f64;
    match cycle_length {
        1 => {
            let t = (PI / (2.0 * (nf + 1.0))).tan();
            Ok(1.0 / (t * t))
        }
        2 => Ok(nf * nf),
        other => Err(CoeffsError::UnsupportedCycleLength(other)),
    }
}

/// Smallest depth `n` with `μ_n(T) > μ*` (strict inequality).
pub fn min_depth(cycle_length: usize, mu_star: f64) -> Result<usize, CoeffsError> {
    let mut n = 1;
    loop {
        if mu_bound(cycle_length, n)? > mu_star {
            return Ok(n);
        }
        n += 1;
    }
}

/// Strength coefficients `ε_j = 1 - Σ_{i<=j} a_i`, `j = 1..n-1`.
pub fn strength_coefficients(coeffs: &CoefficientVector) -> Vec<f64> {
    let a = coeffs.weights();
    let mut partial = 0.0;
    a[..a.len() - 1]
        .iter()
        .map(|&ai| {
            partial += ai;
            1.0 - partial
        })
        .collect()
}

/// Inverse of [`strength_coefficients`]: `a_1 = 1 - ε_1`,
/// `a_j = ε_{j-1} - ε_j`, `a_n = ε_{n-1}`.
pub fn weights_from_strength(eps: &[f64]) -> CoefficientVector {
    let n = eps.len() + 1;
    let a = (1..=n)
        .map(|j| {
            if j == 1 {
                if n == 1 {
                    1.0
                } else {
                    1.0 - eps[0]
                }
            } else if j == n {
                eps[n - 2]
            } else {
                eps[j - 2] - eps[j - 1]
            }
        })
        .collect();
    CoefficientVector::new(a).expect("strength map telescopes to 1")
}

/// Robustness perturbation of the weights: only the first weight is
/// shifted, `a_1 -> (a_1 + ε)/(1 + ε)`, `a_j -> a_j/(1 + ε)` for `j >= 2`,
/// which keeps the sum exactly 1. It trades a slightly smaller margin for
/// a multiplier region bounded away from the real axis.
///
/// # Panics
/// Panics if `eps < 0`.
pub fn epsilon_trick(coeffs: &CoefficientVector, eps: f64) -> CoefficientVector {
    assert!(eps >= 0.0, "perturbation must be nonnegative");
    if eps == 0.0 {
        return coeffs.clone();
    }
    let scale = 1.0 + eps;
    let a = coeffs
        .weights()
        .iter()
        .enumerate()
        .map(|(i, &ai)| if i == 0 { (ai + eps) / scale } else { ai / scale })
        .collect();
    CoefficientVector::new(a).expect("perturbation preserves the sum")
}

/// Coefficients `c_1..c_n` of the Suffridge polynomial
/// `s_{k,n}(z) = z + Σ_{j=2}^n ((n-j+1)/n) (sin(kπj/(n+1)) / sin(kπ/(n+1))) z^j`.
///
/// These are univalent on the unit disc with `|c_n| = 1/n`; for `k = 1`
/// they are proportional to the optimal cycle-length-1 mapping, and
/// `s_{n,2n-1}(iz)` is proportional to the optimal cycle-length-2 mapping.
pub fn suffridge_poly(n: usize, k: usize) -> Result<Vec<f64>, CoeffsError> {
    if k == 0 || k > n {
        return Err(CoeffsError::IndexOutOfRange { k, n });
    }
    let nf = n as f64;
    let kf = k as f64;
    let denom = (kf * PI / (nf + 1.0)).sin();
    let mut c = Vec::with_capacity(n);
    c.push(1.0);
    for j in 2..=n {
        let jf = j as f64;
        c.push((nf - jf + 1.0) / nf * (kf * PI * jf / (nf + 1.0)).sin() / denom);
    }
    Ok(c)
}

/// Control law configuration: cycle length `T`, weights, and the applied
/// robustness perturbation (0 when unused).
#[derive(Debug, Clone)]
pub struct ControlConfig {
    pub cycle_length: usize,
    pub coeffs: CoefficientVector,
    pub eps_trick: f64,
}

impl ControlConfig {
    pub fn new(cycle_length: usize, coeffs: CoefficientVector) -> Result<Self, CoeffsError> {
        if cycle_length == 0 {
            return Err(CoeffsError::InvalidCycleLength);
        }
        Ok(Self {
            cycle_length,
            coeffs,
            eps_trick: 0.0,
        })
    }

    /// Optimal configuration for cycle length 1 or 2 at depth `n`.
    pub fn optimal(cycle_length: usize, n: usize) -> Result<Self, CoeffsError> {
        let coeffs = match cycle_length {
            1 => optimal_coeffs_t1(n),
            2 => optimal_coeffs_t2(n),
            other => return Err(CoeffsError::UnsupportedCycleLength(other)),
        };
        Self::new(cycle_length, coeffs)
    }

    pub fn with_eps_trick(mut self, eps: f64) -> Self {
        self.coeffs = epsilon_trick(&self.coeffs, eps);
        self.eps_trick = eps;
        self
    }

    /// Depth `n`.
    pub fn depth(&self) -> usize {
        self.coeffs.depth()
    }

    pub fn strength_coefficients(&self) -> Vec<f64> {
        strength_coefficients(&self.coeffs)
    }

    /// Prehistory depth `N* = (n - 1)·T` consulted by the control.
    pub fn prehistory_depth(&self) -> usize {
        (self.depth() - 1) * self.cycle_length
    }
}
