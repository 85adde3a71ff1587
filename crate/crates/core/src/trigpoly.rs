//! Conjugate trigonometric polynomial pairs, Fejér kernels, and the
//! common-zero factorization behind the multiplicative kernel identities.
//!
//! The polynomial convention is fixed once for the whole crate:
//! `p(z) = Σ_{j=1}^n a_j z^{j-1}`, so `z·p(z) = Σ a_j z^j` and the classical
//! conjugate pair reads `C(t) = Σ a_j cos jt`, `S(t) = Σ a_j sin jt`, i.e.
//! `C + iS = e^{it} p(e^{it})`.

use std::f64::consts::PI;
use std::str::FromStr;

use thiserror::Error;

/// Absolute tolerance on the normalization `Σ a_j = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Default number of cells used to bracket sign changes before bisection.
pub const DEFAULT_SIGN_CHANGE_GRID: usize = 4096;
/// Default grid size for identity residuals.
pub const DEFAULT_IDENTITY_GRID: usize = 2048;
/// Bisection stops when the bracket is narrower than this.
const ROOT_WIDTH: f64 = 1e-12;
/// A refined root must satisfy `|poly(t)| < ROOT_RESIDUAL`.
const ROOT_RESIDUAL: f64 = 1e-10;
/// Common zeros handed to [`factorize`] must satisfy `S`/`C` equations
/// within this tolerance, and the synthetic division must leave a
/// remainder below it.
const FACTORIZE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrigPolyError {
    #[error("coefficient vector is empty")]
    EmptyCoefficients,
    #[error("coefficients sum to {sum}; expected 1 within {NORMALIZATION_TOL:e}")]
    NotNormalized { sum: f64 },
    #[error("cycle length must be positive")]
    InvalidCycleLength,
    #[error("unknown identity tag `{0}`")]
    UnknownIdentity(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorizeError {
    #[error("zero t = {0} lies outside (0, pi)")]
    ZeroOutOfRange(f64),
    #[error("zeros must be pairwise distinct")]
    RepeatedZeros,
    #[error("{m} zeros for {n} coefficients violates 2m <= n")]
    TooManyZeros { m: usize, n: usize },
    #[error("t = {t} is not a common zero: S(t) = {s:e}, C(t) - gamma = {c:e}")]
    NotACommonZero { t: f64, s: f64, c: f64 },
    #[error("synthetic division left residual {0:e}; the zeros are not genuine")]
    DivisionResidual(f64),
}

/// Feedback weights `a_1..a_n` normalized by `Σ a_j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    a: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(a: Vec<f64>) -> Result<Self, TrigPolyError> {
        if a.is_empty() {
            return Err(TrigPolyError::EmptyCoefficients);
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(TrigPolyError::NotNormalized { sum });
        }
        Ok(Self { a })
    }

    /// Number of weights `n`.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    /// Evaluates `p(z) = Σ a_j z^{j-1}` on the real axis.
    pub fn eval_p(&self, z: f64) -> f64 {
        self.a.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }
}

/// Conjugate pair attached to a coefficient vector and a cycle length.
///
/// The pair uses the frequencies `(j-1)T + 1`, the harmonics of
/// `e^{it} p(e^{iTt})`. For `T = 1` this is `C = Σ a_j cos jt`,
/// `S = Σ a_j sin jt`; for `T = 2` it is `C = Σ a_j cos (2j-1)t`,
/// `S = Σ a_j sin (2j-1)t`.
#[derive(Debug, Clone)]
pub struct TrigPolyPair {
    coeffs: CoefficientVector,
    cycle_length: usize,
}

/// Selects one member of a conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Cosine,
    Sine,
}

impl TrigPolyPair {
    pub fn new(coeffs: CoefficientVector, cycle_length: usize) -> Result<Self, TrigPolyError> {
        if cycle_length == 0 {
            return Err(TrigPolyError::InvalidCycleLength);
        }
        Ok(Self {
            coeffs,
            cycle_length,
        })
    }

    pub fn coeffs(&self) -> &CoefficientVector {
        &self.coeffs
    }

    pub fn cycle_length(&self) -> usize {
        self.cycle_length
    }

    /// Frequency of the `j`-th term, `j` counted from 1.
    fn frequency(&self, j: usize) -> f64 {
        ((j - 1) * self.cycle_length + 1) as f64
    }

    /// Returns `(C(t), S(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let mut c = 0.0;
        let mut s = 0.0;
        for (j, &a) in self.coeffs.weights().iter().enumerate() {
            let freq = self.frequency(j + 1);
            c += a * (freq * t).cos();
            s += a * (freq * t).sin();
        }
        (c, s)
    }

    pub fn component(&self, which: Component, t: f64) -> f64 {
        let (c, s) = self.eval(t);
        match which {
            Component::Cosine => c,
            Component::Sine => s,
        }
    }
}

/// Convenience wrapper matching the operation name.
pub fn evaluate_pair(pair: &TrigPolyPair, t: f64) -> (f64, f64) {
    pair.eval(t)
}

/// Points in `(lo, hi)` where the selected polynomial changes sign,
/// refined by bisection and sorted ascending. Zeros without a sign
/// change (touch points) are deliberately not reported.
pub fn find_sign_changes(pair: &TrigPolyPair, which: Component, lo: f64, hi: f64) -> Vec<f64> {
    find_sign_changes_with_grid(pair, which, lo, hi, DEFAULT_SIGN_CHANGE_GRID)
}

pub fn find_sign_changes_with_grid(
    pair: &TrigPolyPair,
    which: Component,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Vec<f64> {
    assert!(lo < hi, "empty interval");
    assert!(grid >= 2, "grid too small");
    let f = |t: f64| pair.component(which, t);
    // Touch points (double zeros) evaluate to rounding noise of either
    // sign; only samples clearing the noise floor carry sign information.
    // A bracket is the last signed sample against the next one of
    // opposite sign, so a genuine root sitting within rounding of a grid
    // point is still caught while touch points are not.
    let floor = 1e-13 * pair.coeffs.weights().iter().map(|a| a.abs()).sum::<f64>();
    let step = (hi - lo) / grid as f64;
    let mut roots = Vec::new();
    let head = f(lo);
    let mut signed: Option<(f64, f64)> = (head.abs() > floor).then_some((lo, head));
    for k in 1..=grid {
        let t = if k == grid { hi } else { lo + step * k as f64 };
        let v = f(t);
        if v.abs() <= floor {
            continue;
        }
        if let Some((ts, vs)) = signed {
            if vs * v < 0.0 {
                let root = bisect(&f, ts, t);
                if root > lo && root < hi && f(root).abs() < ROOT_RESIDUAL {
                    roots.push(root);
                }
            }
        }
        signed = Some((t, v));
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > ROOT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Output of [`factorize`]: the representation
/// `C(t) = γ + Π_j (cos t - cos t_j) · Σ_k α_k cos kt`,
/// `S(t) = Π_j (cos t - cos t_j) · Σ_k α_k sin kt`,
/// where the sum runs over `k = m..=n-m` and `α_m = -2^m γ`.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub gamma: f64,
    pub zeros: Vec<f64>,
    /// `alpha[i]` is the coefficient `α_{m+i}`.
    pub alpha: Vec<f64>,
}

impl FactorizationResult {
    /// Number of factored zeros `m`.
    pub fn order(&self) -> usize {
        self.zeros.len()
    }

    /// Evaluates the factored form at `t`.
    pub fn reconstruct(&self, t: f64) -> (f64, f64) {
        let m = self.order();
        let prod: f64 = self.zeros.iter().map(|&tj| t.cos() - tj.cos()).product();
        let mut c = 0.0;
        let mut s = 0.0;
        for (i, &alpha) in self.alpha.iter().enumerate() {
            let k = (m + i) as f64;
            c += alpha * (k * t).cos();
            s += alpha * (k * t).sin();
        }
        (self.gamma + prod * c, prod * s)
    }

    /// Sup-norm deviation between the factored form and the direct pair
    /// `Σ a_j cos jt`, `Σ a_j sin jt` on a uniform grid over `[0, 2π)`.
    pub fn reconstruction_residual(&self, weights: &[f64], grid: usize) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..grid {
            let t = 2.0 * PI * k as f64 / grid as f64;
            let (c, s) = self.reconstruct(t);
            let mut c0 = 0.0;
            let mut s0 = 0.0;
            for (j, &a) in weights.iter().enumerate() {
                let freq = (j + 1) as f64;
                c0 += a * (freq * t).cos();
                s0 += a * (freq * t).sin();
            }
            worst = worst.max((c - c0).abs()).max((s - s0).abs());
        }
        worst
    }
}

/// Factors the conjugate pair of `weights` (in the `T = 1` basis) over the
/// supplied common zeros: each `t_j` must satisfy `S(t_j) = 0`,
/// `C(t_j) = γ`. Implemented by successive synthetic division of
/// `F(z) = -γ + Σ a_j z^j` by the factors `z² - 2 cos(t_j) z + 1`.
///
/// With no zeros this is the identity factorization: `γ` is ignored and
/// `α` reproduces the weights (with `α_0 = 0`).
pub fn factorize(
    weights: &[f64],
    zeros: &[f64],
    gamma: f64,
) -> Result<FactorizationResult, FactorizeError> {
    let n = weights.len();
    let m = zeros.len();
    if m == 0 {
        let mut alpha = Vec::with_capacity(n + 1);
        alpha.push(0.0);
        alpha.extend_from_slice(weights);
        return Ok(FactorizationResult {
            gamma: 0.0,
            zeros: Vec::new(),
            alpha,
        });
    }
    if 2 * m > n {
        return Err(FactorizeError::TooManyZeros { m, n });
    }
    for (i, &t) in zeros.iter().enumerate() {
        if !(t > 0.0 && t < PI) {
            return Err(FactorizeError::ZeroOutOfRange(t));
        }
        for &u in &zeros[..i] {
            if (t - u).abs() < 1e-9 {
                return Err(FactorizeError::RepeatedZeros);
            }
        }
        let mut c = 0.0;
        let mut s = 0.0;
        for (j, &a) in weights.iter().enumerate() {
            let freq = (j + 1) as f64;
            c += a * (freq * t).cos();
            s += a * (freq * t).sin();
        }
        if s.abs() > FACTORIZE_TOL || (c - gamma).abs() > FACTORIZE_TOL {
            return Err(FactorizeError::NotACommonZero {
                t,
                s,
                c: c - gamma,
            });
        }
    }

    // F(z) = -gamma + a_1 z + ... + a_n z^n, ascending coefficients.
    let mut f: Vec<f64> = Vec::with_capacity(n + 1);
    f.push(-gamma);
    f.extend_from_slice(weights);
    let scale = f.iter().fold(0.0_f64, |acc, c| acc.max(c.abs())).max(1.0);

    for &t in zeros {
        let (quot, r1, r0) = divide_by_reciprocal_quadratic(&f, t.cos());
        if r0.abs() > FACTORIZE_TOL * scale || r1.abs() > FACTORIZE_TOL * scale {
            return Err(FactorizeError::DivisionResidual(r0.abs().max(r1.abs())));
        }
        f = quot;
    }
    // Quotient is -gamma + Σ β_k z^k; α_m = -2^m γ, α_{m+k} = 2^m β_k.
    let two_m = (2.0_f64).powi(m as i32);
    if (f[0] + gamma).abs() > FACTORIZE_TOL * scale {
        return Err(FactorizeError::DivisionResidual((f[0] + gamma).abs()));
    }
    let mut alpha = Vec::with_capacity(f.len());
    alpha.push(-two_m * gamma);
    alpha.extend(f[1..].iter().map(|&b| two_m * b));
    Ok(FactorizationResult {
        gamma,
        zeros: zeros.to_vec(),
        alpha,
    })
}

/// Divides an ascending-coefficient polynomial by the monic quadratic
/// `z² - 2c z + 1`; returns the ascending quotient and the remainder
/// `r1 z + r0`.
fn divide_by_reciprocal_quadratic(f: &[f64], c: f64) -> (Vec<f64>, f64, f64) {
    let n = f.len() - 1;
    debug_assert!(n >= 2);
    // Work with descending coefficients; standard synthetic division.
    let b: Vec<f64> = f.iter().rev().copied().collect();
    let mut q = vec![0.0; n - 1];
    for i in 0..=(n - 2) {
        let mut v = b[i];
        if i >= 1 {
            v += 2.0 * c * q[i - 1];
        }
        if i >= 2 {
            v -= q[i - 2];
        }
        q[i] = v;
    }
    let mut r1 = b[n - 1] + 2.0 * c * q[n - 2];
    if n >= 3 {
        r1 -= q[n - 3];
    }
    let r0 = b[n] - q[n - 2];
    q.reverse();
    (q, r1, r0)
}

/// The two Fejér kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FejerKind {
    /// `Φ_n^{(1)}(t) = (cos((n+2)t/2) / (cos t - cos(π/(n+2))))²`
    First,
    /// `Φ_n^{(2)}(t) = (sin((n+1)t/2) / sin(t/2))²`
    Second,
}

/// Evaluates a Fejér kernel of the given order. Removable singularities
/// are handled by switching to a Chebyshev recurrence for the Dirichlet
/// ratio once the squared denominator drops below `1e-6`.
pub fn fejer_kernel(order: usize, kind: FejerKind, t: f64) -> f64 {
    assert!(order >= 1, "kernel order must be positive");
    let n = order as f64;
    // Both kernels are even and 2π-periodic; reduce to [0, π].
    let mut tr = t.rem_euclid(2.0 * PI);
    if tr > PI {
        tr = 2.0 * PI - tr;
    }
    match kind {
        FejerKind::Second => {
            let denom = (0.5 * tr).sin();
            if denom * denom < 1e-6 {
                // sin((n+1)x)/sin(x) = U_n(cos x)
                let u = chebyshev_u(order, (0.5 * tr).cos());
                u * u
            } else {
                let r = ((n + 1.0) * 0.5 * tr).sin() / denom;
                r * r
            }
        }
        FejerKind::First => {
            let t0 = PI / (n + 2.0);
            let denom = tr.cos() - t0.cos();
            if denom * denom < 1e-6 {
                // Near t0 write cos((n+2)t/2) = -sin((n+2)δ/2) and
                // cos t - cos t0 = -2 sin(δ/2) sin((t+t0)/2) with δ = t - t0,
                // so the ratio is U_{n+1}(cos(δ/2)) / (2 sin((t+t0)/2)).
                let delta = tr - t0;
                let u = chebyshev_u(order + 1, (0.5 * delta).cos());
                let r = u / (2.0 * (0.5 * (tr + t0)).sin());
                r * r
            } else {
                let r = ((n + 2.0) * 0.5 * tr).cos() / denom;
                r * r
            }
        }
    }
}

/// `U_k(c) = sin((k+1)x)/sin(x)` with `c = cos x`, by the three-term
/// recurrence (stable for `|c| <= 1`).
fn chebyshev_u(k: usize, c: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * c;
    for _ in 1..k {
        let next = 2.0 * c * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Classical multiplicative identities checkable on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityId {
    /// `Σ_{j=1}^{2m} sin jt = 2^m Π_{j=1}^m (cos t - cos(2πj/(2m+1))) sin mt`
    DirichletEvenSin,
    /// `Σ_{j=1}^{2m} cos jt = -1 + 2^m Π (cos t - cos(2πj/(2m+1))) cos mt`
    DirichletEvenCos,
    /// `Σ_{j=1}^{2m+1} sin jt = 2^m Π_{j=1}^m (cos t - cos(πj/(m+1))) (sin mt + sin(m+1)t)`
    DirichletOddSin,
    /// `Σ_{j=1}^{2m+1} cos jt = -1 + 2^m Π (cos t - cos(πj/(m+1))) (cos mt + cos(m+1)t)`
    DirichletOddCos,
    /// `Σ_{j=1}^m C(m,j) sin 2jt = 2^m cos^m t sin mt`
    BinomialSin,
    /// `Σ_{j=1}^m C(m,j) cos 2jt = -1 + 2^m cos^m t cos mt`
    BinomialCos,
    /// `Π_{j=1}^m (1 - cos(πj/(m+1))) = (m+1)/2^m`
    ProductConstant,
}

impl IdentityId {
    pub const ALL: [IdentityId; 7] = [
        IdentityId::DirichletEvenSin,
        IdentityId::DirichletEvenCos,
        IdentityId::DirichletOddSin,
        IdentityId::DirichletOddCos,
        IdentityId::BinomialSin,
        IdentityId::BinomialCos,
        IdentityId::ProductConstant,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            IdentityId::DirichletEvenSin => "dirichlet-even-sin",
            IdentityId::DirichletEvenCos => "dirichlet-even-cos",
            IdentityId::DirichletOddSin => "dirichlet-odd-sin",
            IdentityId::DirichletOddCos => "dirichlet-odd-cos",
            IdentityId::BinomialSin => "binomial-sin",
            IdentityId::BinomialCos => "binomial-cos",
            IdentityId::ProductConstant => "product-constant",
        }
    }
}

impl FromStr for IdentityId {
    type Err = TrigPolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IdentityId::ALL
            .iter()
            .find(|id| id.tag() == s)
            .copied()
            .ok_or_else(|| TrigPolyError::UnknownIdentity(s.to_string()))
    }
}

/// Max absolute residual of the named identity over a uniform grid on
/// `[0, 2π)` (the product-constant identity has no grid dependence).
pub fn verify_identity(id: IdentityId, m: usize) -> f64 {
    verify_identity_on_grid(id, m, DEFAULT_IDENTITY_GRID)
}

pub fn verify_identity_on_grid(id: IdentityId, m: usize, grid: usize) -> f64 {
    assert!(m >= 1, "identity order must be positive");
    if id == IdentityId::ProductConstant {
        let mf = m as f64;
        let prod: f64 = (1..=m)
            .map(|j| 1.0 - (PI * j as f64 / (mf + 1.0)).cos())
            .product();
        return (prod - (mf + 1.0) / (2.0_f64).powi(m as i32)).abs();
    }
    let mf = m as f64;
    let mut worst = 0.0_f64;
    for k in 0..grid {
        let t = 2.0 * PI * k as f64 / grid as f64;
        let (lhs, rhs) = match id {
            IdentityId::DirichletEvenSin | IdentityId::DirichletEvenCos => {
                let prod: f64 = (1..=m)
                    .map(|j| t.cos() - (2.0 * PI * j as f64 / (2.0 * mf + 1.0)).cos())
                    .product();
                let scale = (2.0_f64).powi(m as i32) * prod;
                if id == IdentityId::DirichletEvenSin {
                    let lhs: f64 = (1..=2 * m).map(|j| (j as f64 * t).sin()).sum();
                    (lhs, scale * (mf * t).sin())
                } else {
                    let lhs: f64 = (1..=2 * m).map(|j| (j as f64 * t).cos()).sum();
                    (lhs, -1.0 + scale * (mf * t).cos())
                }
            }
            IdentityId::DirichletOddSin | IdentityId::DirichletOddCos => {
                let prod: f64 = (1..=m)
                    .map(|j| t.cos() - (PI * j as f64 / (mf + 1.0)).cos())
                    .product();
                let scale = (2.0_f64).powi(m as i32) * prod;
                if id == IdentityId::DirichletOddSin {
                    let lhs: f64 = (1..=2 * m + 1).map(|j| (j as f64 * t).sin()).sum();
                    (lhs, scale * ((mf * t).sin() + ((mf + 1.0) * t).sin()))
                } else {
                    let lhs: f64 = (1..=2 * m + 1).map(|j| (j as f64 * t).cos()).sum();
                    (lhs, -1.0 + scale * ((mf * t).cos() + ((mf + 1.0) * t).cos()))
                }
            }
            IdentityId::BinomialSin | IdentityId::BinomialCos => {
                let scale = (2.0 * t.cos()).powi(m as i32);
                if id == IdentityId::BinomialSin {
                    let lhs: f64 = (1..=m)
                        .map(|j| binomial(m, j) * (2.0 * j as f64 * t).sin())
                        .sum();
                    (lhs, scale * (mf * t).sin())
                } else {
                    let lhs: f64 = (1..=m)
                        .map(|j| binomial(m, j) * (2.0 * j as f64 * t).cos())
                        .sum();
                    (lhs, -1.0 + scale * (mf * t).cos())
                }
            }
            IdentityId::ProductConstant => unreachable!(),
        };
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Cosine-series coefficients of `S(t)/sin t` for the `T = 1` pair:
/// `S(t)/sin t = γ_1 + 2γ_2 cos t + ... + 2γ_n cos(n-1)t` with
/// `γ_s = Σ a_j` over `j >= s` of the same parity as `s`.
pub fn gamma_coefficients_t1(coeffs: &CoefficientVector) -> Vec<f64> {
    let a = coeffs.weights();
    let n = a.len();
    (1..=n)
        .map(|s| a.iter().skip(s - 1).step_by(2).sum())
        .collect()
}
