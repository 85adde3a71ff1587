//! Provably optimal delayed feedback control for one-dimensional discrete
//! maps.
//!
//! The control `u_k = -Σ_j ε_j (f(x_{k-(j-1)T}) - f(x_{k-jT}))` stabilizes
//! the unstable T-cycles of `x_{k+1} = f(x_k)` whose multipliers lie in
//! `(-μ_n(T), 1)`. For cycle lengths 1 and 2 the optimal strength
//! coefficients have closed forms generated by the Fejér kernels, with
//! margins `μ_n(1) = cot²(π/(2(n+1)))` and `μ_n(2) = n²`. This crate
//! generates those coefficients, verifies their extremality and stability
//! margins numerically, and drives closed-loop simulations and cycle hunts
//! on chaotic maps.
//!
//! ```
//! use dfc_core::coeffs::{mu_bound, optimal_coeffs_t2, strength_coefficients};
//! use dfc_core::stability::mu_margin;
//!
//! let a = optimal_coeffs_t2(3); // (5/9, 3/9, 1/9)
//! assert_eq!(strength_coefficients(&a).len(), 2);
//! let margin = mu_margin(&a, 2);
//! assert!((margin - mu_bound(2, 3).unwrap()).abs() < 1e-5);
//! ```

pub mod coeffs;
pub mod dynamics;
pub mod oracle;
pub mod stability;
pub mod trigpoly;

pub use coeffs::ControlConfig;
pub use trigpoly::CoefficientVector;
