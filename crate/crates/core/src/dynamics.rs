//! One-dimensional map registry, closed-loop simulation under the delayed
//! feedback law, cycle detection over many seeded trials, and multiplier
//! computation.
//!
//! The closed loop is `x_{k+1} = Σ_j a_j f(x_{k-(j-1)T})`, which equals the
//! open loop plus the control
//! `u_k = -Σ_j ε_j (f(x_{k-(j-1)T}) - f(x_{k-jT}))`; on any T-periodic orbit
//! of `f` the control vanishes, so open- and closed-loop cycles coincide.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coeffs::ControlConfig;

/// States beyond this magnitude abort a run as divergent.
pub const OVERFLOW_LIMIT: f64 = 1e12;
/// Central-difference step for derivatives of custom maps.
pub const FD_STEP: f64 = 1e-6;
/// Default transient discarded before cycle detection.
pub const DEFAULT_TRANSIENT: usize = 10_000;
/// Default point-matching tolerance for cycle detection.
pub const DEFAULT_DETECT_TOL: f64 = 1e-6;
/// Default unordered point-set distance under which two cycles are one.
pub const DEFAULT_DEDUP_TOL: f64 = 1e-4;
/// SOC cycle points this close to the kink at 1/2 get flagged.
const KINK_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("map parameter {name} = {value} outside [{lo}, {hi}]")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("iterate power must be positive")]
    InvalidPower,
    #[error("state overflow: |x| = {0:e} exceeds {OVERFLOW_LIMIT:e}")]
    Overflow(f64),
    #[error("trajectory diverged at step {step}")]
    Diverged { step: usize },
    #[error("cycle report is not converged")]
    NotConverged,
    #[error("orbit did not return to its start within {0} base steps")]
    NoReturn(usize),
}

#[derive(Clone)]
enum MapFamily {
    Logistic { h: f64 },
    Soc { ha: f64 },
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        domain: (f64, f64),
    },
}

impl fmt::Debug for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapFamily::Logistic { h } => write!(f, "Logistic {{ h: {h} }}"),
            MapFamily::Soc { ha } => write!(f, "Soc {{ ha: {ha} }}"),
            MapFamily::Custom { name, domain, .. } => {
                write!(f, "Custom {{ name: {name:?}, domain: {domain:?} }}")
            }
        }
    }
}

/// A one-dimensional map `f^(power)` with analytic derivatives for the
/// built-in families and central differences for custom ones.
#[derive(Debug, Clone)]
pub struct MapSpec {
    family: MapFamily,
    power: usize,
}

impl MapSpec {
    /// Logistic map `f(x) = h x (1 - x)` on `[0, 1]`, `h ∈ [0, 4]`.
    pub fn logistic(h: f64) -> Result<Self, DynamicsError> {
        if !(0.0..=4.0).contains(&h) {
            return Err(DynamicsError::InvalidParameter {
                name: "h",
                value: h,
                lo: 0.0,
                hi: 4.0,
            });
        }
        Ok(Self {
            family: MapFamily::Logistic { h },
            power: 1,
        })
    }

    /// Piecewise-linear map `f(x) = ha/2 - ha|x - 1/2| + x` with
    /// `ha ∈ [-1, 1 + √2]` (the range keeping an invariant interval).
    pub fn soc(ha: f64) -> Result<Self, DynamicsError> {
        let hi = 1.0 + 2.0_f64.sqrt();
        if !(-1.0..=hi).contains(&ha) {
            return Err(DynamicsError::InvalidParameter {
                name: "ha",
                value: ha,
                lo: -1.0,
                hi,
            });
        }
        Ok(Self {
            family: MapFamily::Soc { ha },
            power: 1,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        domain: (f64, f64),
    ) -> Self {
        Self {
            family: MapFamily::Custom {
                name: name.into(),
                f,
                domain,
            },
            power: 1,
        }
    }

    /// How many times the base map is folded.
    pub fn power(&self) -> usize {
        self.power
    }

    /// The same map with power 1.
    pub fn base(&self) -> MapSpec {
        MapSpec {
            family: self.family.clone(),
            power: 1,
        }
    }

    pub fn name(&self) -> String {
        let base = match &self.family {
            MapFamily::Logistic { h } => format!("logistic(h={h})"),
            MapFamily::Soc { ha } => format!("soc(ha={ha})"),
            MapFamily::Custom { name, .. } => name.clone(),
        };
        if self.power == 1 {
            base
        } else {
            format!("{base}^{}", self.power)
        }
    }

    /// Interval initial points are sampled from.
    pub fn domain(&self) -> (f64, f64) {
        match &self.family {
            MapFamily::Logistic { .. } => (0.0, 1.0),
            MapFamily::Soc { ha } => (0.0, (0.5 * (1.0 + ha)).max(1.0)),
            MapFamily::Custom { domain, .. } => *domain,
        }
    }

    fn base_eval(&self, x: f64) -> f64 {
        match &self.family {
            MapFamily::Logistic { h } => h * x * (1.0 - x),
            MapFamily::Soc { ha } => 0.5 * ha - ha * (x - 0.5).abs() + x,
            MapFamily::Custom { f, .. } => f(x),
        }
    }

    fn base_derivative(&self, x: f64) -> f64 {
        match &self.family {
            MapFamily::Logistic { h } => h * (1.0 - 2.0 * x),
            // Right derivative at the kink.
            MapFamily::Soc { ha } => {
                if x < 0.5 {
                    1.0 + ha
                } else {
                    1.0 - ha
                }
            }
            MapFamily::Custom { f, .. } => (f(x + FD_STEP) - f(x - FD_STEP)) / (2.0 * FD_STEP),
        }
    }

    /// Evaluates `f^(power)(x)` with an overflow guard on every
    /// intermediate state.
    pub fn eval(&self, x: f64) -> Result<f64, DynamicsError> {
        let mut v = x;
        for _ in 0..self.power {
            v = self.base_eval(v);
            if !v.is_finite() || v.abs() > OVERFLOW_LIMIT {
                return Err(DynamicsError::Overflow(v.abs()));
            }
        }
        Ok(v)
    }

    /// Derivative of `f^(power)` at `x`: the chain-rule product of base
    /// derivatives along the orbit.
    pub fn derivative(&self, x: f64) -> Result<f64, DynamicsError> {
        let mut v = x;
        let mut d = 1.0;
        for _ in 0..self.power {
            d *= self.base_derivative(v);
            v = self.base_eval(v);
            if !v.is_finite() || v.abs() > OVERFLOW_LIMIT {
                return Err(DynamicsError::Overflow(v.abs()));
            }
        }
        Ok(d)
    }
}

/// Wraps a map as its `m`-fold iterate; derivatives compose by the chain
/// rule. Stabilizing equilibria of `f^(m)` reaches the m-cycles of `f`.
pub fn iterate_map(map: &MapSpec, m: usize) -> MapSpec {
    assert!(m >= 1, "iterate power must be positive");
    MapSpec {
        family: map.family.clone(),
        power: map.power * m,
    }
}

/// A simulated closed-loop run. `controls[k]` is the deviation from the
/// open loop that produced `states[k]`, i.e.
/// `controls[k] = states[k] - f(states[k-1])` with `controls[0] = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<f64>,
    pub controls: Vec<f64>,
    pub config: ControlConfig,
    pub map: MapSpec,
}

impl Trajectory {
    pub fn final_state(&self) -> f64 {
        *self.states.last().unwrap()
    }

    /// Max |u_k| over the trailing `fraction` of the run.
    pub fn max_control_tail(&self, fraction: f64) -> f64 {
        let len = self.controls.len();
        let start = len - ((len as f64 * fraction) as usize).clamp(1, len);
        self.controls[start..]
            .iter()
            .fold(0.0_f64, |acc, u| acc.max(u.abs()))
    }

    /// Detects the minimal period `p <= max_period` of the trajectory
    /// tail: the last window must repeat with period `p` within `tol`.
    /// Returns the period and the cycle points in orbit order, rotated
    /// so the smallest comes first.
    pub fn terminal_cycle(&self, max_period: usize, tol: f64) -> Option<(usize, Vec<f64>)> {
        let window = (8 * max_period + 32).min(self.states.len() / 2);
        let tail = &self.states[self.states.len() - window..];
        for p in 1..=max_period {
            if window < 2 * p {
                break;
            }
            let periodic = (0..window - p).all(|i| (tail[i] - tail[i + p]).abs() < tol);
            if periodic {
                let cycle = &self.states[self.states.len() - p..];
                let (min_idx, _) = cycle
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                let rotated: Vec<f64> = (0..p).map(|i| cycle[(min_idx + i) % p]).collect();
                return Some((p, rotated));
            }
        }
        None
    }
}

/// Runs the closed loop `x_{k+1} = Σ_j a_j f(x_{k-(j-1)T})` for `steps`
/// steps. The first `(n-1)T + 1` states are seeded by open-loop iteration
/// from `x0`, after which the feedback is active.
pub fn simulate(
    map: &MapSpec,
    config: &ControlConfig,
    x0: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    assert!(steps >= 1, "need at least one step");
    let t = config.cycle_length;
    let a = config.coeffs.weights();
    let pre = config.prehistory_depth();

    let mut states = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps + 1);
    states.push(x0);
    controls.push(0.0);

    let diverged = |x: f64, step: usize| -> Result<f64, DynamicsError> {
        if !x.is_finite() || x.abs() > OVERFLOW_LIMIT {
            Err(DynamicsError::Diverged { step })
        } else {
            Ok(x)
        }
    };

    while states.len() <= steps {
        let k = states.len() - 1;
        let fx_k = map
            .eval(states[k])
            .map_err(|_| DynamicsError::Diverged { step: k + 1 })?;
        let next = if k < pre {
            fx_k
        } else {
            let mut acc = 0.0;
            for (j, &aj) in a.iter().enumerate() {
                let idx = k - j * t;
                let fx = if j == 0 {
                    fx_k
                } else {
                    map.eval(states[idx])
                        .map_err(|_| DynamicsError::Diverged { step: k + 1 })?
                };
                acc += aj * fx;
            }
            acc
        };
        let next = diverged(next, k + 1)?;
        states.push(next);
        controls.push(next - fx_k);
    }

    Ok(Trajectory {
        states,
        controls,
        config: config.clone(),
        map: map.clone(),
    })
}

/// One detected attractor (or one failed trial, with `converged = false`).
#[derive(Debug, Clone)]
pub struct CycleReport {
    /// Minimal period under the simulated map; 0 on failed trials.
    pub period: usize,
    /// Cycle points in orbit order (last state on failed trials).
    pub points: Vec<f64>,
    /// Product of the simulated map's derivative over the cycle points
    /// (equivalently the base-map chain product); NaN on failed trials.
    pub multiplier: f64,
    pub converged: bool,
    /// Max |f(η_i) - η_{i+1}| around the cycle; NaN on failed trials.
    pub residual: f64,
    /// Some point of the base orbit lies within 1e-9 of the SOC kink.
    pub near_kink: bool,
    /// How many trials landed on this cycle.
    pub trial_hits: usize,
    /// Initial point of the first trial that found it.
    pub x0_example: f64,
}

/// Outcome of a cycle hunt.
#[derive(Debug, Clone)]
pub struct DetectReport {
    pub seed: u64,
    pub trials: usize,
    pub max_period: usize,
    /// Deduplicated converged cycles (sorted by period, then first point)
    /// followed by one `converged = false` entry per failed trial.
    pub reports: Vec<CycleReport>,
}

#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    pub transient: usize,
    pub tol: f64,
    pub dedup: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            transient: DEFAULT_TRANSIENT,
            tol: DEFAULT_DETECT_TOL,
            dedup: DEFAULT_DEDUP_TOL,
        }
    }
}

/// Hunts for stabilized cycles from `trials` uniformly sampled initial
/// points. Each trial simulates through a transient, then the terminal
/// tail is tested for the minimal period `<= max_period`. Cycles are
/// deduplicated by unordered point-set distance; ordering is
/// deterministic for a fixed seed.
pub fn detect_cycles(
    map: &MapSpec,
    config: &ControlConfig,
    trials: usize,
    seed: u64,
    max_period: usize,
) -> DetectReport {
    detect_cycles_with(map, config, trials, seed, max_period, DetectOptions::default())
}

pub fn detect_cycles_with(
    map: &MapSpec,
    config: &ControlConfig,
    trials: usize,
    seed: u64,
    max_period: usize,
    opts: DetectOptions,
) -> DetectReport {
    assert!(trials >= 1 && max_period >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = map.domain();
    let steps = opts.transient + 8 * max_period + 64;

    let mut cycles: Vec<CycleReport> = Vec::new();
    let mut failures: Vec<CycleReport> = Vec::new();

    for _ in 0..trials {
        let x0 = lo + (hi - lo) * rng.gen::<f64>();
        let trajectory = match simulate(map, config, x0, steps) {
            Ok(t) => t,
            Err(_) => {
                failures.push(failed_trial(x0, f64::NAN));
                continue;
            }
        };
        let Some((period, points)) = trajectory.terminal_cycle(max_period, opts.tol) else {
            failures.push(failed_trial(x0, trajectory.final_state()));
            continue;
        };

        // A periodic tail is only a cycle of the map itself if the map
        // recursion closes on it; the feedback can hold other periodic
        // states with persistently nonzero control.
        let residual = cycle_residual(map, &points);
        if residual > 10.0 * opts.tol {
            failures.push(failed_trial(x0, trajectory.final_state()));
            continue;
        }

        if let Some(existing) = cycles
            .iter_mut()
            .find(|c| c.period == period && set_distance(&c.points, &points) < opts.dedup)
        {
            existing.trial_hits += 1;
            continue;
        }

        let multiplier = cycle_multiplier(map, &points).unwrap_or(f64::NAN);
        cycles.push(CycleReport {
            period,
            points: points.clone(),
            multiplier,
            converged: true,
            residual,
            near_kink: near_kink(map, &points),
            trial_hits: 1,
            x0_example: x0,
        });
    }

    cycles.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(a.points[0].total_cmp(&b.points[0]))
    });
    cycles.extend(failures);
    DetectReport {
        seed,
        trials,
        max_period,
        reports: cycles,
    }
}

fn failed_trial(x0: f64, last: f64) -> CycleReport {
    CycleReport {
        period: 0,
        points: if last.is_nan() { vec![] } else { vec![last] },
        multiplier: f64::NAN,
        converged: false,
        residual: f64::NAN,
        near_kink: false,
        trial_hits: 1,
        x0_example: x0,
    }
}

/// Max `|f(η_i) - η_{i+1 mod p}|` around the cycle (under the simulated,
/// possibly iterated, map).
pub fn cycle_residual(map: &MapSpec, points: &[f64]) -> f64 {
    let p = points.len();
    (0..p)
        .map(|i| match map.eval(points[i]) {
            Ok(v) => (v - points[(i + 1) % p]).abs(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Multiplier `Π (f^(m))'(η_i)` over the cycle; by the chain rule this is
/// the base-map derivative product along the full base orbit.
pub fn cycle_multiplier(map: &MapSpec, points: &[f64]) -> Result<f64, DynamicsError> {
    let mut mu = 1.0;
    for &x in points {
        mu *= map.derivative(x)?;
    }
    Ok(mu)
}

fn near_kink(map: &MapSpec, points: &[f64]) -> bool {
    if !matches!(map.family, MapFamily::Soc { .. }) {
        return false;
    }
    let base = map.base();
    points.iter().any(|&p| {
        let mut x = p;
        for _ in 0..map.power {
            if (x - 0.5).abs() < KINK_TOL {
                return true;
            }
            x = base.base_eval(x);
        }
        false
    })
}

/// Unordered point-set distance (symmetric max-min).
fn set_distance(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .map(|x| ys.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0_f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleClass {
    /// Minimal base-map period equals the claimed length.
    GenuineCycle,
    /// The points close up after a proper divisor of the claimed length.
    DivisorCycle,
    /// A fixed point of the base map.
    Equilibrium,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub label: CycleClass,
    /// Minimal period on the base map.
    pub base_period: usize,
    /// Derivative product over the minimal base orbit.
    pub base_multiplier: f64,
    /// The minimal base orbit starting at the report's first point.
    pub base_orbit: Vec<f64>,
}

/// Checks the minimality of a detected cycle's period on the base map and
/// labels it. `claimed_period` is the cycle length the hunt targeted
/// (iterate power × control cycle length).
pub fn classify_detected(
    report: &CycleReport,
    base_map: &MapSpec,
    claimed_period: usize,
) -> Result<Classification, DynamicsError> {
    if !report.converged {
        return Err(DynamicsError::NotConverged);
    }
    let start = report.points[0];
    let bound = 2 * claimed_period.max(report.period) + 4;
    let mut orbit = vec![start];
    let mut x = start;
    let mut period = None;
    for step in 1..=bound {
        x = base_map.eval(x)?;
        if (x - start).abs() < 10.0 * DEFAULT_DETECT_TOL {
            period = Some(step);
            break;
        }
        orbit.push(x);
    }
    let Some(q) = period else {
        return Err(DynamicsError::NoReturn(bound));
    };
    let mut mu = 1.0;
    for &p in &orbit {
        mu *= base_map.derivative(p)?;
    }
    let label = if q == 1 {
        CycleClass::Equilibrium
    } else if q == claimed_period {
        CycleClass::GenuineCycle
    } else {
        CycleClass::DivisorCycle
    };
    Ok(Classification {
        label,
        base_period: q,
        base_multiplier: mu,
        base_orbit: orbit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::strength_coefficients;
    use crate::trigpoly::CoefficientVector;
    use approx::assert_abs_diff_eq;

    #[test]
    fn logistic_validation() {
        assert!(MapSpec::logistic(4.0).is_ok());
        assert!(MapSpec::logistic(4.5).is_err());
        assert!(MapSpec::soc(2.0).is_ok());
        assert!(MapSpec::soc(2.5).is_err());
    }

    #[test]
    fn iterate_map_fixed_point_persists() {
        let f = MapSpec::logistic(4.0).unwrap();
        let f3 = iterate_map(&f, 3);
        assert_eq!(f3.power(), 3);
        assert_abs_diff_eq!(f3.eval(0.75).unwrap(), 0.75, epsilon = 1e-12);
        // m = 1 leaves the map unchanged.
        let f1 = iterate_map(&f, 1);
        for x in [0.1, 0.33, 0.9] {
            assert_eq!(f1.eval(x).unwrap(), f.eval(x).unwrap());
        }
    }

    #[test]
    fn iterated_derivative_is_cycle_multiplier() {
        // Derivative of f^(2) at a 2-cycle point of logistic h = 3.3
        // equals -h² + 2h + 4 = -0.29.
        let h = 3.3;
        let f = MapSpec::logistic(h).unwrap();
        let disc = (h * h - 2.0 * h - 3.0_f64).sqrt();
        let eta1 = (1.0 + h - disc) / (2.0 * h);
        let f2 = iterate_map(&f, 2);
        let mu = f2.derivative(eta1).unwrap();
        assert_abs_diff_eq!(mu, -h * h + 2.0 * h + 4.0, epsilon = 1e-10);
    }

    #[test]
    fn iterate_overflow_guard() {
        let f = MapSpec::custom("double", Arc::new(|x| x * x), (0.0, 1.0));
        let f64x = iterate_map(&f, 64);
        assert!(matches!(f64x.eval(2.0), Err(DynamicsError::Overflow(_))));
    }

    #[test]
    fn open_loop_stays_in_unit_interval() {
        let f = MapSpec::logistic(4.0).unwrap();
        let cfg = ControlConfig::new(1, CoefficientVector::new(vec![1.0]).unwrap()).unwrap();
        let tr = simulate(&f, &cfg, 0.3, 50).unwrap();
        assert_eq!(tr.states.len(), 51);
        assert!(tr.states.iter().all(|&x| (0.0..=1.0).contains(&x)));
        // n = 1 is open loop: controls vanish identically.
        assert!(tr.controls.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn equilibrium_stabilization() {
        let f = MapSpec::logistic(4.0).unwrap();
        let cfg = ControlConfig::optimal(1, 2).unwrap();
        let tr = simulate(&f, &cfg, 0.3, 2000).unwrap();
        assert_abs_diff_eq!(tr.final_state(), 0.75, epsilon = 1e-8);
        assert!(tr.max_control_tail(0.1) < 1e-8);
        let (p, pts) = tr.terminal_cycle(4, 1e-6).unwrap();
        assert_eq!(p, 1);
        assert_abs_diff_eq!(pts[0], 0.75, epsilon = 1e-8);
    }

    #[test]
    fn two_cycle_stabilization() {
        let f = MapSpec::logistic(4.0).unwrap();
        let cfg = ControlConfig::optimal(2, 3).unwrap();
        let tr = simulate(&f, &cfg, 0.3, 5000).unwrap();
        let (p, pts) = tr.terminal_cycle(4, 1e-6).unwrap();
        assert_eq!(p, 2);
        let lo = (5.0 - 5.0_f64.sqrt()) / 8.0;
        let hi = (5.0 + 5.0_f64.sqrt()) / 8.0;
        assert_abs_diff_eq!(pts[0], lo, epsilon = 1e-6);
        assert_abs_diff_eq!(pts[1], hi, epsilon = 1e-6);
    }

    #[test]
    fn control_vanishes_on_seeded_cycle() {
        // Prehistory exactly on the 2-cycle: the control never acts.
        let f = MapSpec::logistic(4.0).unwrap();
        let cfg = ControlConfig::optimal(2, 3).unwrap();
        let lo = (5.0 - 5.0_f64.sqrt()) / 8.0;
        let tr = simulate(&f, &cfg, lo, 200).unwrap();
        assert!(tr.controls.iter().all(|&u| u.abs() < 1e-12));
        // Same for the fixed point under the T = 1 law.
        let cfg1 = ControlConfig::optimal(1, 3).unwrap();
        let tr = simulate(&f, &cfg1, 0.75, 200).unwrap();
        assert!(tr.controls.iter().all(|&u| u.abs() < 1e-12));
    }

    #[test]
    fn closed_loop_recursion_holds() {
        let f = MapSpec::logistic(3.9).unwrap();
        let cfg = ControlConfig::optimal(2, 3).unwrap();
        let tr = simulate(&f, &cfg, 0.41, 300).unwrap();
        let a = cfg.coeffs.weights();
        let t = cfg.cycle_length;
        for k in cfg.prehistory_depth()..300 {
            let mut acc = 0.0;
            for (j, &aj) in a.iter().enumerate() {
                acc += aj * f.eval(tr.states[k - j * t]).unwrap();
            }
            assert_abs_diff_eq!(tr.states[k + 1], acc, epsilon = 1e-12);
            // u_{k+1} = x_{k+1} - f(x_k)
            assert_abs_diff_eq!(
                tr.controls[k + 1],
                tr.states[k + 1] - f.eval(tr.states[k]).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn explicit_control_form_is_identical() {
        // Simulate via x_{k+1} = f(x_k) + u_k with the strength-coefficient
        // control and compare against the weight-form recursion.
        let f = MapSpec::logistic(4.0).unwrap();
        let cfg = ControlConfig::optimal(2, 3).unwrap();
        let eps = strength_coefficients(&cfg.coeffs);
        let t = cfg.cycle_length;
        let pre = cfg.prehistory_depth();
        let steps = 400;
        let reference = simulate(&f, &cfg, 0.3, steps).unwrap();

        let mut states = vec![0.3];
        while states.len() <= steps {
            let k = states.len() - 1;
            let fx = |i: usize| f.eval(states[i]).unwrap();
            let next = if k < pre {
                fx(k)
            } else {
                let u: f64 = eps
                    .iter()
                    .enumerate()
                    .map(|(jm1, &e)| {
                        let j = jm1 + 1;
                        -e * (fx(k - (j - 1) * t) - fx(k - j * t))
                    })
                    .sum();
                fx(k) + u
            };
            states.push(next);
        }
        for (a, b) in states.iter().zip(&reference.states) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn divergence_reported() {
        let f = MapSpec::logistic(4.0).unwrap();
        let cfg = ControlConfig::optimal(1, 2).unwrap();
        let err = simulate(&f, &cfg, 1.5, 100);
        assert!(matches!(err, Err(DynamicsError::Diverged { .. })));
    }

    #[test]
    fn detect_equilibrium_of_mildly_chaotic_map() {
        let f = MapSpec::logistic(3.2).unwrap();
        let cfg = ControlConfig::optimal(1, 2).unwrap();
        let report = detect_cycles(&f, &cfg, 10, 1234, 4);
        let eq: Vec<_> = report
            .reports
            .iter()
            .filter(|c| c.converged && c.period == 1)
            .collect();
        assert_eq!(eq.len(), 1, "exactly one equilibrium expected");
        let x_star = 1.0 - 1.0 / 3.2;
        assert_abs_diff_eq!(eq[0].points[0], x_star, epsilon = 1e-6);
        assert_abs_diff_eq!(eq[0].multiplier, 3.2 * (1.0 - 2.0 * x_star), epsilon = 1e-6);
        assert!(eq[0].residual < 1e-10);
    }

    #[test]
    fn detect_three_cycle_fixed_points() {
        // The 0.117 equilibrium attracts well under 1% of uniform starts,
        // so this needs a few hundred trials.
        let f3 = iterate_map(&MapSpec::logistic(4.0).unwrap(), 3);
        let cfg = ControlConfig::optimal(1, 4).unwrap();
        let report = detect_cycles(&f3, &cfg, 400, 99, 4);
        let fixed: Vec<f64> = report
            .reports
            .iter()
            .filter(|c| c.converged && c.period == 1)
            .map(|c| c.points[0])
            .collect();
        for target in [0.116977778440511, 0.413175911166535, 0.75] {
            assert!(
                fixed.iter().any(|x| (x - target).abs() < 5e-3),
                "missing fixed point near {target}: {fixed:?}"
            );
        }
    }

    #[test]
    fn classification_labels() {
        let base = MapSpec::logistic(4.0).unwrap();
        let eq = CycleReport {
            period: 1,
            points: vec![0.75],
            multiplier: -8.0,
            converged: true,
            residual: 0.0,
            near_kink: false,
            trial_hits: 1,
            x0_example: 0.3,
        };
        let c = classify_detected(&eq, &base, 3).unwrap();
        assert_eq!(c.label, CycleClass::Equilibrium);
        assert_eq!(c.base_period, 1);
        assert_abs_diff_eq!(c.base_multiplier, -2.0, epsilon = 1e-9);

        let lo = (5.0 - 5.0_f64.sqrt()) / 8.0;
        let hi = (5.0 + 5.0_f64.sqrt()) / 8.0;
        let divisor = CycleReport {
            period: 2,
            points: vec![lo, hi],
            multiplier: -4.0,
            converged: true,
            residual: 0.0,
            near_kink: false,
            trial_hits: 1,
            x0_example: 0.3,
        };
        let c = classify_detected(&divisor, &base, 8).unwrap();
        assert_eq!(c.label, CycleClass::DivisorCycle);
        assert_eq!(c.base_period, 2);
        assert_abs_diff_eq!(c.base_multiplier, -4.0, epsilon = 1e-9);

        let genuine = CycleReport {
            period: 1,
            points: vec![0.116977778440511],
            multiplier: -8.0,
            converged: true,
            residual: 0.0,
            near_kink: false,
            trial_hits: 1,
            x0_example: 0.3,
        };
        let c = classify_detected(&genuine, &base, 3).unwrap();
        assert_eq!(c.label, CycleClass::GenuineCycle);
        assert_eq!(c.base_period, 3);
        assert!(c.base_multiplier < 0.0);

        let failed = CycleReport {
            converged: false,
            ..genuine
        };
        assert!(classify_detected(&failed, &base, 3).is_err());
    }

    #[test]
    fn multiplier_formula_across_h() {
        // Logistic 2-cycle multiplier equals -h² + 2h + 4.
        for h in [3.2, 3.5, 3.8, 4.0] {
            let f = MapSpec::logistic(h).unwrap();
            let disc = (h * h - 2.0 * h - 3.0_f64).sqrt();
            let eta1 = (1.0 + h - disc) / (2.0 * h);
            let eta2 = (1.0 + h + disc) / (2.0 * h);
            let mu = cycle_multiplier(&f, &[eta1, eta2]).unwrap();
            assert_abs_diff_eq!(mu, -h * h + 2.0 * h + 4.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn multiplier_invariant_under_rotation() {
        let f = MapSpec::logistic(4.0).unwrap();
        let f3 = iterate_map(&f, 3);
        let pts = [0.116977778440511, 0.413175911166535, 0.969846310392954];
        let mu1 = cycle_multiplier(&f3, &pts[..1]).unwrap();
        let mu2 = cycle_multiplier(&f3, &pts[1..2]).unwrap();
        assert!((mu1 - mu2).abs() < 1e-6, "{mu1} vs {mu2}");
        // Rotating a base cycle leaves the product unchanged.
        let mu_a = cycle_multiplier(&f, pts.as_ref()).unwrap();
        let rotated = [pts[1], pts[2], pts[0]];
        let mu_b = cycle_multiplier(&f, rotated.as_ref()).unwrap();
        assert!((mu_a - mu_b).abs() < 1e-10);
    }

    #[test]
    fn soc_derivative_is_one_sided_at_kink() {
        let f = MapSpec::soc(2.0).unwrap();
        assert_abs_diff_eq!(f.derivative(0.5).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.derivative(0.4999).unwrap(), 3.0, epsilon = 1e-12);
        // Invariant interval endpoint: f maps [0, 1.5] into itself.
        let (lo, hi) = f.domain();
        assert_eq!((lo, hi), (0.0, 1.5));
        for k in 0..=100 {
            let x = lo + (hi - lo) * k as f64 / 100.0;
            let y = f.eval(x).unwrap();
            assert!(y >= lo - 1e-12 && y <= hi + 1e-12, "f({x}) = {y}");
        }
    }

    #[test]
    fn custom_map_central_difference() {
        let f = MapSpec::custom("cubic", Arc::new(|x| x * x * x), (-1.0, 1.0));
        assert_abs_diff_eq!(f.derivative(0.5).unwrap(), 0.75, epsilon = 1e-8);
    }
}
