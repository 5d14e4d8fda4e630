//! Control-affine discrete-time dynamics, disturbance injection, and online
//! disturbance estimation.
//!
//! States are flat coordinate vectors laid out as positions then velocities:
//! `[p_1..p_d, v_1..v_d]` for `d = pos_dim()`. Actions are accelerations.
//! Every simulator steps as `s' = f(s) + g(s) u`, which is what makes the
//! per-axis quadratic structure of Q exact; the affinity test below checks
//! it directly. Action clamping is a policy concern, not a dynamics one:
//! `step` applies whatever acceleration it is given so that
//! `step_disturbed(s, a, xi) == step(s, a + xi)` holds exactly.

use crate::error::{invalid, Error, Result};
use crate::rng::PearlRng;
use rand_distr::{Distribution, Normal};

/// Position-velocity vector; length is `2 * pos_dim`, positions first.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub coords: Vec<f64>,
}

impl State {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() % 2 != 0 {
            return Err(invalid(format!(
                "state length must be even, got {}",
                coords.len()
            )));
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite { what: "state" });
        }
        Ok(State { coords })
    }

    pub fn zeros(len: usize) -> Self {
        State {
            coords: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

/// Joint acceleration input, one entry per actuated axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub coords: Vec<f64>,
}

impl Action {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite { what: "action" });
        }
        Ok(Action { coords })
    }

    pub fn zeros(len: usize) -> Self {
        Action {
            coords: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Discrete-time control-affine system `s' = f(s) + g(s) u`.
///
/// `step_raw`/`hold_raw` are the unchecked hot paths; the `step` /
/// `step_disturbed` wrappers validate dimensions and finiteness.
pub trait ControlAffineDynamics {
    /// Number of position coordinates (state length is twice this).
    fn pos_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn dt(&self) -> f64;

    /// One step; `out` has length `2 * pos_dim()`.
    fn step_raw(&self, s: &[f64], a: &[f64], out: &mut [f64]);

    /// Apply `a` held constant for `substeps` steps.
    fn hold_raw(&self, s: &[f64], a: &[f64], substeps: usize, out: &mut [f64]) {
        debug_assert!(substeps >= 1);
        let mut cur = s.to_vec();
        for _ in 0..substeps {
            self.step_raw(&cur, a, out);
            cur.copy_from_slice(out);
        }
    }

    fn state_dim(&self) -> usize {
        2 * self.pos_dim()
    }
}

fn check_dims(dyn_: &dyn ControlAffineDynamics, s: &State, a: &Action) -> Result<()> {
    if s.len() != dyn_.state_dim() {
        return Err(Error::DimensionMismatch {
            what: "state",
            expected: dyn_.state_dim(),
            got: s.len(),
        });
    }
    if a.len() != dyn_.action_dim() {
        return Err(Error::DimensionMismatch {
            what: "action",
            expected: dyn_.action_dim(),
            got: a.len(),
        });
    }
    if !s.is_finite() {
        return Err(Error::NonFinite { what: "state" });
    }
    if !a.coords.iter().all(|c| c.is_finite()) {
        return Err(Error::NonFinite { what: "action" });
    }
    Ok(())
}

/// Deterministic step `s' = f(s) + g(s) a`.
pub fn step(dyn_: &dyn ControlAffineDynamics, s: &State, a: &Action) -> Result<State> {
    check_dims(dyn_, s, a)?;
    let mut out = vec![0.0; s.len()];
    dyn_.step_raw(&s.coords, &a.coords, &mut out);
    Ok(State { coords: out })
}

/// Disturbance-injected step `s' = f(s) + g(s)(a + xi)`.
pub fn step_disturbed(
    dyn_: &dyn ControlAffineDynamics,
    s: &State,
    a: &Action,
    xi: &Action,
) -> Result<State> {
    if xi.len() != a.len() {
        return Err(Error::DimensionMismatch {
            what: "disturbance",
            expected: a.len(),
            got: xi.len(),
        });
    }
    let sum = Action::new(
        a.coords
            .iter()
            .zip(&xi.coords)
            .map(|(x, y)| x + y)
            .collect(),
    )?;
    step(dyn_, s, &sum)
}

/// Exact zero-order-hold double integrator, one independent axis per action
/// coordinate: `p += v dt + a dt^2 / 2`, `v += a dt`.
#[derive(Debug, Clone)]
pub struct DoubleIntegrator {
    pub axes: usize,
    pub dt: f64,
}

impl DoubleIntegrator {
    pub fn new(axes: usize, dt: f64) -> Self {
        DoubleIntegrator { axes, dt }
    }
}

impl ControlAffineDynamics for DoubleIntegrator {
    fn pos_dim(&self) -> usize {
        self.axes
    }

    fn action_dim(&self) -> usize {
        self.axes
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step_raw(&self, s: &[f64], a: &[f64], out: &mut [f64]) {
        let n = self.axes;
        let dt = self.dt;
        for i in 0..n {
            let (p, v) = (s[i], s[n + i]);
            out[i] = p + v * dt + 0.5 * a[i] * dt * dt;
            out[n + i] = v + a[i] * dt;
        }
    }

    // Holding a constant acceleration for k steps is exactly one ZOH step
    // of duration k*dt.
    fn hold_raw(&self, s: &[f64], a: &[f64], substeps: usize, out: &mut [f64]) {
        let n = self.axes;
        let tau = self.dt * substeps as f64;
        for i in 0..n {
            let (p, v) = (s[i], s[n + i]);
            out[i] = p + v * tau + 0.5 * a[i] * tau * tau;
            out[n + i] = v + a[i] * tau;
        }
    }
}

/// Per-axis Gaussian acceleration disturbance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDisturbance {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl GaussianDisturbance {
    pub fn new(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.len() != std.len() {
            return Err(Error::DimensionMismatch {
                what: "disturbance std",
                expected: mean.len(),
                got: std.len(),
            });
        }
        if !mean.iter().chain(&std).all(|v| v.is_finite()) {
            return Err(Error::NonFinite { what: "disturbance" });
        }
        if std.iter().any(|&s| s < 0.0) {
            return Err(invalid("disturbance std must be non-negative"));
        }
        Ok(GaussianDisturbance { mean, std })
    }

    /// `N(mean, std)` on every one of `axes` axes.
    pub fn uniform_axes(axes: usize, mean: f64, std: f64) -> Result<Self> {
        Self::new(vec![mean; axes], vec![std; axes])
    }

    pub fn zero(axes: usize) -> Self {
        GaussianDisturbance {
            mean: vec![0.0; axes],
            std: vec![0.0; axes],
        }
    }

    pub fn axes(&self) -> usize {
        self.mean.len()
    }

    pub fn is_zero(&self) -> bool {
        self.mean.iter().all(|&m| m == 0.0) && self.std.iter().all(|&s| s == 0.0)
    }
}

/// One per-axis normal draw. A zero-std axis returns its mean exactly.
pub fn sample_disturbance(dist: &GaussianDisturbance, rng: &mut PearlRng) -> Action {
    let coords = dist
        .mean
        .iter()
        .zip(&dist.std)
        .map(|(&m, &s)| {
            if s == 0.0 {
                m
            } else {
                Normal::new(m, s).expect("validated std").sample(rng)
            }
        })
        .collect();
    Action { coords }
}

pub fn sample_disturbance_into(dist: &GaussianDisturbance, rng: &mut PearlRng, out: &mut [f64]) {
    for ((o, &m), &s) in out.iter_mut().zip(&dist.mean).zip(&dist.std) {
        *o = if s == 0.0 {
            m
        } else {
            Normal::new(m, s).expect("validated std").sample(rng)
        };
    }
}

/// Default estimation window: 2 s of history at 50 Hz, long enough to
/// smooth per-step noise while still tracking slow disturbance drift.
pub const DEFAULT_ESTIMATOR_WINDOW: usize = 100;

/// Moving mean and std of (observed - commanded) acceleration over the last
/// `window` entries. Uses all history when it is shorter than the window.
pub fn estimate_disturbance(
    history: &[(Action, Action)],
    window: usize,
) -> Result<GaussianDisturbance> {
    if history.is_empty() {
        return Err(invalid("disturbance estimation needs non-empty history"));
    }
    if window < 2 {
        return Err(invalid("disturbance estimation window must be >= 2"));
    }
    let start = history.len().saturating_sub(window);
    let recent = &history[start..];
    let axes = recent[0].0.len();
    let n = recent.len() as f64;
    let mut mean = vec![0.0; axes];
    for (commanded, observed) in recent {
        if commanded.len() != axes || observed.len() != axes {
            return Err(Error::DimensionMismatch {
                what: "disturbance history entry",
                expected: axes,
                got: commanded.len().max(observed.len()),
            });
        }
        for i in 0..axes {
            mean[i] += observed.coords[i] - commanded.coords[i];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0; axes];
    for (commanded, observed) in recent {
        for i in 0..axes {
            let e = observed.coords[i] - commanded.coords[i] - mean[i];
            var[i] += e * e;
        }
    }
    let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
    GaussianDisturbance::new(mean, std)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use rand::Rng;

    #[test]
    fn double_integrator_zoh_is_exact() {
        let dyn_ = DoubleIntegrator::new(1, 1.0);
        let s = State::new(vec![0.0, 0.0]).unwrap();
        let a = Action::new(vec![2.0]).unwrap();
        let next = step(&dyn_, &s, &a).unwrap();
        assert_eq!(next.coords, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_input_at_rest_is_fixed_point() {
        let dyn_ = DoubleIntegrator::new(3, 0.02);
        let s = State::new(vec![1.0, -2.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let next = step(&dyn_, &s, &Action::zeros(3)).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn step_dimension_mismatch_is_error() {
        let dyn_ = DoubleIntegrator::new(2, 0.02);
        let s = State::new(vec![0.0; 4]).unwrap();
        assert!(step(&dyn_, &s, &Action::zeros(3)).is_err());
        let bad = State::new(vec![0.0; 6]).unwrap();
        assert!(step(&dyn_, &bad, &Action::zeros(2)).is_err());
    }

    #[test]
    fn disturbed_step_equals_shifted_action() {
        let dyn_ = DoubleIntegrator::new(1, 0.05);
        let s = State::new(vec![0.3, -0.7]).unwrap();
        let one = Action::new(vec![1.0]).unwrap();
        let two = Action::new(vec![2.0]).unwrap();
        let via_xi = step_disturbed(&dyn_, &s, &one, &one).unwrap();
        let direct = step(&dyn_, &s, &two).unwrap();
        assert_eq!(via_xi, direct);

        let zero = Action::zeros(1);
        assert_eq!(
            step_disturbed(&dyn_, &s, &one, &zero).unwrap(),
            step(&dyn_, &s, &one).unwrap()
        );
    }

    #[test]
    fn hold_matches_repeated_steps() {
        let dyn_ = DoubleIntegrator::new(2, 0.02);
        let s = vec![0.1, -0.2, 0.4, 0.8];
        let a = vec![1.5, -0.5];
        let mut held = vec![0.0; 4];
        dyn_.hold_raw(&s, &a, 7, &mut held);
        let mut looped = s.clone();
        let mut out = vec![0.0; 4];
        for _ in 0..7 {
            dyn_.step_raw(&looped, &a, &mut out);
            looped.copy_from_slice(&out);
        }
        for (h, l) in held.iter().zip(&looped) {
            assert!((h - l).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_gaussian_returns_mean() {
        let dist = GaussianDisturbance::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap();
        let mut rng = master_rng(1);
        for _ in 0..10 {
            let xi = sample_disturbance(&dist, &mut rng);
            assert_eq!(xi.coords, vec![2.0, 0.5]);
        }
    }

    #[test]
    fn sample_statistics_converge() {
        let dist = GaussianDisturbance::uniform_axes(1, 0.0, 1.0).unwrap();
        let mut rng = master_rng(42);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_disturbance(&dist, &mut rng).coords[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "sample mean {mean}");
        assert!((var.sqrt() - 1.0).abs() < 0.02, "sample std {}", var.sqrt());
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let dist = GaussianDisturbance::uniform_axes(3, 1.0, 0.7).unwrap();
        let mut a = master_rng(9);
        let mut b = master_rng(9);
        for _ in 0..32 {
            assert_eq!(
                sample_disturbance(&dist, &mut a),
                sample_disturbance(&dist, &mut b)
            );
        }
    }

    #[test]
    fn estimator_constant_error() {
        let history: Vec<(Action, Action)> = (0..10)
            .map(|_| (Action::zeros(2), Action::new(vec![1.0, 1.0]).unwrap()))
            .collect();
        let est = estimate_disturbance(&history, 10).unwrap();
        assert_eq!(est.mean, vec![1.0, 1.0]);
        assert_eq!(est.std, vec![0.0, 0.0]);
    }

    #[test]
    fn estimator_recovers_gaussian_error() {
        let truth = GaussianDisturbance::uniform_axes(1, 2.0, 0.5).unwrap();
        let mut rng = master_rng(5);
        let history: Vec<(Action, Action)> = (0..500)
            .map(|_| {
                let xi = sample_disturbance(&truth, &mut rng);
                (Action::zeros(1), xi)
            })
            .collect();
        let est = estimate_disturbance(&history, 500).unwrap();
        assert!((est.mean[0] - 2.0).abs() < 0.1, "mean {}", est.mean[0]);
        assert!((est.std[0] - 0.5).abs() < 0.1, "std {}", est.std[0]);
    }

    #[test]
    fn estimator_window_larger_than_history() {
        let history = vec![(Action::zeros(1), Action::new(vec![3.0]).unwrap())];
        let est = estimate_disturbance(&history, 100).unwrap();
        assert_eq!(est.mean, vec![3.0]);
        assert_eq!(est.std, vec![0.0]);
    }

    #[test]
    fn estimator_rejects_empty_history() {
        assert!(estimate_disturbance(&[], 10).is_err());
    }

    #[test]
    fn affinity_of_double_integrator() {
        // step(s, a1+a2) - step(s, a1) - step(s, a2) + step(s, 0) == 0
        let dyn_ = DoubleIntegrator::new(2, 0.02);
        let mut rng = master_rng(11);
        for _ in 0..100 {
            let s: Vec<f64> = (0..4).map(|_| rng.random_range(-5.0..5.0)).collect();
            let a1: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let a2: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let sum: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| x + y).collect();
            let mut s_sum = vec![0.0; 4];
            let mut s_a1 = vec![0.0; 4];
            let mut s_a2 = vec![0.0; 4];
            let mut s_zero = vec![0.0; 4];
            dyn_.step_raw(&s, &sum, &mut s_sum);
            dyn_.step_raw(&s, &a1, &mut s_a1);
            dyn_.step_raw(&s, &a2, &mut s_a2);
            dyn_.step_raw(&s, &[0.0, 0.0], &mut s_zero);
            for i in 0..4 {
                let r = s_sum[i] - s_a1[i] - s_a2[i] + s_zero[i];
                assert!(r.abs() < 1e-9, "affinity residual {r}");
            }
        }
    }
}
