//! Training: build the reduced training domain around the task's intents,
//! fit the feature weights by approximate value iteration, and keep the
//! fittest policy across Monte-Carlo repeats.
//!
//! Each iteration draws states uniformly from the training box, computes
//! one-step Bellman targets `y = R(s) + gamma * max_a V(step(s, a))` with
//! the max approximated per axis (3-sample quadratic interpolation over the
//! training action box), and refits the weights by ordinary least squares
//! of `y` on the features. The regression carries an intercept column that
//! is dropped from the returned weights: greedy policies are invariant to
//! additive constants, while a through-origin fit could not represent the
//! positive value at the goal (where every feature vanishes) and would
//! never pick up the reward signal.

use crate::error::{invalid, Error, Result};
use crate::features::{FeatureSet, WeightVector};
use crate::linalg;
use crate::mdp::{ControlAffineDynamics, State};
use crate::planner::{plan_trajectory, Controller};
use crate::policies::{das_select, ActionBounds, GenericAxialQ};
use crate::rng::PearlRng;
use crate::tasks::Task;
use rand::Rng;

/// Axis-aligned training box: a state region containing every intent and an
/// action box to optimize over.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingDomain {
    pub state_lo: Vec<f64>,
    pub state_hi: Vec<f64>,
    pub action_lo: Vec<f64>,
    pub action_hi: Vec<f64>,
}

impl TrainingDomain {
    pub fn sample_state(&self, rng: &mut PearlRng) -> Vec<f64> {
        self.state_lo
            .iter()
            .zip(&self.state_hi)
            .map(|(&lo, &hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo })
            .collect()
    }

    pub fn action_bounds(&self) -> ActionBounds {
        ActionBounds {
            lo: self.action_lo.clone(),
            hi: self.action_hi.clone(),
        }
    }

    pub fn contains(&self, s: &[f64]) -> bool {
        s.iter()
            .enumerate()
            .all(|(i, &v)| v >= self.state_lo[i] - 1e-12 && v <= self.state_hi[i] + 1e-12)
    }
}

/// Bounding box of all preference targets inflated by `margin` on every
/// anchored coordinate; unanchored velocity coordinates span the task's
/// speed limit, unanchored position coordinates span the margin.
pub fn make_training_domain(
    features: &FeatureSet,
    refs: &[Vec<f64>],
    margin: f64,
    speed_limit: Option<f64>,
    action_max: &[f64],
) -> Result<TrainingDomain> {
    if features.is_empty() {
        return Err(invalid("training domain needs at least one preference"));
    }
    if margin <= 0.0 {
        return Err(invalid("training domain margin must be positive"));
    }
    let layout = features.layout();
    let n = layout.state_len();
    let mut lo = vec![f64::NAN; n];
    let mut hi = vec![f64::NAN; n];
    for (coord, value) in features.anchors(refs)? {
        if lo[coord].is_nan() || value < lo[coord] {
            lo[coord] = value;
        }
        if hi[coord].is_nan() || value > hi[coord] {
            hi[coord] = value;
        }
    }
    let mut is_velocity = vec![false; n];
    for r in 0..layout.n_robots() {
        for &i in &layout.robot(r).vel {
            is_velocity[i] = true;
        }
    }
    for i in 0..n {
        if lo[i].is_nan() {
            let half = match (is_velocity[i], speed_limit) {
                (true, Some(v)) => v,
                _ => margin,
            };
            lo[i] = -half;
            hi[i] = half;
        } else {
            lo[i] -= margin;
            hi[i] += margin;
        }
    }
    // Every target must sit strictly inside the box.
    for (coord, value) in features.anchors(refs)? {
        if value <= lo[coord] || value >= hi[coord] {
            return Err(invalid(format!(
                "target {value} on coordinate {coord} not interior to the training box"
            )));
        }
    }
    Ok(TrainingDomain {
        state_lo: lo,
        state_hi: hi,
        action_lo: action_max.iter().map(|&a| -a).collect(),
        action_hi: action_max.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub iterations: usize,
    pub samples_per_iteration: usize,
    pub gamma: f64,
    /// Goal radius in meters; the reward fires when every attractor feature
    /// is below its square.
    pub goal_radius: f64,
    /// Monte-Carlo training repeats.
    pub n_mc: usize,
    /// Evaluation initial conditions per candidate.
    pub eval_count: usize,
    pub eval_horizon_s: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            iterations: 300,
            samples_per_iteration: 100,
            gamma: 0.9,
            goal_radius: 0.05,
            n_mc: 1,
            eval_count: 20,
            eval_horizon_s: 15.0,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(invalid("gamma must lie in [0, 1]"));
        }
        if self.samples_per_iteration < 2 {
            return Err(invalid("need at least 2 samples per iteration"));
        }
        if self.goal_radius <= 0.0 {
            return Err(invalid("goal radius must be positive"));
        }
        Ok(())
    }
}

/// What one training run needs to know about the task.
pub struct TrainingSetup<'a> {
    pub dynamics: &'a dyn ControlAffineDynamics,
    pub features: &'a FeatureSet,
    pub refs: Vec<Vec<f64>>,
    pub domain: TrainingDomain,
}

#[derive(Debug, Clone, Default)]
pub struct TrainingTrace {
    /// Weight norm after each iteration.
    pub iteration_norms: Vec<f64>,
    /// Fitted intercept of the final regression (dropped from the weights).
    pub intercept: f64,
    /// Fraction of sampled states that earned the reward, per iteration.
    pub reward_rates: Vec<f64>,
}

/// One approximate-value-iteration run. Zero iterations return the zero
/// vector untouched.
pub fn avi_train(
    setup: &TrainingSetup,
    cfg: &TrainingConfig,
    rng: &mut PearlRng,
) -> Result<(WeightVector, TrainingTrace)> {
    cfg.validate()?;
    let n_p = setup.features.len();
    let goal_tol = cfg.goal_radius * cfg.goal_radius;
    let bounds = setup.domain.action_bounds();
    let mut theta = vec![0.0; n_p];
    let mut intercept = 0.0;
    let mut trace = TrainingTrace::default();

    for iteration in 0..cfg.iterations {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(cfg.samples_per_iteration);
        let mut targets: Vec<f64> = Vec::with_capacity(cfg.samples_per_iteration);
        let mut rewards = 0usize;
        for _ in 0..cfg.samples_per_iteration {
            let s = setup.domain.sample_state(rng);
            let f = setup.features.features(&s, &setup.refs);
            let reward = if setup
                .features
                .attractors_within(&s, &setup.refs, goal_tol)
            {
                rewards += 1;
                1.0
            } else {
                0.0
            };
            let mut q = GenericAxialQ::new(setup.dynamics, setup.features, &theta, &setup.refs, 1);
            let (best, detail) = das_select(&mut q, &s, &bounds)?;
            let _ = best;
            let best_v = detail.q_n.max(detail.q_c);
            let y = reward + cfg.gamma * (best_v + intercept);
            let mut row = f;
            row.push(1.0);
            rows.push(row);
            targets.push(y);
        }
        let coef = linalg::least_squares(&rows, &targets)?;
        let new_theta = coef[..n_p].to_vec();
        let new_intercept = coef[n_p];
        let prev_norm = linalg::norm(&theta);
        let new_norm = linalg::norm(&new_theta);
        if prev_norm > 1e-9 && new_norm > 10.0 * prev_norm {
            return Err(Error::TrainingDiverged {
                iteration,
                norm: new_norm,
            });
        }
        theta = new_theta;
        intercept = new_intercept;
        trace.iteration_norms.push(new_norm);
        trace
            .reward_rates
            .push(rewards as f64 / cfg.samples_per_iteration as f64);
    }
    trace.intercept = intercept;
    Ok((WeightVector { theta }, trace))
}

/// Closed-loop evaluation: fraction of initial conditions that reach the
/// task's goal within the horizon, and the mean time-to-goal among the
/// successes (infinity when nothing succeeds).
pub fn evaluate_policy(
    task: &mut dyn Task,
    theta: &WeightVector,
    controller: &Controller,
    eval_set: &[State],
    horizon_s: f64,
    rng: &mut PearlRng,
) -> Result<(f64, f64)> {
    if eval_set.is_empty() {
        return Err(invalid("evaluation set must be non-empty"));
    }
    let mut successes = 0usize;
    let mut duration_sum = 0.0;
    for s0 in eval_set {
        let traj = plan_trajectory(task, s0, theta, controller, None, horizon_s, rng)?;
        if traj.outcome.is_success() {
            successes += 1;
            duration_sum += traj.duration;
        }
    }
    let rate = successes as f64 / eval_set.len() as f64;
    let mean_duration = if successes > 0 {
        duration_sum / successes as f64
    } else {
        f64::INFINITY
    };
    Ok((rate, mean_duration))
}

/// A trained candidate with its evaluation scores.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub theta: WeightVector,
    pub success_rate: f64,
    pub mean_duration: f64,
}

/// Among the candidates with the highest success rate, the one with the
/// fastest mean trajectory; ties keep the earliest index.
pub fn select_fittest(candidates: &[Candidate]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(invalid("no candidates to select from"));
    }
    let mut best = 0usize;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        let b = &candidates[best];
        if c.success_rate > b.success_rate
            || (c.success_rate == b.success_rate && c.mean_duration < b.mean_duration)
        {
            best = i;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct TrainingReport {
    pub fittest: WeightVector,
    pub fittest_trial: usize,
    pub candidates: Vec<Candidate>,
    pub traces: Vec<TrainingTrace>,
    pub eval_controller: Controller,
}

/// Full pipeline: `n_mc` independent training runs, each evaluated on a
/// shared seeded evaluation set, with the fittest returned.
pub fn monte_carlo_train(
    task: &mut dyn Task,
    setup: &TrainingSetup,
    cfg: &TrainingConfig,
    eval_controller: &Controller,
) -> Result<TrainingReport> {
    let mut eval_rng = crate::rng::trial_rng(cfg.seed, u64::MAX);
    let eval_set: Vec<State> = (0..cfg.eval_count)
        .map(|_| State {
            coords: setup.domain.sample_state(&mut eval_rng),
        })
        .collect();

    let mut candidates = Vec::with_capacity(cfg.n_mc);
    let mut traces = Vec::with_capacity(cfg.n_mc);
    for trial in 0..cfg.n_mc.max(1) {
        let mut rng = crate::rng::trial_rng(cfg.seed, trial as u64);
        let (theta, trace) = avi_train(setup, cfg, &mut rng)?;
        let (success_rate, mean_duration) = evaluate_policy(
            task,
            &theta,
            eval_controller,
            &eval_set,
            cfg.eval_horizon_s,
            &mut rng,
        )?;
        candidates.push(Candidate {
            theta,
            success_rate,
            mean_duration,
        });
        traces.push(trace);
    }
    let fittest_trial = select_fittest(&candidates)?;
    Ok(TrainingReport {
        fittest: candidates[fittest_trial].theta.clone(),
        fittest_trial,
        candidates,
        traces,
        eval_controller: eval_controller.clone(),
    })
}
