//! The five case-study environments and their baseline policies.
//!
//! Every task bundles a control-affine simulator, a validated preference
//! set, per-step reference resolution, action bounds, and the start-state
//! distribution. Worlds are value-semantic: environment stepping returns or
//! installs a new world, trials never share mutable state.

pub mod cargo;
pub mod obstacles;
pub mod pendulum;
pub mod pursuit;
pub mod rendezvous;

pub use cargo::{cargo_step, CargoWorld};
pub use obstacles::{
    gaussian_apf_policy, obstacle_step, Obstacle, ObstacleMode, ObstacleWorld,
};
pub use pendulum::{pendulum_step, PendulumWorld};
pub use pursuit::{boids_policy, prey_reference, PreyKind, PreyTrajectory, PursuitWorld};
pub use rendezvous::{rendezvous_step, RendezvousWorld};

use crate::error::{invalid, Result};
use crate::features::{FeatureSet, WeightVector};
use crate::mdp::{Action, ControlAffineDynamics, State};
use crate::policies::{ActionBounds, AxialQ, GenericAxialQ};
use crate::rng::PearlRng;

pub trait Task {
    fn name(&self) -> &'static str;

    fn dynamics(&self) -> &dyn ControlAffineDynamics;

    /// The task's planning preference set.
    fn features(&self) -> &FeatureSet;

    /// Per-step reference values consumed by `Target::Reference` /
    /// `Target::NearestOf` preferences. Only current quantities are exposed;
    /// the planner never sees future prey or obstacle states.
    fn refs(&self, t: f64, s: &State) -> Vec<Vec<f64>>;

    /// Per-axis acceleration bounds, possibly state-dependent (speed caps).
    fn action_bounds(&self, s: &State) -> ActionBounds;

    /// Active (features, weights) at time `t`. Phase-scheduled tasks swap
    /// both; everything else returns the planning set with `theta` as given.
    fn policy_basis<'a>(
        &'a self,
        _t: f64,
        theta: &'a WeightVector,
    ) -> (&'a FeatureSet, &'a WeightVector) {
        (self.features(), theta)
    }

    /// Advance the environment (moving obstacles) by one control step.
    fn advance_env(&mut self, _rng: &mut PearlRng) {}

    /// Goal tolerance on attractor features (squared-distance units);
    /// `None` for tasks that run to the horizon.
    fn goal_tolerance(&self) -> Option<f64> {
        None
    }

    fn goal_reached(&self, s: &State, t: f64) -> bool {
        match self.goal_tolerance() {
            Some(tol) => {
                let refs = self.refs(t, s);
                self.features().attractors_within(&s.coords, &refs, tol)
            }
            None => false,
        }
    }

    /// Hard failure predicate (collision, leaving the model's valid region).
    fn failure(&self, _s: &State) -> Option<String> {
        None
    }

    /// Reset the environment for a fresh trial and return its start state.
    fn reset(&mut self, rng: &mut PearlRng) -> State;

    /// Q-evaluation surface for the policies. Tasks with separable
    /// structure may override with an incremental evaluator.
    fn axial_q<'a>(
        &'a self,
        features: &'a FeatureSet,
        theta: &'a [f64],
        refs: &'a [Vec<f64>],
        lookahead: usize,
    ) -> Box<dyn AxialQ + 'a> {
        Box::new(GenericAxialQ::new(
            self.dynamics(),
            features,
            theta,
            refs,
            lookahead,
        ))
    }

    /// Non-value baseline policies (`boids`, `apf`) for the tasks that have
    /// them. `param` carries the baseline's tuning knob (apf's alpha).
    fn baseline_action(&self, name: &str, _s: &State, _t: f64, _param: f64) -> Result<Action> {
        Err(invalid(format!(
            "task `{}` has no `{name}` baseline",
            self.name()
        )))
    }

    /// Scalar progress metric for summaries: distance-to-goal for point
    /// tasks, separation or displacement for relative ones.
    fn goal_metric(&self, _s: &State, _t: f64) -> f64 {
        f64::NAN
    }
}
