//! Flying inverted pendulum: a quadrotor balances a pole attached by a
//! rigid massless rod while stochastic disturbances push on its center of
//! mass, then slows itself down once the pole is up.
//!
//! The pole's projected displacement follows the unstable linearization
//! `x_p'' = +(g/L) x_p - a`, so left alone the displacement grows. Two
//! feature sets run on a schedule: pole stabilization for the first
//! `phase_switch` seconds, then a quadrotor-slowdown set that keeps the
//! pole term and adds the quadrotor's velocity.
//!
//! State `[xq yq zq px py | vxq vyq vzq dpx dpy]`, action `[ax ay]`
//! (horizontal only; the vertical axis is unactuated here).

use crate::error::Result;
use crate::features::{
    FeatureSet, Preference, RobotBlock, Selector, StateLayout, Target, WeightVector,
};
use crate::mdp::{Action, ControlAffineDynamics, State};
use crate::policies::ActionBounds;
use crate::rng::PearlRng;
use crate::tasks::cargo::GRAVITY;
use crate::tasks::Task;

/// Published pole-stabilization weights (pole displacement, pole rate).
pub const PENDULUM_PS_WEIGHTS: [f64; 2] = [-86.6809, -0.3345];
/// Published slowdown-phase weights (pole displacement, quadrotor velocity,
/// pole rate), scaled by 1e6 in the source.
pub const PENDULUM_QS_WEIGHTS: [f64; 3] = [-1.6692e6, -6.9e3, 0.7e3];

#[derive(Debug, Clone)]
pub struct PendulumDynamics {
    pub dt: f64,
    pub pole_length: f64,
}

impl ControlAffineDynamics for PendulumDynamics {
    fn pos_dim(&self) -> usize {
        5
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step_raw(&self, s: &[f64], a: &[f64], out: &mut [f64]) {
        let dt = self.dt;
        let l = self.pole_length;
        // Quadrotor x, y actuated; z drifts.
        for i in 0..2 {
            let (p, v) = (s[i], s[5 + i]);
            out[i] = p + v * dt + 0.5 * a[i] * dt * dt;
            out[5 + i] = v + a[i] * dt;
        }
        out[2] = s[2] + s[7] * dt;
        out[7] = s[7];
        // Inverted pendulum: positive position feedback.
        for i in 0..2 {
            let (x, dx) = (s[3 + i], s[8 + i]);
            let ddx = (GRAVITY / l) * x - a[i];
            out[3 + i] = x + dx * dt + 0.5 * ddx * dt * dt;
            out[8 + i] = dx + ddx * dt;
        }
    }
}

/// One inverted-pendulum-model step as a free function.
pub fn pendulum_step(s: &State, a: &Action, dt: f64, pole_length: f64) -> Result<State> {
    let dynamics = PendulumDynamics { dt, pole_length };
    crate::mdp::step(&dynamics, s, a)
}

pub struct PendulumWorld {
    pub max_accel: f64,
    /// Seconds of pole stabilization before the slowdown feature set.
    pub phase_switch: f64,
    pub initial_displacement_deg: f64,
    dynamics: PendulumDynamics,
    ps_features: FeatureSet,
    qs_features: FeatureSet,
    qs_weights: WeightVector,
}

impl PendulumWorld {
    pub fn new(dt: f64) -> Result<Self> {
        let dynamics = PendulumDynamics {
            dt,
            pole_length: 3.0,
        };
        let layout = StateLayout::new(
            vec![
                RobotBlock {
                    pos: vec![0, 1, 2],
                    vel: vec![5, 6, 7],
                },
                RobotBlock {
                    pos: vec![3, 4],
                    vel: vec![8, 9],
                },
            ],
            10,
        )?;
        let ps = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![1]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::velocity(), vec![1]),
        ];
        let qs = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![1]),
            Preference::attractor(Target::Point(vec![0.0; 3]), Selector::velocity(), vec![0]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::velocity(), vec![1]),
        ];
        let ps_features = FeatureSet::new(ps, layout.clone())?;
        let qs_features = FeatureSet::new(qs, layout)?;
        Ok(PendulumWorld {
            max_accel: 5.0,
            phase_switch: 5.0,
            initial_displacement_deg: 23.0,
            dynamics,
            ps_features,
            qs_features,
            qs_weights: WeightVector {
                theta: PENDULUM_QS_WEIGHTS.to_vec(),
            },
        })
    }

    pub fn published_weights(&self) -> WeightVector {
        WeightVector {
            theta: PENDULUM_PS_WEIGHTS.to_vec(),
        }
    }

    /// Replace the stabilization-phase preference set.
    pub fn replace_features(&mut self, features: FeatureSet) -> Result<()> {
        if features.layout().state_len() != 10 {
            return Err(crate::error::invalid(
                "preference layout does not match the 10-dimensional pendulum state",
            ));
        }
        self.ps_features = features;
        Ok(())
    }

    pub fn pole_length(&self) -> f64 {
        self.dynamics.pole_length
    }

    pub fn pole_displacement(s: &State) -> f64 {
        (s.coords[3] * s.coords[3] + s.coords[4] * s.coords[4]).sqrt()
    }
}

impl Task for PendulumWorld {
    fn name(&self) -> &'static str {
        "pendulum"
    }

    fn dynamics(&self) -> &dyn ControlAffineDynamics {
        &self.dynamics
    }

    fn features(&self) -> &FeatureSet {
        &self.ps_features
    }

    fn refs(&self, _t: f64, _s: &State) -> Vec<Vec<f64>> {
        Vec::new()
    }

    fn action_bounds(&self, _s: &State) -> ActionBounds {
        ActionBounds::symmetric(2, self.max_accel)
    }

    fn policy_basis<'a>(
        &'a self,
        t: f64,
        theta: &'a WeightVector,
    ) -> (&'a FeatureSet, &'a WeightVector) {
        if t < self.phase_switch {
            (&self.ps_features, theta)
        } else {
            (&self.qs_features, &self.qs_weights)
        }
    }

    fn failure(&self, s: &State) -> Option<String> {
        let disp = Self::pole_displacement(s);
        if disp > self.dynamics.pole_length {
            Some(format!("pole displacement {disp:.3} beyond the linear regime"))
        } else {
            None
        }
    }

    fn goal_metric(&self, s: &State, _t: f64) -> f64 {
        Self::pole_displacement(s)
    }

    fn reset(&mut self, _rng: &mut PearlRng) -> State {
        let mut coords = vec![0.0; 10];
        coords[3] =
            self.dynamics.pole_length * self.initial_displacement_deg.to_radians().sin();
        State { coords }
    }
}
