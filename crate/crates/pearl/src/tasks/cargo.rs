//! Aerial cargo delivery: a quadrotor carrying a load on a suspended cable
//! must reach the goal with minimal residual load swing, under an optional
//! stochastic acceleration disturbance.
//!
//! Simplified control-affine model: the quadrotor is a 3-D double
//! integrator; the load displacement `eta` follows the small-angle stable
//! pendulum `eta'' = -(g/L) eta - a_xy / L`, integrated with the same
//! second-order Taylor hold used everywhere, which keeps the step exactly
//! affine in the input.

use crate::error::Result;
use crate::features::{
    FeatureSet, Preference, RobotBlock, Selector, StateLayout, Target, WeightVector,
};
use crate::mdp::{Action, ControlAffineDynamics, State};
use crate::policies::ActionBounds;
use crate::rng::PearlRng;
use crate::tasks::Task;
use rand::Rng;

/// Published cargo-delivery weights (position, load swing, velocity, swing
/// rate).
pub const CARGO_WEIGHTS: [f64; 4] = [-86_290.0, -350_350.0, -1_430.0, -1_160.0];

pub const GRAVITY: f64 = 9.81;

/// State layout: `[qx qy qz e1 e2 | vqx vqy vqz de1 de2]`.
#[derive(Debug, Clone)]
pub struct CargoDynamics {
    pub dt: f64,
    pub cable_length: f64,
}

impl ControlAffineDynamics for CargoDynamics {
    fn pos_dim(&self) -> usize {
        5
    }

    fn action_dim(&self) -> usize {
        3
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step_raw(&self, s: &[f64], a: &[f64], out: &mut [f64]) {
        let dt = self.dt;
        let l = self.cable_length;
        for i in 0..3 {
            let (p, v) = (s[i], s[5 + i]);
            out[i] = p + v * dt + 0.5 * a[i] * dt * dt;
            out[5 + i] = v + a[i] * dt;
        }
        for i in 0..2 {
            let (eta, deta) = (s[3 + i], s[8 + i]);
            let ddeta = -(GRAVITY / l) * eta - a[i] / l;
            out[3 + i] = eta + deta * dt + 0.5 * ddeta * dt * dt;
            out[8 + i] = deta + ddeta * dt;
        }
    }
}

/// One cargo-model step as a free function.
pub fn cargo_step(s: &State, a: &Action, dt: f64, cable_length: f64) -> Result<State> {
    let dynamics = CargoDynamics { dt, cable_length };
    crate::mdp::step(&dynamics, s, a)
}

pub struct CargoWorld {
    pub max_accel: f64,
    pub goal: [f64; 3],
    pub goal_tolerance: f64,
    pub spawn_min: f64,
    pub spawn_max: f64,
    dynamics: CargoDynamics,
    features: FeatureSet,
}

impl CargoWorld {
    pub fn new(dt: f64, goal: [f64; 3]) -> Result<Self> {
        let dynamics = CargoDynamics {
            dt,
            cable_length: 0.62,
        };
        let layout = Self::layout()?;
        let prefs = vec![
            Preference::attractor(Target::Point(goal.to_vec()), Selector::position(), vec![0]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![1]),
            Preference::attractor(Target::Point(vec![0.0; 3]), Selector::velocity(), vec![0]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::velocity(), vec![1]),
        ];
        let features = FeatureSet::new(prefs, layout)?;
        Ok(CargoWorld {
            max_accel: 3.0,
            goal,
            goal_tolerance: 0.05 * 0.05,
            spawn_min: 2.0,
            spawn_max: 5.0,
            dynamics,
            features,
        })
    }

    pub fn layout() -> Result<StateLayout> {
        StateLayout::new(
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
        )
    }

    pub fn published_weights(&self) -> WeightVector {
        WeightVector {
            theta: CARGO_WEIGHTS.to_vec(),
        }
    }

    pub fn replace_features(&mut self, features: FeatureSet) -> Result<()> {
        if features.layout().state_len() != 10 {
            return Err(crate::error::invalid(
                "preference layout does not match the 10-dimensional cargo state",
            ));
        }
        self.features = features;
        Ok(())
    }

    pub fn cable_length(&self) -> f64 {
        self.dynamics.cable_length
    }

    pub fn goal_distance(&self, s: &State) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let d = s.coords[i] - self.goal[i];
            d2 += d * d;
        }
        d2.sqrt()
    }
}

impl Task for CargoWorld {
    fn name(&self) -> &'static str {
        "cargo"
    }

    fn dynamics(&self) -> &dyn ControlAffineDynamics {
        &self.dynamics
    }

    fn features(&self) -> &FeatureSet {
        &self.features
    }

    fn refs(&self, _t: f64, _s: &State) -> Vec<Vec<f64>> {
        Vec::new()
    }

    fn action_bounds(&self, _s: &State) -> ActionBounds {
        ActionBounds::symmetric(3, self.max_accel)
    }

    fn goal_tolerance(&self) -> Option<f64> {
        Some(self.goal_tolerance)
    }

    fn failure(&self, s: &State) -> Option<String> {
        let swing = (s.coords[3] * s.coords[3] + s.coords[4] * s.coords[4]).sqrt();
        if swing > std::f64::consts::FRAC_PI_2 {
            Some(format!("load displacement {swing:.3} beyond the model's range"))
        } else {
            None
        }
    }

    fn goal_metric(&self, s: &State, _t: f64) -> f64 {
        self.goal_distance(s)
    }

    fn reset(&mut self, rng: &mut PearlRng) -> State {
        let mut coords = vec![0.0; 10];
        let r = rng.random_range(self.spawn_min..=self.spawn_max);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let cos_el = rng.random_range(-0.3..0.3f64);
        coords[0] = self.goal[0] + r * phi.cos() * (1.0 - cos_el * cos_el).sqrt();
        coords[1] = self.goal[1] + r * phi.sin() * (1.0 - cos_el * cos_el).sqrt();
        coords[2] = (self.goal[2] + r * cos_el).max(0.3);
        State { coords }
    }
}
