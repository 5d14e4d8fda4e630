//! Rendezvous: a quadrotor with a suspended load and a planar ground robot
//! drive toward each other so the load settles 0.6 m above the ground
//! robot with minimal swing. No fixed goal point exists; every preference
//! is relative.
//!
//! State `[pq(3) pg(3) eta(2) | vq(3) vg(3) deta(2)]`, action
//! `[aq(3) ag(2)]`. The ground robot's z coordinate carries no dynamics.

use crate::error::Result;
use crate::features::{
    FeatureSet, Preference, RobotBlock, Selector, StateLayout, Target, WeightVector,
};
use crate::mdp::{Action, ControlAffineDynamics, State};
use crate::policies::ActionBounds;
use crate::rng::PearlRng;
use crate::tasks::cargo::GRAVITY;
use crate::tasks::Task;
use rand::Rng;

/// Published rendezvous weights (xy separation, height offset, relative
/// velocity, swing, swing rate).
pub const RENDEZVOUS_WEIGHTS: [f64; 5] = [-92_256.0, -44_767.0, -866.0, -336.0, -107.0];

/// Height the quadrotor holds above the ground robot (suspension cable).
pub const CABLE_OFFSET: f64 = 0.6;

#[derive(Debug, Clone)]
pub struct RendezvousDynamics {
    pub dt: f64,
    pub cable_length: f64,
}

impl ControlAffineDynamics for RendezvousDynamics {
    fn pos_dim(&self) -> usize {
        8
    }

    fn action_dim(&self) -> usize {
        5
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step_raw(&self, s: &[f64], a: &[f64], out: &mut [f64]) {
        let dt = self.dt;
        let l = self.cable_length;
        // Quadrotor.
        for i in 0..3 {
            let (p, v) = (s[i], s[8 + i]);
            out[i] = p + v * dt + 0.5 * a[i] * dt * dt;
            out[8 + i] = v + a[i] * dt;
        }
        // Ground robot: planar input, z drifts with its (zero) velocity.
        for i in 0..2 {
            let (p, v) = (s[3 + i], s[11 + i]);
            out[3 + i] = p + v * dt + 0.5 * a[3 + i] * dt * dt;
            out[11 + i] = v + a[3 + i] * dt;
        }
        out[5] = s[5] + s[13] * dt;
        out[13] = s[13];
        // Suspended load reacts to the quadrotor's horizontal input.
        for i in 0..2 {
            let (eta, deta) = (s[6 + i], s[14 + i]);
            let ddeta = -(GRAVITY / l) * eta - a[i] / l;
            out[6 + i] = eta + deta * dt + 0.5 * ddeta * dt * dt;
            out[14 + i] = deta + ddeta * dt;
        }
    }
}

/// One rendezvous-model step as a free function.
pub fn rendezvous_step(s: &State, a: &Action, dt: f64, cable_length: f64) -> Result<State> {
    let dynamics = RendezvousDynamics { dt, cable_length };
    crate::mdp::step(&dynamics, s, a)
}

pub struct RendezvousWorld {
    pub max_accel_quad: f64,
    pub max_accel_ground: f64,
    pub goal_tolerance: f64,
    pub spawn_separation: f64,
    dynamics: RendezvousDynamics,
    features: FeatureSet,
}

impl RendezvousWorld {
    pub fn new(dt: f64) -> Result<Self> {
        let dynamics = RendezvousDynamics {
            dt,
            cable_length: 0.62,
        };
        let layout = StateLayout::new(
            vec![
                RobotBlock {
                    pos: vec![0, 1, 2],
                    vel: vec![8, 9, 10],
                },
                RobotBlock {
                    pos: vec![3, 4, 5],
                    vel: vec![11, 12, 13],
                },
                RobotBlock {
                    pos: vec![6, 7],
                    vel: vec![14, 15],
                },
            ],
            16,
        )?;
        let prefs = vec![
            // Horizontal separation between quadrotor and ground robot.
            Preference::attractor(
                Target::Relation {
                    other: 1,
                    offset: vec![0.0, 0.0],
                },
                Selector::position_coords(vec![0, 1]),
                vec![0],
            ),
            // Height difference equal to the suspension cable.
            Preference::attractor(
                Target::Relation {
                    other: 1,
                    offset: vec![CABLE_OFFSET],
                },
                Selector::position_coords(vec![2]),
                vec![0],
            ),
            // Relative velocity.
            Preference::attractor(
                Target::Relation {
                    other: 1,
                    offset: vec![0.0, 0.0, 0.0],
                },
                Selector::velocity(),
                vec![0],
            ),
            // Load swing and swing rate.
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![2]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::velocity(), vec![2]),
        ];
        let features = FeatureSet::new(prefs, layout)?;
        Ok(RendezvousWorld {
            max_accel_quad: 3.0,
            max_accel_ground: 2.0,
            goal_tolerance: 0.05 * 0.05,
            spawn_separation: 10.0,
            dynamics,
            features,
        })
    }

    pub fn published_weights(&self) -> WeightVector {
        WeightVector {
            theta: RENDEZVOUS_WEIGHTS.to_vec(),
        }
    }

    pub fn replace_features(&mut self, features: FeatureSet) -> Result<()> {
        if features.layout().state_len() != 16 {
            return Err(crate::error::invalid(
                "preference layout does not match the 16-dimensional rendezvous state",
            ));
        }
        self.features = features;
        Ok(())
    }

    /// Horizontal quadrotor / ground-robot separation.
    pub fn horizontal_separation(s: &State) -> f64 {
        let dx = s.coords[0] - s.coords[3];
        let dy = s.coords[1] - s.coords[4];
        (dx * dx + dy * dy).sqrt()
    }
}

impl Task for RendezvousWorld {
    fn name(&self) -> &'static str {
        "rendezvous"
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
        ActionBounds {
            lo: vec![
                -self.max_accel_quad,
                -self.max_accel_quad,
                -self.max_accel_quad,
                -self.max_accel_ground,
                -self.max_accel_ground,
            ],
            hi: vec![
                self.max_accel_quad,
                self.max_accel_quad,
                self.max_accel_quad,
                self.max_accel_ground,
                self.max_accel_ground,
            ],
        }
    }

    fn goal_tolerance(&self) -> Option<f64> {
        Some(self.goal_tolerance)
    }

    fn failure(&self, s: &State) -> Option<String> {
        let swing = (s.coords[6] * s.coords[6] + s.coords[7] * s.coords[7]).sqrt();
        if swing > std::f64::consts::FRAC_PI_2 {
            Some(format!("load displacement {swing:.3} beyond the model's range"))
        } else {
            None
        }
    }

    fn goal_metric(&self, s: &State, _t: f64) -> f64 {
        Self::horizontal_separation(s)
    }

    fn reset(&mut self, rng: &mut PearlRng) -> State {
        let mut coords = vec![0.0; 16];
        // Ground robot near the origin, quadrotor within the spawn
        // separation horizontally and 1-2.5 m up.
        coords[3] = rng.random_range(-1.0..1.0);
        coords[4] = rng.random_range(-1.0..1.0);
        let r = rng.random_range(0.3 * self.spawn_separation..=self.spawn_separation);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        coords[0] = coords[3] + r * phi.cos();
        coords[1] = coords[4] + r * phi.sin();
        coords[2] = rng.random_range(1.0..2.5);
        State { coords }
    }
}
