//! Dynamic obstacle avoidance: one planar robot crosses a 50 m disc filled
//! with obstacles that move under hybrid stochastic dynamics (linear, arc,
//! swerve), each mode tuned to the same 0.37 m/s expected speed. Obstacles
//! leaving the disc re-enter at the antipodal point, keeping density
//! constant.

use crate::error::{invalid, Result};
use crate::features::{FeatureSet, Preference, Selector, StateLayout, Target, WeightVector};
use crate::mdp::{Action, ControlAffineDynamics, DoubleIntegrator, State};
use crate::policies::ActionBounds;
use crate::rng::PearlRng;
use crate::tasks::Task;
use rand::Rng;

/// Published obstacle-avoidance weights (goal attractor, obstacle repeller).
pub const OBSTACLE_WEIGHTS: [f64; 2] = [-0.23, -0.1696];

const SPEED_SET: [f64; 4] = [0.1, 0.2, 0.5, 0.7];
const ANGULAR_SET: [f64; 4] = [0.039, 0.058, 0.088, 0.117];
const MODE_PROBS: [f64; 4] = [0.4, 0.1, 0.2, 0.3];
const ARC_RADIUS: f64 = 5.0;
const SWERVE_RATE: f64 = std::f64::consts::PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstacleMode {
    Linear,
    Arc,
    Swerve,
}

#[derive(Debug, Clone)]
pub struct Obstacle {
    pub pos: [f64; 2],
    pub heading: f64,
    pub mode: ObstacleMode,
    /// Translational speed (linear and swerve modes).
    pub speed: f64,
    /// Angular speed (arc mode, counter-clockwise).
    pub angular: f64,
    /// Swerve oscillation half-range and current offset/direction.
    pub swerve_limit: f64,
    pub swerve_offset: f64,
    pub swerve_dir: f64,
}

fn draw_from(set: &[f64; 4], rng: &mut PearlRng) -> f64 {
    let x: f64 = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    for (v, p) in set.iter().zip(&MODE_PROBS) {
        acc += p;
        if x < acc {
            return *v;
        }
    }
    set[3]
}

impl Obstacle {
    fn resample_params(&mut self, rng: &mut PearlRng) {
        match self.mode {
            ObstacleMode::Linear => self.speed = draw_from(&SPEED_SET, rng),
            ObstacleMode::Arc => {
                self.angular = draw_from(&ANGULAR_SET, rng);
                self.speed = ARC_RADIUS * self.angular;
            }
            ObstacleMode::Swerve => {
                self.speed = draw_from(&SPEED_SET, rng);
                self.swerve_limit = rng.random_range(-std::f64::consts::FRAC_PI_2
                    ..=std::f64::consts::FRAC_PI_2)
                    .abs();
                self.swerve_dir = if rng.random_range(0.0..1.0) < 0.5 { 1.0 } else { -1.0 };
            }
        }
    }

    fn advance(&mut self, dt: f64) {
        match self.mode {
            ObstacleMode::Linear => {}
            ObstacleMode::Arc => self.heading += self.angular * dt,
            ObstacleMode::Swerve => {
                self.swerve_offset += self.swerve_dir * SWERVE_RATE * dt;
                if self.swerve_offset.abs() >= self.swerve_limit {
                    self.swerve_offset = self
                        .swerve_offset
                        .clamp(-self.swerve_limit, self.swerve_limit);
                    self.swerve_dir = -self.swerve_dir;
                }
                self.heading += self.swerve_dir * SWERVE_RATE * dt;
            }
        }
        self.pos[0] += self.speed * self.heading.cos() * dt;
        self.pos[1] += self.speed * self.heading.sin() * dt;
    }
}

#[derive(Clone)]
pub struct ObstacleWorld {
    pub n_obstacles: usize,
    pub arena_radius: f64,
    pub obstacle_radius: f64,
    pub max_speed: f64,
    pub max_accel: f64,
    pub resample_period: f64,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub goal_radius: f64,
    pub obstacles: Vec<Obstacle>,
    /// Frozen environment (training variant): reset keeps the obstacles.
    pub static_env: bool,
    dynamics: DoubleIntegrator,
    features: FeatureSet,
}

impl ObstacleWorld {
    pub fn new(n_obstacles: usize, dt: f64) -> Result<Self> {
        let goal = [-25.0, 0.0];
        let features = Self::make_features(goal)?;
        Ok(ObstacleWorld {
            n_obstacles,
            arena_radius: 50.0,
            obstacle_radius: 0.5,
            max_speed: 0.37,
            max_accel: 3.0,
            resample_period: 2.0,
            start: [25.0, 0.0],
            goal,
            goal_radius: 0.5,
            obstacles: Vec::new(),
            static_env: false,
            dynamics: DoubleIntegrator::new(2, dt),
            features,
        })
    }

    fn make_features(goal: [f64; 2]) -> Result<FeatureSet> {
        let layout = StateLayout::homogeneous(1, 2);
        let prefs = vec![
            Preference::attractor(Target::Point(goal.to_vec()), Selector::position(), vec![0]),
            Preference::repeller(Target::NearestOf(0), Selector::position(), vec![0], 0.01),
        ];
        FeatureSet::new(prefs, layout)
    }

    /// Rebuild the preference set after moving the goal.
    pub fn rebuild_features(&mut self) -> Result<()> {
        self.features = Self::make_features(self.goal)?;
        Ok(())
    }

    pub fn replace_features(&mut self, features: FeatureSet) -> Result<()> {
        if features.layout().state_len() != 4 {
            return Err(crate::error::invalid(
                "preference layout does not match the 4-dimensional robot state",
            ));
        }
        self.features = features;
        Ok(())
    }

    pub fn published_weights(&self) -> WeightVector {
        WeightVector {
            theta: OBSTACLE_WEIGHTS.to_vec(),
        }
    }

    pub fn spawn_obstacles(&mut self, rng: &mut PearlRng) {
        self.obstacles.clear();
        while self.obstacles.len() < self.n_obstacles {
            let r = self.arena_radius * rng.random_range(0.0f64..1.0).sqrt();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let pos = [r * phi.cos(), r * phi.sin()];
            // Leave breathing room at the start so trials do not begin in
            // contact.
            let ds = (pos[0] - self.start[0]).hypot(pos[1] - self.start[1]);
            if ds < 2.0 {
                continue;
            }
            let mode = match rng.random_range(0..3) {
                0 => ObstacleMode::Linear,
                1 => ObstacleMode::Arc,
                _ => ObstacleMode::Swerve,
            };
            let mut obstacle = Obstacle {
                pos,
                heading: rng.random_range(0.0..std::f64::consts::TAU),
                mode,
                speed: 0.0,
                angular: 0.0,
                swerve_limit: 0.0,
                swerve_offset: 0.0,
                swerve_dir: 1.0,
            };
            obstacle.resample_params(rng);
            self.obstacles.push(obstacle);
        }
    }

    pub fn obstacle_positions_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(2 * self.obstacles.len());
        for o in &self.obstacles {
            flat.push(o.pos[0]);
            flat.push(o.pos[1]);
        }
        flat
    }

    pub fn nearest_obstacle_distance(&self, pos: [f64; 2]) -> f64 {
        self.obstacles
            .iter()
            .map(|o| (o.pos[0] - pos[0]).hypot(o.pos[1] - pos[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn robot_position(s: &State) -> [f64; 2] {
        [s.coords[0], s.coords[1]]
    }
}

/// Advance every obstacle one step: resample parameters at rate
/// `1/T_resample`, move per mode, and wrap to the antipodal point at the
/// arena boundary. Value-semantic: returns the new world.
pub fn obstacle_step(world: &ObstacleWorld, rng: &mut PearlRng) -> ObstacleWorld {
    let dt = world.dynamics.dt;
    let p_resample = (dt / world.resample_period).min(1.0);
    let mut next = world.clone();
    for o in &mut next.obstacles {
        if rng.random_range(0.0..1.0) < p_resample {
            o.resample_params(rng);
        }
        o.advance(dt);
        let r = o.pos[0].hypot(o.pos[1]);
        if r > world.arena_radius {
            o.pos[0] = -o.pos[0];
            o.pos[1] = -o.pos[1];
        }
    }
    next
}

impl Task for ObstacleWorld {
    fn name(&self) -> &'static str {
        "obstacles"
    }

    fn dynamics(&self) -> &dyn ControlAffineDynamics {
        &self.dynamics
    }

    fn features(&self) -> &FeatureSet {
        &self.features
    }

    fn refs(&self, _t: f64, _s: &State) -> Vec<Vec<f64>> {
        vec![self.obstacle_positions_flat()]
    }

    /// Acceleration box intersected with the per-axis velocity headroom so
    /// the commanded speed never exceeds the robot's limit. Keeps the
    /// dynamics exactly control-affine (the cap lives in the policy clamp).
    fn action_bounds(&self, s: &State) -> ActionBounds {
        let dt = self.dynamics.dt;
        let mut lo = vec![0.0; 2];
        let mut hi = vec![0.0; 2];
        for i in 0..2 {
            let v = s.coords[2 + i];
            lo[i] = (-self.max_speed - v) / dt;
            hi[i] = (self.max_speed - v) / dt;
            lo[i] = lo[i].clamp(-self.max_accel, self.max_accel);
            hi[i] = hi[i].clamp(-self.max_accel, self.max_accel);
            if lo[i] > hi[i] {
                lo[i] = hi[i];
            }
        }
        ActionBounds { lo, hi }
    }

    fn advance_env(&mut self, rng: &mut PearlRng) {
        *self = obstacle_step(self, rng);
    }

    fn goal_reached(&self, s: &State, _t: f64) -> bool {
        let p = Self::robot_position(s);
        (p[0] - self.goal[0]).hypot(p[1] - self.goal[1]) <= self.goal_radius
    }

    fn failure(&self, s: &State) -> Option<String> {
        let p = Self::robot_position(s);
        let d = self.nearest_obstacle_distance(p);
        if d < self.obstacle_radius {
            Some(format!("collision: obstacle at {d:.3} m"))
        } else {
            None
        }
    }

    fn reset(&mut self, rng: &mut PearlRng) -> State {
        if !self.static_env {
            self.spawn_obstacles(rng);
        }
        State {
            coords: vec![self.start[0], self.start[1], 0.0, 0.0],
        }
    }

    fn baseline_action(&self, name: &str, s: &State, _t: f64, param: f64) -> Result<Action> {
        match name {
            "apf" => {
                let alpha = if param > 0.0 { param } else { 1.0 };
                Ok(gaussian_apf_policy(s, self, alpha))
            }
            other => Err(invalid(format!("obstacles has no `{other}` baseline"))),
        }
    }

    fn goal_metric(&self, s: &State, _t: f64) -> f64 {
        let p = Self::robot_position(s);
        (p[0] - self.goal[0]).hypot(p[1] - self.goal[1])
    }
}

/// Gaussian artificial-potential-field baseline: quadratic attractive
/// potential toward the goal scaled by `1/alpha`, Gaussian repulsive bumps
/// (sigma 0.45 m) on every obstacle; the action is the negative gradient
/// clamped into the robot's admissible acceleration box.
pub fn gaussian_apf_policy(s: &State, world: &ObstacleWorld, alpha: f64) -> Action {
    const SIGMA: f64 = 0.45;
    let p = ObstacleWorld::robot_position(s);
    let mut acc = [0.0f64; 2];
    for k in 0..2 {
        acc[k] = -2.0 * (p[k] - world.goal[k]) / alpha;
    }
    let s2 = SIGMA * SIGMA;
    for o in &world.obstacles {
        let d = [p[0] - o.pos[0], p[1] - o.pos[1]];
        let d2 = d[0] * d[0] + d[1] * d[1];
        if d2 > 25.0 * s2 {
            continue; // exp underflows to nothing observable
        }
        let w = (-d2 / (2.0 * s2)).exp() / s2;
        acc[0] += w * d[0];
        acc[1] += w * d[1];
    }
    let bounds = world.action_bounds(s);
    let mut coords = acc.to_vec();
    bounds.clamp(&mut coords);
    Action { coords }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;

    #[test]
    fn linear_obstacle_advances_along_heading() {
        let mut world = ObstacleWorld::new(1, 0.1).unwrap();
        world.resample_period = f64::INFINITY;
        world.obstacles = vec![Obstacle {
            pos: [0.0, 0.0],
            heading: 0.0,
            mode: ObstacleMode::Linear,
            speed: 0.5,
            angular: 0.0,
            swerve_limit: 0.0,
            swerve_offset: 0.0,
            swerve_dir: 1.0,
        }];
        let mut rng = master_rng(0);
        let next = obstacle_step(&world, &mut rng);
        assert!((next.obstacles[0].pos[0] - 0.05).abs() < 1e-12);
        assert!(next.obstacles[0].pos[1].abs() < 1e-12);
    }

    #[test]
    fn mode_speed_expectations_match() {
        let mut rng = master_rng(77);
        let n = 100_000;
        let mut linear_mean = 0.0;
        let mut arc_mean = 0.0;
        for _ in 0..n {
            linear_mean += draw_from(&SPEED_SET, &mut rng);
            arc_mean += ARC_RADIUS * draw_from(&ANGULAR_SET, &mut rng);
        }
        linear_mean /= n as f64;
        arc_mean /= n as f64;
        assert!((linear_mean - 0.37).abs() < 0.01, "linear {linear_mean}");
        assert!((arc_mean - 0.3705).abs() < 0.01, "arc {arc_mean}");
    }

    #[test]
    fn boundary_wrap_is_antipodal() {
        let mut world = ObstacleWorld::new(1, 0.1).unwrap();
        world.resample_period = f64::INFINITY;
        world.obstacles = vec![Obstacle {
            pos: [49.999, 0.0],
            heading: 0.0,
            mode: ObstacleMode::Linear,
            speed: 0.7,
            angular: 0.0,
            swerve_limit: 0.0,
            swerve_offset: 0.0,
            swerve_dir: 1.0,
        }];
        let mut rng = master_rng(0);
        let next = obstacle_step(&world, &mut rng);
        assert!(next.obstacles[0].pos[0] < -49.9, "wrapped: {:?}", next.obstacles[0].pos);
        assert_eq!(next.obstacles[0].heading, 0.0, "state preserved across wrap");
        assert_eq!(next.obstacles[0].speed, 0.7);
    }

    #[test]
    fn obstacle_count_is_conserved() {
        let mut world = ObstacleWorld::new(120, 0.1).unwrap();
        let mut rng = master_rng(5);
        world.reset(&mut rng);
        for _ in 0..500 {
            world.advance_env(&mut rng);
            assert_eq!(world.obstacles.len(), 120);
            for o in &world.obstacles {
                let r = o.pos[0].hypot(o.pos[1]);
                assert!(r <= world.arena_radius + 0.7 * 0.1 + 1e-9, "r = {r}");
            }
        }
    }

    #[test]
    fn apf_points_at_goal_without_obstacles() {
        let world = ObstacleWorld::new(0, 0.1).unwrap();
        // Far away: per-axis clamped but still signed toward the goal.
        let s = State {
            coords: vec![25.0, 10.0, 0.0, 0.0],
        };
        let a = gaussian_apf_policy(&s, &world, 1.0);
        assert!(a.coords[0] < 0.0);
        assert!(a.coords[1] < 0.0);
        // Close in and unclamped: the gradient is exactly collinear.
        let near = State {
            coords: vec![world.goal[0] + 0.3, world.goal[1] - 0.1, 0.0, 0.0],
        };
        let a = gaussian_apf_policy(&near, &world, 1.0);
        let to_goal = [-0.3, 0.1];
        let cross = a.coords[0] * to_goal[1] - a.coords[1] * to_goal[0];
        assert!(cross.abs() < 1e-9, "gradient collinear with goal direction");
        assert!(a.coords[0] * to_goal[0] + a.coords[1] * to_goal[1] > 0.0);
    }

    #[test]
    fn apf_is_zero_at_goal() {
        let world = ObstacleWorld::new(0, 0.1).unwrap();
        let s = State {
            coords: vec![world.goal[0], world.goal[1], 0.0, 0.0],
        };
        let a = gaussian_apf_policy(&s, &world, 1.0);
        assert_eq!(a.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn action_bounds_respect_speed_cap() {
        let world = ObstacleWorld::new(0, 0.1).unwrap();
        let s = State {
            coords: vec![0.0, 0.0, 0.37, -0.37],
        };
        let b = world.action_bounds(&s);
        assert!(b.hi[0] <= 1e-12, "cannot accelerate past +vmax");
        assert!(b.lo[1] >= -1e-12, "cannot accelerate past -vmax");
    }
}
