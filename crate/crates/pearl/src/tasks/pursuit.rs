//! Multi-agent pursuit: planar double-integrator pursuers chase a prey on a
//! predetermined trajectory they cannot look ahead on, while keeping mutual
//! separation.
//!
//! Features: squared distance to the prey position, squared difference to
//! the prey velocity (both summed over agents), and one shared reciprocal
//! of the summed pairwise squared distances between agents.

use crate::error::{invalid, Result};
use crate::features::{
    FeatureSet, Preference, Selector, StateLayout, Target, WeightVector,
};
use crate::linalg::norm_sq;
use crate::mdp::{Action, ControlAffineDynamics, DoubleIntegrator, State};
use crate::policies::{ActionBounds, AxialQ, GenericAxialQ};
use crate::rng::{master_rng, PearlRng};
use crate::tasks::Task;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Published pursuit weights (distance, velocity difference, separation).
pub const PURSUIT_WEIGHTS: [f64; 3] = [-16.43, -102.89, -0.77];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreyKind {
    Static,
    Line,
    Spiral,
    Lemniscate,
    BrownianVelocity,
}

impl PreyKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "static" => PreyKind::Static,
            "line" => PreyKind::Line,
            "spiral" => PreyKind::Spiral,
            "lemniscate" => PreyKind::Lemniscate,
            "brownian-velocity" | "brownian" => PreyKind::BrownianVelocity,
            other => {
                return Err(crate::error::Error::UnknownKind {
                    what: "prey trajectory",
                    got: other.to_string(),
                })
            }
        })
    }
}

/// Analytic or precomputed prey path; exposes only (position, velocity) at
/// the current time.
#[derive(Debug, Clone)]
pub struct PreyTrajectory {
    pub kind: PreyKind,
    /// Line: constant velocity vector.
    pub line_velocity: [f64; 2],
    /// Spiral: radius grows at `radial_rate` m/s while the angle advances at
    /// `angular_rate` rad/s.
    pub radial_rate: f64,
    pub angular_rate: f64,
    /// Lemniscate of Gerono scaled to +-`amplitude` meters.
    pub amplitude: f64,
    /// Brownian velocity: acceleration drawn N(0, sigma) per step.
    pub brownian_sigma: f64,
    brownian: Vec<([f64; 2], [f64; 2])>,
    dt: f64,
}

impl PreyTrajectory {
    pub fn new(kind: PreyKind, dt: f64, seed: u64, horizon_s: f64) -> Self {
        let mut traj = PreyTrajectory {
            kind,
            line_velocity: [0.2, 0.1],
            radial_rate: 0.015,
            angular_rate: if kind == PreyKind::Lemniscate { 0.25 } else { 0.07 },
            amplitude: 4.0,
            brownian_sigma: 0.5,
            brownian: Vec::new(),
            dt,
        };
        if kind == PreyKind::BrownianVelocity {
            traj.generate_brownian(seed, horizon_s);
        }
        traj
    }

    fn generate_brownian(&mut self, seed: u64, horizon_s: f64) {
        let steps = (horizon_s / self.dt).ceil() as usize + 2;
        let mut rng = master_rng(seed ^ 0x70726579);
        let normal = Normal::new(0.0, self.brownian_sigma).expect("sigma >= 0");
        let mut pos = [0.0, 0.0];
        let mut vel = [0.0, 0.0];
        self.brownian.clear();
        self.brownian.reserve(steps);
        for _ in 0..steps {
            self.brownian.push((pos, vel));
            let acc = [normal.sample(&mut rng), normal.sample(&mut rng)];
            for i in 0..2 {
                pos[i] += vel[i] * self.dt + 0.5 * acc[i] * self.dt * self.dt;
                vel[i] += acc[i] * self.dt;
            }
        }
    }

    /// Current (position, velocity); velocities are the exact derivatives of
    /// the analytic curves.
    pub fn reference(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        match self.kind {
            PreyKind::Static => ([0.0, 0.0], [0.0, 0.0]),
            PreyKind::Line => {
                let v = self.line_velocity;
                ([v[0] * t, v[1] * t], v)
            }
            PreyKind::Spiral => {
                let r = self.radial_rate * t;
                let phi = self.angular_rate * t;
                let (sin, cos) = phi.sin_cos();
                let pos = [r * cos, r * sin];
                let vel = [
                    self.radial_rate * cos - r * self.angular_rate * sin,
                    self.radial_rate * sin + r * self.angular_rate * cos,
                ];
                (pos, vel)
            }
            PreyKind::Lemniscate => {
                let a = self.amplitude;
                let w = self.angular_rate;
                let pos = [a * (w * t).cos(), 0.5 * a * (2.0 * w * t).sin()];
                let vel = [-a * w * (w * t).sin(), a * w * (2.0 * w * t).cos()];
                (pos, vel)
            }
            PreyKind::BrownianVelocity => {
                let idx = ((t / self.dt).round() as usize).min(self.brownian.len() - 1);
                self.brownian[idx]
            }
        }
    }
}

/// Current prey (position, velocity) for the given trajectory.
pub fn prey_reference(traj: &PreyTrajectory, t: f64) -> (Vec<f64>, Vec<f64>) {
    if t < 0.0 {
        let (p, v) = traj.reference(0.0);
        return (p.to_vec(), v.to_vec());
    }
    let (p, v) = traj.reference(t);
    (p.to_vec(), v.to_vec())
}

pub struct PursuitWorld {
    pub n_agents: usize,
    pub max_accel: f64,
    pub spawn_radius: f64,
    pub prey: PreyTrajectory,
    dynamics: DoubleIntegrator,
    features: FeatureSet,
    /// Attractors only (prey distance + velocity match); used when the
    /// separation repeller must be excluded.
    separation_included: bool,
    goal_tolerance: Option<f64>,
}

impl PursuitWorld {
    pub fn new(n_agents: usize, dt: f64, prey: PreyTrajectory) -> Result<Self> {
        Self::build(n_agents, dt, prey, true)
    }

    /// Prey-distance and velocity-match attractors only.
    pub fn attractor_only(n_agents: usize, dt: f64, prey: PreyTrajectory) -> Result<Self> {
        Self::build(n_agents, dt, prey, false)
    }

    fn build(
        n_agents: usize,
        dt: f64,
        prey: PreyTrajectory,
        separation: bool,
    ) -> Result<Self> {
        if n_agents == 0 {
            return Err(invalid("pursuit needs at least one agent"));
        }
        let layout = StateLayout::homogeneous(n_agents, 2);
        let agents: Vec<usize> = (0..n_agents).collect();
        let mut prefs = vec![
            Preference::attractor(Target::Reference(0), Selector::position(), agents.clone()),
            Preference::attractor(Target::Reference(1), Selector::velocity(), agents.clone()),
        ];
        if separation && n_agents >= 2 {
            prefs.push(Preference::mutual_repeller(
                Selector::position(),
                agents,
                1.0,
            ));
        }
        let features = FeatureSet::new(prefs, layout)?;
        Ok(PursuitWorld {
            n_agents,
            max_accel: 3.0,
            spawn_radius: 5.0,
            prey,
            dynamics: DoubleIntegrator::new(2 * n_agents, dt),
            features,
            separation_included: separation && n_agents >= 2,
            goal_tolerance: None,
        })
    }

    pub fn with_goal_tolerance(mut self, tol: Option<f64>) -> Self {
        self.goal_tolerance = tol;
        self
    }

    pub fn with_spawn_radius(mut self, r: f64) -> Self {
        self.spawn_radius = r;
        self
    }

    pub fn published_weights(&self) -> WeightVector {
        WeightVector {
            theta: PURSUIT_WEIGHTS.to_vec(),
        }
    }

    /// Swap in a custom preference set; the incremental Q path only applies
    /// to the standard one, so it is disabled here.
    pub fn replace_features(&mut self, features: FeatureSet) -> crate::error::Result<()> {
        if features.layout().state_len() != 4 * self.n_agents {
            return Err(invalid("preference layout does not match the pursuit state"));
        }
        self.features = features;
        self.separation_included = false;
        Ok(())
    }

    /// Mean over agents of the distance to the prey.
    pub fn mean_prey_distance(&self, s: &State, t: f64) -> f64 {
        let (prey_pos, _) = self.prey.reference(t);
        let mut total = 0.0;
        for i in 0..self.n_agents {
            let dx = s.coords[2 * i] - prey_pos[0];
            let dy = s.coords[2 * i + 1] - prey_pos[1];
            total += (dx * dx + dy * dy).sqrt();
        }
        total / self.n_agents as f64
    }

    /// Mean nearest-neighbor distance between agents.
    pub fn mean_nearest_agent_distance(&self, s: &State) -> f64 {
        if self.n_agents < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..self.n_agents {
            let mut best = f64::INFINITY;
            for j in 0..self.n_agents {
                if i == j {
                    continue;
                }
                let dx = s.coords[2 * i] - s.coords[2 * j];
                let dy = s.coords[2 * i + 1] - s.coords[2 * j + 1];
                best = best.min((dx * dx + dy * dy).sqrt());
            }
            total += best;
        }
        total / self.n_agents as f64
    }
}

impl Task for PursuitWorld {
    fn name(&self) -> &'static str {
        "pursuit"
    }

    fn dynamics(&self) -> &dyn ControlAffineDynamics {
        &self.dynamics
    }

    fn features(&self) -> &FeatureSet {
        &self.features
    }

    fn refs(&self, t: f64, _s: &State) -> Vec<Vec<f64>> {
        let (pos, vel) = prey_reference(&self.prey, t);
        vec![pos, vel]
    }

    fn action_bounds(&self, _s: &State) -> ActionBounds {
        ActionBounds::symmetric(2 * self.n_agents, self.max_accel)
    }

    fn goal_tolerance(&self) -> Option<f64> {
        self.goal_tolerance
    }

    fn reset(&mut self, rng: &mut PearlRng) -> State {
        let (prey_pos, _) = self.prey.reference(0.0);
        let mut coords = vec![0.0; 4 * self.n_agents];
        for i in 0..self.n_agents {
            // Uniform in the spawn disk around the prey's start.
            let r = self.spawn_radius * rng.random_range(0.0f64..1.0).sqrt();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            coords[2 * i] = prey_pos[0] + r * phi.cos();
            coords[2 * i + 1] = prey_pos[1] + r * phi.sin();
        }
        State { coords }
    }

    fn axial_q<'a>(
        &'a self,
        features: &'a FeatureSet,
        theta: &'a [f64],
        refs: &'a [Vec<f64>],
        lookahead: usize,
    ) -> Box<dyn AxialQ + 'a> {
        if self.separation_included && std::ptr::eq(features, &self.features) {
            Box::new(PursuitAxialQ::new(self, theta, refs, lookahead))
        } else {
            Box::new(GenericAxialQ::new(
                self.dynamics(),
                features,
                theta,
                refs,
                lookahead,
            ))
        }
    }

    fn baseline_action(&self, name: &str, s: &State, t: f64, _param: f64) -> Result<Action> {
        match name {
            "boids" => {
                let (pos, vel) = self.prey.reference(t);
                Ok(boids_policy(s, self.n_agents, pos, vel, self.max_accel))
            }
            other => Err(invalid(format!("pursuit has no `{other}` baseline"))),
        }
    }

    fn goal_metric(&self, s: &State, t: f64) -> f64 {
        self.mean_prey_distance(s, t)
    }
}

/// Boids baseline: separation, flock alignment, flock cohesion, prey
/// alignment, prey cohesion as proportional rules with weights
/// 1, 0.01, 0.01, 0.1, 1; separation activates below 0.1 m.
pub fn boids_policy(
    s: &State,
    n_agents: usize,
    prey_pos: [f64; 2],
    prey_vel: [f64; 2],
    max_accel: f64,
) -> Action {
    const W_SEP: f64 = 1.0;
    const W_ALIGN: f64 = 0.01;
    const W_COH: f64 = 0.01;
    const W_PREY_ALIGN: f64 = 0.1;
    const W_PREY_COH: f64 = 1.0;
    const SEP_RADIUS: f64 = 0.1;

    let p = |i: usize| [s.coords[2 * i], s.coords[2 * i + 1]];
    let v = |i: usize| {
        [
            s.coords[2 * n_agents + 2 * i],
            s.coords[2 * n_agents + 2 * i + 1],
        ]
    };
    let mut out = vec![0.0; 2 * n_agents];
    for i in 0..n_agents {
        let (pi, vi) = (p(i), v(i));
        let mut acc = [0.0f64; 2];
        if n_agents > 1 {
            let mut centroid = [0.0f64; 2];
            let mut mean_vel = [0.0f64; 2];
            for j in 0..n_agents {
                if j == i {
                    continue;
                }
                let (pj, vj) = (p(j), v(j));
                centroid[0] += pj[0];
                centroid[1] += pj[1];
                mean_vel[0] += vj[0];
                mean_vel[1] += vj[1];
                let d = [pi[0] - pj[0], pi[1] - pj[1]];
                let d2 = norm_sq(&d);
                if d2 < SEP_RADIUS * SEP_RADIUS {
                    let scale = W_SEP / d2.max(1e-6);
                    acc[0] += scale * d[0];
                    acc[1] += scale * d[1];
                }
            }
            let others = (n_agents - 1) as f64;
            for k in 0..2 {
                centroid[k] /= others;
                mean_vel[k] /= others;
                acc[k] += W_COH * (centroid[k] - pi[k]);
                acc[k] += W_ALIGN * (mean_vel[k] - vi[k]);
            }
        }
        for k in 0..2 {
            acc[k] += W_PREY_COH * (prey_pos[k] - pi[k]);
            acc[k] += W_PREY_ALIGN * (prey_vel[k] - vi[k]);
            out[2 * i + k] = acc[k].clamp(-max_accel, max_accel);
        }
    }
    Action { coords: out }
}

/// Incremental axial Q for the standard pursuit feature set.
///
/// A candidate input on one axis only moves one (position, velocity)
/// coordinate pair of the zero-input drifted state, so each sample is O(1):
/// the prey terms update by one squared-difference swap and the pairwise
/// separation updates through cached per-coordinate sums
/// (`sum_{i,j}(a_i - a_j)^2 = 2 [n sum a^2 - (sum a)^2]`).
struct PursuitAxialQ<'a> {
    world: &'a PursuitWorld,
    theta: &'a [f64],
    refs: &'a [Vec<f64>],
    tau: f64,
    n: usize,
    drift_pos: Vec<f64>,
    vel: Vec<f64>,
    f1_base: f64,
    f2_base: f64,
    coord_sum: [f64; 2],
    coord_sum_sq: [f64; 2],
    pairwise_base: f64,
    // Fallback path for disturbed evaluations and full-action queries.
    state: Vec<f64>,
    action_buf: Vec<f64>,
    next_buf: Vec<f64>,
}

impl<'a> PursuitAxialQ<'a> {
    fn new(
        world: &'a PursuitWorld,
        theta: &'a [f64],
        refs: &'a [Vec<f64>],
        lookahead: usize,
    ) -> Self {
        let n = world.n_agents;
        let tau = world.dynamics.dt * lookahead as f64;
        PursuitAxialQ {
            world,
            theta,
            refs,
            tau,
            n,
            drift_pos: vec![0.0; 2 * n],
            vel: vec![0.0; 2 * n],
            f1_base: 0.0,
            f2_base: 0.0,
            coord_sum: [0.0; 2],
            coord_sum_sq: [0.0; 2],
            pairwise_base: 0.0,
            state: vec![0.0; 4 * n],
            action_buf: vec![0.0; 2 * n],
            next_buf: vec![0.0; 4 * n],
        }
    }

    fn pairwise(&self, c: usize, sum: f64, sum_sq: f64) -> f64 {
        let _ = c;
        2.0 * (self.n as f64 * sum_sq - sum * sum)
    }
}

impl AxialQ for PursuitAxialQ<'_> {
    fn action_dim(&self) -> usize {
        2 * self.n
    }

    fn prepare(&mut self, s: &[f64]) {
        self.state.copy_from_slice(s);
        let n = self.n;
        let prey_p = &self.refs[0];
        let prey_v = &self.refs[1];
        self.f1_base = 0.0;
        self.f2_base = 0.0;
        self.coord_sum = [0.0; 2];
        self.coord_sum_sq = [0.0; 2];
        for i in 0..2 * n {
            let c = i % 2;
            let p = s[i] + s[2 * n + i] * self.tau;
            let v = s[2 * n + i];
            self.drift_pos[i] = p;
            self.vel[i] = v;
            let dp = p - prey_p[c];
            let dv = v - prey_v[c];
            self.f1_base += dp * dp;
            self.f2_base += dv * dv;
            self.coord_sum[c] += p;
            self.coord_sum_sq[c] += p * p;
        }
        self.pairwise_base = self.pairwise(0, self.coord_sum[0], self.coord_sum_sq[0])
            + self.pairwise(1, self.coord_sum[1], self.coord_sum_sq[1]);
    }

    fn q_axis(&mut self, axis: usize, u: f64, xi: Option<&[f64]>) -> f64 {
        if let Some(xi) = xi {
            // Disturbed evaluation touches every axis; use the full path.
            self.action_buf.fill(0.0);
            self.action_buf[axis] = u;
            for (a, x) in self.action_buf.iter_mut().zip(xi) {
                *a += x;
            }
            let a = std::mem::take(&mut self.action_buf);
            let q = self.q_action(&a, None);
            self.action_buf = a;
            return q;
        }
        let c = axis % 2;
        let prey_p = self.refs[0][c];
        let prey_v = self.refs[1][c];
        let old_p = self.drift_pos[axis];
        let old_v = self.vel[axis];
        let new_p = old_p + 0.5 * u * self.tau * self.tau;
        let new_v = old_v + u * self.tau;

        let f1 = self.f1_base - (old_p - prey_p) * (old_p - prey_p)
            + (new_p - prey_p) * (new_p - prey_p);
        let f2 = self.f2_base - (old_v - prey_v) * (old_v - prey_v)
            + (new_v - prey_v) * (new_v - prey_v);
        let mut q = self.theta[0] * f1 + self.theta[1] * f2;
        if self.theta.len() > 2 {
            let sum = self.coord_sum[c] + (new_p - old_p);
            let sum_sq = self.coord_sum_sq[c] + new_p * new_p - old_p * old_p;
            let pairwise = self.pairwise_base
                - self.pairwise(c, self.coord_sum[c], self.coord_sum_sq[c])
                + self.pairwise(c, sum, sum_sq);
            let beta = self.world.features.preferences()[2].beta;
            q += self.theta[2] / (beta + pairwise);
        }
        q
    }

    fn q_action(&mut self, a: &[f64], xi: Option<&[f64]>) -> f64 {
        self.action_buf.copy_from_slice(a);
        if let Some(xi) = xi {
            for (b, x) in self.action_buf.iter_mut().zip(xi) {
                *b += x;
            }
        }
        let substeps = (self.tau / self.world.dynamics.dt).round() as usize;
        self.world.dynamics.hold_raw(
            &self.state,
            &self.action_buf,
            substeps.max(1),
            &mut self.next_buf,
        );
        self.world
            .features
            .value(&self.next_buf, self.refs, self.theta)
    }
}
