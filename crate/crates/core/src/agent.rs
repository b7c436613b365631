//! Random-walk controller and the sense-update loop of one trial phase.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bvc::{BvcPopulation, ModelConfig};
use crate::error::{Error, Result};
use crate::geometry::World;
use crate::pcn::PlaceCellNetwork;
use crate::sensor::{self, BoundaryPoints, Pose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkParams {
    /// Forward steps between scheduled heading changes.
    pub tau_w: usize,
    /// Metres advanced per step.
    pub speed: f64,
    /// Standard deviation of a scheduled heading change, radians.
    pub turn_sigma: f64,
    pub body_radius: f64,
    pub exploration_steps: usize,
    pub sampling_steps: usize,
    pub seed: u64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            tau_w: 50,
            speed: 0.05,
            turn_sigma: PI / 6.0,
            body_radius: 0.25,
            exploration_steps: 15_000,
            sampling_steps: 30_000,
            seed: 0,
        }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if self.tau_w < 1 {
            return Err(Error::Config("walk.tau_w must be at least 1".into()));
        }
        for (name, v) in [("speed", self.speed), ("turn_sigma", self.turn_sigma), ("body_radius", self.body_radius)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("walk.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub pose: Pose,
    pub steps_since_turn: usize,
}

impl AgentState {
    pub fn new(pose: Pose) -> Self {
        Self { pose, steps_since_turn: 0 }
    }

    /// Uniform start position with at least `clearance` of free space in
    /// every horizontal direction, uniform heading.
    pub fn random_start(world: &World, clearance: f64, rng: &mut ChaCha8Rng) -> Self {
        let b = world.bounds();
        loop {
            let x = rng.gen_range(b.min.x + clearance..b.max.x - clearance);
            let y = rng.gen_range(b.min.y + clearance..b.max.y - clearance);
            let heading = rng.gen_range(-PI..PI);
            let pose = Pose::new(x, y, heading);
            let free = (0..16).all(|k| {
                let a = k as f64 * PI / 8.0;
                !world.collision_check(pose.sensor_origin(), a, clearance, 0.0)
            });
            if free {
                return Self::new(pose);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkEvent {
    Moved,
    CollidedTurn,
    ScheduledTurn,
}

/// One control step of the random walk.
///
/// A blocked agent picks a uniform new heading and stays put. Otherwise,
/// after `tau_w` uninterrupted steps, the heading is perturbed by a Gaussian
/// turn before advancing; if the turned heading is itself blocked the agent
/// holds position and the next step resolves the collision.
pub fn walk_step(state: &mut AgentState, world: &World, params: &WalkParams, rng: &mut ChaCha8Rng) -> WalkEvent {
    let blocked = |pose: &Pose| {
        world.collision_check(pose.sensor_origin(), pose.heading(), params.body_radius, params.speed)
    };
    if blocked(&state.pose) {
        state.pose.set_heading(rng.gen_range(-PI..PI));
        state.steps_since_turn = 0;
        return WalkEvent::CollidedTurn;
    }
    let event = if state.steps_since_turn >= params.tau_w {
        let turn = Normal::new(0.0, params.turn_sigma).expect("turn_sigma validated positive");
        let h = state.pose.heading() + turn.sample(rng);
        state.pose.set_heading(h);
        state.steps_since_turn = 0;
        if blocked(&state.pose) {
            return WalkEvent::ScheduledTurn;
        }
        WalkEvent::ScheduledTurn
    } else {
        state.steps_since_turn += 1;
        WalkEvent::Moved
    };
    let (s, c) = state.pose.heading().sin_cos();
    state.pose.x += params.speed * c;
    state.pose.y += params.speed * s;
    event
}

/// Boundary points for `pose` using the scanner bound to the model: the
/// horizontal scanner for planar populations, the spherical one otherwise.
/// Floor returns below the horizon are kept only when the environment asks
/// for them.
pub fn sense(world: &World, pose: &Pose, model: &ModelConfig) -> BoundaryPoints {
    let max_range = model.d_max;
    if model.is_planar() {
        sensor::horizontal_scan_to_points(&sensor::scan_horizontal(world, pose, max_range), pose)
    } else if world.spec().include_floor_in_scans {
        sensor::depth_map_to_points_all_rows(&sensor::scan_spherical(world, pose, max_range), pose)
    } else {
        sensor::spherical_points(world, pose, max_range)
    }
}

/// Rate-weighted mean of the surround response under the scanner bound to
/// the model, `Σκ²/Σκ`. Dividing BVC rates by it makes the surround input
/// satisfy `|v|² = Σv`, which puts every model on a common input scale.
pub fn reference_rate(population: &BvcPopulation) -> f64 {
    let model = population.config();
    let pose = Pose::new(0.0, 0.0, 0.0);
    let directions = if model.is_planar() {
        let scan = sensor::HorizontalScan { distances: vec![1.0; sensor::HORIZONTAL_RAYS], max_range: f64::INFINITY };
        sensor::horizontal_scan_to_points(&scan, &pose)
    } else {
        let map = sensor::SphericalDepthMap {
            depth: vec![1.0; sensor::DEPTH_ROWS * sensor::DEPTH_COLS],
            max_range: f64::INFINITY,
        };
        sensor::depth_map_to_points(&map, &pose)
    };
    let k = population.surround_response(&directions);
    let sum: f64 = k.iter().sum();
    if sum == 0.0 {
        return 0.0;
    }
    k.iter().map(|x| x * x).sum::<f64>() / sum
}

/// What the loop hands to observers after every update.
#[derive(Debug)]
pub struct StepRecord<'a> {
    pub step: usize,
    pub pose: Pose,
    pub event: WalkEvent,
    pub bvc_rates: &'a [f64],
    pub place_rates: &'a [f64],
}

pub trait PhaseObserver {
    fn on_step(&mut self, record: &StepRecord<'_>) -> Result<()>;
}

impl<F: FnMut(&StepRecord<'_>) -> Result<()>> PhaseObserver for F {
    fn on_step(&mut self, record: &StepRecord<'_>) -> Result<()> {
        self(record)
    }
}

/// Everything a phase mutates.
pub struct Trial<'a> {
    pub world: &'a World,
    pub population: &'a BvcPopulation,
    pub network: &'a mut PlaceCellNetwork,
    pub walk: &'a WalkParams,
    pub state: AgentState,
    pub rng: ChaCha8Rng,
}

impl Trial<'_> {
    /// Runs `steps` iterations of walk → sense → BVC → PCN → observe.
    pub fn run_phase(&mut self, steps: usize, plasticity: bool, observer: &mut dyn PhaseObserver) -> Result<()> {
        let mut bvc_rates = vec![0.0; self.population.len()];
        for step in 0..steps {
            let event = walk_step(&mut self.state, self.world, self.walk, &mut self.rng);
            let pose = self.state.pose;
            if !self.world.contains_xy(pose.x, pose.y) {
                return Err(Error::LeftArena { step, x: pose.x, y: pose.y });
            }
            let points = sense(self.world, &pose, self.population.config());
            self.population.compute_into(&points, &mut bvc_rates);
            let place_rates = self.network.step(&bvc_rates, plasticity);
            observer.on_step(&StepRecord { step, pose, event, bvc_rates: &bvc_rates, place_rates })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arena, EnvironmentSpec};
    use rand::SeedableRng;

    fn world() -> World {
        build_arena(&EnvironmentSpec::default()).unwrap()
    }

    #[test]
    fn blocked_agent_turns_in_place() {
        let w = world();
        let mut st = AgentState::new(Pose::new(4.72, 2.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ev = walk_step(&mut st, &w, &WalkParams::default(), &mut rng);
        assert_eq!(ev, WalkEvent::CollidedTurn);
        assert_eq!((st.pose.x, st.pose.y), (4.72, 2.0));
        assert_ne!(st.pose.heading(), 0.0);
    }

    #[test]
    fn open_space_advances_by_speed() {
        let w = world();
        let mut st = AgentState::new(Pose::new(2.0, 2.0, 0.7));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = WalkParams::default();
        let ev = walk_step(&mut st, &w, &p, &mut rng);
        assert_eq!(ev, WalkEvent::Moved);
        let d = ((st.pose.x - 2.0).powi(2) + (st.pose.y - 2.0).powi(2)).sqrt();
        assert!((d - p.speed).abs() < 1e-12);
        assert!((st.pose.heading() - 0.7).abs() < 1e-12);
        assert_eq!(st.steps_since_turn, 1);
    }

    #[test]
    fn scheduled_turn_after_tau_w() {
        let w = world();
        let p = WalkParams { tau_w: 3, ..WalkParams::default() };
        let mut st = AgentState::new(Pose::new(-2.5, -2.5, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let events: Vec<_> = (0..4).map(|_| walk_step(&mut st, &w, &p, &mut rng)).collect();
        assert_eq!(events, [WalkEvent::Moved, WalkEvent::Moved, WalkEvent::Moved, WalkEvent::ScheduledTurn]);
        assert_eq!(st.steps_since_turn, 0);
    }

    #[test]
    fn random_start_is_clear() {
        let w = world();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let st = AgentState::random_start(&w, 0.3, &mut rng);
            assert!(w.contains_xy(st.pose.x, st.pose.y));
        }
    }
}
