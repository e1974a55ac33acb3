//! Cable, gravity and contact forces; rigid-body integration; settling.
//!
//! Cables follow the linear spring-damper law: a cable stretched `X` past
//! its effective rest length at stretch rate `V` carries tension
//! `k·X + b·V`, clamped at zero because a physical cable cannot push. The
//! effective rest length of an active cable is its winch-commanded length;
//! for a passive cable it is the fixed `rest_length`. `V` is measured on
//! the spring stretch itself, so winching at a rate that exactly matches
//! the geometric length change produces no damping force.
//!
//! Integration is semi-implicit Euler: velocities first from current
//! forces, then positions from the new velocities. Orientations advance by
//! the quaternion exponential of `ω·dt` and are renormalized every step.

mod engine;

pub use engine::Engine;

use crate::math::{Quat, Vec3};
use crate::model::{RigidBodySpec, StructureDef};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default penalty contact stiffness, N/m.
pub const DEFAULT_CONTACT_STIFFNESS: f64 = 1e5;
/// Default penalty contact damping, N·s/m.
pub const DEFAULT_CONTACT_DAMPING: f64 = 50.0;
/// Two route points closer than this make a cable direction ill-posed.
pub const DEGENERATE_SEGMENT: f64 = 1e-12;

/// Pose and twist of one body in the world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    /// Center of mass, world frame.
    pub position: Vec3,
    pub orientation: Quat,
    pub linear_velocity: Vec3,
    /// World frame, rad/s.
    pub angular_velocity: Vec3,
}

impl BodyState {
    pub fn at_rest(position: Vec3) -> Self {
        BodyState {
            position,
            orientation: Quat::identity(),
            linear_velocity: Vec3::zeros(),
            angular_velocity: Vec3::zeros(),
        }
    }

    fn is_finite(&self) -> bool {
        self.position.iter().all(|x| x.is_finite())
            && self.orientation.as_vector().iter().all(|x| x.is_finite())
            && self.linear_velocity.iter().all(|x| x.is_finite())
            && self.angular_velocity.iter().all(|x| x.is_finite())
    }
}

/// Snapshot of a whole structure at one instant: per-body states in
/// structure order plus the winch state (commanded length and its rate)
/// per active cable, in active-cable definition order.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub time: f64,
    pub body_states: Vec<BodyState>,
    pub commanded_lengths: Vec<f64>,
    pub commanded_rates: Vec<f64>,
}

impl WorldState {
    /// The as-built state: every body at its construction pose, nothing
    /// moving, every winch holding its cable's rest length.
    pub fn initial(structure: &StructureDef) -> Self {
        let body_states = structure
            .bodies
            .iter()
            .map(|b| BodyState::at_rest(b.com))
            .collect();
        let commanded_lengths: Vec<f64> = structure
            .active_cable_indices()
            .iter()
            .map(|&i| {
                let c = &structure.cables[i];
                c.rest_length.clamp(c.min_length, c.max_length)
            })
            .collect();
        let commanded_rates = vec![0.0; commanded_lengths.len()];
        WorldState {
            time: 0.0,
            body_states,
            commanded_lengths,
            commanded_rates,
        }
    }
}

/// Instantaneous measurement of one cable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableReading {
    /// Sum of route segment lengths, m.
    pub length: f64,
    /// Length minus effective rest length, m.
    pub elongation: f64,
    /// Stretch rate, m/s (winch rate already subtracted for active cables).
    pub elongation_rate: f64,
    /// `max(0, k·X + b·V)`, and exactly zero when slack (`X <= 0`), N.
    pub tension: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObstacleShape {
    /// Solid region `normal · p <= offset`; `normal` is the outward unit.
    Halfspace { normal: Vec3, offset: f64 },
    Sphere { center: Vec3, radius: f64 },
}

/// A rigid obstacle realized as a penalty field acting on body nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub shape: ObstacleShape,
    pub contact_stiffness: f64,
    pub contact_damping: f64,
}

impl Obstacle {
    pub fn halfspace(normal: Vec3, offset: f64) -> Self {
        Obstacle {
            shape: ObstacleShape::Halfspace {
                normal: normal.normalize(),
                offset,
            },
            contact_stiffness: DEFAULT_CONTACT_STIFFNESS,
            contact_damping: DEFAULT_CONTACT_DAMPING,
        }
    }

    pub fn sphere(center: Vec3, radius: f64) -> Self {
        Obstacle {
            shape: ObstacleShape::Sphere { center, radius },
            contact_stiffness: DEFAULT_CONTACT_STIFFNESS,
            contact_damping: DEFAULT_CONTACT_DAMPING,
        }
    }

    /// Parse the command-line obstacle syntax:
    /// `sphere:cx,cy,cz,r` or `halfspace:nx,ny,nz,offset`.
    pub fn parse_spec(spec: &str) -> Result<Obstacle, String> {
        let (shape, nums) = spec
            .split_once(':')
            .ok_or_else(|| format!("`{spec}`: expected `<shape>:<numbers,...>`"))?;
        let values: Vec<f64> = nums
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("`{t}` is not a number"))
            })
            .collect::<Result<_, _>>()?;
        if values.len() != 4 || values.iter().any(|v| !v.is_finite()) {
            return Err(format!("`{spec}`: expected four finite numbers"));
        }
        match shape {
            "sphere" => {
                if values[3] <= 0.0 {
                    return Err("sphere radius must be positive".into());
                }
                Ok(Obstacle::sphere(
                    Vec3::new(values[0], values[1], values[2]),
                    values[3],
                ))
            }
            "halfspace" => {
                let n = Vec3::new(values[0], values[1], values[2]);
                if n.norm() == 0.0 {
                    return Err("halfspace normal must be nonzero".into());
                }
                Ok(Obstacle::halfspace(n, values[3]))
            }
            other => Err(format!("unknown obstacle shape `{other}`")),
        }
    }
}

/// Integration parameters and the obstacle field.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub obstacles: Vec<Obstacle>,
    pub max_steps_per_call: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-4,
            obstacles: Vec::new(),
            max_steps_per_call: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("body `{body}`: non-finite state at step {step} (t = {time:.6} s)")]
    NonFinite { body: String, step: u64, time: f64 },
    #[error("cable `{cable}`: degenerate segment (route points closer than {DEGENERATE_SEGMENT} m)")]
    DegenerateSegment { cable: String },
    #[error("unknown node `{body}.{node}`")]
    UnknownNode { body: String, node: String },
    #[error("step budget of {budget} steps exceeded (needed {needed})")]
    StepBudget { budget: u64, needed: u64 },
    #[error("invalid config: {0}")]
    BadConfig(String),
}

/// Per-active-cable target lengths, keyed by cable id. Active cables not
/// present hold their current commanded length.
pub type TargetMap = BTreeMap<String, f64>;

/// World position of a body node: `position + R·(local − com)`.
pub fn world_node_position(
    body: &RigidBodySpec,
    state: &BodyState,
    node_id: &str,
) -> Result<Vec3, SimError> {
    let node = body.node(node_id).ok_or_else(|| SimError::UnknownNode {
        body: body.name.clone(),
        node: node_id.to_string(),
    })?;
    Ok(state.position + state.orientation * (node.local_position - body.com))
}

/// Penalty force a rigid obstacle exerts on a point, zero outside and
/// never attractive: `(k·depth − b·v_n)⁺ · n̂` with `v_n` the normal
/// separation speed.
pub fn contact_force(obstacle: &Obstacle, point: Vec3, velocity: Vec3) -> Vec3 {
    let (depth, normal) = match obstacle.shape {
        ObstacleShape::Halfspace { normal, offset } => (offset - normal.dot(&point), normal),
        ObstacleShape::Sphere { center, radius } => {
            let d = point - center;
            let dist = d.norm();
            if dist <= DEGENERATE_SEGMENT {
                (radius, Vec3::z())
            } else {
                (radius - dist, d / dist)
            }
        }
    };
    if depth <= 0.0 {
        return Vec3::zeros();
    }
    let v_n = velocity.dot(&normal);
    let magnitude = obstacle.contact_stiffness * depth - obstacle.contact_damping * v_n;
    normal * magnitude.max(0.0)
}

/// Measure one cable against the current world state.
pub fn read_cable(
    cable: &crate::model::CableSpec,
    structure: &StructureDef,
    world: &WorldState,
) -> Result<CableReading, SimError> {
    let mut engine = Engine::new(structure, SimConfig::default())?;
    let idx = structure
        .cables
        .iter()
        .position(|c| c.id == cable.id)
        .ok_or_else(|| SimError::UnknownNode {
            body: "<structure>".into(),
            node: cable.id.clone(),
        })?;
    engine.cable_reading(world, idx)
}

/// Per-route-node force vectors for one cable (same order as the route).
/// They sum to zero force and zero torque: the cable is internal.
pub fn cable_node_forces(
    cable: &crate::model::CableSpec,
    structure: &StructureDef,
    world: &WorldState,
) -> Result<Vec<Vec3>, SimError> {
    let mut engine = Engine::new(structure, SimConfig::default())?;
    let idx = structure
        .cables
        .iter()
        .position(|c| c.id == cable.id)
        .ok_or_else(|| SimError::UnknownNode {
            body: "<structure>".into(),
            node: cable.id.clone(),
        })?;
    engine.cable_node_forces(world, idx)
}

/// Total force and torque (about each body's center of mass) from gravity,
/// every cable, and every obstacle contact.
pub fn accumulate_forces(
    structure: &StructureDef,
    world: &WorldState,
    config: &SimConfig,
) -> Result<Vec<(Vec3, Vec3)>, SimError> {
    let mut engine = Engine::new(structure, config.clone())?;
    engine.forces(world)
}

/// One semi-implicit Euler step. Prefer [`Engine::step`] in loops; this
/// convenience rebuilds the engine's caches every call.
pub fn step(
    structure: &StructureDef,
    world: &mut WorldState,
    targets: &TargetMap,
    config: &SimConfig,
) -> Result<(), SimError> {
    let mut engine = Engine::new(structure, config.clone())?;
    engine.step(world, targets)
}

/// Step with all winch targets frozen until the structure comes to rest:
/// every body must satisfy `|v| + 0.1·|ω|·L < tol` (`L` the body's
/// characteristic length) sustained over a short window, or until
/// `max_time` simulated seconds elapse. The returned flag reports whether
/// the criterion holds at the final state.
pub fn settle(
    structure: &StructureDef,
    world: &mut WorldState,
    config: &SimConfig,
    tol: f64,
    max_time: f64,
) -> Result<bool, SimError> {
    let mut engine = Engine::new(structure, config.clone())?;
    engine.settle(world, tol, max_time)
}

/// Total mechanical energy: kinetic plus gravitational plus elastic
/// (`½·k·X²` summed over taut cables). Gravitational potential is measured
/// relative to `datum` body positions when given, so a released structure
/// has positive, decaying energy.
pub fn mechanical_energy(
    structure: &StructureDef,
    world: &WorldState,
    datum: Option<&WorldState>,
) -> f64 {
    let mut engine =
        Engine::new(structure, SimConfig::default()).expect("structure resolvable");
    engine.mechanical_energy(world, datum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec3;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    /// Body with nodes placed symmetrically so its com sits at the origin.
    fn symmetric_body() -> RigidBodySpec {
        RigidBodySpec::from_parts(
            "b",
            false,
            1.0,
            vec![
                crate::model::BodyNode {
                    id: "n".into(),
                    local_position: Vec3::new(1.0, 0.0, 0.0),
                },
                crate::model::BodyNode {
                    id: "m".into(),
                    local_position: Vec3::new(-1.0, 0.0, 0.0),
                },
            ],
            vec![],
        )
    }

    #[test]
    fn node_position_identity_transform() {
        let body = symmetric_body();
        let state = BodyState::at_rest(Vec3::zeros());
        let p = world_node_position(&body, &state, "n").unwrap();
        assert_relative_eq!((p - Vec3::new(1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn node_position_rotation_and_translation() {
        let body = symmetric_body();
        let mut state = BodyState::at_rest(Vec3::zeros());
        state.orientation = Quat::from_axis_angle(&Vec3::z_axis(), FRAC_PI_2);
        let p = world_node_position(&body, &state, "n").unwrap();
        assert_relative_eq!((p - Vec3::new(0.0, 1.0, 0.0)).norm(), 0.0, epsilon = 1e-9);

        state.position += Vec3::new(0.0, 0.0, 5.0);
        let p = world_node_position(&body, &state, "n").unwrap();
        assert_relative_eq!((p - Vec3::new(0.0, 1.0, 5.0)).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn contact_force_examples() {
        let wall = Obstacle {
            shape: ObstacleShape::Halfspace {
                normal: Vec3::z(),
                offset: 0.0,
            },
            contact_stiffness: 1e4,
            contact_damping: 10.0,
        };
        // Above the halfspace: no force.
        assert_eq!(
            contact_force(&wall, Vec3::new(0.0, 0.0, 0.5), Vec3::zeros()),
            Vec3::zeros()
        );
        // Penetrating 1 cm at rest: k·depth along the normal.
        let f = contact_force(&wall, Vec3::new(0.0, 0.0, -0.01), Vec3::zeros());
        assert_relative_eq!(f.z, 100.0, max_relative = 1e-12);
        // Separating faster than k·depth/b: clamped to zero, never sticky.
        let f = contact_force(&wall, Vec3::new(0.0, 0.0, -0.01), Vec3::new(0.0, 0.0, 50.0));
        assert_eq!(f, Vec3::zeros());
    }

    #[test]
    fn obstacle_spec_parsing() {
        let o = Obstacle::parse_spec("sphere:0.1,-0.2,0.3,0.05").unwrap();
        assert!(matches!(o.shape, ObstacleShape::Sphere { .. }));
        let o = Obstacle::parse_spec("halfspace:0,0,2,-0.5").unwrap();
        match o.shape {
            ObstacleShape::Halfspace { normal, offset } => {
                assert_relative_eq!(normal.norm(), 1.0, epsilon = 1e-12);
                assert_eq!(offset, -0.5);
            }
            _ => panic!("expected halfspace"),
        }
        assert!(Obstacle::parse_spec("sphere:0,0,0,-1").is_err());
        assert!(Obstacle::parse_spec("box:1,2,3,4").is_err());
        assert!(Obstacle::parse_spec("halfspace:0,0,0,1").is_err());
    }
}
