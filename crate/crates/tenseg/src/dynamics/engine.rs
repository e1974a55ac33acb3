//! The stepping engine: resolved rigid-body and cable caches plus scratch
//! buffers, so the per-step loop allocates nothing.

use super::{
    contact_force, CableReading, SimConfig, SimError, TargetMap, WorldState, DEGENERATE_SEGMENT,
};
use crate::control::limit_actuation;
use crate::math::{Mat3, Quat, Vec3};
use crate::model::{ActuatorSpec, StructureDef};

struct BodyCache {
    fixed: bool,
    mass: f64,
    /// Inertia about the com, body frame.
    inertia: Mat3,
    char_len: f64,
    /// Node offsets from the com, body frame.
    node_offsets: Vec<Vec3>,
}

struct CableCache {
    /// Route as (body index, node index) pairs.
    route: Vec<(usize, usize)>,
    k: f64,
    b: f64,
    rest: f64,
    /// Index into the commanded-length vectors; `None` for passive cables.
    active_slot: Option<usize>,
}

/// A structure bound to a [`SimConfig`], with everything resolved for the
/// stepping loop. One engine drives one simulation at a time; build one
/// per parallel run.
pub struct Engine<'a> {
    pub structure: &'a StructureDef,
    pub config: SimConfig,
    bodies: Vec<BodyCache>,
    cables: Vec<CableCache>,
    /// Winches: (cable id, actuator, length bounds), in slot order.
    winches: Vec<(String, ActuatorSpec, (f64, f64))>,
    steps_done: u64,
    // Scratch, sized once.
    node_pos: Vec<Vec<Vec3>>,
    node_vel: Vec<Vec<Vec3>>,
    forces: Vec<Vec3>,
    torques: Vec<Vec3>,
    segment_pulls: Vec<Vec3>,
}

impl<'a> Engine<'a> {
    pub fn new(structure: &'a StructureDef, config: SimConfig) -> Result<Self, SimError> {
        if !(config.dt > 0.0) || !config.dt.is_finite() {
            return Err(SimError::BadConfig(format!("dt must be positive, got {}", config.dt)));
        }
        if config.max_steps_per_call == 0 {
            return Err(SimError::BadConfig("max_steps_per_call must be positive".into()));
        }
        let bodies: Vec<BodyCache> = structure
            .bodies
            .iter()
            .map(|b| BodyCache {
                fixed: b.fixed,
                mass: b.mass,
                inertia: b.inertia,
                char_len: b.characteristic_length(),
                node_offsets: b.nodes.iter().map(|n| n.local_position - b.com).collect(),
            })
            .collect();

        let mut slot = 0usize;
        let cables = structure
            .cables
            .iter()
            .map(|c| {
                let route = c
                    .route
                    .iter()
                    .map(|r| {
                        let bi = structure.body_index(&r.body).ok_or_else(|| {
                            SimError::UnknownNode {
                                body: r.body.clone(),
                                node: r.node.clone(),
                            }
                        })?;
                        let ni = structure.bodies[bi]
                            .nodes
                            .iter()
                            .position(|n| n.id == r.node)
                            .ok_or_else(|| SimError::UnknownNode {
                                body: r.body.clone(),
                                node: r.node.clone(),
                            })?;
                        Ok((bi, ni))
                    })
                    .collect::<Result<Vec<_>, SimError>>()?;
                let active_slot = if c.is_active() {
                    slot += 1;
                    Some(slot - 1)
                } else {
                    None
                };
                Ok(CableCache {
                    route,
                    k: c.stiffness_k,
                    b: c.damping_b,
                    rest: c.rest_length,
                    active_slot,
                })
            })
            .collect::<Result<Vec<_>, SimError>>()?;

        let winches = structure
            .cables
            .iter()
            .filter(|c| c.is_active())
            .map(|c| {
                (
                    c.id.clone(),
                    c.actuator.expect("active cable has actuator"),
                    (c.min_length, c.max_length),
                )
            })
            .collect();

        let node_pos = structure
            .bodies
            .iter()
            .map(|b| vec![Vec3::zeros(); b.nodes.len()])
            .collect::<Vec<_>>();
        let node_vel = node_pos.clone();
        let n_bodies = structure.bodies.len();
        Ok(Engine {
            structure,
            config,
            bodies,
            cables,
            winches,
            steps_done: 0,
            node_pos,
            node_vel,
            forces: vec![Vec3::zeros(); n_bodies],
            torques: vec![Vec3::zeros(); n_bodies],
            segment_pulls: Vec::new(),
        })
    }

    fn refresh_nodes(&mut self, world: &WorldState) {
        for (bi, cache) in self.bodies.iter().enumerate() {
            let state = &world.body_states[bi];
            let rot = state.orientation;
            for (ni, offset) in cache.node_offsets.iter().enumerate() {
                let arm = rot * *offset;
                self.node_pos[bi][ni] = state.position + arm;
                self.node_vel[bi][ni] =
                    state.linear_velocity + state.angular_velocity.cross(&arm);
            }
        }
    }

    fn cable_geometry(
        &self,
        cable_idx: usize,
        id: &str,
    ) -> Result<(f64, f64, Vec<Vec3>), SimError> {
        let cable = &self.cables[cable_idx];
        let mut length = 0.0;
        let mut rate = 0.0;
        let mut units = Vec::with_capacity(cable.route.len() - 1);
        for pair in cable.route.windows(2) {
            let (b0, n0) = pair[0];
            let (b1, n1) = pair[1];
            let delta = self.node_pos[b1][n1] - self.node_pos[b0][n0];
            let len = delta.norm();
            if len < DEGENERATE_SEGMENT {
                return Err(SimError::DegenerateSegment { cable: id.to_string() });
            }
            let unit = delta / len;
            length += len;
            rate += unit.dot(&(self.node_vel[b1][n1] - self.node_vel[b0][n0]));
            units.push(unit);
        }
        Ok((length, rate, units))
    }

    fn reading_from_geometry(
        &self,
        cable_idx: usize,
        world: &WorldState,
        length: f64,
        geometric_rate: f64,
    ) -> CableReading {
        let cable = &self.cables[cable_idx];
        let (rest, winch_rate) = match cable.active_slot {
            Some(slot) => (world.commanded_lengths[slot], world.commanded_rates[slot]),
            None => (cable.rest, 0.0),
        };
        let elongation = length - rest;
        let elongation_rate = geometric_rate - winch_rate;
        let tension = if elongation <= 0.0 {
            0.0
        } else {
            (cable.k * elongation + cable.b * elongation_rate).max(0.0)
        };
        CableReading {
            length,
            elongation,
            elongation_rate,
            tension,
        }
    }

    /// Measure one cable (by index into the structure's cable list).
    pub fn cable_reading(
        &mut self,
        world: &WorldState,
        cable_idx: usize,
    ) -> Result<CableReading, SimError> {
        self.refresh_nodes(world);
        let id = &self.structure.cables[cable_idx].id;
        let (length, rate, _) = self.cable_geometry(cable_idx, id)?;
        Ok(self.reading_from_geometry(cable_idx, world, length, rate))
    }

    /// Readings for every cable, in definition order.
    pub fn cable_readings(&mut self, world: &WorldState) -> Result<Vec<CableReading>, SimError> {
        self.refresh_nodes(world);
        (0..self.cables.len())
            .map(|i| {
                let id = &self.structure.cables[i].id;
                let (length, rate, _) = self.cable_geometry(i, id)?;
                Ok(self.reading_from_geometry(i, world, length, rate))
            })
            .collect()
    }

    /// Force each route node receives from one cable. Endpoints are pulled
    /// along their adjacent segment toward the interior; a via node gets
    /// the vector sum of the pulls toward both neighbors, so each segment
    /// contributes one pull pair and every cable is globally force- and
    /// torque-free.
    pub fn cable_node_forces(
        &mut self,
        world: &WorldState,
        cable_idx: usize,
    ) -> Result<Vec<Vec3>, SimError> {
        self.refresh_nodes(world);
        let id = &self.structure.cables[cable_idx].id;
        let (length, rate, units) = self.cable_geometry(cable_idx, id)?;
        let reading = self.reading_from_geometry(cable_idx, world, length, rate);
        let mut out = vec![Vec3::zeros(); units.len() + 1];
        for (i, unit) in units.iter().enumerate() {
            let pull = unit * reading.tension;
            out[i] += pull;
            out[i + 1] -= pull;
        }
        Ok(out)
    }

    /// Accumulated (force, torque-about-com) per body: gravity, cables,
    /// contacts.
    pub fn forces(&mut self, world: &WorldState) -> Result<Vec<(Vec3, Vec3)>, SimError> {
        self.refresh_nodes(world);
        self.accumulate(world)?;
        Ok(self
            .forces
            .iter()
            .zip(&self.torques)
            .map(|(f, t)| (*f, *t))
            .collect())
    }

    /// Core accumulation; assumes `refresh_nodes` ran for this state.
    fn accumulate(&mut self, world: &WorldState) -> Result<(), SimError> {
        let gravity = self.structure.gravity;
        for (bi, cache) in self.bodies.iter().enumerate() {
            self.forces[bi] = gravity * cache.mass;
            self.torques[bi] = Vec3::zeros();
        }

        for ci in 0..self.cables.len() {
            let id = &self.structure.cables[ci].id;
            let (length, rate, _) = {
                // Inline geometry to reuse the scratch pull buffer.
                let cable = &self.cables[ci];
                let mut length = 0.0;
                let mut rate = 0.0;
                self.segment_pulls.clear();
                for pair in cable.route.windows(2) {
                    let (b0, n0) = pair[0];
                    let (b1, n1) = pair[1];
                    let delta = self.node_pos[b1][n1] - self.node_pos[b0][n0];
                    let len = delta.norm();
                    if len < DEGENERATE_SEGMENT {
                        return Err(SimError::DegenerateSegment { cable: id.to_string() });
                    }
                    let unit = delta / len;
                    length += len;
                    rate += unit.dot(&(self.node_vel[b1][n1] - self.node_vel[b0][n0]));
                    self.segment_pulls.push(unit);
                }
                (length, rate, ())
            };
            let reading = self.reading_from_geometry(ci, world, length, rate);
            if reading.tension == 0.0 {
                continue;
            }
            let route = &self.cables[ci].route;
            for (si, unit) in self.segment_pulls.iter().enumerate() {
                let pull = unit * reading.tension;
                let (b0, n0) = route[si];
                let (b1, n1) = route[si + 1];
                self.forces[b0] += pull;
                self.torques[b0] +=
                    (self.node_pos[b0][n0] - world.body_states[b0].position).cross(&pull);
                self.forces[b1] -= pull;
                self.torques[b1] -=
                    (self.node_pos[b1][n1] - world.body_states[b1].position).cross(&pull);
            }
        }

        if !self.config.obstacles.is_empty() {
            for bi in 0..self.bodies.len() {
                for ni in 0..self.bodies[bi].node_offsets.len() {
                    let p = self.node_pos[bi][ni];
                    let v = self.node_vel[bi][ni];
                    for obstacle in &self.config.obstacles {
                        let f = contact_force(obstacle, p, v);
                        if f != Vec3::zeros() {
                            self.forces[bi] += f;
                            self.torques[bi] +=
                                (p - world.body_states[bi].position).cross(&f);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolve a `body.node` reference to cache indices.
    pub fn resolve_node(
        &self,
        marker: &crate::model::NodeRef,
    ) -> Result<(usize, usize), SimError> {
        let bi = self
            .structure
            .body_index(&marker.body)
            .ok_or_else(|| SimError::UnknownNode {
                body: marker.body.clone(),
                node: marker.node.clone(),
            })?;
        let ni = self.structure.bodies[bi]
            .nodes
            .iter()
            .position(|n| n.id == marker.node)
            .ok_or_else(|| SimError::UnknownNode {
                body: marker.body.clone(),
                node: marker.node.clone(),
            })?;
        Ok((bi, ni))
    }

    /// World position of one resolved node.
    pub fn node_position(&self, world: &WorldState, (bi, ni): (usize, usize)) -> Vec3 {
        let state = &world.body_states[bi];
        state.position + state.orientation * self.bodies[bi].node_offsets[ni]
    }

    /// `true` if any obstacle currently pushes on any node of a moving
    /// body (fixed anchors overlapping an obstacle are inert).
    pub fn in_contact(&mut self, world: &WorldState) -> bool {
        if self.config.obstacles.is_empty() {
            return false;
        }
        self.refresh_nodes(world);
        for bi in 0..self.bodies.len() {
            if self.bodies[bi].fixed {
                continue;
            }
            for ni in 0..self.bodies[bi].node_offsets.len() {
                for obstacle in &self.config.obstacles {
                    if contact_force(obstacle, self.node_pos[bi][ni], self.node_vel[bi][ni])
                        != Vec3::zeros()
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// One semi-implicit Euler step: winches advance toward `targets`,
    /// forces accumulate, velocities update from forces, poses from the
    /// new velocities. Fixed bodies never move.
    pub fn step(&mut self, world: &mut WorldState, targets: &TargetMap) -> Result<(), SimError> {
        let dt = self.config.dt;
        for (slot, (id, act, bounds)) in self.winches.iter().enumerate() {
            let current = world.commanded_lengths[slot];
            let target = targets.get(id).copied().unwrap_or(current);
            let (len, rate) = limit_actuation(
                current,
                world.commanded_rates[slot],
                target,
                dt,
                act,
                *bounds,
            );
            world.commanded_lengths[slot] = len;
            world.commanded_rates[slot] = rate;
        }

        self.refresh_nodes(world);
        self.accumulate(world)?;

        for (bi, cache) in self.bodies.iter().enumerate() {
            if cache.fixed {
                continue;
            }
            let state = &mut world.body_states[bi];
            state.linear_velocity += self.forces[bi] * (dt / cache.mass);
            state.position += state.linear_velocity * dt;

            let rot = state.orientation.to_rotation_matrix().into_inner();
            let inertia_world = rot * cache.inertia * rot.transpose();
            let gyro = state
                .angular_velocity
                .cross(&(inertia_world * state.angular_velocity));
            let ang_accel = inertia_world
                .try_inverse()
                .unwrap_or_else(Mat3::zeros)
                * (self.torques[bi] - gyro);
            state.angular_velocity += ang_accel * dt;
            let spin = Quat::from_scaled_axis(state.angular_velocity * dt);
            state.orientation = Quat::new_normalize((spin * state.orientation).into_inner());

            if !state.is_finite() {
                return Err(SimError::NonFinite {
                    body: self.structure.bodies[bi].name.clone(),
                    step: self.steps_done + 1,
                    time: world.time,
                });
            }
        }
        world.time += dt;
        self.steps_done += 1;
        Ok(())
    }

    /// Residual motion measure: `max_b (|v| + 0.1·|ω|·L_b)`.
    pub fn residual_velocity(&self, world: &WorldState) -> f64 {
        self.bodies
            .iter()
            .zip(&world.body_states)
            .map(|(cache, s)| {
                s.linear_velocity.norm() + 0.1 * s.angular_velocity.norm() * cache.char_len
            })
            .fold(0.0, f64::max)
    }

    /// See [`super::settle`]. The criterion must hold over a sustained
    /// window (0.2 s) before the loop exits early, which rejects the
    /// momentary all-zero velocities at an oscillation's turning points.
    pub fn settle(
        &mut self,
        world: &mut WorldState,
        tol: f64,
        max_time: f64,
    ) -> Result<bool, SimError> {
        assert!(tol > 0.0, "settle tolerance must be positive");
        let targets: TargetMap = TargetMap::new();
        let window_steps = ((0.2 / self.config.dt).ceil() as u64).max(1);
        let max_steps = ((max_time / self.config.dt).floor() as u64)
            .min(self.config.max_steps_per_call);
        let mut calm = 0u64;
        let mut taken = 0u64;
        while taken < max_steps {
            self.step(world, &targets)?;
            taken += 1;
            if self.residual_velocity(world) < tol {
                calm += 1;
                if calm >= window_steps {
                    break;
                }
            } else {
                calm = 0;
            }
        }
        Ok(self.residual_velocity(world) < tol)
    }

    /// Energy bookkeeping; see [`super::mechanical_energy`].
    pub fn mechanical_energy(&mut self, world: &WorldState, datum: Option<&WorldState>) -> f64 {
        let mut energy = 0.0;
        for (bi, cache) in self.bodies.iter().enumerate() {
            if cache.fixed {
                continue;
            }
            let s = &world.body_states[bi];
            let rot = s.orientation.to_rotation_matrix().into_inner();
            let inertia_world = rot * cache.inertia * rot.transpose();
            energy += 0.5 * cache.mass * s.linear_velocity.norm_squared();
            energy += 0.5 * s.angular_velocity.dot(&(inertia_world * s.angular_velocity));
            let reference = datum
                .map(|d| d.body_states[bi].position)
                .unwrap_or_else(Vec3::zeros);
            energy += cache.mass * self.structure.gravity.dot(&(reference - s.position));
        }
        self.refresh_nodes(world);
        for ci in 0..self.cables.len() {
            let id = &self.structure.cables[ci].id;
            if let Ok((length, rate, _)) = self.cable_geometry(ci, id) {
                let reading = self.reading_from_geometry(ci, world, length, rate);
                if reading.elongation > 0.0 {
                    energy += 0.5 * self.cables[ci].k * reading.elongation * reading.elongation;
                }
            }
        }
        energy
    }
}
