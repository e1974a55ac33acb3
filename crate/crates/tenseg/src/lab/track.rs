//! Marker tracking: step the dynamics under a controller program and
//! record marker world positions at a fixed sample cadence.

use crate::control::{targets_at, ControllerProgram};
use crate::dynamics::{Engine, SimConfig, SimError, WorldState};
use crate::math::Vec3;
use crate::model::{NodeRef, StructureDef};

/// Sampled marker positions over time. Samples are strictly time-ordered
/// and include both endpoints, so a run of duration `D` at sample period
/// `P` carries `D/P + 1` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub sample_period: f64,
    pub markers: Vec<NodeRef>,
    pub samples: Vec<(f64, Vec<Vec3>)>,
    /// Sample indices during which an obstacle was in contact (empty when
    /// the run had no obstacles).
    pub contact_samples: Vec<bool>,
}

impl TrajectoryRecord {
    pub fn marker_index(&self, marker: &NodeRef) -> Option<usize> {
        self.markers.iter().position(|m| m == marker)
    }

    /// Positions of one marker over time.
    pub fn marker_series(&self, index: usize) -> impl Iterator<Item = (f64, Vec3)> + '_ {
        self.samples.iter().map(move |(t, p)| (*t, p[index]))
    }

    /// First and last sample time with obstacle contact.
    pub fn contact_interval(&self) -> Option<(f64, f64)> {
        let first = self.contact_samples.iter().position(|&c| c)?;
        let last = self.contact_samples.iter().rposition(|&c| c)?;
        Some((self.samples[first].0, self.samples[last].0))
    }
}

/// Step the structure from `initial` under `program` for `duration`
/// simulated seconds, recording the markers every `sample_period`.
/// Deterministic. The caller is expected to settle first; a moving
/// initial state only earns a warning.
pub fn track(
    structure: &StructureDef,
    initial: &WorldState,
    program: &ControllerProgram,
    markers: &[NodeRef],
    duration: f64,
    sample_period: f64,
    config: &SimConfig,
) -> Result<TrajectoryRecord, SimError> {
    let mut engine = Engine::new(structure, config.clone())?;
    track_with_engine(&mut engine, initial, program, markers, duration, sample_period)
}

pub(crate) fn track_with_engine(
    engine: &mut Engine<'_>,
    initial: &WorldState,
    program: &ControllerProgram,
    markers: &[NodeRef],
    duration: f64,
    sample_period: f64,
) -> Result<TrajectoryRecord, SimError> {
    let dt = engine.config.dt;
    if !(sample_period > 0.0) || sample_period < dt {
        return Err(SimError::BadConfig(format!(
            "sample period {sample_period} must be at least dt = {dt}"
        )));
    }
    if duration < 0.0 {
        return Err(SimError::BadConfig("duration must be non-negative".into()));
    }
    let steps_per_sample = (sample_period / dt).round().max(1.0) as u64;
    let total_steps = (duration / dt).round() as u64;
    if total_steps > engine.config.max_steps_per_call {
        return Err(SimError::StepBudget {
            budget: engine.config.max_steps_per_call,
            needed: total_steps,
        });
    }

    let residual = engine.residual_velocity(initial);
    if residual > 10.0 * crate::lab::SETTLE_TOL {
        log::warn!(
            "tracking from a moving state (residual velocity {residual:.2e} m/s); settle first"
        );
    }

    let resolved: Vec<(usize, usize)> = markers
        .iter()
        .map(|m| engine.resolve_node(m))
        .collect::<Result<_, _>>()?;

    let mut world = initial.clone();
    // Trajectory time is measured from the start of tracking; controller
    // programs see t = 0 here regardless of how long settling took.
    world.time = 0.0;
    let mut samples = Vec::with_capacity((total_steps / steps_per_sample + 1) as usize);
    let mut contact_samples = Vec::with_capacity(samples.capacity());
    let sample_row =
        |engine: &mut Engine<'_>, world: &WorldState| -> (f64, Vec<Vec3>) {
            let positions = resolved
                .iter()
                .map(|&node| engine.node_position(world, node))
                .collect();
            (world.time, positions)
        };

    let row = sample_row(engine, &world);
    contact_samples.push(engine.in_contact(&world));
    samples.push(row);
    let mut since_sample = 0u64;
    for _ in 0..total_steps {
        let targets = targets_at(program, world.time);
        engine.step(&mut world, &targets)?;
        since_sample += 1;
        if since_sample == steps_per_sample {
            since_sample = 0;
            let row = sample_row(engine, &world);
            contact_samples.push(engine.in_contact(&world));
            samples.push(row);
        }
    }

    Ok(TrajectoryRecord {
        sample_period: steps_per_sample as f64 * dt,
        markers: markers.to_vec(),
        samples,
        contact_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ControllerProgram;
    use crate::dynamics::{settle, SimConfig};
    use crate::model::build_elbow_joint;

    #[test]
    fn sample_count_is_inclusive_of_both_ends() {
        let s = build_elbow_joint();
        let mut world = WorldState::initial(&s);
        let config = SimConfig::default();
        settle(&s, &mut world, &config, 1e-3, 20.0).unwrap();
        let traj = track(
            &s,
            &world,
            &ControllerProgram::empty(),
            &[NodeRef::new("forearm", "tip")],
            0.5,
            0.01,
            &config,
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 51);
        assert!(traj.contact_interval().is_none());
    }

    #[test]
    fn settled_structure_barely_moves_without_excitation() {
        let s = build_elbow_joint();
        let mut world = WorldState::initial(&s);
        let config = SimConfig::default();
        let converged = settle(&s, &mut world, &config, 1e-4, 60.0).unwrap();
        assert!(converged);
        let traj = track(
            &s,
            &world,
            &ControllerProgram::empty(),
            &[NodeRef::new("forearm", "tip")],
            2.0,
            0.01,
            &config,
        )
        .unwrap();
        let first = traj.samples[0].1[0];
        for (_, positions) in &traj.samples {
            assert!((positions[0] - first).norm() < 1e-4);
        }
    }
}
