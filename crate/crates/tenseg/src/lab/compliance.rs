//! Compliance experiment: run the same actuation twice, free and with an
//! obstacle in the way, and measure how far the motion deflects and how
//! well it recovers once contact ends.

use super::track::{track, TrajectoryRecord};
use super::RECOVERY_WINDOW;
use crate::control::ControllerProgram;
use crate::dynamics::{Obstacle, SimConfig, SimError, WorldState};
use crate::model::{NodeRef, StructureDef};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceReport {
    pub free: TrajectoryRecord,
    pub obstructed: TrajectoryRecord,
    /// Largest pointwise marker deviation between the two runs, m.
    pub max_deviation: f64,
    /// First/last obstructed-run sample with obstacle contact, at sample
    /// resolution; `None` when the obstacle was never touched.
    pub contact_interval: Option<(f64, f64)>,
    /// Mean deviation over the trailing [`RECOVERY_WINDOW`] of samples, m.
    pub recovery_error: f64,
    /// Contact happened and the trailing deviation fell below 10% of the
    /// peak: the structure absorbed the hit and came back to its path.
    pub recovered: bool,
}

/// Track with and without the obstacle under identical actuation and
/// compare. Both runs start from the same (settled) state.
#[allow(clippy::too_many_arguments)]
pub fn compliance_experiment(
    structure: &StructureDef,
    initial: &WorldState,
    program: &ControllerProgram,
    obstacle: Obstacle,
    markers: &[NodeRef],
    duration: f64,
    sample_period: f64,
    config: &SimConfig,
) -> Result<ComplianceReport, SimError> {
    let mut free_config = config.clone();
    free_config.obstacles.clear();
    let mut obstructed_config = free_config.clone();
    obstructed_config.obstacles.push(obstacle);

    let free = track(structure, initial, program, markers, duration, sample_period, &free_config)?;
    let obstructed = track(
        structure,
        initial,
        program,
        markers,
        duration,
        sample_period,
        &obstructed_config,
    )?;

    let deviation_at = |i: usize| -> f64 {
        free.samples[i]
            .1
            .iter()
            .zip(&obstructed.samples[i].1)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let n = free.samples.len().min(obstructed.samples.len());
    let max_deviation = (0..n).map(deviation_at).fold(0.0, f64::max);

    let tail = ((n as f64) * RECOVERY_WINDOW).ceil() as usize;
    let tail = tail.clamp(1, n);
    let recovery_error =
        (n - tail..n).map(deviation_at).sum::<f64>() / tail as f64;

    let contact_interval = obstructed.contact_interval();
    let recovered = contact_interval.is_some() && recovery_error <= 0.1 * max_deviation;

    Ok(ComplianceReport {
        free,
        obstructed,
        max_deviation,
        contact_interval,
        recovery_error,
        recovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::settle;
    use crate::math::Vec3;
    use crate::model::build_elbow_joint;

    #[test]
    fn distant_obstacle_changes_nothing() {
        let s = build_elbow_joint();
        let mut world = WorldState::initial(&s);
        let config = SimConfig::default();
        settle(&s, &mut world, &config, 1e-3, 20.0).unwrap();
        let report = compliance_experiment(
            &s,
            &world,
            &ControllerProgram::empty(),
            Obstacle::halfspace(Vec3::z(), -50.0),
            &[NodeRef::new("forearm", "tip")],
            0.5,
            0.01,
            &config,
        )
        .unwrap();
        assert!(report.contact_interval.is_none());
        assert!(report.max_deviation < 1e-6);
        assert!(!report.recovered);
        assert_eq!(report.free.samples.len(), report.obstructed.samples.len());
    }
}
