//! Experiment harness: marker tracking, joint angles and range of motion,
//! workspace area, compliance under obstacle contact, and seeded
//! repeatability studies.
//!
//! Reporting conventions used throughout (stated in every report):
//! the first 5% of samples are discarded as startup transient, and
//! compliance recovery is averaged over the final 10% of samples.

mod compliance;
mod measure;
mod perturb;
mod presets;
mod track;
mod workspace;

pub use compliance::{compliance_experiment, ComplianceReport};
pub use measure::{
    joint_angle, joint_angle_unwrapped, mean, population_std_dev, range_of_motion,
    sample_std_dev, MeasureError, RangeOfMotionReport, SeriesKind,
};
pub use perturb::{perturb, repeatability, RepeatabilityReport};
pub use presets::{
    build_preset_program, end_effector_marker, preset, presets_for, Preset, PlaneName,
    PRESET_AMPLITUDE_FRACTION, PRESET_PERIOD, PRESET_RATE_MARGIN,
};
pub use track::{track, TrajectoryRecord};
pub use workspace::{workspace_summary, PlaneSpec, WorkspaceReport};

use crate::model::NodeRef;

/// Fraction of samples discarded as startup transient before range-of-
/// motion statistics.
pub const TRANSIENT_DISCARD: f64 = 0.05;
/// Fraction of trailing samples averaged for the compliance recovery
/// error.
pub const RECOVERY_WINDOW: f64 = 0.10;
/// Residual-velocity tolerance for settling before experiments, m/s.
pub const SETTLE_TOL: f64 = 1e-4;
/// Time budget for settling, simulated seconds.
pub const SETTLE_MAX_TIME: f64 = 60.0;

/// How a tracked trajectory is reduced to a scalar series for range-of-
/// motion and repeatability reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionMeasurement {
    pub name: String,
    pub kind: MeasureKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    /// Angle at `pivot` between the rays to `proximal` and `distal`,
    /// degrees.
    JointAngle {
        pivot: NodeRef,
        proximal: NodeRef,
        distal: NodeRef,
    },
    /// Signed travel of one marker along an axis, meters.
    Travel { marker: NodeRef, axis: crate::math::Vec3 },
}

impl MotionMeasurement {
    /// Markers the measurement needs tracked.
    pub fn markers(&self) -> Vec<NodeRef> {
        match &self.kind {
            MeasureKind::JointAngle {
                pivot,
                proximal,
                distal,
            } => vec![pivot.clone(), proximal.clone(), distal.clone()],
            MeasureKind::Travel { marker, .. } => vec![marker.clone()],
        }
    }

    pub fn series_kind(&self) -> SeriesKind {
        match self.kind {
            MeasureKind::JointAngle { .. } => SeriesKind::AngleDegrees,
            MeasureKind::Travel { .. } => SeriesKind::TravelMeters,
        }
    }

    /// Reduce a trajectory to the scalar series.
    pub fn evaluate(
        &self,
        traj: &track::TrajectoryRecord,
    ) -> Result<Vec<(f64, f64)>, MeasureError> {
        match &self.kind {
            MeasureKind::JointAngle {
                pivot,
                proximal,
                distal,
            } => joint_angle(traj, pivot, proximal, distal),
            MeasureKind::Travel { marker, axis } => {
                let mi = traj
                    .marker_index(marker)
                    .ok_or(MeasureError::UnknownMarker)?;
                let axis = axis.normalize();
                Ok(traj
                    .samples
                    .iter()
                    .map(|(t, positions)| (*t, positions[mi].dot(&axis)))
                    .collect())
            }
        }
    }
}
