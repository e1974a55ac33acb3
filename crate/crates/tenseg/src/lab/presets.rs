//! Named actuation presets for the built-in models: one per active DOF
//! group, each with its measurement convention and workspace plane.
//!
//! A preset drives one group with a sinusoid (pairs get complementary
//! winding) while every other winch holds its settled length. Amplitudes
//! default to [`PRESET_AMPLITUDE_FRACTION`] of the settled commanded
//! length, capped so the peak winding rate stays inside the actuator's
//! velocity limit and inside the cable's travel window.

use super::workspace::PlaneSpec;
use super::{MeasureKind, MotionMeasurement};
use crate::control::{AntagonisticPair, ControllerProgram, SineChannel};
use crate::dynamics::WorldState;
use crate::model::{NodeRef, StructureDef};
use std::f64::consts::TAU;

/// Sinusoid period used by every preset, s.
pub const PRESET_PERIOD: f64 = 8.0;
/// Default amplitude as a fraction of the settled commanded length.
pub const PRESET_AMPLITUDE_FRACTION: f64 = 0.15;
/// Fraction of the actuator velocity budget a preset may use at peak.
pub const PRESET_RATE_MARGIN: f64 = 0.92;

/// One named DOF demonstration.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    /// Active cable group the preset drives.
    pub group: &'static str,
    pub measurement: MotionMeasurement,
    /// Plane the motion mostly lives in, for workspace projection.
    pub plane: PlaneName,
    /// Marker whose projection anchors angular-extent measurements.
    pub pivot: NodeRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneName {
    XY,
    XZ,
    YZ,
}

impl PlaneName {
    pub fn spec(self) -> PlaneSpec {
        match self {
            PlaneName::XY => PlaneSpec::xy(),
            PlaneName::XZ => PlaneSpec::xz(),
            PlaneName::YZ => PlaneSpec::yz(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PlaneName::XY => "xy",
            PlaneName::XZ => "xz",
            PlaneName::YZ => "yz",
        }
    }
}

// The elbow angle pivots on the forearm head — the joint's center of
// rotation. The olecranon hub is tempting (it is the routing landmark)
// but it rides the flexion cable and translates centimeters during
// actuation, which corrupts any angle anchored to it.
fn elbow_angle(upper_top: &str) -> MotionMeasurement {
    MotionMeasurement {
        name: "elbow-pitch".into(),
        kind: MeasureKind::JointAngle {
            pivot: NodeRef::new("forearm", "head"),
            proximal: NodeRef::new("humerus", upper_top),
            distal: NodeRef::new("forearm", "tip"),
        },
    }
}

fn elbow_yaw_angle() -> MotionMeasurement {
    MotionMeasurement {
        name: "elbow-yaw".into(),
        kind: MeasureKind::JointAngle {
            pivot: NodeRef::new("humerus", "yoke_l"),
            proximal: NodeRef::new("humerus", "yoke_r"),
            distal: NodeRef::new("forearm", "tip"),
        },
    }
}

fn shoulder_pitch_angle() -> MotionMeasurement {
    MotionMeasurement {
        name: "shoulder-pitch".into(),
        kind: MeasureKind::JointAngle {
            pivot: NodeRef::new("humerus", "head"),
            proximal: NodeRef::new("platform", "c"),
            distal: NodeRef::new("humerus", "distal"),
        },
    }
}

/// The end-effector marker for every built-in model.
pub fn end_effector_marker(structure_name: &str) -> Option<NodeRef> {
    match structure_name {
        "elbow" | "tetra_arm" | "saddle_arm" => Some(NodeRef::new("forearm", "tip")),
        _ => None,
    }
}

/// All presets for a built-in model, in DOF-table order.
pub fn presets_for(structure_name: &str) -> Option<Vec<Preset>> {
    let elbow_pitch = |top: &'static str| Preset {
        name: "elbow-pitch",
        group: "elbow_pitch",
        measurement: elbow_angle(top),
        plane: PlaneName::XZ,
        pivot: NodeRef::new("forearm", "head"),
    };
    let elbow_yaw = Preset {
        name: "elbow-yaw",
        group: "elbow_yaw",
        measurement: elbow_yaw_angle(),
        plane: PlaneName::YZ,
        pivot: NodeRef::new("forearm", "head"),
    };
    match structure_name {
        "elbow" => Some(vec![elbow_pitch("top"), elbow_yaw]),
        "tetra_arm" => Some(vec![
            Preset {
                name: "shoulder-pitch",
                group: "shoulder_pitch",
                measurement: shoulder_pitch_angle(),
                plane: PlaneName::XZ,
                pivot: NodeRef::new("humerus", "head"),
            },
            Preset {
                name: "shoulder-lift",
                group: "shoulder_lift",
                measurement: MotionMeasurement {
                    name: "shoulder-lift".into(),
                    kind: MeasureKind::Travel {
                        marker: NodeRef::new("shoulder_tetra", "apex"),
                        axis: crate::math::Vec3::z(),
                    },
                },
                plane: PlaneName::XZ,
                pivot: NodeRef::new("platform", "c"),
            },
            elbow_pitch("head"),
            elbow_yaw.clone(),
        ]),
        "saddle_arm" => Some(vec![
            Preset {
                name: "shoulder-pitch",
                group: "shoulder_pitch",
                measurement: shoulder_pitch_angle(),
                plane: PlaneName::XZ,
                pivot: NodeRef::new("humerus", "head"),
            },
            Preset {
                name: "shoulder-yaw",
                group: "shoulder_yaw",
                measurement: MotionMeasurement {
                    name: "shoulder-yaw".into(),
                    kind: MeasureKind::JointAngle {
                        pivot: NodeRef::new("humerus", "head"),
                        proximal: NodeRef::new("platform", "px_f"),
                        distal: NodeRef::new("humerus", "wing_f"),
                    },
                },
                plane: PlaneName::XY,
                pivot: NodeRef::new("humerus", "head"),
            },
            elbow_pitch("head"),
            elbow_yaw,
        ]),
        _ => None,
    }
}

/// Find one preset by name.
pub fn preset(structure_name: &str, preset_name: &str) -> Option<Preset> {
    presets_for(structure_name)?
        .into_iter()
        .find(|p| p.name == preset_name)
}

fn commanded_of(structure: &StructureDef, world: &WorldState, cable_id: &str) -> Option<f64> {
    let slot = structure
        .active_cable_indices()
        .into_iter()
        .position(|i| structure.cables[i].id == cable_id)?;
    Some(world.commanded_lengths[slot])
}

fn preset_amplitude(structure: &StructureDef, cable_id: &str, center: f64) -> f64 {
    let cable = structure.cable(cable_id).expect("preset cable exists");
    let act = cable.actuator.expect("active cable");
    let rate_cap = PRESET_RATE_MARGIN * act.target_velocity * PRESET_PERIOD / TAU;
    (PRESET_AMPLITUDE_FRACTION * center)
        .min(rate_cap)
        .min(center - cable.min_length)
        .min(cable.max_length - center)
        .max(0.0)
}

/// Build the controller program for a preset around the settled winch
/// state: a sine (or complementary pair) on the preset's group, holds
/// left implicit for everything else.
pub fn build_preset_program(
    structure: &StructureDef,
    settled: &WorldState,
    preset_name: &str,
) -> Result<ControllerProgram, String> {
    let preset = preset(&structure.name, preset_name).ok_or_else(|| {
        format!(
            "no preset `{preset_name}` for structure `{}`",
            structure.name
        )
    })?;
    let members: Vec<String> = structure
        .active_groups()
        .into_iter()
        .find(|(g, _)| g == preset.group)
        .map(|(_, m)| m)
        .ok_or_else(|| format!("structure has no active group `{}`", preset.group))?;

    let mut program = ControllerProgram::empty();
    match members.as_slice() {
        [single] => {
            let center = commanded_of(structure, settled, single)
                .ok_or_else(|| format!("cable `{single}` has no winch slot"))?;
            program.channels.push(SineChannel {
                cable_id: single.clone(),
                center,
                amplitude: preset_amplitude(structure, single, center),
                period: PRESET_PERIOD,
                phase: 0.0,
            });
        }
        [a, b] => {
            let center_a = commanded_of(structure, settled, a)
                .ok_or_else(|| format!("cable `{a}` has no winch slot"))?;
            let center_b = commanded_of(structure, settled, b)
                .ok_or_else(|| format!("cable `{b}` has no winch slot"))?;
            let amplitude = preset_amplitude(structure, a, center_a)
                .min(preset_amplitude(structure, b, center_b));
            program.pairs.push(AntagonisticPair {
                cable_a: a.clone(),
                cable_b: b.clone(),
                total_length: center_a + center_b,
                source: SineChannel {
                    cable_id: a.clone(),
                    center: center_a,
                    amplitude,
                    period: PRESET_PERIOD,
                    phase: 0.0,
                },
            });
        }
        many => {
            for id in many {
                let center = commanded_of(structure, settled, id)
                    .ok_or_else(|| format!("cable `{id}` has no winch slot"))?;
                program.channels.push(SineChannel {
                    cable_id: id.clone(),
                    center,
                    amplitude: preset_amplitude(structure, id, center),
                    period: PRESET_PERIOD,
                    phase: 0.0,
                });
            }
        }
    }
    let issues = program.validate(structure);
    if !issues.is_empty() {
        return Err(issues.join("; "));
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm};

    #[test]
    fn every_builtin_group_has_a_preset() {
        for s in [build_elbow_joint(), build_tetrahedrons_arm(), build_saddle_arm()] {
            let presets = presets_for(&s.name).unwrap();
            let groups: Vec<String> = s.active_groups().into_iter().map(|(g, _)| g).collect();
            assert_eq!(presets.len(), groups.len(), "{}", s.name);
            for p in &presets {
                assert!(groups.contains(&p.group.to_string()), "{}: {}", s.name, p.name);
            }
        }
    }

    #[test]
    fn preset_programs_validate_and_respect_rate_budget() {
        for s in [build_elbow_joint(), build_tetrahedrons_arm(), build_saddle_arm()] {
            let world = WorldState::initial(&s);
            for p in presets_for(&s.name).unwrap() {
                let program = build_preset_program(&s, &world, p.name).unwrap();
                assert_eq!(program.validate(&s), Vec::<String>::new());
                for ch in program.channels.iter().chain(program.pairs.iter().map(|p| &p.source)) {
                    let cable = s.cable(&ch.cable_id).unwrap();
                    let peak_rate = TAU * ch.amplitude / ch.period;
                    assert!(
                        peak_rate <= cable.actuator.unwrap().target_velocity + 1e-12,
                        "{}/{}: peak rate {peak_rate}",
                        s.name,
                        p.name
                    );
                    assert!(ch.amplitude > 0.005, "{}/{}: amplitude too small", s.name, p.name);
                }
            }
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        let s = build_elbow_joint();
        let world = WorldState::initial(&s);
        assert!(build_preset_program(&s, &world, "shoulder-lift").is_err());
    }
}
