//! The built-in desk-scale models: a standalone two-DOF elbow, the
//! tetrahedrons arm, and the saddle arm.
//!
//! # Geometry conventions
//!
//! All models hang below a fixed platform in the `z`-up world frame, arm
//! axis along `-z`, and actuate in these planes:
//!
//! * pitch — the `xz` plane, flexion toward `+x`;
//! * yaw — lateral motion toward `±y` (elbow) or twist about `z` (saddle
//!   shoulder);
//! * lift — translation along `z` (tetrahedrons shoulder only).
//!
//! Component masses and principal lengths are catalog values for the two
//! arm prototypes (grams and centimeters converted to kilograms and meters
//! at construction). Vertex coordinates, cable stiffnesses, damping, and
//! pretension are this simulator's own engineering choices and are frozen
//! here as named constants; see the crate README for the full table of
//! non-measured defaults.
//!
//! # Joint anatomy shared by all three models
//!
//! Each elbow is built from the same parts:
//!
//! * the upper bone ends in a cross of two short end-cap bars (`yoke_l`/
//!   `yoke_r` across the yaw plane, `spur_f`/`spur_b` across the pitch
//!   plane) whose tips carry cable hoops;
//! * the forearm carries a matching `horn_f`/`horn_b` bar near its head —
//!   the flexion lever;
//! * the olecranon is a separate short rod hanging beside the joint,
//!   lashed to both bones; the elbow pitch cable runs from the top of the
//!   upper bone around the olecranon's `hub` end and onward to `horn_f`,
//!   so the olecranon is the routing hub (a floating pulley block) that
//!   hauls the forearm into flexion;
//! * short elastic ligament cables (`lig_*`) suspend the forearm head from
//!   the end-cap cross and give the joint its two passive rocking DOFs.
//!
//! Active cable groups follow the `_l`/`_r` suffix convention: the two
//! elbow yaw cables form one antagonistic winch pair mirroring a flexor/
//! extensor muscle group, as do the saddle shoulder yaw cables.

use super::{
    ActuatorSpec, BodyNode, CableKind, CableSpec, NodeRef, RigidBodySpec, Rod, StructureDef,
};
use crate::math::Vec3;

/// Default stiffness of passive cables (elastic cord analog), N/m.
pub const PASSIVE_STIFFNESS: f64 = 150.0;
/// Default damping of passive cables, N·s/m.
pub const PASSIVE_DAMPING: f64 = 1.0;
/// Default stiffness of active winch cables (stiff line analog), N/m.
pub const ACTIVE_STIFFNESS: f64 = 5000.0;
/// Default damping of active cables, N·s/m.
pub const ACTIVE_DAMPING: f64 = 5.0;
/// Default winch limits: cruise rate of cable lengthening, m/s.
pub const ACTUATOR_TARGET_VELOCITY: f64 = 0.05;
/// Default winch limits: bound on the rate's rate of change, m/s².
pub const ACTUATOR_MAX_ACCEL: f64 = 0.5;
/// Passive cables are emitted this much shorter than their geometric
/// route length (absolute, meters). The offset is deliberately small:
/// large pretension makes a hanging cluster rise until its own cables
/// relax, throwing the winch lines slack. Kept below every cluster's
/// gravity stretch, it instead guarantees that weight loads the whole
/// network — every cable settles taut, pretension plus load share.
pub const PASSIVE_PRETENSION_M: f64 = 0.00015;
/// Active cables are wound to exactly the as-built route length; the
/// structure's weight snugs them. Any extra bite at winch-line stiffness
/// would dwarf the gram-scale gravity loads and deform the joints.
pub const ACTIVE_PRETENSION_M: f64 = 0.0;

/// Standard gravity used by every built-in model, m/s².
pub const GRAVITY: Vec3 = Vec3::new(0.0, 0.0, -9.81);

// Tetrahedrons arm component catalog (kg, m).
pub const TETRA_FOREARM_MASS: f64 = 0.0101;
pub const TETRA_FOREARM_LENGTH: f64 = 0.586;
pub const TETRA_OLECRANON_MASS: f64 = 0.0060;
pub const TETRA_OLECRANON_LENGTH: f64 = 0.240;
pub const TETRA_HUMERUS_MASS: f64 = 0.0366;
pub const TETRA_HUMERUS_LENGTH: f64 = 0.762;
pub const TETRA_SHOULDER_MASS: f64 = 0.0248;
pub const TETRA_SHOULDER_EDGE: f64 = 0.361;

// Saddle arm component catalog (kg, m).
pub const SADDLE_FOREARM_MASS: f64 = 0.0185;
pub const SADDLE_FOREARM_LENGTH: f64 = 0.54;
pub const SADDLE_OLECRANON_MASS: f64 = 0.0116;
pub const SADDLE_OLECRANON_LENGTH: f64 = 0.24;
pub const SADDLE_HUMERUS_MASS: f64 = 0.0232;
pub const SADDLE_HUMERUS_LENGTH: f64 = 0.53;
pub const SADDLE_JOINT_MASS: f64 = 0.0361;
pub const SADDLE_JOINT_SPAN: f64 = 0.54;

/// The saddle arm is assembled with the elbow already flexed by this angle
/// so that shoulder yaw (twist about the vertical) sweeps the end effector
/// through a visible arc. The angle is bounded by cable statics: a hanging
/// forearm can only be held flexed while its weight times the flexion
/// anchor's moment arm exceeds the gravity torque.
pub const SADDLE_REST_FLEXION_RAD: f64 = 10.0 * std::f64::consts::PI / 180.0;

/// Yaw end-cap half-width on arm upper bones, m.
const YOKE_HALF: f64 = 0.06;
/// Flexion-lever half-width on forearms, m.
const HORN_HALF: f64 = 0.06;

struct Builder {
    bodies: Vec<RigidBodySpec>,
    cables: Vec<CableSpec>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            bodies: Vec::new(),
            cables: Vec::new(),
        }
    }

    fn body(
        &mut self,
        name: &str,
        fixed: bool,
        mass: f64,
        nodes: &[(&str, Vec3)],
        rods: &[(&str, &str, f64)],
    ) {
        let nodes = nodes
            .iter()
            .map(|(id, p)| BodyNode {
                id: (*id).to_string(),
                local_position: *p,
            })
            .collect();
        let rods = rods
            .iter()
            .map(|(a, b, m)| Rod {
                node_a: (*a).to_string(),
                node_b: (*b).to_string(),
                mass: *m,
            })
            .collect();
        self.bodies
            .push(RigidBodySpec::from_parts(name, fixed, mass, nodes, rods));
    }

    fn route_length(&self, route: &[(&str, &str)]) -> f64 {
        let pos = |body: &str, node: &str| -> Vec3 {
            self.bodies
                .iter()
                .find(|b| b.name == body)
                .and_then(|b| b.node(node))
                .unwrap_or_else(|| panic!("gallery route references unknown node {body}.{node}"))
                .local_position
        };
        route
            .windows(2)
            .map(|w| (pos(w[1].0, w[1].1) - pos(w[0].0, w[0].1)).norm())
            .sum()
    }

    /// Passive cable with the standard pretension offset.
    fn passive(&mut self, id: &str, route: &[(&str, &str)]) {
        self.passive_damped(id, route, PASSIVE_DAMPING);
    }

    /// Passive cable with per-cable stiffness and damping overrides.
    fn passive_with(&mut self, id: &str, route: &[(&str, &str)], stiffness: f64, damping: f64) {
        self.passive_inner(id, route, stiffness, damping);
    }

    /// Passive cable with a per-cable damping override.
    fn passive_damped(&mut self, id: &str, route: &[(&str, &str)], damping: f64) {
        self.passive_inner(id, route, PASSIVE_STIFFNESS, damping);
    }

    fn passive_inner(&mut self, id: &str, route: &[(&str, &str)], stiffness: f64, damping: f64) {
        let length = self.route_length(route);
        assert!(
            length > 4.0 * PASSIVE_PRETENSION_M,
            "cable {id}: span {length} too short for the pretension offset"
        );
        let rest = length - PASSIVE_PRETENSION_M;
        self.cables.push(CableSpec {
            id: id.to_string(),
            route: route.iter().map(|(b, n)| NodeRef::new(*b, *n)).collect(),
            stiffness_k: stiffness,
            damping_b: damping,
            rest_length: rest,
            min_length: 0.25 * rest,
            max_length: 4.0 * rest,
            kind: CableKind::Passive,
            actuator: None,
        });
    }

    /// Active winch cable, wound [`ACTIVE_PRETENSION_M`] short of the
    /// as-built route. The winch travel window is ±50% of the commanded
    /// length.
    fn active(&mut self, id: &str, route: &[(&str, &str)]) {
        let rest = self.route_length(route) - ACTIVE_PRETENSION_M;
        self.cables.push(CableSpec {
            id: id.to_string(),
            route: route.iter().map(|(b, n)| NodeRef::new(*b, *n)).collect(),
            stiffness_k: ACTIVE_STIFFNESS,
            damping_b: ACTIVE_DAMPING,
            rest_length: rest,
            min_length: 0.5 * rest,
            max_length: 1.5 * rest,
            kind: CableKind::Active,
            actuator: Some(ActuatorSpec {
                target_velocity: ACTUATOR_TARGET_VELOCITY,
                max_accel: ACTUATOR_MAX_ACCEL,
            }),
        });
    }

    fn finish(self, name: &str) -> StructureDef {
        let mut structure = StructureDef {
            name: name.to_string(),
            bodies: self.bodies,
            cables: self.cables,
            gravity: GRAVITY,
        };
        // Rigging: apply the per-cable take-up measured from the settled
        // pose, re-deriving the winch travel window around it.
        for cable in structure.cables.iter_mut() {
            if let Some(rest) = super::calibration::calibrated_rest(&structure.name, &cable.id) {
                cable.rest_length = rest;
                if cable.is_active() {
                    cable.min_length = 0.5 * rest;
                    cable.max_length = 1.5 * rest;
                } else {
                    cable.min_length = 0.25 * rest;
                    cable.max_length = 4.0 * rest;
                }
            }
        }
        structure
    }
}

/// Damping override for the olecranon lashings: the hub rides the flexion
/// cable, and its snubbers have to kill the pendulum mode it would
/// otherwise keep forever.
const CAPSULE_DAMPING: f64 = 4.0;

/// The short joint-capsule loops (forearm ligaments, olecranon lashings)
/// are much stiffer than the long elastic cords: winch stroke must turn
/// into joint rotation instead of disappearing into capsule stretch.
const CAPSULE_STIFFNESS: f64 = 2000.0;

/// The standalone elbow's test stand preloads the joint through a soft
/// tether from its lower post to the forearm tip. A hanging forearm alone
/// weighs too little to put the whole cable network visibly in tension;
/// the tether supplies the opposing pull a full arm's weight would.
const PRELOAD_STIFFNESS: f64 = 20.0;
const PRELOAD_DAMPING: f64 = 0.5;
const PRELOAD_STRETCH: f64 = 0.05;

/// Damping override for the saddle shoulder's structural cables (lacing,
/// capsule, stays).
const SADDLE_DAMPING: f64 = 6.0;

/// Shared elbow sub-assembly. The upper bone must already expose
/// `top_node` (at world position `top`), `distal`, `yoke_l/r` and
/// `spur_f/b` (the end-cap cross just above the joint). The forearm hangs
/// along `axis` (unit, pointing tip-ward); flexion lifts the tip toward
/// `+x`.
///
/// The olecranon hangs hub-up in a three-cable tripod off the end-cap
/// cross, its hub placed a few millimeters inside the straight line from
/// the upper bone's top to the forearm horn. The flexion cable runs
/// around that hub: the slight wrap presses the hub outward into its
/// tripod at rest, and deepens as the joint flexes, so the hub is the
/// cable's routing point through the joint exactly like a fairlead.
#[allow(clippy::too_many_arguments)]
fn build_elbow_parts(
    b: &mut Builder,
    upper: &str,
    top_node: &str,
    top: Vec3,
    head: Vec3,
    axis: Vec3,
    forearm_mass: f64,
    forearm_length: f64,
    olecranon_mass: f64,
    olecranon_length: f64,
) {
    // In-plane direction perpendicular to the forearm axis, toward +x.
    let perp = Vec3::new(-axis.z, 0.0, axis.x);

    let tip = head + axis * forearm_length;
    let mid = head + axis * (forearm_length * 0.5);
    let horn_root = head + axis * 0.02;
    let horn_f = horn_root + perp * HORN_HALF;
    let horn_b = horn_root - perp * HORN_HALF;
    // The flexion cable ties around the rod well below the joint: a
    // flexed hanging forearm can carry at most its own weight of upward
    // pull, so the anchor's moment arm about the head must beat the
    // weight's arm about the head at every flexion angle.
    let anchor = head + axis * (0.72 * forearm_length) + perp * HORN_HALF;
    let horn_mass = 0.002;
    b.body(
        "forearm",
        false,
        forearm_mass,
        &[
            ("head", head),
            ("mid", mid),
            ("anchor", anchor),
            ("tip", tip),
            ("horn_f", horn_f),
            ("horn_b", horn_b),
        ],
        &[
            ("head", "tip", forearm_mass - horn_mass),
            ("horn_f", "horn_b", horn_mass),
        ],
    );

    // Hub above the joint, 4 mm inboard of the top-to-anchor chord but
    // never outside its tripod's footprint; the rest of the rod hangs
    // straight down from it.
    let hub_z = head.z + 0.07;
    let chord_x = anchor.x * (top.z - hub_z) / (top.z - anchor.z);
    let hub = Vec3::new((chord_x - 0.004).min(0.045), 0.0, hub_z);
    let root = hub + Vec3::new(0.0, 0.0, -olecranon_length);
    b.body(
        "olecranon",
        false,
        olecranon_mass,
        &[("hub", hub), ("root", root)],
        &[("hub", "root", olecranon_mass)],
    );

    // Ligaments suspending the forearm head from the end-cap cross.
    b.passive_with("lig_l", &[(upper, "yoke_l"), ("forearm", "head")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with("lig_r", &[(upper, "yoke_r"), ("forearm", "head")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with("lig_f", &[(upper, "spur_f"), ("forearm", "horn_f")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with("lig_b", &[(upper, "spur_b"), ("forearm", "horn_b")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with("lig_c", &[(upper, "distal"), ("forearm", "head")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    // Olecranon tripod plus two snubber ties onto the forearm.
    b.passive_with("ole_up", &[(upper, "spur_f"), ("olecranon", "hub")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with("ole_l", &[(upper, "yoke_l"), ("olecranon", "hub")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with("ole_r", &[(upper, "yoke_r"), ("olecranon", "hub")], CAPSULE_STIFFNESS, CAPSULE_DAMPING);
    b.passive_with(
        "ole_tie",
        &[("olecranon", "hub"), ("forearm", "head")],
        CAPSULE_STIFFNESS,
        CAPSULE_DAMPING,
    );
    b.passive_with(
        "ole_tail",
        &[("olecranon", "root"), ("forearm", "mid")],
        CAPSULE_STIFFNESS,
        CAPSULE_DAMPING,
    );

    // Flexion: top of the upper bone, around the olecranon hub, down to
    // the distal anchor.
    b.active(
        "elbow_pitch",
        &[(upper, top_node), ("olecranon", "hub"), ("forearm", "anchor")],
    );
    // Lateral swing: antagonistic pair off the yaw yoke.
    b.active("elbow_yaw_l", &[(upper, "yoke_l"), ("forearm", "mid")]);
    b.active("elbow_yaw_r", &[(upper, "yoke_r"), ("forearm", "mid")]);
}

/// Standalone two-active-DOF elbow: the upper bone is fixed as a test
/// stand, the merged radius/ulna forearm hangs from it, and the olecranon
/// routes the flexion cable. Active DOFs: elbow pitch (single winch, the
/// "biceps") and elbow yaw (antagonistic pair).
pub fn build_elbow_joint() -> StructureDef {
    let mut b = Builder::new();
    b.body(
        "humerus",
        true,
        0.032,
        &[
            ("top", Vec3::new(0.0, 0.0, 0.42)),
            ("distal", Vec3::new(0.0, 0.0, 0.02)),
            ("yoke_l", Vec3::new(0.0, YOKE_HALF, 0.09)),
            ("yoke_r", Vec3::new(0.0, -YOKE_HALF, 0.09)),
            ("spur_f", Vec3::new(YOKE_HALF, 0.0, 0.09)),
            ("spur_b", Vec3::new(-YOKE_HALF, 0.0, 0.09)),
            ("post", Vec3::new(0.0, 0.0, -0.62)),
        ],
        &[
            ("top", "distal", 0.028),
            ("yoke_l", "yoke_r", 0.002),
            ("spur_f", "spur_b", 0.002),
        ],
    );
    build_elbow_parts(
        &mut b,
        "humerus",
        "top",
        Vec3::new(0.0, 0.0, 0.42),
        Vec3::new(0.0, 0.0, -0.05),
        -Vec3::z(),
        0.035,
        0.38,
        0.008,
        0.14,
    );
    // Preload tether: stand post to forearm tip, rigged stretched.
    {
        let length = b.route_length(&[("forearm", "tip"), ("humerus", "post")]);
        let rest = length - PRELOAD_STRETCH;
        b.cables.push(CableSpec {
            id: "preload".to_string(),
            route: vec![NodeRef::new("forearm", "tip"), NodeRef::new("humerus", "post")],
            stiffness_k: PRELOAD_STIFFNESS,
            damping_b: PRELOAD_DAMPING,
            rest_length: rest,
            min_length: 0.25 * rest,
            max_length: 8.0 * rest,
            kind: CableKind::Passive,
            actuator: None,
        });
    }
    b.finish("elbow")
}

/// Tetrahedrons arm: a regular-tetrahedron shoulder frame slung under the
/// motor platform, carrying the humerus, olecranon and forearm.
///
/// Active DOF groups: `shoulder_pitch` (swing toward +x), `shoulder_lift`
/// (vertical shrug of the whole arm), `elbow_pitch`, and the `elbow_yaw`
/// pair — lift substitutes for the yaw the saddle shoulder offers.
pub fn build_tetrahedrons_arm() -> StructureDef {
    let mut b = Builder::new();

    // Motor platform: three anchor posts over the shoulder verts plus the
    // hoist point. Fixed, so its mass is not part of the suspended total.
    let post_r = 0.27;
    let (c120, s120) = ((-0.5_f64), 3.0_f64.sqrt() / 2.0);
    let p1 = Vec3::new(post_r, 0.0, 0.0);
    let p2 = Vec3::new(post_r * c120, post_r * s120, 0.0);
    let p3 = Vec3::new(post_r * c120, -post_r * s120, 0.0);
    b.body(
        "platform",
        true,
        0.5,
        &[
            ("c", Vec3::zeros()),
            ("p1", p1),
            ("p2", p2),
            ("p3", p3),
        ],
        &[],
    );

    // Shoulder: regular tetrahedron of edge rods, apex down.
    let edge = TETRA_SHOULDER_EDGE;
    let r = edge / 3.0_f64.sqrt();
    let base_z = -0.12;
    let apex_z = base_z - edge * (2.0_f64 / 3.0).sqrt();
    let b1 = Vec3::new(r, 0.0, base_z);
    let b2 = Vec3::new(r * c120, r * s120, base_z);
    let b3 = Vec3::new(r * c120, -r * s120, base_z);
    let apex = Vec3::new(0.0, 0.0, apex_z);
    let rod_m = TETRA_SHOULDER_MASS / 6.0;
    b.body(
        "shoulder_tetra",
        false,
        TETRA_SHOULDER_MASS,
        &[("b1", b1), ("b2", b2), ("b3", b3), ("apex", apex)],
        &[
            ("b1", "b2", rod_m),
            ("b2", "b3", rod_m),
            ("b3", "b1", rod_m),
            ("b1", "apex", rod_m),
            ("b2", "apex", rod_m),
            ("b3", "apex", rod_m),
        ],
    );

    // Humerus: main rod plus the elbow end-cap cross.
    let head_z = -0.45;
    let distal_z = head_z - TETRA_HUMERUS_LENGTH;
    let cross_z = distal_z + 0.072;
    let bar_m = 0.002;
    b.body(
        "humerus",
        false,
        TETRA_HUMERUS_MASS,
        &[
            ("head", Vec3::new(0.0, 0.0, head_z)),
            ("mid", Vec3::new(0.0, 0.0, -0.85)),
            ("distal", Vec3::new(0.0, 0.0, distal_z)),
            ("yoke_l", Vec3::new(0.0, YOKE_HALF, cross_z)),
            ("yoke_r", Vec3::new(0.0, -YOKE_HALF, cross_z)),
            ("spur_f", Vec3::new(YOKE_HALF, 0.0, cross_z)),
            ("spur_b", Vec3::new(-YOKE_HALF, 0.0, cross_z)),
        ],
        &[
            ("head", "distal", TETRA_HUMERUS_MASS - 2.0 * bar_m),
            ("yoke_l", "yoke_r", bar_m),
            ("spur_f", "spur_b", bar_m),
        ],
    );

    build_elbow_parts(
        &mut b,
        "humerus",
        "head",
        Vec3::new(0.0, 0.0, head_z),
        Vec3::new(0.0, 0.0, distal_z - 0.048),
        -Vec3::z(),
        TETRA_FOREARM_MASS,
        TETRA_FOREARM_LENGTH,
        TETRA_OLECRANON_MASS,
        TETRA_OLECRANON_LENGTH,
    );

    // Shoulder suspension: radial slings plus both diagonal braces per
    // vertex (the diagonals kill twist about the hoist axis).
    b.passive("sus_a", &[("platform", "p1"), ("shoulder_tetra", "b1")]);
    b.passive("sus_b", &[("platform", "p2"), ("shoulder_tetra", "b2")]);
    b.passive("sus_c", &[("platform", "p3"), ("shoulder_tetra", "b3")]);
    b.passive("brace_1a", &[("platform", "p2"), ("shoulder_tetra", "b1")]);
    b.passive("brace_1b", &[("platform", "p3"), ("shoulder_tetra", "b1")]);
    b.passive("brace_2a", &[("platform", "p3"), ("shoulder_tetra", "b2")]);
    b.passive("brace_2b", &[("platform", "p1"), ("shoulder_tetra", "b2")]);
    b.passive("brace_3a", &[("platform", "p1"), ("shoulder_tetra", "b3")]);
    b.passive("brace_3b", &[("platform", "p2"), ("shoulder_tetra", "b3")]);
    // Glenohumeral capsule: apex-to-head link plus four long stays from
    // the shoulder verts to the elbow end-cap cross. Each stay crosses
    // the arm axis, so swing in either plane and twist about the arm all
    // stretch some stay first-order — that coupling recenters and damps
    // the hanging humerus in every soft direction.
    b.passive("caps_c", &[("shoulder_tetra", "apex"), ("humerus", "head")]);
    b.passive("stay_a", &[("shoulder_tetra", "b1"), ("humerus", "yoke_l")]);
    b.passive("stay_b", &[("shoulder_tetra", "b1"), ("humerus", "yoke_r")]);
    b.passive("stay_c", &[("shoulder_tetra", "b2"), ("humerus", "spur_f")]);
    b.passive("stay_d", &[("shoulder_tetra", "b3"), ("humerus", "spur_f")]);

    b.active("shoulder_pitch", &[("platform", "p1"), ("humerus", "mid")]);
    b.active("shoulder_lift", &[("platform", "c"), ("shoulder_tetra", "apex")]);

    b.finish("tetra_arm")
}

/// Saddle arm: the shoulder is two perpendicular y-connectors held
/// together in tension — the upper one slung under the platform with its
/// arms opening down across `y`, the lower one the other way up across `x`,
/// its tips laced up into the upper's arms — forming a two-axis rocking
/// saddle from which the humerus hangs and about which it can swivel.
///
/// Active DOF groups: `shoulder_pitch`, the `shoulder_yaw` pair (twist of
/// the humerus about the vertical), `elbow_pitch`, and the `elbow_yaw`
/// pair. The elbow is assembled pre-flexed by [`SADDLE_REST_FLEXION_RAD`]
/// so yaw swings the end effector through a real arc.
pub fn build_saddle_arm() -> StructureDef {
    let mut b = Builder::new();

    b.body(
        "platform",
        true,
        0.5,
        &[
            ("c", Vec3::zeros()),
            ("px_f", Vec3::new(0.24, 0.0, 0.0)),
            ("px_b", Vec3::new(-0.24, 0.0, 0.0)),
            ("py_l", Vec3::new(0.0, 0.24, 0.0)),
            ("py_r", Vec3::new(0.0, -0.24, 0.0)),
        ],
        &[],
    );

    // Upper y-connector: stem up, arms opening downward across y.
    let half_span = SADDLE_JOINT_SPAN / 2.0;
    let y_mass = SADDLE_JOINT_MASS / 2.0;
    let arm_len = Vec3::new(0.0, half_span, -0.14).norm();
    let stem_len = 0.12;
    let member = y_mass / (2.0 * arm_len + stem_len);
    b.body(
        "saddle_a",
        false,
        y_mass,
        &[
            ("stem", Vec3::new(0.0, 0.0, -0.04)),
            ("c", Vec3::new(0.0, 0.0, -0.16)),
            ("tip_l", Vec3::new(0.0, half_span, -0.30)),
            ("tip_r", Vec3::new(0.0, -half_span, -0.30)),
        ],
        &[
            ("stem", "c", member * stem_len),
            ("c", "tip_l", member * arm_len),
            ("c", "tip_r", member * arm_len),
        ],
    );
    // Lower y-connector: perpendicular, arms opening upward across x,
    // slung under the upper connector's tips so the four lacing cables
    // stretch — and so carry load — when the arm below pulls down.
    b.body(
        "saddle_b",
        false,
        y_mass,
        &[
            ("tip_f", Vec3::new(half_span, 0.0, -0.42)),
            ("tip_b", Vec3::new(-half_span, 0.0, -0.42)),
            ("c", Vec3::new(0.0, 0.0, -0.56)),
            ("stem", Vec3::new(0.0, 0.0, -0.68)),
        ],
        &[
            ("c", "stem", member * stem_len),
            ("c", "tip_f", member * arm_len),
            ("c", "tip_b", member * arm_len),
        ],
    );

    // Humerus with a swivel wing bar at the head (the shoulder yaw lever)
    // and the elbow end-cap cross at the distal end.
    let head_z = -0.73;
    let distal_z = head_z - SADDLE_HUMERUS_LENGTH;
    let cross_z = distal_z + 0.07;
    let yoke_half = 0.05;
    let bar_m = 0.0015;
    let wing_m = 0.002;
    b.body(
        "humerus",
        false,
        SADDLE_HUMERUS_MASS,
        &[
            ("head", Vec3::new(0.0, 0.0, head_z)),
            ("wing_f", Vec3::new(0.06, 0.0, head_z - 0.04)),
            ("wing_b", Vec3::new(-0.06, 0.0, head_z - 0.04)),
            ("mid", Vec3::new(0.0, 0.0, head_z - 0.265)),
            ("distal", Vec3::new(0.0, 0.0, distal_z)),
            ("yoke_l", Vec3::new(0.0, yoke_half, cross_z)),
            ("yoke_r", Vec3::new(0.0, -yoke_half, cross_z)),
            ("spur_f", Vec3::new(yoke_half, 0.0, cross_z)),
            ("spur_b", Vec3::new(-yoke_half, 0.0, cross_z)),
        ],
        &[
            ("head", "distal", SADDLE_HUMERUS_MASS - 2.0 * bar_m - wing_m),
            ("yoke_l", "yoke_r", bar_m),
            ("spur_f", "spur_b", bar_m),
            ("wing_f", "wing_b", wing_m),
        ],
    );

    let flex = SADDLE_REST_FLEXION_RAD;
    let axis = Vec3::new(flex.sin(), 0.0, -flex.cos());
    build_elbow_parts(
        &mut b,
        "humerus",
        "head",
        Vec3::new(0.0, 0.0, head_z),
        Vec3::new(0.0, 0.0, distal_z - 0.05),
        axis,
        SADDLE_FOREARM_MASS,
        SADDLE_FOREARM_LENGTH,
        SADDLE_OLECRANON_MASS,
        SADDLE_OLECRANON_LENGTH,
    );

    // Upper sling. The guy pair onto the stem kills the connector's rock
    // about its own tip line, which no tip cable can see.
    b.passive("sus_c", &[("platform", "c"), ("saddle_a", "stem")]);
    b.passive("sus_l", &[("platform", "py_l"), ("saddle_a", "tip_l")]);
    b.passive("sus_r", &[("platform", "py_r"), ("saddle_a", "tip_r")]);
    b.passive("sus_lf", &[("platform", "px_f"), ("saddle_a", "tip_l")]);
    b.passive("sus_lb", &[("platform", "px_b"), ("saddle_a", "tip_l")]);
    b.passive("sus_rf", &[("platform", "px_f"), ("saddle_a", "tip_r")]);
    b.passive("sus_rb", &[("platform", "px_b"), ("saddle_a", "tip_r")]);
    b.passive("guy_f", &[("platform", "px_f"), ("saddle_a", "stem")]);
    b.passive("guy_b", &[("platform", "px_b"), ("saddle_a", "stem")]);
    // The saddle lacing: four cables holding the perpendicular connectors
    // together in tension. Heavier damping here and in the capsule below:
    // these are the top links of the hanging chain, the only place the
    // arm's lowest swing mode dissipates.
    b.passive_damped("lace_a", &[("saddle_b", "tip_f"), ("saddle_a", "tip_l")], SADDLE_DAMPING);
    b.passive_damped("lace_b", &[("saddle_b", "tip_f"), ("saddle_a", "tip_r")], SADDLE_DAMPING);
    b.passive_damped("lace_c", &[("saddle_b", "tip_b"), ("saddle_a", "tip_l")], SADDLE_DAMPING);
    b.passive_damped("lace_d", &[("saddle_b", "tip_b"), ("saddle_a", "tip_r")], SADDLE_DAMPING);
    // Glenohumeral capsule and stays. The four diagonal stays run from
    // the lower connector's tips (on the x axis) to the elbow yoke tips
    // (on the y axis): they cross the arm axis, so humeral twist — the
    // shoulder yaw DOF — meets first-order elastic centering and damping
    // while staying compliant.
    b.passive_damped("caps_c", &[("saddle_b", "stem"), ("humerus", "head")], SADDLE_DAMPING);
    b.passive_damped("caps_f", &[("saddle_b", "tip_f"), ("humerus", "wing_f")], SADDLE_DAMPING);
    b.passive_damped("caps_b", &[("saddle_b", "tip_b"), ("humerus", "wing_b")], SADDLE_DAMPING);
    b.passive_damped("stay_a", &[("saddle_b", "tip_f"), ("humerus", "yoke_l")], SADDLE_DAMPING);
    b.passive_damped("stay_b", &[("saddle_b", "tip_f"), ("humerus", "yoke_r")], SADDLE_DAMPING);
    b.passive_damped("stay_c", &[("saddle_b", "tip_b"), ("humerus", "yoke_l")], SADDLE_DAMPING);
    b.passive_damped("stay_d", &[("saddle_b", "tip_b"), ("humerus", "yoke_r")], SADDLE_DAMPING);
    b.passive_damped("stay_f", &[("saddle_b", "tip_f"), ("humerus", "mid")], SADDLE_DAMPING);
    b.passive_damped("stay_g", &[("saddle_b", "tip_b"), ("humerus", "mid")], SADDLE_DAMPING);

    b.active("shoulder_pitch", &[("platform", "px_f"), ("humerus", "mid")]);
    b.active("shoulder_yaw_l", &[("platform", "py_l"), ("humerus", "wing_f")]);
    b.active("shoulder_yaw_r", &[("platform", "py_r"), ("humerus", "wing_f")]);

    b.finish("saddle_arm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_structure, CableKind};
    use approx::assert_relative_eq;

    #[test]
    fn constructors_emit_valid_structures() {
        for s in [build_elbow_joint(), build_tetrahedrons_arm(), build_saddle_arm()] {
            assert_eq!(validate_structure(&s), vec![], "structure {}", s.name);
        }
    }

    #[test]
    fn elbow_has_one_pitch_winch_and_a_yaw_pair() {
        let s = build_elbow_joint();
        let active: Vec<_> = s.cables.iter().filter(|c| c.is_active()).collect();
        assert_eq!(active.len(), 3);
        assert_eq!(s.antagonistic_pairs(), vec![(
            "elbow_yaw_l".to_string(),
            "elbow_yaw_r".to_string()
        )]);
        let groups = s.active_groups();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "elbow_pitch");
        assert_eq!(groups[1].0, "elbow_yaw");
    }

    #[test]
    fn every_compression_body_connects_at_least_three_cables() {
        for s in [build_elbow_joint(), build_tetrahedrons_arm(), build_saddle_arm()] {
            for body in &s.bodies {
                let touching = s
                    .cables
                    .iter()
                    .filter(|c| c.route.iter().any(|r| r.body == body.name))
                    .count();
                assert!(
                    touching >= 3,
                    "{}: body {} has only {touching} cables",
                    s.name,
                    body.name
                );
            }
        }
    }

    #[test]
    fn tetra_arm_component_catalog() {
        let s = build_tetrahedrons_arm();
        let forearm = s.body("forearm").unwrap();
        assert_relative_eq!(forearm.mass, 0.0101, max_relative = 1e-9);
        assert_relative_eq!(forearm.principal_length(), 0.586, max_relative = 1e-4);
        let humerus = s.body("humerus").unwrap();
        assert_relative_eq!(humerus.mass, 0.0366, max_relative = 1e-9);
        assert_relative_eq!(humerus.principal_length(), 0.762, max_relative = 1e-4);
        assert_relative_eq!(s.suspended_mass(), 0.0775, epsilon = 1e-6);
    }

    #[test]
    fn saddle_arm_component_catalog() {
        let s = build_saddle_arm();
        let audit = s.component_audit();
        let saddle = audit.iter().find(|a| a.component == "saddle").unwrap();
        assert_relative_eq!(saddle.mass, 0.0361, max_relative = 1e-9);
        assert_relative_eq!(saddle.length, 0.54, max_relative = 1e-4);
        assert_relative_eq!(s.suspended_mass(), 0.0894, epsilon = 1e-6);
    }

    #[test]
    fn arms_expose_four_active_groups_with_passive_support() {
        for s in [build_tetrahedrons_arm(), build_saddle_arm()] {
            assert_eq!(s.active_groups().len(), 4, "{}", s.name);
            let passive = s
                .cables
                .iter()
                .filter(|c| c.kind == CableKind::Passive)
                .count();
            assert!(passive >= 2, "{}: want passive cables per joint", s.name);
        }
        let tetra_groups = build_tetrahedrons_arm().active_groups();
        let names: Vec<_> = tetra_groups.iter().map(|(g, _)| g.as_str()).collect();
        assert!(names.contains(&"shoulder_lift"));
        let saddle_groups = build_saddle_arm().active_groups();
        let names: Vec<_> = saddle_groups.iter().map(|(g, _)| g.as_str()).collect();
        assert!(names.contains(&"shoulder_yaw"));
    }

    #[test]
    fn composite_inertia_is_positive_definite_everywhere() {
        for s in [build_elbow_joint(), build_tetrahedrons_arm(), build_saddle_arm()] {
            for body in s.bodies.iter().filter(|b| !b.fixed) {
                assert!(
                    body.inertia.cholesky().is_some(),
                    "{}: {} inertia not PD",
                    s.name,
                    body.name
                );
            }
        }
    }
}
