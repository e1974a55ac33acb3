//! Structure definitions: rigid compression elements, the cable network,
//! and the invariants every runnable structure must satisfy.

mod calibration;
mod gallery;
mod inertia;

pub use gallery::{build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm};
pub use inertia::{sphere_inertia, thin_rod_inertia, AXIAL_INERTIA_FLOOR, DEFAULT_SPHERE_RADIUS};

use crate::math::{Mat3, Vec3};
use std::collections::BTreeSet;
use std::fmt;

/// A cable attachment point, given in the body frame.
///
/// On the hardware these are the metal hoops bolted to the rod end caps;
/// here they are just named points rigidly carried by the body.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyNode {
    pub id: String,
    pub local_position: Vec3,
}

/// One straight member of a compression element, spanning two of the body's
/// nodes. Member rods determine the composite mass distribution: the body's
/// center of mass and inertia tensor are assembled from them.
#[derive(Debug, Clone, PartialEq)]
pub struct Rod {
    pub node_a: String,
    pub node_b: String,
    pub mass: f64,
}

/// A rigid compression element.
///
/// `com` and `inertia` are derived quantities: bodies built through
/// [`RigidBodySpec::from_parts`] get them from the member `rods`
/// (thin-rod inertia transported to the common center of mass), or from a
/// small uniform sphere when no rods are given. `fixed` bodies are anchors —
/// the motor platform the arms hang from — and are never integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBodySpec {
    pub name: String,
    pub nodes: Vec<BodyNode>,
    pub mass: f64,
    pub com: Vec3,
    pub inertia: Mat3,
    pub fixed: bool,
    pub rods: Vec<Rod>,
}

impl RigidBodySpec {
    /// Assemble a body from nodes and member rods.
    ///
    /// With rods present, the center of mass is the mass-weighted mean of
    /// the rod centers and the inertia is the parallel-axis sum of the
    /// members' thin-rod tensors. Without rods the body is treated as a
    /// uniform sphere of radius [`DEFAULT_SPHERE_RADIUS`] centered on the
    /// node centroid.
    pub fn from_parts(
        name: impl Into<String>,
        fixed: bool,
        mass: f64,
        nodes: Vec<BodyNode>,
        rods: Vec<Rod>,
    ) -> Self {
        let name = name.into();
        let node_pos = |id: &str| -> Vec3 {
            nodes
                .iter()
                .find(|n| n.id == id)
                .unwrap_or_else(|| panic!("body `{name}`: rod references unknown node `{id}`"))
                .local_position
        };
        let (com, inertia) = if rods.is_empty() {
            let centroid = nodes.iter().map(|n| n.local_position).sum::<Vec3>()
                / (nodes.len().max(1) as f64);
            (centroid, sphere_inertia(mass, DEFAULT_SPHERE_RADIUS))
        } else {
            let members: Vec<(Vec3, Vec3, f64)> = rods
                .iter()
                .map(|r| (node_pos(&r.node_a), node_pos(&r.node_b), r.mass))
                .collect();
            inertia::composite_from_rods(&members)
        };
        RigidBodySpec {
            name,
            nodes,
            mass,
            com,
            inertia,
            fixed,
            rods,
        }
    }

    pub fn node(&self, id: &str) -> Option<&BodyNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Largest distance between any two nodes; the element's principal
    /// dimension, used by the component audit.
    pub fn principal_length(&self) -> f64 {
        let mut best = 0.0_f64;
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                best = best.max((a.local_position - b.local_position).norm());
            }
        }
        best
    }

    /// Largest node distance from the center of mass (settle criterion scale).
    pub fn characteristic_length(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| (n.local_position - self.com).norm())
            .fold(0.0, f64::max)
    }
}

/// Winch limits for one active cable: cruise speed of cable lengthening and
/// the motor's acceleration bound on that rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorSpec {
    pub target_velocity: f64,
    pub max_accel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CableKind {
    Passive,
    Active,
}

impl fmt::Display for CableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CableKind::Passive => write!(f, "passive"),
            CableKind::Active => write!(f, "active"),
        }
    }
}

/// `body.node` reference used by cable routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRef {
    pub body: String,
    pub node: String,
}

impl NodeRef {
    pub fn new(body: impl Into<String>, node: impl Into<String>) -> Self {
        NodeRef {
            body: body.into(),
            node: node.into(),
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.body, self.node)
    }
}

/// One tension element.
///
/// The route is an ordered chain of node references; interior entries are
/// frictionless via-points (hoops), so one tension acts along the whole
/// route. Elongation of the cable beyond its effective rest length produces
/// tension `k·X + b·V`, clamped at zero — cables cannot push.
#[derive(Debug, Clone, PartialEq)]
pub struct CableSpec {
    pub id: String,
    pub route: Vec<NodeRef>,
    pub stiffness_k: f64,
    pub damping_b: f64,
    pub rest_length: f64,
    pub min_length: f64,
    pub max_length: f64,
    pub kind: CableKind,
    pub actuator: Option<ActuatorSpec>,
}

impl CableSpec {
    pub fn is_active(&self) -> bool {
        self.kind == CableKind::Active
    }
}

/// Full topology of one structure: bodies, cable network, gravity.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureDef {
    pub name: String,
    pub bodies: Vec<RigidBodySpec>,
    pub cables: Vec<CableSpec>,
    pub gravity: Vec3,
}

impl StructureDef {
    pub fn body(&self, name: &str) -> Option<&RigidBodySpec> {
        self.bodies.iter().find(|b| b.name == name)
    }

    pub fn body_index(&self, name: &str) -> Option<usize> {
        self.bodies.iter().position(|b| b.name == name)
    }

    pub fn cable(&self, id: &str) -> Option<&CableSpec> {
        self.cables.iter().find(|c| c.id == id)
    }

    /// Indices of active cables, in definition order. `WorldState` commanded
    /// lengths and rates follow this order.
    pub fn active_cable_indices(&self) -> Vec<usize> {
        self.cables
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_active())
            .map(|(i, _)| i)
            .collect()
    }

    /// Active cable groups in definition order. Cables whose ids differ only
    /// by a trailing `_l`/`_r`/`_a`/`_b`/`_c` suffix belong to one group and
    /// realize one degree of freedom (e.g. `elbow_yaw_l` + `elbow_yaw_r`).
    pub fn active_groups(&self) -> Vec<(String, Vec<String>)> {
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        for cable in self.cables.iter().filter(|c| c.is_active()) {
            let g = group_name(&cable.id).to_string();
            match groups.iter_mut().find(|(name, _)| *name == g) {
                Some((_, members)) => members.push(cable.id.clone()),
                None => groups.push((g, vec![cable.id.clone()])),
            }
        }
        groups
    }

    /// Active groups with exactly two members: antagonistic winch pairs.
    pub fn antagonistic_pairs(&self) -> Vec<(String, String)> {
        self.active_groups()
            .into_iter()
            .filter(|(_, m)| m.len() == 2)
            .map(|(_, m)| (m[0].clone(), m[1].clone()))
            .collect()
    }

    /// Component mass/length audit. Bodies sharing a group name (same
    /// suffix convention as cables, e.g. `saddle_a`/`saddle_b`) are one
    /// catalog component; mass is summed and the principal length is the
    /// largest single-body node separation in the group.
    pub fn component_audit(&self) -> Vec<ComponentAudit> {
        let mut out: Vec<ComponentAudit> = Vec::new();
        for body in &self.bodies {
            let comp = group_name(&body.name).to_string();
            match out.iter_mut().find(|a| a.component == comp) {
                Some(a) => {
                    a.mass += body.mass;
                    a.length = a.length.max(body.principal_length());
                    a.fixed &= body.fixed;
                }
                None => out.push(ComponentAudit {
                    component: comp,
                    mass: body.mass,
                    length: body.principal_length(),
                    fixed: body.fixed,
                }),
            }
        }
        out
    }

    /// Total mass carried by the tension network (fixed anchors excluded).
    pub fn suspended_mass(&self) -> f64 {
        self.bodies
            .iter()
            .filter(|b| !b.fixed)
            .map(|b| b.mass)
            .sum()
    }
}

/// One row of [`StructureDef::component_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentAudit {
    pub component: String,
    pub mass: f64,
    pub length: f64,
    pub fixed: bool,
}

/// Strip a trailing one-letter group suffix (`_l`, `_r`, `_a`, `_b`, `_c`).
pub fn group_name(id: &str) -> &str {
    match id.rsplit_once('_') {
        Some((stem, suffix))
            if !stem.is_empty() && matches!(suffix, "l" | "r" | "a" | "b" | "c") =>
        {
            stem
        }
        _ => id,
    }
}

/// A broken structure invariant. Violations are data, not failures; an
/// empty list is the definition of a valid structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// The offending element, e.g. `cable c1` or `body arm`.
    pub element: String,
    /// The rule it breaks.
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.rule)
    }
}

fn finite3(v: &Vec3) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Check every structure invariant; returns one entry per broken rule.
pub fn validate_structure(s: &StructureDef) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |element: &str, rule: String| {
        out.push(Violation {
            element: element.to_string(),
            rule,
        })
    };

    if !finite3(&s.gravity) {
        push("structure", "gravity must be finite".into());
    }
    if !s.bodies.iter().any(|b| b.fixed) && s.gravity.norm() != 0.0 {
        push(
            "structure",
            "needs at least one fixed body or zero gravity".into(),
        );
    }

    let mut body_names = BTreeSet::new();
    for body in &s.bodies {
        let el = format!("body {}", body.name);
        if !body_names.insert(body.name.clone()) {
            push(&el, "duplicate body name".into());
        }
        if body.nodes.is_empty() {
            push(&el, "needs at least one node".into());
        }
        let mut node_ids = BTreeSet::new();
        for node in &body.nodes {
            if !node_ids.insert(node.id.clone()) {
                push(&el, format!("duplicate node id `{}`", node.id));
            }
            if !finite3(&node.local_position) {
                push(&el, format!("node `{}` position must be finite", node.id));
            }
        }
        if !body.fixed {
            if !(body.mass > 0.0) || !body.mass.is_finite() {
                push(&el, "mass must be positive".into());
            }
            if !body.inertia.iter().all(|x| x.is_finite())
                || body.inertia.cholesky().is_none()
            {
                push(&el, "inertia must be positive-definite".into());
            }
        }
        if !finite3(&body.com) {
            push(&el, "center of mass must be finite".into());
        }
        for rod in &body.rods {
            for end in [&rod.node_a, &rod.node_b] {
                if body.node(end).is_none() {
                    push(&el, format!("rod references unknown node `{end}`"));
                }
            }
            if !(rod.mass > 0.0) || !rod.mass.is_finite() {
                push(&el, "rod mass must be positive".into());
            }
        }
        if !body.rods.is_empty() {
            let sum: f64 = body.rods.iter().map(|r| r.mass).sum();
            if (sum - body.mass).abs() > 1e-9 * body.mass.abs().max(1.0) {
                push(&el, "rod masses must sum to the body mass".into());
            }
        }
    }

    let mut cable_ids = BTreeSet::new();
    for cable in &s.cables {
        let el = format!("cable {}", cable.id);
        if !cable_ids.insert(cable.id.clone()) {
            push(&el, "duplicate cable id".into());
        }
        if !(cable.stiffness_k > 0.0) || !cable.stiffness_k.is_finite() {
            push(&el, "stiffness k must be positive".into());
        }
        if !(cable.damping_b >= 0.0) || !cable.damping_b.is_finite() {
            push(&el, "damping b must be non-negative".into());
        }
        let (min, rest, max) = (cable.min_length, cable.rest_length, cable.max_length);
        if !(min > 0.0 && min <= rest && rest <= max) || !(min.is_finite() && max.is_finite()) {
            push(&el, "lengths must satisfy 0 < min <= rest <= max".into());
        }
        if cable.route.len() < 2 {
            push(&el, "route needs at least two nodes".into());
        }
        for pair in cable.route.windows(2) {
            if pair[0] == pair[1] {
                push(&el, format!("consecutive route entries repeat `{}`", pair[0]));
            }
        }
        for node_ref in &cable.route {
            let resolved = s
                .body(&node_ref.body)
                .and_then(|b| b.node(&node_ref.node))
                .is_some();
            if !resolved {
                push(&el, format!("route references unknown node `{node_ref}`"));
            }
        }
        match (&cable.kind, &cable.actuator) {
            (CableKind::Active, None) => push(&el, "active cable needs an actuator".into()),
            (CableKind::Passive, Some(_)) => {
                push(&el, "passive cable must not have an actuator".into())
            }
            (CableKind::Active, Some(act)) => {
                if !(act.target_velocity > 0.0 && act.target_velocity.is_finite()) {
                    push(&el, "actuator vmax must be positive".into());
                }
                if !(act.max_accel > 0.0 && act.max_accel.is_finite()) {
                    push(&el, "actuator amax must be positive".into());
                }
            }
            (CableKind::Passive, None) => {}
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_body_one_cable() -> StructureDef {
        let base = RigidBodySpec::from_parts(
            "base",
            true,
            1.0,
            vec![BodyNode {
                id: "a".into(),
                local_position: Vec3::new(0.0, 0.0, 1.0),
            }],
            vec![],
        );
        let bob = RigidBodySpec::from_parts(
            "bob",
            false,
            0.5,
            vec![BodyNode {
                id: "p".into(),
                local_position: Vec3::zeros(),
            }],
            vec![],
        );
        StructureDef {
            name: "pendulum".into(),
            bodies: vec![base, bob],
            cables: vec![CableSpec {
                id: "c1".into(),
                route: vec![NodeRef::new("base", "a"), NodeRef::new("bob", "p")],
                stiffness_k: 100.0,
                damping_b: 1.0,
                rest_length: 0.9,
                min_length: 0.5,
                max_length: 1.5,
                kind: CableKind::Passive,
                actuator: None,
            }],
            gravity: Vec3::new(0.0, 0.0, -9.81),
        }
    }

    #[test]
    fn well_formed_structure_has_no_violations() {
        assert_eq!(validate_structure(&two_body_one_cable()), vec![]);
    }

    #[test]
    fn zero_rest_length_is_one_violation_naming_the_cable() {
        let mut s = two_body_one_cable();
        s.cables[0].rest_length = 0.0;
        s.cables[0].min_length = 0.0;
        let v = validate_structure(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].element, "cable c1");
    }

    #[test]
    fn unresolved_route_reference_is_reported() {
        let mut s = two_body_one_cable();
        s.cables[0].route[1] = NodeRef::new("arm", "z9");
        let v = validate_structure(&s);
        assert_eq!(v.len(), 1);
        assert!(v[0].rule.contains("arm.z9"));
    }

    #[test]
    fn free_floating_structure_needs_zero_gravity() {
        let mut s = two_body_one_cable();
        s.bodies[0].fixed = false;
        assert_eq!(validate_structure(&s).len(), 1);
        s.gravity = Vec3::zeros();
        assert_eq!(validate_structure(&s), vec![]);
    }

    #[test]
    fn group_suffix_convention() {
        assert_eq!(group_name("elbow_yaw_l"), "elbow_yaw");
        assert_eq!(group_name("elbow_yaw_r"), "elbow_yaw");
        assert_eq!(group_name("saddle_a"), "saddle");
        assert_eq!(group_name("shoulder_lift"), "shoulder_lift");
        assert_eq!(group_name("forearm"), "forearm");
    }
}
