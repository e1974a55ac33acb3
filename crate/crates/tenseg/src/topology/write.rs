//! `.tsg` serializer. Deterministic: definition order, LF endings, floats
//! in shortest round-trip form so `parse(serialize(s)) == s` exactly.

use super::is_identifier;
use crate::math::fmt_exact;
use crate::model::{
    sphere_inertia, validate_structure, CableKind, RigidBodySpec, StructureDef,
    DEFAULT_SPHERE_RADIUS,
};
use std::fmt;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum SerializeError {
    /// The structure breaks its own invariants; fix those first.
    Invalid(Vec<crate::model::Violation>),
    /// A name contains characters the format cannot carry.
    BadIdentifier(String),
    /// The body's inertia/center of mass cannot be reproduced from its
    /// member rods (the file format never stores tensors directly).
    OpaqueInertia(String),
}

impl fmt::Display for SerializeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SerializeError::Invalid(v) => write!(f, "structure is invalid ({} violations)", v.len()),
            SerializeError::BadIdentifier(s) => write!(f, "`{s}` is not a writable identifier"),
            SerializeError::OpaqueInertia(b) => write!(
                f,
                "body `{b}` has an inertia that is not derived from member rods"
            ),
        }
    }
}

impl std::error::Error for SerializeError {}

fn check_reproducible(body: &RigidBodySpec) -> Result<(), SerializeError> {
    let rebuilt = RigidBodySpec::from_parts(
        body.name.clone(),
        body.fixed,
        body.mass,
        body.nodes.clone(),
        body.rods.clone(),
    );
    let com_ok = (rebuilt.com - body.com).norm()
        <= 1e-12 * body.com.norm().max(1.0);
    let scale = body.inertia.norm().max(sphere_inertia(body.mass, DEFAULT_SPHERE_RADIUS).norm());
    let inertia_ok = (rebuilt.inertia - body.inertia).norm() <= 1e-9 * scale;
    if com_ok && inertia_ok {
        Ok(())
    } else {
        Err(SerializeError::OpaqueInertia(body.name.clone()))
    }
}

/// Render a valid structure as `.tsg` text. The output re-parses to a
/// structurally equal [`StructureDef`]; two calls yield identical bytes.
pub fn serialize_structure(s: &StructureDef) -> Result<String, SerializeError> {
    let violations = validate_structure(s);
    if !violations.is_empty() {
        return Err(SerializeError::Invalid(violations));
    }
    let ident = |name: &str| -> Result<(), SerializeError> {
        if is_identifier(name) {
            Ok(())
        } else {
            Err(SerializeError::BadIdentifier(name.to_string()))
        }
    };
    ident(&s.name)?;

    let mut out = String::new();
    writeln!(out, "structure {}", s.name).unwrap();
    writeln!(
        out,
        "gravity {} {} {}",
        fmt_exact(s.gravity.x),
        fmt_exact(s.gravity.y),
        fmt_exact(s.gravity.z)
    )
    .unwrap();

    for body in &s.bodies {
        ident(&body.name)?;
        check_reproducible(body)?;
        let fixed = if body.fixed { " fixed" } else { "" };
        writeln!(out, "body {} mass={}{fixed}", body.name, fmt_exact(body.mass)).unwrap();
        for node in &body.nodes {
            ident(&node.id)?;
            writeln!(
                out,
                "  node {} {} {} {}",
                node.id,
                fmt_exact(node.local_position.x),
                fmt_exact(node.local_position.y),
                fmt_exact(node.local_position.z)
            )
            .unwrap();
        }
        for rod in &body.rods {
            writeln!(
                out,
                "  rod {} {} mass={}",
                rod.node_a,
                rod.node_b,
                fmt_exact(rod.mass)
            )
            .unwrap();
        }
    }

    for cable in &s.cables {
        ident(&cable.id)?;
        writeln!(
            out,
            "cable {} kind={} k={} b={} rest={} min={} max={}",
            cable.id,
            cable.kind,
            fmt_exact(cable.stiffness_k),
            fmt_exact(cable.damping_b),
            fmt_exact(cable.rest_length),
            fmt_exact(cable.min_length),
            fmt_exact(cable.max_length)
        )
        .unwrap();
        let route: Vec<String> = cable.route.iter().map(|r| r.to_string()).collect();
        writeln!(out, "  route {}", route.join(" ")).unwrap();
        if let (CableKind::Active, Some(act)) = (cable.kind, &cable.actuator) {
            writeln!(
                out,
                "  actuator vmax={} amax={}",
                fmt_exact(act.target_velocity),
                fmt_exact(act.max_accel)
            )
            .unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm};
    use crate::topology::parse_structure;

    #[test]
    fn builtins_round_trip_exactly() {
        for s in [build_elbow_joint(), build_tetrahedrons_arm(), build_saddle_arm()] {
            let text = serialize_structure(&s).unwrap();
            let back = parse_structure(&text).unwrap();
            assert_eq!(back, s, "round trip of {}", s.name);
        }
    }

    #[test]
    fn serialization_is_deterministic() {
        let s = build_tetrahedrons_arm();
        assert_eq!(serialize_structure(&s).unwrap(), serialize_structure(&s).unwrap());
    }

    #[test]
    fn gravity_renders_plainly() {
        let s = build_elbow_joint();
        let text = serialize_structure(&s).unwrap();
        assert!(text.contains("gravity 0 0 -9.81\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn hand_built_inertia_is_rejected() {
        let mut s = build_elbow_joint();
        s.bodies[1].inertia[(0, 0)] *= 3.0;
        match serialize_structure(&s) {
            Err(SerializeError::OpaqueInertia(name)) => assert_eq!(name, s.bodies[1].name),
            other => panic!("expected OpaqueInertia, got {other:?}"),
        }
    }

    #[test]
    fn invalid_structure_is_rejected() {
        let mut s = build_elbow_joint();
        s.cables[0].stiffness_k = -1.0;
        assert!(matches!(
            serialize_structure(&s),
            Err(SerializeError::Invalid(_))
        ));
    }
}
