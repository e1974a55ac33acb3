//! Dynamics and experiment toolkit for cable-driven tensegrity manipulators.
//!
//! A tensegrity manipulator is a set of rigid compression elements (rods and
//! fused rod frames) suspended in a network of elastic tension elements.
//! Passive cables give the structure its shape and compliance; active cables
//! are winch-driven and realize the joints' degrees of freedom.
//!
//! The crate is organized around the lifecycle of an experiment:
//!
//! * [`model`] — structure definitions, invariant checks, and the built-in
//!   desk-scale models (standalone elbow, tetrahedrons arm, saddle arm).
//! * [`topology`] — the `.tsg` structure file format: parser and serializer.
//! * [`dynamics`] — cable/gravity/contact forces, semi-implicit rigid-body
//!   integration, and equilibrium settling.
//! * [`control`] — controller programs (sinusoids, antagonistic pairs,
//!   holds) and the winch rate/acceleration limiter.
//! * [`lab`] — tracking, joint angles, range of motion, workspace area,
//!   compliance-under-contact, and seeded repeatability studies.
//! * [`report`] — the plain-text `key: value` report document writer.
//!
//! Distinct simulations are independent value states and may run in
//! parallel; nothing in the crate uses interior mutability.

pub mod control;
pub mod dynamics;
pub mod lab;
pub mod math;
pub mod model;
pub mod report;
pub mod topology;

pub use math::{Mat3, Quat, Vec3};
pub use model::{
    build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm, validate_structure, CableKind,
    CableSpec, RigidBodySpec, StructureDef,
};
pub use topology::{parse_structure, serialize_structure, ParseError};
