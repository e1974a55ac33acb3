//! Controller programs and the winch actuation limiter.
//!
//! A program assigns each active cable at most one role: a sinusoidal
//! channel, membership in an antagonistic pair (one sine drives cable `a`,
//! cable `b` gets the complement against a constant total), or a constant
//! hold. Active cables a program never mentions hold whatever length the
//! winch currently commands.
//!
//! Programs produce *target* lengths; the limiter turns targets into
//! commanded lengths the motor could actually follow: rate capped at the
//! actuator's target velocity, rate changes capped by its acceleration
//! bound, braking into targets and hard length bounds (a trapezoidal
//! profile), landing exactly and staying.

mod parse;

pub use parse::parse_program;

use crate::dynamics::TargetMap;
use crate::model::{ActuatorSpec, CableKind, StructureDef};
use std::f64::consts::TAU;

/// Sinusoidal winding program for one cable.
#[derive(Debug, Clone, PartialEq)]
pub struct SineChannel {
    pub cable_id: String,
    /// m; the excursion midpoint, usually the settled commanded length.
    pub center: f64,
    /// m.
    pub amplitude: f64,
    /// s.
    pub period: f64,
    /// rad.
    pub phase: f64,
}

impl SineChannel {
    pub fn value_at(&self, t: f64) -> f64 {
        self.center + self.amplitude * (TAU * t / self.period + self.phase).sin()
    }
}

/// Two winches wound complementarily: as one shortens the other lengthens,
/// keeping the commanded sum at `total_length` — the flexor/extensor
/// dynamic of a muscle group on a shared spool budget.
#[derive(Debug, Clone, PartialEq)]
pub struct AntagonisticPair {
    pub cable_a: String,
    pub cable_b: String,
    pub total_length: f64,
    /// Excursion source; drives `cable_a`, `cable_b` takes the complement.
    pub source: SineChannel,
}

/// Time-parameterized target rest lengths for the active cables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControllerProgram {
    pub channels: Vec<SineChannel>,
    pub pairs: Vec<AntagonisticPair>,
    pub holds: Vec<(String, f64)>,
}

impl ControllerProgram {
    /// Program that leaves every winch where it is.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Structural problems with this program against a structure; empty
    /// means well-formed.
    pub fn validate(&self, structure: &StructureDef) -> Vec<String> {
        let mut issues = Vec::new();
        let mut roles: Vec<&str> = Vec::new();
        let claim = |id: &str, issues: &mut Vec<String>, roles: &mut Vec<&str>| {
            if roles.contains(&id) {
                issues.push(format!("cable `{id}` has more than one controller role"));
            }
        };
        let cable_check = |id: &str, issues: &mut Vec<String>| -> bool {
            match structure.cable(id) {
                None => {
                    issues.push(format!("unknown cable `{id}`"));
                    false
                }
                Some(c) if c.kind != CableKind::Active => {
                    issues.push(format!("cable `{id}` is passive; only active cables are controllable"));
                    false
                }
                Some(_) => true,
            }
        };
        let sine_check = |ch: &SineChannel, issues: &mut Vec<String>| {
            if !(ch.period > 0.0) {
                issues.push(format!("channel `{}`: period must be positive", ch.cable_id));
            }
            if ch.amplitude < 0.0 {
                issues.push(format!("channel `{}`: amplitude must be non-negative", ch.cable_id));
            }
            if let Some(c) = structure.cable(&ch.cable_id) {
                if ch.center - ch.amplitude < c.min_length - 1e-12
                    || ch.center + ch.amplitude > c.max_length + 1e-12
                {
                    issues.push(format!(
                        "channel `{}`: excursion [{}, {}] leaves cable bounds [{}, {}]",
                        ch.cable_id,
                        ch.center - ch.amplitude,
                        ch.center + ch.amplitude,
                        c.min_length,
                        c.max_length
                    ));
                }
            }
        };

        for ch in &self.channels {
            if cable_check(&ch.cable_id, &mut issues) {
                sine_check(ch, &mut issues);
            }
            claim(&ch.cable_id, &mut issues, &mut roles);
            roles.push(&ch.cable_id);
        }
        for pair in &self.pairs {
            let a_ok = cable_check(&pair.cable_a, &mut issues);
            let b_ok = cable_check(&pair.cable_b, &mut issues);
            if pair.cable_a == pair.cable_b {
                issues.push(format!("pair cables must differ, got `{}` twice", pair.cable_a));
            }
            if pair.source.cable_id != pair.cable_a {
                issues.push(format!(
                    "pair source channel drives `{}`, expected `{}`",
                    pair.source.cable_id, pair.cable_a
                ));
            }
            if a_ok {
                sine_check(&pair.source, &mut issues);
            }
            if a_ok && b_ok {
                let min_a = structure.cable(&pair.cable_a).unwrap().min_length;
                let min_b = structure.cable(&pair.cable_b).unwrap().min_length;
                if pair.total_length <= min_a + min_b {
                    issues.push(format!(
                        "pair total {} must exceed the cables' combined minimum {}",
                        pair.total_length,
                        min_a + min_b
                    ));
                }
            }
            claim(&pair.cable_a, &mut issues, &mut roles);
            roles.push(&pair.cable_a);
            claim(&pair.cable_b, &mut issues, &mut roles);
            roles.push(&pair.cable_b);
        }
        for (id, len) in &self.holds {
            if cable_check(id, &mut issues) {
                let c = structure.cable(id).unwrap();
                if *len < c.min_length || *len > c.max_length {
                    issues.push(format!("hold `{id}`: length {len} outside cable bounds"));
                }
            }
            claim(id, &mut issues, &mut roles);
            roles.push(id);
        }
        issues
    }
}

/// Evaluate a program: target length per mentioned cable at time `t`.
/// Pure; pair members satisfy `target_a + target_b = total` exactly.
pub fn targets_at(program: &ControllerProgram, t: f64) -> TargetMap {
    let mut out = TargetMap::new();
    for ch in &program.channels {
        out.insert(ch.cable_id.clone(), ch.value_at(t));
    }
    for pair in &program.pairs {
        let a = pair.source.value_at(t);
        out.insert(pair.cable_a.clone(), a);
        out.insert(pair.cable_b.clone(), pair.total_length - a);
    }
    for (id, len) in &program.holds {
        out.insert(id.clone(), *len);
    }
    out
}

/// Advance one winch a single step toward `target`.
///
/// The new rate moves toward the rate that would reach the target, with
/// `|Δrate| ≤ max_accel·dt` and `|rate| ≤ target_velocity`; approaching
/// the target or a hard bound it follows the braking parabola so it can
/// stop in the distance left, and it lands on the target exactly (the
/// final approach commands `d/dt`). At a length bound the rate is zeroed
/// in the saturating direction.
pub fn limit_actuation(
    current_len: f64,
    current_rate: f64,
    target: f64,
    dt: f64,
    act: &ActuatorSpec,
    bounds: (f64, f64),
) -> (f64, f64) {
    debug_assert!(dt > 0.0);
    let a = act.max_accel;
    let vmax = act.target_velocity;
    let (min, max) = bounds;

    let d = target.clamp(min, max) - current_len;
    let mag = vmax.min((2.0 * a * d.abs()).sqrt()).min(d.abs() / dt);
    let desired = if d >= 0.0 { mag } else { -mag };

    let mut rate = desired.clamp(current_rate - a * dt, current_rate + a * dt);
    rate = rate.clamp(-vmax, vmax);

    // Discrete-safe braking caps: the largest speed from which one more
    // step plus a full-deceleration stop still fits in the room left.
    let room_up = (max - current_len).max(0.0);
    let room_dn = (current_len - min).max(0.0);
    let cap_up = (a * a * dt * dt + 2.0 * a * room_up).sqrt() - a * dt;
    let cap_dn = (a * a * dt * dt + 2.0 * a * room_dn).sqrt() - a * dt;
    rate = rate.clamp(-cap_dn, cap_up);

    let mut len = current_len + rate * dt;
    if len >= max {
        len = max;
        if rate > 0.0 {
            rate = 0.0;
        }
    } else if len <= min {
        len = min;
        if rate < 0.0 {
            rate = 0.0;
        }
    }
    (len, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn act() -> ActuatorSpec {
        ActuatorSpec {
            target_velocity: 0.05,
            max_accel: 0.5,
        }
    }

    #[test]
    fn sine_channel_endpoints() {
        let ch = SineChannel {
            cable_id: "c".into(),
            center: 0.3,
            amplitude: 0.05,
            period: 8.0,
            phase: 0.0,
        };
        assert_relative_eq!(ch.value_at(0.0), 0.3, epsilon = 1e-15);
        assert_relative_eq!(ch.value_at(2.0), 0.35, epsilon = 1e-12);
    }

    #[test]
    fn pair_targets_are_complementary() {
        let program = ControllerProgram {
            channels: vec![],
            pairs: vec![AntagonisticPair {
                cable_a: "a".into(),
                cable_b: "b".into(),
                total_length: 0.5,
                source: SineChannel {
                    cable_id: "a".into(),
                    center: 0.25,
                    amplitude: 0.03,
                    period: 8.0,
                    phase: 0.0,
                },
            }],
            holds: vec![],
        };
        let t = 1.3;
        let targets = targets_at(&program, t);
        let a = targets["a"];
        let b = targets["b"];
        assert_eq!(a + b, 0.5);
        // worked complement: total 0.5 m, target_a 0.22 -> target_b 0.28
        let targets = targets_at(
            &ControllerProgram {
                pairs: vec![AntagonisticPair {
                    cable_a: "a".into(),
                    cable_b: "b".into(),
                    total_length: 0.5,
                    source: SineChannel {
                        cable_id: "a".into(),
                        center: 0.22,
                        amplitude: 0.0,
                        period: 1.0,
                        phase: 0.0,
                    },
                }],
                ..Default::default()
            },
            0.0,
        );
        assert_relative_eq!(targets["b"], 0.28, epsilon = 1e-15);
    }

    #[test]
    fn limiter_fixed_point() {
        let (len, rate) = limit_actuation(0.3, 0.0, 0.3, 1e-3, &act(), (0.1, 0.5));
        assert_eq!((len, rate), (0.3, 0.0));
    }

    #[test]
    fn limiter_first_step_from_rest() {
        let (len, rate) = limit_actuation(0.1, 0.0, 10.0, 0.01, &act(), (0.0, 100.0));
        assert_relative_eq!(rate, 0.005, epsilon = 1e-15);
        assert_relative_eq!(len - 0.1, 5e-5, epsilon = 1e-15);
    }

    #[test]
    fn limiter_saturates_at_max_length_with_zero_rate() {
        let act = act();
        let (mut len, mut rate) = (0.45, 0.0);
        for _ in 0..200_000 {
            let next = limit_actuation(len, rate, 1.0, 1e-3, &act, (0.1, 0.5));
            len = next.0;
            rate = next.1;
        }
        assert_eq!(len, 0.5);
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn limiter_reaches_target_and_stays() {
        let act = act();
        let (mut len, mut rate) = (0.30, 0.0);
        let target = 0.32;
        let mut hit_at = None;
        for i in 0..300_000 {
            let next = limit_actuation(len, rate, target, 1e-3, &act, (0.1, 0.5));
            len = next.0;
            rate = next.1;
            if hit_at.is_none() && (len - target).abs() <= 1e-6 {
                hit_at = Some(i);
            }
        }
        assert!(hit_at.is_some(), "never reached the target");
        assert!((len - target).abs() <= 1e-6, "did not stay at the target");
    }
}
