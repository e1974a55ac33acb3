//! Seeded structure perturbation and the repeatability study built on it.
//!
//! Hardware runs never repeat exactly; elastic cords vary in rest length
//! and stiffness from assembly to assembly. The perturbation models that
//! variance as seeded multiplicative noise on the passive cables only —
//! active commanded lengths belong to the controller and are left alone.

use super::measure::{
    mean, population_std_dev, range_of_motion, sample_std_dev, RangeOfMotionReport,
};
use super::track::track;
use super::{MotionMeasurement, SETTLE_MAX_TIME, SETTLE_TOL};
use crate::control::ControllerProgram;
use crate::dynamics::{settle, SimConfig, WorldState};
use crate::model::{CableKind, StructureDef};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Apply deterministic multiplicative noise `1 ± uniform·magnitude` to
/// passive rest lengths and stiffnesses. Magnitude 0 returns the input
/// unchanged; the same seed always produces the same structure.
pub fn perturb(structure: &StructureDef, seed: u64, magnitude: f64) -> StructureDef {
    assert!(
        (0.0..0.2).contains(&magnitude),
        "perturbation magnitude must be in [0, 0.2), got {magnitude}"
    );
    let mut out = structure.clone();
    if magnitude == 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cable in out.cables.iter_mut() {
        if cable.kind != CableKind::Passive {
            continue;
        }
        let rest_factor = 1.0 + rng.random_range(-1.0..=1.0) * magnitude;
        let k_factor = 1.0 + rng.random_range(-1.0..=1.0) * magnitude;
        cable.rest_length =
            (cable.rest_length * rest_factor).clamp(cable.min_length, cable.max_length);
        cable.stiffness_k *= k_factor;
    }
    out
}

/// One repeatability study: per-seed perturbed sweeps of one motion.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityReport {
    pub motion: String,
    pub magnitude: f64,
    pub seeds: Vec<u64>,
    /// Sweep per completed run, in seed order.
    pub sweeps: Vec<f64>,
    /// Per-run reports for the completed runs, in seed order.
    pub runs: Vec<RangeOfMotionReport>,
    /// Runs that diverged, with the engine's diagnostic; excluded from
    /// the statistics.
    pub diverged: Vec<(u64, String)>,
    pub mean: f64,
    pub std_dev_population: f64,
    pub std_dev_sample: f64,
}

/// Run the motion once per seed: perturb, settle, track, measure. Runs
/// are independent and execute in parallel; results assemble in seed
/// order, so the report is deterministic.
#[allow(clippy::too_many_arguments)]
pub fn repeatability(
    structure: &StructureDef,
    program: &ControllerProgram,
    measurement: &MotionMeasurement,
    seeds: &[u64],
    magnitude: f64,
    duration: f64,
    sample_period: f64,
    config: &SimConfig,
) -> RepeatabilityReport {
    assert!(seeds.len() >= 2, "repeatability needs at least two runs");
    let markers = measurement.markers();

    let outcomes: Vec<Result<RangeOfMotionReport, String>> = seeds
        .par_iter()
        .map(|&seed| {
            let perturbed = perturb(structure, seed, magnitude);
            let mut world = WorldState::initial(&perturbed);
            settle(&perturbed, &mut world, config, SETTLE_TOL, SETTLE_MAX_TIME)
                .map_err(|e| e.to_string())?;
            let traj = track(
                &perturbed,
                &world,
                program,
                &markers,
                duration,
                sample_period,
                config,
            )
            .map_err(|e| e.to_string())?;
            let series = measurement.evaluate(&traj).map_err(|e| e.to_string())?;
            range_of_motion(&measurement.name, measurement.series_kind(), &series)
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut runs = Vec::new();
    let mut sweeps = Vec::new();
    let mut diverged = Vec::new();
    for (&seed, outcome) in seeds.iter().zip(outcomes) {
        match outcome {
            Ok(rom) => {
                sweeps.push(rom.sweep);
                runs.push(rom);
            }
            Err(message) => diverged.push((seed, message)),
        }
    }

    RepeatabilityReport {
        motion: measurement.name.clone(),
        magnitude,
        seeds: seeds.to_vec(),
        mean: mean(&sweeps),
        std_dev_population: population_std_dev(&sweeps),
        std_dev_sample: sample_std_dev(&sweeps),
        sweeps,
        runs,
        diverged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_elbow_joint;

    #[test]
    fn zero_magnitude_is_identity() {
        let s = build_elbow_joint();
        assert_eq!(perturb(&s, 7, 0.0), s);
    }

    #[test]
    fn same_seed_same_structure() {
        let s = build_elbow_joint();
        assert_eq!(perturb(&s, 42, 0.05), perturb(&s, 42, 0.05));
        assert_ne!(perturb(&s, 42, 0.05), perturb(&s, 43, 0.05));
    }

    #[test]
    fn active_cables_are_untouched() {
        let s = build_elbow_joint();
        let p = perturb(&s, 3, 0.1);
        for (a, b) in s.cables.iter().zip(&p.cables) {
            if a.is_active() {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn seed_ensemble_mean_stays_near_nominal() {
        let s = build_elbow_joint();
        let nominal: Vec<f64> = s
            .cables
            .iter()
            .filter(|c| !c.is_active())
            .map(|c| c.rest_length)
            .collect();
        let n_passive = nominal.len();
        let mut sums = vec![0.0; n_passive];
        let runs = 100;
        for seed in 0..runs {
            let p = perturb(&s, seed, 0.02);
            for (i, c) in p.cables.iter().filter(|c| !c.is_active()).enumerate() {
                sums[i] += c.rest_length;
            }
        }
        for (sum, nominal) in sums.iter().zip(&nominal) {
            let mean = sum / runs as f64;
            assert!(
                (mean - nominal).abs() / nominal < 0.005,
                "ensemble mean {mean} drifted from nominal {nominal}"
            );
        }
    }
}
