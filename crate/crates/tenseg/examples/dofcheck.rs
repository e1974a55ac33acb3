//! Dev probe: run every preset on a model and report end-effector travel
//! and joint sweep.

use tenseg::control::targets_at;
use tenseg::dynamics::{settle, SimConfig, WorldState};
use tenseg::lab::{
    build_preset_program, end_effector_marker, presets_for, range_of_motion, track,
    SETTLE_MAX_TIME, SETTLE_TOL,
};
use tenseg::model::{build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "tetra".into());
    let s = match which.as_str() {
        "tetra" => build_tetrahedrons_arm(),
        "saddle" => build_saddle_arm(),
        _ => build_elbow_joint(),
    };
    let config = SimConfig::default();
    let mut settled = WorldState::initial(&s);
    let converged = settle(&s, &mut settled, &config, SETTLE_TOL, SETTLE_MAX_TIME).unwrap();
    println!("settled: converged={converged} t={:.1}s", settled.time);
    let ee = end_effector_marker(&s.name).unwrap();

    for preset in presets_for(&s.name).unwrap() {
        let program = build_preset_program(&s, &settled, preset.name).unwrap();
        let t0 = targets_at(&program, 0.0);
        eprintln!(
            "preset {}: driving {:?}",
            preset.name,
            t0.keys().collect::<Vec<_>>()
        );
        let mut markers = preset.measurement.markers();
        if !markers.contains(&ee) {
            markers.push(ee.clone());
        }
        match track(&s, &settled, &program, &markers, 16.0, 0.01, &config) {
            Err(e) => println!("preset {:<14} DIVERGED: {e}", preset.name),
            Ok(traj) => {
                let ee_idx = traj.marker_index(&ee).unwrap();
                let start = traj.samples[0].1[ee_idx];
                let mut max_disp = 0.0_f64;
                let mut max_dz = 0.0_f64;
                for (_, row) in &traj.samples {
                    max_disp = max_disp.max((row[ee_idx] - start).norm());
                    max_dz = max_dz.max((row[ee_idx].z - start.z).abs());
                }
                let series = preset.measurement.evaluate(&traj).unwrap();
                let rom = range_of_motion(preset.name, preset.measurement.series_kind(), &series)
                    .unwrap();
                println!(
                    "preset {:<14} EE disp {:>6.1} mm  dz {:>6.1} mm  sweep {:>8.3} {}",
                    preset.name,
                    max_disp * 1e3,
                    max_dz * 1e3,
                    rom.sweep,
                    match preset.measurement.series_kind() {
                        tenseg::lab::SeriesKind::AngleDegrees => "deg",
                        tenseg::lab::SeriesKind::TravelMeters => "m",
                    }
                );
            }
        }
    }
}
