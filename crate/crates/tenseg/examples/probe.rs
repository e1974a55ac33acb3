//! Dev probe: settling behavior and tension census for the built-ins.

use tenseg::dynamics::{Engine, SimConfig, TargetMap, WorldState};
use tenseg::model::{build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let calibrate = args.iter().any(|a| a == "calibrate");
    let which = args
        .iter()
        .find(|a| *a != "calibrate")
        .cloned()
        .unwrap_or_else(|| "elbow".into());
    let s = match which.as_str() {
        "tetra" => build_tetrahedrons_arm(),
        "saddle" => build_saddle_arm(),
        _ => build_elbow_joint(),
    };
    if calibrate {
        return print_calibration(&s);
    }
    let config = SimConfig::default();
    let mut engine = Engine::new(&s, config).unwrap();
    let mut world = WorldState::initial(&s);
    let targets = TargetMap::new();
    let dt = engine.config.dt;
    let steps_per_s = (1.0 / dt) as u64;
    println!("structure {} | bodies {} cables {}", s.name, s.bodies.len(), s.cables.len());
    for second in 0..90 {
        for _ in 0..steps_per_s {
            if let Err(e) = engine.step(&mut world, &targets) {
                println!("DIVERGED at t={:.3}: {e}", world.time);
                return;
            }
        }
        let residual = engine.residual_velocity(&world);
        if second % 5 == 0 || residual < 2e-4 {
            let readings = engine.cable_readings(&world).unwrap();
            let taut = readings.iter().filter(|r| r.tension > 1e-9).count();
            let max_t = readings.iter().map(|r| r.tension).fold(0.0, f64::max);
            println!(
                "t={:>3}s residual={:.3e} taut={}/{} maxT={:.2}N",
                second + 1,
                residual,
                taut,
                readings.len(),
                max_t
            );
        }
        if residual < 1e-4 {
            println!("converged at t={}s", second + 1);
            break;
        }
    }
    for (i, b) in s.bodies.iter().enumerate() {
        let st = &world.body_states[i];
        println!(
            "body {:<16} pos=({:+.4},{:+.4},{:+.4}) |v|={:.2e} |w|={:.2e}",
            b.name,
            st.position.x,
            st.position.y,
            st.position.z,
            st.linear_velocity.norm(),
            st.angular_velocity.norm()
        );
    }
    let readings = engine.cable_readings(&world).unwrap();
    for (c, r) in s.cables.iter().zip(&readings) {
        println!(
            "cable {:<16} len={:.4} X={:+.2e} T={:+.3}N{}",
            c.id,
            r.length,
            r.elongation,
            r.tension,
            if r.tension <= 1e-9 { "  SLACK" } else { "" }
        );
    }
}

/// Settle generously, then emit the rigging table with a monotone
/// take-up rule: cables already carrying tension keep their rest length
/// (re-rigging them would rotate the pose); slack ones are snugged to the
/// settled geometry minus a small bite.
fn print_calibration(s: &tenseg::model::StructureDef) {
    let config = SimConfig::default();
    let mut engine = Engine::new(s, config).unwrap();
    let mut world = WorldState::initial(s);
    let targets = TargetMap::new();
    let steps = (240.0 / engine.config.dt) as u64;
    for i in 0..steps {
        engine.step(&mut world, &targets).expect("stable");
        if i % 10_000 == 0 && engine.residual_velocity(&world) < 2e-5 {
            break;
        }
    }
    let residual = engine.residual_velocity(&world);
    eprintln!("residual at capture: {residual:.3e} (t = {:.1}s)", world.time);
    assert!(residual < 5e-5, "capture from a moving pose would poison the table");
    let readings = engine.cable_readings(&world).unwrap();
    println!("const {}: &[(&str, f64)] = &[", s.name.to_uppercase());
    for (c, r) in s.cables.iter().zip(&readings) {
        let bite = if c.is_active() { 0.00015 } else { 0.0004 };
        let rest = if r.elongation > 0.2 * bite {
            c.rest_length
        } else {
            r.length - bite
        };
        println!("    (\"{}\", {:.9}),", c.id, rest);
    }
    println!("];");
}
