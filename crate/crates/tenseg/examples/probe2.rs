//! Dev probe: fine-grained early transient for one structure.

use tenseg::dynamics::{Engine, SimConfig, TargetMap, WorldState};
use tenseg::model::{build_elbow_joint, build_saddle_arm, build_tetrahedrons_arm};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "saddle".into());
    let s = match which.as_str() {
        "tetra" => build_tetrahedrons_arm(),
        "saddle" => build_saddle_arm(),
        _ => build_elbow_joint(),
    };
    let config = SimConfig::default();
    let mut engine = Engine::new(&s, config).unwrap();
    let mut world = WorldState::initial(&s);
    let targets = TargetMap::new();
    let dt = engine.config.dt;
    let per_tick = (0.1 / dt) as u64;
    for tick in 0..50 {
        for _ in 0..per_tick {
            if let Err(e) = engine.step(&mut world, &targets) {
                println!("DIVERGED: {e}");
                return;
            }
        }
        let t = (tick + 1) as f64 * 0.1;
        let worst = s
            .bodies
            .iter()
            .enumerate()
            .max_by(|a, b| {
                let va = world.body_states[a.0].linear_velocity.norm();
                let vb = world.body_states[b.0].linear_velocity.norm();
                va.partial_cmp(&vb).unwrap()
            })
            .unwrap();
        let wi = worst.0;
        let st = &world.body_states[wi];
        println!(
            "t={t:.1} worst={:<12} |v|={:.3} pos=({:+.3},{:+.3},{:+.3})",
            worst.1.name,
            st.linear_velocity.norm(),
            st.position.x,
            st.position.y,
            st.position.z
        );
    }
}
