//! Per-cable rest-length take-up for the built-in models.
//!
//! Assembling one of these arms in hardware ends with tensioning every
//! line individually: the as-built geometry sags under its own weight, so
//! each cable is taken up until it carries a little tension in the hanging
//! pose. This table freezes that rigging step: rest lengths measured from
//! the settled pose of each model, less a small bite (0.25 mm on elastic
//! lines, 0.05 mm on winch lines).
//!
//! Regenerate with `cargo run -p tenseg --example probe -- calibrate <model>`
//! after changing gallery geometry.

/// Calibrated rest length for a built-in model's cable, if the rigging
/// table has one.
pub(crate) fn calibrated_rest(structure: &str, cable: &str) -> Option<f64> {
    let table: &[(&str, f64)] = match structure {
        "elbow" => ELBOW,
        "tetra_arm" => TETRA_ARM,
        "saddle_arm" => SADDLE_ARM,
        _ => return None,
    };
    table
        .iter()
        .find(|(id, _)| *id == cable)
        .map(|(_, rest)| *rest)
}

const ELBOW: &[(&str, f64)] = &[
    ("lig_l", 0.151396980),
    ("lig_r", 0.151396980),
    ("lig_f", 0.159024778),
    ("lig_b", 0.159453139),
    ("lig_c", 0.068800000),
    ("ole_up", 0.076016510),
    ("ole_l", 0.094782333),
    ("ole_r", 0.094782333),
    ("ole_tie", 0.074622328),
    ("ole_tail", 0.121556003),
    ("elbow_pitch", 0.745614121),
    ("elbow_yaw_l", 0.334400000),
    ("elbow_yaw_r", 0.334400000),
    ("preload", 0.140000000),
];

const TETRA_ARM: &[(&str, f64)] = &[
    ("lig_l", 0.132880928),
    ("lig_r", 0.132880928),
    ("lig_f", 0.138658234),
    ("lig_b", 0.138557114),
    ("lig_c", 0.046652262),
    ("ole_up", 0.055999192),
    ("ole_l", 0.083105186),
    ("ole_r", 0.083105186),
    ("ole_tie", 0.075642898),
    ("ole_tail", 0.125324598),
    ("elbow_pitch", 1.232428588),
    ("elbow_yaw_l", 0.416187552),
    ("elbow_yaw_r", 0.416187552),
    ("sus_a", 0.134171713),
    ("sus_b", 0.134726506),
    ("sus_c", 0.134726506),
    ("brace_1a", 0.432301921),
    ("brace_1b", 0.432301921),
    ("brace_2a", 0.432301921),
    ("brace_2b", 0.432301921),
    ("brace_3a", 0.432301921),
    ("brace_3b", 0.432301921),
    ("caps_c", 0.035094734),
    ("stay_a", 1.042654072),
    ("stay_b", 1.042654072),
    ("stay_c", 1.048632980),
    ("stay_d", 1.048632980),
    ("shoulder_pitch", 0.891446721),
    ("shoulder_lift", 0.414755266),
];

const SADDLE_ARM: &[(&str, f64)] = &[
    ("lig_l", 0.126500000),
    ("lig_r", 0.126500000),
    ("lig_f", 0.128657074),
    ("lig_b", 0.144400000),
    ("lig_c", 0.046400000),
    ("ole_up", 0.050099378),
    ("ole_l", 0.082214151),
    ("ole_r", 0.082214151),
    ("ole_tie", 0.081901560),
    ("ole_tail", 0.094689054),
    ("elbow_pitch", 0.960200000),
    ("elbow_yaw_l", 0.388450000),
    ("elbow_yaw_r", 0.388450000),
    ("sus_c", 0.039850000),
    ("sus_l", 0.301346269),
    ("sus_r", 0.301346269),
    ("sus_lf", 0.469424275),
    ("sus_lb", 0.469424275),
    ("sus_rf", 0.469424275),
    ("sus_rb", 0.469424275),
    ("guy_f", 0.243160501),
    ("guy_b", 0.243160501),
    ("lace_a", 0.400099922),
    ("lace_b", 0.400099922),
    ("lace_c", 0.400099922),
    ("lace_d", 0.400099922),
    ("caps_c", 0.047910389),
    ("caps_f", 0.408016633),
    ("caps_b", 0.403693752),
    ("stay_a", 0.812200000),
    ("stay_b", 0.812200000),
    ("stay_c", 0.816994244),
    ("stay_d", 0.816994244),
    ("stay_f", 0.632385248),
    ("stay_g", 0.632585632),
    ("shoulder_pitch", 1.023143705),
    ("shoulder_yaw_l", 0.808764490),
    ("shoulder_yaw_r", 0.808764490),
];
