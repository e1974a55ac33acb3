//! `tsg` — command-line front end for the tensegrity manipulator
//! simulator.
//!
//! Exit codes are a stable contract:
//! `0` success, `1` validation failure, `2` usage or I/O error,
//! `3` settle did not converge, `4` simulation diverged.

use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use tenseg::control::{parse_program, ControllerProgram};
use tenseg::dynamics::{Engine, Obstacle, SimConfig, SimError, WorldState};
use tenseg::lab::{
    build_preset_program, compliance_experiment, end_effector_marker, preset, range_of_motion,
    repeatability, track, workspace_summary, PlaneName, TrajectoryRecord, RECOVERY_WINDOW,
    SETTLE_MAX_TIME, SETTLE_TOL, TRANSIENT_DISCARD,
};
use tenseg::math::{fmt_sig, Vec3};
use tenseg::model::{NodeRef, StructureDef};
use tenseg::report::{Doc, REPORT_DIGITS};
use tenseg::topology::{parse_structure, serialize_structure};

#[derive(Parser)]
#[command(name = "tsg", version, about = "Tensegrity manipulator simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in structure file (elbow | tetra-arm | saddle-arm).
    Builtin {
        name: String,
        /// Output `.tsg` path.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Parse and validate a structure file; prints OK or the diagnostics.
    Validate { path: PathBuf },
    /// Settle a structure to rest and write the state document.
    Settle {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Residual-velocity tolerance, m/s.
        #[arg(long, default_value_t = SETTLE_TOL)]
        tol: f64,
        /// Simulated-time budget, s.
        #[arg(long = "max-time", default_value_t = SETTLE_MAX_TIME)]
        max_time: f64,
        /// State document path (default `<input>.state.txt`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Settle, then track markers under a controller; writes a CSV
    /// trajectory and a summary report.
    Simulate {
        path: PathBuf,
        /// Controller program file.
        #[arg(long, conflicts_with = "preset")]
        controller: Option<PathBuf>,
        /// Built-in actuation preset name (e.g. `elbow-pitch`).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 16.0)]
        duration: f64,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Markers to record, `body.node[,body.node...]`; defaults to the
        /// built-in model's end effector.
        #[arg(long)]
        markers: Option<String>,
        /// Sample period, s.
        #[arg(long, default_value_t = 0.01)]
        sample: f64,
        /// Obstacles: `sphere:cx,cy,cz,r` or `halfspace:nx,ny,nz,offset`.
        #[arg(long = "obstacle")]
        obstacles: Vec<String>,
        /// Output CSV path; the report and manifest share its stem.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run a canned experiment: workspace | compliance | repeatability.
    Experiment {
        kind: String,
        path: PathBuf,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, conflicts_with = "preset")]
        controller: Option<PathBuf>,
        #[arg(long, default_value_t = 16.0)]
        duration: f64,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long, default_value_t = 0.01)]
        sample: f64,
        #[arg(long)]
        markers: Option<String>,
        #[arg(long = "obstacle")]
        obstacles: Vec<String>,
        /// Repeatability: number of runs (seeds 0..runs unless --seeds).
        #[arg(long, default_value_t = 3)]
        runs: usize,
        /// Repeatability: perturbation magnitude (fraction, < 0.2).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Repeatability: explicit comma-separated seeds.
        #[arg(long)]
        seeds: Option<String>,
        /// Workspace plane for custom controllers: xy | xz | yz.
        #[arg(long)]
        plane: Option<String>,
        /// Output prefix; files are emitted as `<prefix>.*.{csv,txt}`.
        #[arg(short, long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Validation(String),
    NotConverged,
    Diverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Usage(_) => 2,
            Failure::NotConverged => 3,
            Failure::Diverged(_) => 4,
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NonFinite { .. } => Failure::Diverged(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Out = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Builtin { name, out } => cmd_builtin(&name, &out),
        Command::Validate { path } => cmd_validate(&path),
        Command::Settle {
            path,
            dt,
            tol,
            max_time,
            out,
        } => cmd_settle(&path, dt, tol, max_time, out),
        Command::Simulate {
            path,
            controller,
            preset,
            duration,
            dt,
            markers,
            sample,
            obstacles,
            out,
        } => cmd_simulate(
            &path, controller, preset, duration, dt, markers, sample, &obstacles, &out,
        ),
        Command::Experiment {
            kind,
            path,
            preset,
            controller,
            duration,
            dt,
            sample,
            markers,
            obstacles,
            runs,
            noise,
            seeds,
            plane,
            out,
        } => cmd_experiment(ExperimentArgs {
            kind,
            path,
            preset,
            controller,
            duration,
            dt,
            sample,
            markers,
            obstacles,
            runs,
            noise,
            seeds,
            plane,
            out,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Validation(msg) => eprintln!("{msg}"),
                Failure::NotConverged => eprintln!("settle did not converge"),
                Failure::Diverged(msg) => eprintln!("diverged: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<StructureDef, Failure> {
    let text = read_file(path)?;
    parse_structure(&text).map_err(|errors| {
        let mut msg = format!("{}: {} problem(s)", path.display(), errors.len());
        for e in &errors {
            let _ = write!(msg, "\n  {e}");
        }
        Failure::Validation(msg)
    })
}

fn parse_markers(
    structure: &StructureDef,
    markers: Option<&str>,
) -> Result<Vec<NodeRef>, Failure> {
    let list = match markers {
        Some(spec) => spec
            .split(',')
            .map(|tok| {
                tok.trim()
                    .split_once('.')
                    .map(|(b, n)| NodeRef::new(b, n))
                    .ok_or_else(|| Failure::Usage(format!("`{tok}` is not a `body.node` marker")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => match end_effector_marker(&structure.name) {
            Some(ee) => vec![ee],
            None => {
                return Err(Failure::Usage(
                    "no default markers for this structure; pass --markers body.node[,...]".into(),
                ))
            }
        },
    };
    for m in &list {
        let ok = structure
            .body(&m.body)
            .and_then(|b| b.node(&m.node))
            .is_some();
        if !ok {
            return Err(Failure::Usage(format!("unknown marker `{m}`")));
        }
    }
    Ok(list)
}

fn parse_obstacles(specs: &[String]) -> Result<Vec<Obstacle>, Failure> {
    specs
        .iter()
        .map(|s| Obstacle::parse_spec(s).map_err(Failure::Usage))
        .collect()
}

fn build_program(
    structure: &StructureDef,
    settled: &WorldState,
    controller: Option<&Path>,
    preset_name: Option<&str>,
) -> Result<(ControllerProgram, String), Failure> {
    match (controller, preset_name) {
        (Some(path), None) => {
            let text = read_file(path)?;
            let program = parse_program(&text, structure).map_err(|errors| {
                let mut msg = format!("{}: {} problem(s)", path.display(), errors.len());
                for e in &errors {
                    let _ = write!(msg, "\n  {e}");
                }
                Failure::Validation(msg)
            })?;
            Ok((program, format!("file {}", path.display())))
        }
        (None, Some(name)) => {
            let program =
                build_preset_program(structure, settled, name).map_err(Failure::Usage)?;
            Ok((program, format!("preset {name}")))
        }
        (None, None) => Ok((ControllerProgram::empty(), "none (hold)".into())),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn settle_now(
    structure: &StructureDef,
    config: &SimConfig,
    tol: f64,
    max_time: f64,
) -> Result<(WorldState, bool), Failure> {
    let mut engine = Engine::new(structure, config.clone()).map_err(Failure::from)?;
    let mut world = WorldState::initial(structure);
    let converged = engine
        .settle(&mut world, tol, max_time)
        .map_err(Failure::from)?;
    Ok((world, converged))
}

fn vec3_row(v: Vec3) -> String {
    format!(
        "{} {} {}",
        fmt_sig(v.x, REPORT_DIGITS),
        fmt_sig(v.y, REPORT_DIGITS),
        fmt_sig(v.z, REPORT_DIGITS)
    )
}

fn trajectory_csv(traj: &TrajectoryRecord) -> String {
    let mut out = String::from("t");
    for m in &traj.markers {
        let _ = write!(out, ",{m}_x,{m}_y,{m}_z");
    }
    out.push('\n');
    for (t, row) in &traj.samples {
        let _ = write!(out, "{}", fmt_sig(*t, REPORT_DIGITS));
        for p in row {
            let _ = write!(
                out,
                ",{},{},{}",
                fmt_sig(p.x, REPORT_DIGITS),
                fmt_sig(p.y, REPORT_DIGITS),
                fmt_sig(p.z, REPORT_DIGITS)
            );
        }
        out.push('\n');
    }
    out
}

/// Collects the files a run emits; written out last so it can list every
/// one of them (itself included).
struct Manifest {
    command: String,
    inputs: Vec<(String, String)>,
    config: Vec<(String, String)>,
    outputs: Vec<String>,
}

impl Manifest {
    fn new() -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Manifest {
            command,
            inputs: Vec::new(),
            config: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, value: impl AsRef<str>) {
        self.inputs.push((key.into(), value.as_ref().into()));
    }

    fn config(&mut self, key: &str, value: impl AsRef<str>) {
        self.config.push((key.into(), value.as_ref().into()));
    }

    fn emit(&mut self, path: &Path, contents: &str) -> Result<(), Failure> {
        write_file(path, contents)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn finish(mut self, path: &Path) -> Result<(), Failure> {
        self.outputs.push(path.display().to_string());
        let mut doc = Doc::new();
        doc.kv("manifest", "tenseg run");
        doc.kv("command", &self.command);
        doc.kv("artifact_version", env!("CARGO_PKG_VERSION"));
        doc.section("inputs", |d| {
            for (k, v) in &self.inputs {
                d.kv(k, v);
            }
        });
        doc.section("config", |d| {
            for (k, v) in &self.config {
                d.kv(k, v);
            }
        });
        doc.section("outputs", |d| {
            for o in &self.outputs {
                d.kv("file", o);
            }
        });
        write_file(path, &doc.finish())
    }
}

/// `prefix` + `.suffix`, preserving any dots already in the prefix.
fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let name = prefix.file_name().unwrap_or_default().to_string_lossy();
    prefix.with_file_name(format!("{name}.{suffix}"))
}

fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.manifest.txt"))
}

fn cmd_builtin(name: &str, out: &Path) -> Out {
    let structure = match name {
        "elbow" => tenseg::model::build_elbow_joint(),
        "tetra-arm" => tenseg::model::build_tetrahedrons_arm(),
        "saddle-arm" => tenseg::model::build_saddle_arm(),
        other => {
            return Err(Failure::Usage(format!(
                "unknown built-in `{other}` (expected elbow, tetra-arm, or saddle-arm)"
            )))
        }
    };
    let text = serialize_structure(&structure)
        .map_err(|e| Failure::Usage(format!("serialization failed: {e}")))?;
    write_file(out, &text)
}

fn cmd_validate(path: &Path) -> Out {
    load_structure(path)?;
    println!("OK");
    Ok(())
}

fn cmd_settle(path: &Path, dt: f64, tol: f64, max_time: f64, out: Option<PathBuf>) -> Out {
    let structure = load_structure(path)?;
    let config = SimConfig {
        dt,
        ..SimConfig::default()
    };
    let (world, converged) = settle_now(&structure, &config, tol, max_time)?;

    let mut engine = Engine::new(&structure, config.clone()).map_err(Failure::from)?;
    let readings = engine.cable_readings(&world).map_err(Failure::from)?;
    let residual = engine.residual_velocity(&world);

    let mut doc = Doc::new();
    doc.kv("report", "settled-state");
    doc.kv("structure", &structure.name);
    doc.num("time_s", world.time);
    doc.kv("converged", if converged { "true" } else { "false" });
    doc.num("residual_velocity_m_per_s", residual);
    doc.num("tolerance_m_per_s", tol);
    doc.section("bodies", |d| {
        for (body, state) in structure.bodies.iter().zip(&world.body_states) {
            d.section(&body.name, |d| {
                d.kv("position", vec3_row(state.position));
                let q = state.orientation.as_ref();
                d.list("orientation_wxyz", [q.w, q.i, q.j, q.k]);
                d.kv("linear_velocity", vec3_row(state.linear_velocity));
                d.kv("angular_velocity", vec3_row(state.angular_velocity));
            });
        }
    });
    let slots = structure.active_cable_indices();
    doc.section("cables", |d| {
        for (i, (cable, reading)) in structure.cables.iter().zip(&readings).enumerate() {
            d.section(&cable.id, |d| {
                d.kv("kind", cable.kind.to_string());
                if let Some(slot) = slots.iter().position(|&ci| ci == i) {
                    d.num("commanded_length", world.commanded_lengths[slot]);
                }
                d.num("length", reading.length);
                d.num("tension", reading.tension);
            });
        }
    });

    let out_path = out.unwrap_or_else(|| path.with_extension("state.txt"));
    let mut manifest = Manifest::new();
    manifest.input("structure", path.display().to_string());
    manifest.config("dt", fmt_sig(dt, REPORT_DIGITS));
    manifest.config("tol", fmt_sig(tol, REPORT_DIGITS));
    manifest.config("max_time", fmt_sig(max_time, REPORT_DIGITS));
    manifest.emit(&out_path, &doc.finish())?;
    manifest.finish(&manifest_path(&out_path))?;

    if converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &Path,
    controller: Option<PathBuf>,
    preset_name: Option<String>,
    duration: f64,
    dt: f64,
    markers: Option<String>,
    sample: f64,
    obstacle_specs: &[String],
    out: &Path,
) -> Out {
    let structure = load_structure(path)?;
    let markers = parse_markers(&structure, markers.as_deref())?;
    let obstacles = parse_obstacles(obstacle_specs)?;
    let config = SimConfig {
        dt,
        obstacles,
        ..SimConfig::default()
    };

    let (settled, converged) = settle_now(&structure, &config, SETTLE_TOL, SETTLE_MAX_TIME)?;
    if !converged {
        log::warn!("structure did not settle below tolerance; tracking anyway");
    }
    let (program, program_desc) = build_program(
        &structure,
        &settled,
        controller.as_deref(),
        preset_name.as_deref(),
    )?;

    let traj = track(
        &structure, &settled, &program, &markers, duration, sample, &config,
    )
    .map_err(Failure::from)?;

    let mut doc = Doc::new();
    doc.kv("report", "simulate");
    doc.kv("structure", &structure.name);
    doc.kv("controller", &program_desc);
    doc.num("duration_s", duration);
    doc.num("sample_period_s", traj.sample_period);
    doc.kv("samples", traj.samples.len().to_string());
    doc.section("markers", |d| {
        for (mi, marker) in traj.markers.iter().enumerate() {
            let start = traj.samples[0].1[mi];
            let max_disp = traj
                .samples
                .iter()
                .map(|(_, row)| (row[mi] - start).norm())
                .fold(0.0, f64::max);
            d.section(&marker.to_string(), |d| {
                d.kv("start", vec3_row(start));
                d.num("max_displacement_m", max_disp);
            });
        }
    });

    let mut manifest = Manifest::new();
    manifest.input("structure", path.display().to_string());
    manifest.input("controller", &program_desc);
    manifest.config("dt", fmt_sig(dt, REPORT_DIGITS));
    manifest.config("duration", fmt_sig(duration, REPORT_DIGITS));
    manifest.config("sample_period", fmt_sig(sample, REPORT_DIGITS));
    for spec in obstacle_specs {
        manifest.config("obstacle", spec);
    }
    manifest.emit(out, &trajectory_csv(&traj))?;
    let report_path = out.with_extension("report.txt");
    manifest.emit(&report_path, &doc.finish())?;
    manifest.finish(&manifest_path(out))?;
    Ok(())
}

struct ExperimentArgs {
    kind: String,
    path: PathBuf,
    preset: Option<String>,
    controller: Option<PathBuf>,
    duration: f64,
    dt: f64,
    sample: f64,
    markers: Option<String>,
    obstacles: Vec<String>,
    runs: usize,
    noise: f64,
    seeds: Option<String>,
    plane: Option<String>,
    out: PathBuf,
}

fn cmd_experiment(args: ExperimentArgs) -> Out {
    match args.kind.as_str() {
        "workspace" => experiment_workspace(&args),
        "compliance" => experiment_compliance(&args),
        "repeatability" => experiment_repeatability(&args),
        other => Err(Failure::Usage(format!(
            "unknown experiment `{other}` (expected workspace, compliance, or repeatability)"
        ))),
    }
}

fn conventions(doc: &mut Doc) {
    doc.section("conventions", |d| {
        d.num("transient_discard_fraction", TRANSIENT_DISCARD);
        d.num("recovery_window_fraction", RECOVERY_WINDOW);
    });
}

fn plane_of(args: &ExperimentArgs, structure: &StructureDef) -> Result<PlaneName, Failure> {
    if let Some(name) = &args.plane {
        return match name.as_str() {
            "xy" => Ok(PlaneName::XY),
            "xz" => Ok(PlaneName::XZ),
            "yz" => Ok(PlaneName::YZ),
            other => Err(Failure::Usage(format!("unknown plane `{other}`"))),
        };
    }
    if let Some(name) = &args.preset {
        if let Some(p) = preset(&structure.name, name) {
            return Ok(p.plane);
        }
    }
    Ok(PlaneName::XZ)
}

fn experiment_workspace(args: &ExperimentArgs) -> Out {
    let structure = load_structure(&args.path)?;
    let config = SimConfig {
        dt: args.dt,
        obstacles: parse_obstacles(&args.obstacles)?,
        ..SimConfig::default()
    };
    let (settled, _) = settle_now(&structure, &config, SETTLE_TOL, SETTLE_MAX_TIME)?;
    let (program, program_desc) = build_program(
        &structure,
        &settled,
        args.controller.as_deref(),
        args.preset.as_deref(),
    )?;

    let ee = parse_markers(&structure, args.markers.as_deref())?;
    let ee_marker = ee[0].clone();
    let preset_info = args
        .preset
        .as_deref()
        .and_then(|name| preset(&structure.name, name));
    let mut markers = ee.clone();
    if let Some(p) = &preset_info {
        for m in p.measurement.markers() {
            if !markers.contains(&m) {
                markers.push(m);
            }
        }
    }

    let traj = track(
        &structure,
        &settled,
        &program,
        &markers,
        args.duration,
        args.sample,
        &config,
    )
    .map_err(Failure::from)?;

    let plane = plane_of(args, &structure)?;
    let engine = Engine::new(&structure, config.clone()).map_err(Failure::from)?;
    let pivot_marker = preset_info
        .as_ref()
        .map(|p| p.pivot.clone())
        .unwrap_or_else(|| ee_marker.clone());
    let pivot_node = engine.resolve_node(&pivot_marker).map_err(Failure::from)?;
    let pivot_point = engine.node_position(&settled, pivot_node);
    let summary = workspace_summary(&traj, &ee_marker, &plane.spec(), pivot_point)
        .ok_or_else(|| Failure::Usage("end-effector marker missing from trajectory".into()))?;

    let mut doc = Doc::new();
    doc.kv("report", "workspace");
    doc.kv("structure", &structure.name);
    doc.kv("controller", &program_desc);
    doc.kv("marker", ee_marker.to_string());
    doc.kv("plane", plane.label());
    doc.kv("samples", summary.samples.to_string());
    doc.num("hull_area_m2", summary.area);
    doc.num("angular_extent_deg", summary.angular_extent_deg);
    if let Some(p) = &preset_info {
        if let Ok(series) = p.measurement.evaluate(&traj) {
            if let Ok(rom) = range_of_motion(p.name, p.measurement.series_kind(), &series) {
                doc.section("range_of_motion", |d| {
                    d.kv("motion", &rom.motion);
                    d.num("min", rom.min);
                    d.num("max", rom.max);
                    d.num("sweep", rom.sweep);
                });
            }
        }
    }
    conventions(&mut doc);

    let mut manifest = Manifest::new();
    manifest.input("structure", args.path.display().to_string());
    manifest.input("controller", &program_desc);
    manifest.config("dt", fmt_sig(args.dt, REPORT_DIGITS));
    manifest.config("duration", fmt_sig(args.duration, REPORT_DIGITS));
    manifest.config("sample_period", fmt_sig(args.sample, REPORT_DIGITS));
    let csv_path = suffixed(&args.out, "traj.csv");
    manifest.emit(&csv_path, &trajectory_csv(&traj))?;
    let report_path = suffixed(&args.out, "report.txt");
    manifest.emit(&report_path, &doc.finish())?;
    manifest.finish(&suffixed(&args.out, "manifest.txt"))?;
    Ok(())
}

fn experiment_compliance(args: &ExperimentArgs) -> Out {
    let structure = load_structure(&args.path)?;
    if args.obstacles.is_empty() {
        return Err(Failure::Usage(
            "compliance needs --obstacle <sphere:...|halfspace:...>".into(),
        ));
    }
    let obstacles = parse_obstacles(&args.obstacles)?;
    let config = SimConfig {
        dt: args.dt,
        ..SimConfig::default()
    };
    let (settled, _) = settle_now(&structure, &config, SETTLE_TOL, SETTLE_MAX_TIME)?;
    let (program, program_desc) = build_program(
        &structure,
        &settled,
        args.controller.as_deref(),
        args.preset.as_deref(),
    )?;
    let markers = parse_markers(&structure, args.markers.as_deref())?;
    let report = compliance_experiment(
        &structure,
        &settled,
        &program,
        obstacles[0],
        &markers,
        args.duration,
        args.sample,
        &config,
    )
    .map_err(Failure::from)?;

    let mut doc = Doc::new();
    doc.kv("report", "compliance");
    doc.kv("structure", &structure.name);
    doc.kv("controller", &program_desc);
    doc.kv("obstacle", &args.obstacles[0]);
    doc.num("max_deviation_m", report.max_deviation);
    match report.contact_interval {
        Some((t0, t1)) => {
            doc.kv("contact", "yes");
            doc.num("contact_start_s", t0);
            doc.num("contact_end_s", t1);
        }
        None => {
            doc.kv("contact", "none");
        }
    }
    doc.num("recovery_error_m", report.recovery_error);
    doc.kv("recovered", if report.recovered { "true" } else { "false" });
    conventions(&mut doc);

    let mut manifest = Manifest::new();
    manifest.input("structure", args.path.display().to_string());
    manifest.input("controller", &program_desc);
    manifest.config("dt", fmt_sig(args.dt, REPORT_DIGITS));
    manifest.config("duration", fmt_sig(args.duration, REPORT_DIGITS));
    manifest.config("sample_period", fmt_sig(args.sample, REPORT_DIGITS));
    manifest.config("obstacle", &args.obstacles[0]);
    let free_path = suffixed(&args.out, "free.csv");
    manifest.emit(&free_path, &trajectory_csv(&report.free))?;
    let obstructed_path = suffixed(&args.out, "obstructed.csv");
    manifest.emit(&obstructed_path, &trajectory_csv(&report.obstructed))?;
    let report_path = suffixed(&args.out, "report.txt");
    manifest.emit(&report_path, &doc.finish())?;
    manifest.finish(&suffixed(&args.out, "manifest.txt"))?;
    Ok(())
}

fn experiment_repeatability(args: &ExperimentArgs) -> Out {
    let structure = load_structure(&args.path)?;
    let preset_name = args.preset.as_deref().ok_or_else(|| {
        Failure::Usage("repeatability needs --preset (it defines the measured motion)".into())
    })?;
    let p = preset(&structure.name, preset_name)
        .ok_or_else(|| Failure::Usage(format!("no preset `{preset_name}` for this structure")))?;
    if !(0.0..0.2).contains(&args.noise) {
        return Err(Failure::Usage("--noise must be in [0, 0.2)".into()));
    }
    let seeds: Vec<u64> = match &args.seeds {
        Some(spec) => spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Failure::Usage(format!("`{t}` is not a seed")))
            })
            .collect::<Result<_, _>>()?,
        None => (0..args.runs as u64).collect(),
    };
    if seeds.len() < 2 {
        return Err(Failure::Usage("repeatability needs at least 2 runs".into()));
    }

    let config = SimConfig {
        dt: args.dt,
        ..SimConfig::default()
    };
    let (settled, _) = settle_now(&structure, &config, SETTLE_TOL, SETTLE_MAX_TIME)?;
    let (program, program_desc) = build_program(&structure, &settled, None, Some(preset_name))?;

    let report = repeatability(
        &structure,
        &program,
        &p.measurement,
        &seeds,
        args.noise,
        args.duration,
        args.sample,
        &config,
    );

    let mut doc = Doc::new();
    doc.kv("report", "repeatability");
    doc.kv("structure", &structure.name);
    doc.kv("controller", &program_desc);
    doc.kv("motion", &report.motion);
    doc.num("noise_magnitude", report.magnitude);
    doc.kv("runs", seeds.len().to_string());
    doc.kv(
        "seeds",
        seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    doc.list("per_run_sweep", report.sweeps.iter().copied());
    doc.num("mean", report.mean);
    doc.num("std_dev_population", report.std_dev_population);
    doc.num("std_dev_sample", report.std_dev_sample);
    if report.diverged.is_empty() {
        doc.kv("diverged_runs", "none");
    } else {
        doc.section("diverged_runs", |d| {
            for (seed, message) in &report.diverged {
                d.kv(&format!("seed_{seed}"), message);
            }
        });
    }
    conventions(&mut doc);

    let mut manifest = Manifest::new();
    manifest.input("structure", args.path.display().to_string());
    manifest.input("controller", &program_desc);
    manifest.config("dt", fmt_sig(args.dt, REPORT_DIGITS));
    manifest.config("duration", fmt_sig(args.duration, REPORT_DIGITS));
    manifest.config("sample_period", fmt_sig(args.sample, REPORT_DIGITS));
    manifest.config("noise", fmt_sig(args.noise, REPORT_DIGITS));
    manifest.config(
        "seeds",
        seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let report_path = suffixed(&args.out, "report.txt");
    manifest.emit(&report_path, &doc.finish())?;
    manifest.finish(&suffixed(&args.out, "manifest.txt"))?;
    Ok(())
}
