//! Command dispatch: each subcommand turns a [`RunConfig`] into CSV output
//! plus a metadata sidecar sufficient to reproduce it.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigIssue, ModeFamily, RunConfig, SimInit};
use crate::dispersion::{
    incompressible_mode, inward_growth_rates, quartic_coefficients, ProfileBasis, WaveMode,
};
use crate::fdsim::{self, BoundaryForcing, Initial, SimConfig};
use crate::kinetic::{self, default_density_floor, GridSpec};
use crate::model::validate_params;
use crate::output::{emit_csv, emit_metadata, fmt_f64, sidecar_path};
use crate::wavefield;

/// CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Steady,
    Dispersion,
    Modes,
    Field,
    Aggregate,
    Trajectory,
    Simulate,
    Kinetic,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Steady => "steady",
            Command::Dispersion => "dispersion",
            Command::Modes => "modes",
            Command::Field => "field",
            Command::Aggregate => "aggregate",
            Command::Trajectory => "trajectory",
            Command::Simulate => "simulate",
            Command::Kinetic => "kinetic",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error:\n{}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n"))]
    Config(Vec<ConfigIssue>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

fn numerical<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Numerical(err.to_string())
}

/// Validation gate for the command: the steady display needs every
/// constraint, wave analysis tolerates a violated border-positivity
/// condition, particle aggregation needs only the domain extents.
fn gate(cfg: &RunConfig, command: Command) -> Result<(), CliError> {
    let issues: Vec<ConfigIssue> = match command {
        Command::Validate => Vec::new(),
        Command::Steady => cfg.violation_issues(),
        Command::Kinetic => {
            if cfg.model.x_extent > 0.0 && cfg.model.y_extent > 0.0 {
                Vec::new()
            } else {
                vec![ConfigIssue {
                    line: 0,
                    message: "kinetic aggregation needs positive domain extents".to_string(),
                }]
            }
        }
        _ => cfg
            .violation_issues()
            .into_iter()
            .filter(|issue| !issue.message.contains("b > g_x X + g_y Y"))
            .collect(),
    };
    if issues.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(issues))
    }
}

fn build_mode(cfg: &RunConfig) -> Result<WaveMode, CliError> {
    match cfg.mode.family {
        ModeFamily::Auto => WaveMode::analyze(
            &cfg.model,
            cfg.mode.omega,
            cfg.mode.k,
            cfg.mode.policy,
            cfg.mode.tol,
        )
        .map_err(numerical),
        ModeFamily::Simplest => {
            WaveMode::simplest(&cfg.model, cfg.mode.omega, cfg.mode.k).map_err(numerical)
        }
    }
}

fn base_metadata(cfg: &RunConfig, command: Command) -> Vec<(String, String)> {
    let mut entries = vec![
        ("command".to_string(), command.name().to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("seed".to_string(), "none".to_string()),
    ];
    let m = &cfg.model;
    for (key, value) in [
        ("a1", m.a1),
        ("a2", m.a2),
        ("b", m.b),
        ("d", m.d),
        ("g_x", m.g_x),
        ("g_y", m.g_y),
        ("h_x", m.h_x),
        ("h_y", m.h_y),
        ("i0", m.i0),
        ("p0", m.p0),
        ("x_extent", m.x_extent),
        ("y_extent", m.y_extent),
    ] {
        entries.push((format!("model.{key}"), fmt_f64(value)));
    }
    entries
}

fn mode_metadata(cfg: &RunConfig, mode: &WaveMode) -> Vec<(String, String)> {
    vec![
        ("mode.omega".to_string(), fmt_f64(mode.omega)),
        ("mode.k".to_string(), fmt_f64(mode.k)),
        ("mode.amplitude".to_string(), fmt_f64(cfg.mode.amplitude)),
        ("mode.policy".to_string(), mode.policy.to_string()),
        ("mode.tol".to_string(), fmt_f64(cfg.mode.tol)),
        ("mode.regime".to_string(), mode.regime.to_string()),
        (
            "mode.target_slope".to_string(),
            fmt_f64(mode.target_slope),
        ),
        (
            "mode.near_degenerate".to_string(),
            mode.near_degenerate.to_string(),
        ),
    ]
}

fn write_outputs(
    out_dir: &Path,
    name: &str,
    headers: &[&str],
    rows: &[Vec<String>],
    metadata: Vec<(String, String)>,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    emit_csv(headers, rows, &csv_path)?;
    let meta_path = sidecar_path(&csv_path);
    emit_metadata(&metadata, &meta_path)?;
    Ok(vec![csv_path, meta_path])
}

/// Runs one command, writing its CSV and sidecar into `out_dir`.
pub fn execute(cfg: &RunConfig, command: Command, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    gate(cfg, command)?;
    match command {
        Command::Validate => run_validate(cfg, out_dir),
        Command::Steady => run_steady(cfg, out_dir),
        Command::Dispersion => run_dispersion(cfg, out_dir),
        Command::Modes => run_modes(cfg, out_dir),
        Command::Field => run_field(cfg, out_dir),
        Command::Aggregate => run_aggregate(cfg, out_dir),
        Command::Trajectory => run_trajectory(cfg, out_dir),
        Command::Simulate => run_simulate(cfg, out_dir),
        Command::Kinetic => run_kinetic(cfg, out_dir),
    }
}

fn run_validate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = validate_params(&cfg.model);
    let rows: Vec<Vec<String>> = report
        .violations
        .iter()
        .map(|v| vec![v.constraint.to_string(), v.detail.clone()])
        .collect();
    let mut metadata = base_metadata(cfg, Command::Validate);
    metadata.push((
        "status".to_string(),
        if report.is_ok() { "ok" } else { "violations" }.to_string(),
    ));
    write_outputs(out_dir, "validate", &["constraint", "detail"], &rows, metadata)
}

fn run_steady(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (nx, ny) = (cfg.grid.nx.max(1), cfg.grid.ny.max(1));
    let mut rows = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = cfg.model.y_extent * j as f64 / ny as f64;
        for i in 0..=nx {
            let x = cfg.model.x_extent * i as f64 / nx as f64;
            rows.push(vec![
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(cfg.model.steady_investment(x, y)),
                fmt_f64(cfg.model.steady_profits(x, y)),
            ]);
        }
    }
    write_outputs(
        out_dir,
        "steady",
        &["x", "y", "I", "P"],
        &rows,
        base_metadata(cfg, Command::Steady),
    )
}

fn run_dispersion(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let sweep = &cfg.dispersion;
    let count = sweep.count.max(1);
    let mut rows = Vec::with_capacity(count);
    for idx in 0..count {
        let frac = if count == 1 {
            0.0
        } else {
            idx as f64 / (count - 1) as f64
        };
        let k = sweep.k_min + frac * (sweep.k_max - sweep.k_min);
        let mode = incompressible_mode(&cfg.model, k).map_err(numerical)?;
        rows.push(vec![
            fmt_f64(mode.k),
            fmt_f64(mode.omega),
            fmt_f64(mode.c),
            fmt_f64(mode.kappa),
            fmt_f64(mode.wavelength),
        ]);
    }
    let mut metadata = base_metadata(cfg, Command::Dispersion);
    metadata.push(("sweep.k_min".to_string(), fmt_f64(sweep.k_min)));
    metadata.push(("sweep.k_max".to_string(), fmt_f64(sweep.k_max)));
    metadata.push(("sweep.count".to_string(), count.to_string()));
    write_outputs(
        out_dir,
        "dispersion",
        &["k", "omega", "c", "kappa", "wavelength"],
        &rows,
        metadata,
    )
}

fn run_modes(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mode = build_mode(cfg)?;
    let coeffs = quartic_coefficients(&cfg.model, cfg.mode.omega, cfg.mode.k).map_err(numerical)?;
    let growth = inward_growth_rates(&mode);
    let rates = mode.basis.component_rates();
    let thetas = mode.basis.component_thetas();
    let kinds: [&str; 4] = match mode.basis {
        ProfileBasis::Real4(_) => ["exp", "exp", "exp", "exp"],
        ProfileBasis::Real2Complex1 { .. } => ["exp", "exp", "cos", "sin"],
        ProfileBasis::Complex2 { .. } => ["cos", "cos", "sin", "sin"],
    };
    // Root column: the root generating each component, conjugates split
    // across the sin/cos slots so the four rows list the full multiset.
    let root_for = |slot: usize| -> (f64, f64) {
        let theta = thetas[slot];
        if theta == 0.0 {
            (rates[slot], 0.0)
        } else if kinds[slot] == "sin" {
            (rates[slot], -theta)
        } else {
            (rates[slot], theta)
        }
    };
    let mut rows = Vec::with_capacity(4);
    for slot in 0..4 {
        let (re, im) = root_for(slot);
        let grows = growth
            .components
            .iter()
            .find(|c| c.index == slot)
            .map(|c| c.grows_inward)
            .unwrap_or(false);
        rows.push(vec![
            slot.to_string(),
            mode.regime.to_string(),
            fmt_f64(re),
            fmt_f64(im),
            kinds[slot].to_string(),
            fmt_f64(rates[slot]),
            fmt_f64(thetas[slot]),
            fmt_f64(mode.weights[slot]),
            grows.to_string(),
        ]);
    }
    let mut metadata = base_metadata(cfg, Command::Modes);
    metadata.extend(mode_metadata(cfg, &mode));
    for (name, value) in [
        ("q4", coeffs.q4),
        ("q3", coeffs.q3),
        ("q2", coeffs.q2),
        ("q1", coeffs.q1),
        ("q0", coeffs.q0),
    ] {
        metadata.push((format!("quartic.{name}"), fmt_f64(value)));
    }
    metadata.push((
        "mode.amplifying".to_string(),
        growth.amplifying.to_string(),
    ));
    write_outputs(
        out_dir,
        "modes",
        &[
            "component",
            "regime",
            "root_re",
            "root_im",
            "kind",
            "rate",
            "theta",
            "weight",
            "grows_inward",
        ],
        &rows,
        metadata,
    )
}

fn run_field(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mode = build_mode(cfg)?;
    let rows_data = wavefield::snapshot(
        &mode,
        &cfg.model,
        cfg.mode.amplitude,
        cfg.field.t,
        cfg.grid.nx.max(1),
        cfg.grid.ny.max(1),
    );
    let rows: Vec<Vec<String>> = rows_data
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.x),
                fmt_f64(r.y),
                fmt_f64(r.i),
                fmt_f64(r.p),
                fmt_f64(r.vx),
                fmt_f64(r.vy),
                fmt_f64(r.ux),
                fmt_f64(r.uy),
            ]
        })
        .collect();
    let mut metadata = base_metadata(cfg, Command::Field);
    metadata.extend(mode_metadata(cfg, &mode));
    metadata.push(("field.t".to_string(), fmt_f64(cfg.field.t)));
    write_outputs(
        out_dir,
        "field",
        &["t", "x", "y", "I", "P", "vx", "vy", "ux", "uy"],
        &rows,
        metadata,
    )
}

fn run_aggregate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mode = build_mode(cfg)?;
    let block = &cfg.aggregate;
    let count = block.count.max(1);
    let mut rows = Vec::with_capacity(count);
    for idx in 0..count {
        let frac = if count == 1 {
            0.0
        } else {
            idx as f64 / (count - 1) as f64
        };
        let t = block.t_start + frac * (block.t_end - block.t_start);
        let value = wavefield::aggregate_investment(&mode, &cfg.model, cfg.mode.amplitude, t);
        rows.push(vec![fmt_f64(t), fmt_f64(value)]);
    }
    let mut metadata = base_metadata(cfg, Command::Aggregate);
    metadata.extend(mode_metadata(cfg, &mode));
    metadata.push((
        "aggregate.steady_part".to_string(),
        fmt_f64(wavefield::aggregate_investment_steady(&cfg.model)),
    ));
    metadata.push((
        "aggregate.sign_note".to_string(),
        "wave term carries the quadrature-verified sign; a commonly printed variant \
         uses the opposite sign"
            .to_string(),
    ));
    write_outputs(out_dir, "aggregate", &["t", "value"], &rows, metadata)
}

fn run_trajectory(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mode =
        WaveMode::simplest(&cfg.model, cfg.mode.omega, cfg.mode.k).map_err(numerical)?;
    let block = &cfg.trajectory;
    let count = block.count.max(1);
    let times: Vec<f64> = (0..count)
        .map(|idx| {
            let frac = if count == 1 {
                0.0
            } else {
                idx as f64 / (count - 1) as f64
            };
            block.t_end * frac
        })
        .collect();
    let points = wavefield::circulation_trajectory(
        &mode,
        &cfg.model,
        cfg.mode.amplitude,
        block.x0,
        block.y0,
        &times,
    )
    .map_err(numerical)?;
    let rows: Vec<Vec<String>> = times
        .iter()
        .zip(points.iter())
        .map(|(t, (x, y))| vec![fmt_f64(*t), fmt_f64(*x), fmt_f64(*y)])
        .collect();
    let mut metadata = base_metadata(cfg, Command::Trajectory);
    metadata.extend(mode_metadata(cfg, &mode));
    metadata.push(("trajectory.x0".to_string(), fmt_f64(block.x0)));
    metadata.push(("trajectory.y0".to_string(), fmt_f64(block.y0)));
    write_outputs(out_dir, "trajectory", &["t", "x", "y"], &rows, metadata)
}

fn run_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let sim = &cfg.sim;
    let needs_mode = sim.forcing_amplitude != 0.0 || sim.init == SimInit::Mode;
    let mode = if needs_mode { Some(build_mode(cfg)?) } else { None };
    let sim_config = SimConfig {
        nx: sim.nx,
        ny: sim.ny,
        dt: sim.dt,
        lateral: sim.lateral,
        forcing: match (&mode, sim.forcing_amplitude != 0.0) {
            (Some(mode), true) => Some(BoundaryForcing {
                mode: mode.clone(),
                amplitude: sim.forcing_amplitude,
            }),
            _ => None,
        },
        zero_coupling: sim.zero_coupling,
    };
    let initial = match (&mode, sim.init) {
        (Some(mode), SimInit::Mode) => Initial::AnalyticMode {
            mode: mode.clone(),
            amplitude: sim.forcing_amplitude,
        },
        _ => Initial::Zero,
    };
    let mut state = fdsim::init_sim(&cfg.model, sim_config, initial).map_err(numerical)?;
    let warnings = state.warnings.clone();
    let series =
        fdsim::run_and_probe(&mut state, &sim.probes, sim.cadence, sim.steps).map_err(numerical)?;

    let mut headers: Vec<String> = vec!["t".to_string(), "border_integral".to_string()];
    for probe in 0..sim.probes.len() {
        for field in ["dI", "dP", "vx", "vy", "ux", "uy"] {
            headers.push(format!("p{probe}_{field}"));
        }
    }
    let header_refs: Vec<&str> = headers.iter().map(|h| h.as_str()).collect();
    let mut rows = Vec::with_capacity(series.times.len());
    for (idx, t) in series.times.iter().enumerate() {
        let mut row = vec![fmt_f64(*t), fmt_f64(series.border_integral[idx])];
        for probe in 0..sim.probes.len() {
            let s = &series.samples[probe][idx];
            for value in [s.delta_i, s.delta_p, s.vx, s.vy, s.ux, s.uy] {
                row.push(fmt_f64(value));
            }
        }
        rows.push(row);
    }

    let mut metadata = base_metadata(cfg, Command::Simulate);
    if let Some(mode) = &mode {
        metadata.extend(mode_metadata(cfg, mode));
    }
    metadata.push(("sim.nx".to_string(), sim.nx.to_string()));
    metadata.push(("sim.ny".to_string(), sim.ny.to_string()));
    metadata.push(("sim.dt".to_string(), fmt_f64(state.dt)));
    metadata.push(("sim.steps".to_string(), sim.steps.to_string()));
    metadata.push((
        "sim.forcing_amplitude".to_string(),
        fmt_f64(sim.forcing_amplitude),
    ));
    metadata.push((
        "sim.zero_coupling".to_string(),
        sim.zero_coupling.to_string(),
    ));
    metadata.push((
        "sim.boundary_conventions".to_string(),
        "top row forced or closed, bottom closed, lateral periodic or closed by config; \
         these border choices are conventions, not model content"
            .to_string(),
    ));
    for (idx, warning) in warnings.iter().enumerate() {
        metadata.push((format!("sim.warning{idx}"), warning.clone()));
    }

    fs::create_dir_all(out_dir)?;
    let mut written =
        write_outputs(out_dir, "simulate_probes", &header_refs, &rows, metadata.clone())?;

    // Final snapshot in the shared field CSV format; scalars are the full
    // fields (steady state plus perturbation), velocities are averaged to
    // cell centers.
    let (nx, ny) = (sim.nx, sim.ny);
    let (dx, dy) = (state.dx(), state.dy());
    let mut snap_rows = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = (j as f64 + 0.5) * dy;
        for i in 0..nx {
            let x = (i as f64 + 0.5) * dx;
            let cell = j * nx + i;
            let vx = 0.5 * (state.vx[j * (nx + 1) + i] + state.vx[j * (nx + 1) + i + 1]);
            let ux = 0.5 * (state.ux[j * (nx + 1) + i] + state.ux[j * (nx + 1) + i + 1]);
            let vy = 0.5 * (state.vy[j * nx + i] + state.vy[(j + 1) * nx + i]);
            let uy = 0.5 * (state.uy[j * nx + i] + state.uy[(j + 1) * nx + i]);
            snap_rows.push(vec![
                fmt_f64(state.t),
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(cfg.model.steady_investment(x, y) + state.delta_i[cell]),
                fmt_f64(cfg.model.steady_profits(x, y) + state.delta_p[cell]),
                fmt_f64(vx),
                fmt_f64(vy),
                fmt_f64(ux),
                fmt_f64(uy),
            ]);
        }
    }
    written.extend(write_outputs(
        out_dir,
        "simulate_final",
        &["t", "x", "y", "I", "P", "vx", "vy", "ux", "uy"],
        &snap_rows,
        metadata,
    )?);
    Ok(written)
}

fn run_kinetic(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let block = &cfg.kinetic;
    let file = fs::File::open(&block.input)?;
    let particles = kinetic::read_particles_csv(file).map_err(numerical)?;
    let spec = GridSpec {
        nx: cfg.grid.nx.max(1),
        ny: cfg.grid.ny.max(1),
        x_extent: cfg.model.x_extent,
        y_extent: cfg.model.y_extent,
    };
    if block.variable == 0 {
        return Err(CliError::Config(vec![ConfigIssue {
            line: 0,
            message: "kinetic.variable is 1-based: 1 selects column u1".to_string(),
        }]));
    }
    let (density, impulse) =
        kinetic::deposit_fields(&particles, spec, block.variable - 1, block.deposit)
            .map_err(numerical)?;
    let floor = block.floor.unwrap_or_else(|| default_density_floor(&density));
    let velocity = kinetic::field_velocity(&density, &impulse, floor).map_err(numerical)?;

    let mut rows = Vec::with_capacity(spec.nx * spec.ny);
    for j in 0..spec.ny {
        let y = (j as f64 + 0.5) * spec.dy();
        for i in 0..spec.nx {
            let x = (i as f64 + 0.5) * spec.dx();
            let cell = j * spec.nx + i;
            let (vx, vy) = match velocity.values[cell] {
                Some([vx, vy]) => (fmt_f64(vx), fmt_f64(vy)),
                None => (String::new(), String::new()),
            };
            rows.push(vec![
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(density.values[cell]),
                fmt_f64(impulse.values[cell][0]),
                fmt_f64(impulse.values[cell][1]),
                vx,
                vy,
            ]);
        }
    }
    let mut metadata = base_metadata(cfg, Command::Kinetic);
    metadata.push(("kinetic.input".to_string(), block.input.clone()));
    metadata.push(("kinetic.variable".to_string(), block.variable.to_string()));
    metadata.push((
        "kinetic.deposit".to_string(),
        match block.deposit {
            kinetic::DepositMode::NearestCell => "nearest",
            kinetic::DepositMode::Bilinear => "bilinear",
        }
        .to_string(),
    ));
    metadata.push(("kinetic.floor".to_string(), fmt_f64(floor)));
    metadata.push(("kinetic.particles".to_string(), particles.len().to_string()));
    write_outputs(
        out_dir,
        "kinetic",
        &["x", "y", "density", "impulse_x", "impulse_y", "vx", "vy"],
        &rows,
        metadata,
    )
}
