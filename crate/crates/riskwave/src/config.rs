//! Flat sectioned `key = value` run configuration.
//!
//! The format is deliberately line-oriented so every parse and validation
//! error can name its line. Unknown sections and keys are rejected; model
//! constraints are re-validated on parse and reported with the line where
//! the offending key was set.

use std::collections::HashMap;

use thiserror::Error;

use crate::dispersion::WeightPolicy;
use crate::fdsim::LateralBoundary;
use crate::kinetic::DepositMode;
use crate::model::{matching_h_y, validate_params, ModelParams, ValidationReport};

/// One line-addressed configuration problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// 1-based line number; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

#[derive(Debug, Error)]
#[error("{}", issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

/// Mode family selector for commands that build a wave mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeFamily {
    /// Solve the quartic and attach weights under the configured policy.
    #[default]
    Auto,
    /// Single positive real root matching the border slope.
    Simplest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeBlock {
    pub omega: f64,
    pub k: f64,
    pub amplitude: f64,
    pub policy: WeightPolicy,
    pub tol: f64,
    pub family: ModeFamily,
}

impl Default for ModeBlock {
    fn default() -> Self {
        ModeBlock {
            omega: 1.0,
            k: 1.0,
            amplitude: 1.0,
            policy: WeightPolicy::MinimalNorm,
            tol: crate::dispersion::DEFAULT_CLASSIFY_TOL,
            family: ModeFamily::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBlock {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock { nx: 32, ny: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionBlock {
    pub k_min: f64,
    pub k_max: f64,
    pub count: usize,
}

impl Default for DispersionBlock {
    fn default() -> Self {
        DispersionBlock {
            k_min: 0.1,
            k_max: 10.0,
            count: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldBlock {
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateBlock {
    pub t_start: f64,
    pub t_end: f64,
    pub count: usize,
}

impl Default for AggregateBlock {
    fn default() -> Self {
        AggregateBlock {
            t_start: 0.0,
            t_end: 2.0 * std::f64::consts::PI,
            count: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryBlock {
    pub x0: f64,
    pub y0: f64,
    pub t_end: f64,
    pub count: usize,
}

impl Default for TrajectoryBlock {
    fn default() -> Self {
        TrajectoryBlock {
            x0: 0.5,
            y0: 0.5,
            t_end: 2.0 * std::f64::consts::PI,
            count: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimBlock {
    pub nx: usize,
    pub ny: usize,
    pub dt: Option<f64>,
    pub steps: usize,
    pub cadence: usize,
    pub lateral: LateralBoundary,
    pub forcing_amplitude: f64,
    pub init: SimInit,
    pub zero_coupling: bool,
    pub probes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimInit {
    #[default]
    Zero,
    Mode,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            nx: 32,
            ny: 32,
            dt: None,
            steps: 256,
            cadence: 1,
            lateral: LateralBoundary::PeriodicX,
            forcing_amplitude: 0.0,
            init: SimInit::Zero,
            zero_coupling: false,
            probes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticBlock {
    pub input: String,
    pub variable: usize,
    pub deposit: DepositMode,
    pub floor: Option<f64>,
}

impl Default for KineticBlock {
    fn default() -> Self {
        KineticBlock {
            input: "particles.csv".to_string(),
            variable: 1,
            deposit: DepositMode::NearestCell,
            floor: None,
        }
    }
}

/// Fully parsed and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub mode: ModeBlock,
    pub grid: GridBlock,
    pub dispersion: DispersionBlock,
    pub field: FieldBlock,
    pub aggregate: AggregateBlock,
    pub trajectory: TrajectoryBlock,
    pub sim: SimBlock,
    pub kinetic: KineticBlock,
    /// Full constraint report of the model block.
    pub validation: ValidationReport,
    /// Line where each model key was set, for violation addressing.
    pub model_key_lines: HashMap<String, usize>,
}

impl RunConfig {
    /// Line-addressed messages for every violated model constraint.
    pub fn violation_issues(&self) -> Vec<ConfigIssue> {
        self.validation
            .violations
            .iter()
            .map(|violation| {
                let line = violation
                    .params
                    .iter()
                    .filter_map(|key| self.model_key_lines.get(*key))
                    .copied()
                    .next()
                    .unwrap_or(0);
                ConfigIssue {
                    line,
                    message: format!("constraint violation: {violation}"),
                }
            })
            .collect()
    }

    /// Renders the configuration back to the flat sectioned format.
    /// `parse_config(render(cfg))` reproduces the configuration.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let m = &self.model;
        out.push_str("[model]\n");
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
            out.push_str(&format!("{key} = {value}\n"));
        }
        out.push_str("\n[mode]\n");
        out.push_str(&format!("omega = {}\n", self.mode.omega));
        out.push_str(&format!("k = {}\n", self.mode.k));
        out.push_str(&format!("amplitude = {}\n", self.mode.amplitude));
        out.push_str(&format!("policy = {}\n", self.mode.policy));
        out.push_str(&format!("tol = {}\n", self.mode.tol));
        out.push_str(&format!(
            "family = {}\n",
            match self.mode.family {
                ModeFamily::Auto => "auto",
                ModeFamily::Simplest => "simplest",
            }
        ));
        out.push_str("\n[grid]\n");
        out.push_str(&format!("nx = {}\nny = {}\n", self.grid.nx, self.grid.ny));
        out.push_str("\n[dispersion]\n");
        out.push_str(&format!(
            "k_min = {}\nk_max = {}\ncount = {}\n",
            self.dispersion.k_min, self.dispersion.k_max, self.dispersion.count
        ));
        out.push_str("\n[field]\n");
        out.push_str(&format!("t = {}\n", self.field.t));
        out.push_str("\n[aggregate]\n");
        out.push_str(&format!(
            "t_start = {}\nt_end = {}\ncount = {}\n",
            self.aggregate.t_start, self.aggregate.t_end, self.aggregate.count
        ));
        out.push_str("\n[trajectory]\n");
        out.push_str(&format!(
            "x0 = {}\ny0 = {}\nt_end = {}\ncount = {}\n",
            self.trajectory.x0, self.trajectory.y0, self.trajectory.t_end, self.trajectory.count
        ));
        out.push_str("\n[sim]\n");
        out.push_str(&format!("nx = {}\nny = {}\n", self.sim.nx, self.sim.ny));
        if let Some(dt) = self.sim.dt {
            out.push_str(&format!("dt = {dt}\n"));
        }
        out.push_str(&format!(
            "steps = {}\ncadence = {}\n",
            self.sim.steps, self.sim.cadence
        ));
        out.push_str(&format!(
            "lateral = {}\n",
            match self.sim.lateral {
                LateralBoundary::PeriodicX => "periodic",
                LateralBoundary::ClosedX => "closed",
            }
        ));
        out.push_str(&format!(
            "forcing_amplitude = {}\n",
            self.sim.forcing_amplitude
        ));
        out.push_str(&format!(
            "init = {}\n",
            match self.sim.init {
                SimInit::Zero => "zero",
                SimInit::Mode => "mode",
            }
        ));
        out.push_str(&format!("zero_coupling = {}\n", self.sim.zero_coupling));
        if !self.sim.probes.is_empty() {
            let probes = self
                .sim
                .probes
                .iter()
                .map(|(x, y)| format!("{x}:{y}"))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!("probes = {probes}\n"));
        }
        out.push_str("\n[kinetic]\n");
        out.push_str(&format!("input = {}\n", self.kinetic.input));
        out.push_str(&format!("variable = {}\n", self.kinetic.variable));
        out.push_str(&format!(
            "deposit = {}\n",
            match self.kinetic.deposit {
                DepositMode::NearestCell => "nearest",
                DepositMode::Bilinear => "bilinear",
            }
        ));
        if let Some(floor) = self.kinetic.floor {
            out.push_str(&format!("floor = {floor}\n"));
        }
        out
    }
}

struct RawEntry {
    line: usize,
    value: String,
}

/// Parses the flat sectioned text into a validated [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    const SECTIONS: [&str; 9] = [
        "model",
        "mode",
        "grid",
        "dispersion",
        "field",
        "aggregate",
        "trajectory",
        "sim",
        "kinetic",
    ];
    const KEYS: [(&str, &[&str]); 9] = [
        (
            "model",
            &[
                "a1", "a2", "b", "d", "g_x", "g_y", "h_x", "h_y", "i0", "p0", "x_extent",
                "y_extent",
            ],
        ),
        ("mode", &["omega", "k", "amplitude", "policy", "tol", "family"]),
        ("grid", &["nx", "ny"]),
        ("dispersion", &["k_min", "k_max", "count"]),
        ("field", &["t"]),
        ("aggregate", &["t_start", "t_end", "count"]),
        ("trajectory", &["x0", "y0", "t_end", "count"]),
        (
            "sim",
            &[
                "nx",
                "ny",
                "dt",
                "steps",
                "cadence",
                "lateral",
                "forcing_amplitude",
                "init",
                "zero_coupling",
                "probes",
            ],
        ),
        ("kinetic", &["input", "variable", "deposit", "floor"]),
    ];

    let mut issues: Vec<ConfigIssue> = Vec::new();
    let mut entries: HashMap<(String, String), RawEntry> = HashMap::new();
    let mut section: Option<String> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                issues.push(ConfigIssue {
                    line,
                    message: format!("malformed section header {content:?}"),
                });
                continue;
            };
            let name = name.trim();
            if SECTIONS.contains(&name) {
                section = Some(name.to_string());
            } else {
                issues.push(ConfigIssue {
                    line,
                    message: format!("unknown section [{name}]"),
                });
                section = None;
            }
            continue;
        }
        let Some(eq) = content.find('=') else {
            issues.push(ConfigIssue {
                line,
                message: format!("expected key = value, got {content:?}"),
            });
            continue;
        };
        let key = content[..eq].trim().to_string();
        let value = content[eq + 1..].trim().to_string();
        let Some(section_name) = &section else {
            issues.push(ConfigIssue {
                line,
                message: format!("key {key:?} outside any [section]"),
            });
            continue;
        };
        let allowed = KEYS
            .iter()
            .find(|(s, _)| s == section_name)
            .map(|(_, keys)| *keys)
            .unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            issues.push(ConfigIssue {
                line,
                message: format!("unknown key {key:?} in section [{section_name}]"),
            });
            continue;
        }
        if entries
            .insert((section_name.clone(), key.clone()), RawEntry { line, value })
            .is_some()
        {
            issues.push(ConfigIssue {
                line,
                message: format!("duplicate key {key:?} in section [{section_name}]"),
            });
        }
    }

    let mut take = |section: &str, key: &str| -> Option<RawEntry> {
        entries.remove(&(section.to_string(), key.to_string()))
    };

    macro_rules! parse_as {
        ($entry:expr, $ty:ty, $issues:expr) => {
            match $entry {
                Some(raw) => match raw.value.parse::<$ty>() {
                    Ok(v) => Some((v, raw.line)),
                    Err(e) => {
                        $issues.push(ConfigIssue {
                            line: raw.line,
                            message: format!("bad value {:?}: {e}", raw.value),
                        });
                        None
                    }
                },
                None => None,
            }
        };
    }

    // [model]: all keys required except g_y, derivable from the identity.
    let mut model_key_lines = HashMap::new();
    let mut model_vals: HashMap<&str, f64> = HashMap::new();
    for key in [
        "a1", "a2", "b", "d", "g_x", "g_y", "h_x", "h_y", "i0", "p0", "x_extent", "y_extent",
    ] {
        let raw = take("model", key);
        let existed = raw.is_some();
        if let Some((v, line)) = parse_as!(raw, f64, issues) {
            model_vals.insert(key, v);
            model_key_lines.insert(key.to_string(), line);
        } else if !existed && key != "g_y" {
            issues.push(ConfigIssue {
                line: 0,
                message: format!("missing required key {key:?} in section [model]"),
            });
        }
    }

    let mode_omega = parse_as!(take("mode", "omega"), f64, issues);
    let mode_k = parse_as!(take("mode", "k"), f64, issues);
    let mode_amplitude = parse_as!(take("mode", "amplitude"), f64, issues);
    let mode_tol = parse_as!(take("mode", "tol"), f64, issues);
    let mode_policy = take("mode", "policy").and_then(|raw| match raw.value.as_str() {
        "minimal-norm" => Some(WeightPolicy::MinimalNorm),
        "pin-zero" => Some(WeightPolicy::PinSecondaryZero),
        other => {
            issues.push(ConfigIssue {
                line: raw.line,
                message: format!("bad policy {other:?}: want minimal-norm or pin-zero"),
            });
            None
        }
    });
    let mode_family = take("mode", "family").and_then(|raw| match raw.value.as_str() {
        "auto" => Some(ModeFamily::Auto),
        "simplest" => Some(ModeFamily::Simplest),
        other => {
            issues.push(ConfigIssue {
                line: raw.line,
                message: format!("bad family {other:?}: want auto or simplest"),
            });
            None
        }
    });

    let grid_nx = parse_as!(take("grid", "nx"), usize, issues);
    let grid_ny = parse_as!(take("grid", "ny"), usize, issues);

    let disp_kmin = parse_as!(take("dispersion", "k_min"), f64, issues);
    let disp_kmax = parse_as!(take("dispersion", "k_max"), f64, issues);
    let disp_count = parse_as!(take("dispersion", "count"), usize, issues);

    let field_t = parse_as!(take("field", "t"), f64, issues);

    let agg_start = parse_as!(take("aggregate", "t_start"), f64, issues);
    let agg_end = parse_as!(take("aggregate", "t_end"), f64, issues);
    let agg_count = parse_as!(take("aggregate", "count"), usize, issues);

    let traj_x0 = parse_as!(take("trajectory", "x0"), f64, issues);
    let traj_y0 = parse_as!(take("trajectory", "y0"), f64, issues);
    let traj_tend = parse_as!(take("trajectory", "t_end"), f64, issues);
    let traj_count = parse_as!(take("trajectory", "count"), usize, issues);

    let sim_nx = parse_as!(take("sim", "nx"), usize, issues);
    let sim_ny = parse_as!(take("sim", "ny"), usize, issues);
    let sim_dt = parse_as!(take("sim", "dt"), f64, issues);
    let sim_steps = parse_as!(take("sim", "steps"), usize, issues);
    let sim_cadence = parse_as!(take("sim", "cadence"), usize, issues);
    let sim_force = parse_as!(take("sim", "forcing_amplitude"), f64, issues);
    let sim_zero = parse_as!(take("sim", "zero_coupling"), bool, issues);
    let sim_lateral = take("sim", "lateral").and_then(|raw| match raw.value.as_str() {
        "periodic" => Some(LateralBoundary::PeriodicX),
        "closed" => Some(LateralBoundary::ClosedX),
        other => {
            issues.push(ConfigIssue {
                line: raw.line,
                message: format!("bad lateral {other:?}: want periodic or closed"),
            });
            None
        }
    });
    let sim_init = take("sim", "init").and_then(|raw| match raw.value.as_str() {
        "zero" => Some(SimInit::Zero),
        "mode" => Some(SimInit::Mode),
        other => {
            issues.push(ConfigIssue {
                line: raw.line,
                message: format!("bad init {other:?}: want zero or mode"),
            });
            None
        }
    });
    let sim_probes = take("sim", "probes").and_then(|raw| {
        let mut probes = Vec::new();
        for part in raw.value.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let mut halves = part.split(':');
            let bad = || ConfigIssue {
                line: raw.line,
                message: format!("bad probe {part:?}: want x:y"),
            };
            let (Some(x), Some(y), None) = (halves.next(), halves.next(), halves.next()) else {
                issues.push(bad());
                return None;
            };
            match (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
                (Ok(x), Ok(y)) => probes.push((x, y)),
                _ => {
                    issues.push(bad());
                    return None;
                }
            }
        }
        Some(probes)
    });

    let kin_input = take("kinetic", "input").map(|raw| raw.value);
    let kin_variable = parse_as!(take("kinetic", "variable"), usize, issues);
    let kin_floor = parse_as!(take("kinetic", "floor"), f64, issues);
    let kin_deposit = take("kinetic", "deposit").and_then(|raw| match raw.value.as_str() {
        "nearest" => Some(DepositMode::NearestCell),
        "bilinear" => Some(DepositMode::Bilinear),
        other => {
            issues.push(ConfigIssue {
                line: raw.line,
                message: format!("bad deposit {other:?}: want nearest or bilinear"),
            });
            None
        }
    });

    if !issues.is_empty() {
        return Err(ConfigError { issues });
    }

    let get = |key: &str| model_vals.get(key).copied();
    let (i0, p0, h_y) = (
        get("i0").unwrap_or(f64::NAN),
        get("p0").unwrap_or(f64::NAN),
        get("h_y").unwrap_or(f64::NAN),
    );
    let g_y = get("g_y").unwrap_or_else(|| matching_h_y(p0, i0, h_y));
    let model = ModelParams {
        a1: get("a1").unwrap_or(f64::NAN),
        a2: get("a2").unwrap_or(f64::NAN),
        b: get("b").unwrap_or(f64::NAN),
        d: get("d").unwrap_or(f64::NAN),
        g_x: get("g_x").unwrap_or(f64::NAN),
        g_y,
        h_x: get("h_x").unwrap_or(f64::NAN),
        h_y,
        i0,
        p0,
        x_extent: get("x_extent").unwrap_or(f64::NAN),
        y_extent: get("y_extent").unwrap_or(f64::NAN),
    };
    let validation = validate_params(&model);

    let defaults_mode = ModeBlock::default();
    let defaults_disp = DispersionBlock::default();
    let defaults_agg = AggregateBlock::default();
    let defaults_traj = TrajectoryBlock::default();
    let defaults_sim = SimBlock::default();
    let defaults_kin = KineticBlock::default();

    Ok(RunConfig {
        model,
        mode: ModeBlock {
            omega: mode_omega.map_or(defaults_mode.omega, |v| v.0),
            k: mode_k.map_or(defaults_mode.k, |v| v.0),
            amplitude: mode_amplitude.map_or(defaults_mode.amplitude, |v| v.0),
            policy: mode_policy.unwrap_or(defaults_mode.policy),
            tol: mode_tol.map_or(defaults_mode.tol, |v| v.0),
            family: mode_family.unwrap_or(defaults_mode.family),
        },
        grid: GridBlock {
            nx: grid_nx.map_or(32, |v| v.0),
            ny: grid_ny.map_or(32, |v| v.0),
        },
        dispersion: DispersionBlock {
            k_min: disp_kmin.map_or(defaults_disp.k_min, |v| v.0),
            k_max: disp_kmax.map_or(defaults_disp.k_max, |v| v.0),
            count: disp_count.map_or(defaults_disp.count, |v| v.0),
        },
        field: FieldBlock {
            t: field_t.map_or(0.0, |v| v.0),
        },
        aggregate: AggregateBlock {
            t_start: agg_start.map_or(defaults_agg.t_start, |v| v.0),
            t_end: agg_end.map_or(defaults_agg.t_end, |v| v.0),
            count: agg_count.map_or(defaults_agg.count, |v| v.0),
        },
        trajectory: TrajectoryBlock {
            x0: traj_x0.map_or(defaults_traj.x0, |v| v.0),
            y0: traj_y0.map_or(defaults_traj.y0, |v| v.0),
            t_end: traj_tend.map_or(defaults_traj.t_end, |v| v.0),
            count: traj_count.map_or(defaults_traj.count, |v| v.0),
        },
        sim: SimBlock {
            nx: sim_nx.map_or(defaults_sim.nx, |v| v.0),
            ny: sim_ny.map_or(defaults_sim.ny, |v| v.0),
            dt: sim_dt.map(|v| v.0),
            steps: sim_steps.map_or(defaults_sim.steps, |v| v.0),
            cadence: sim_cadence.map_or(defaults_sim.cadence, |v| v.0),
            lateral: sim_lateral.unwrap_or(defaults_sim.lateral),
            forcing_amplitude: sim_force.map_or(defaults_sim.forcing_amplitude, |v| v.0),
            init: sim_init.unwrap_or(defaults_sim.init),
            zero_coupling: sim_zero.map_or(defaults_sim.zero_coupling, |v| v.0),
            probes: sim_probes.unwrap_or_default(),
        },
        kinetic: KineticBlock {
            input: kin_input.unwrap_or(defaults_kin.input),
            variable: kin_variable.map_or(defaults_kin.variable, |v| v.0),
            deposit: kin_deposit.unwrap_or(defaults_kin.deposit),
            floor: kin_floor.map(|v| v.0),
        },
        validation,
        model_key_lines,
    })
}

/// The unit-parameter model block used throughout the documentation.
pub fn unit_model_text(extent: f64) -> String {
    format!(
        "[model]\na1 = 1\na2 = -1\nb = 1\nd = -1\ng_x = 1\ng_y = 1\nh_x = 1\nh_y = 1\n\
         i0 = 1\np0 = 1\nx_extent = {extent}\ny_extent = {extent}\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(&unit_model_text(0.25)).unwrap();
        assert!(cfg.validation.is_ok());
        assert_eq!(cfg.mode, ModeBlock::default());
        assert_eq!(cfg.grid, GridBlock::default());
        assert_eq!(cfg.sim.steps, 256);
    }

    #[test]
    fn constraint_violation_names_line() {
        let text = unit_model_text(0.25).replace("b = 1", "b = -1");
        let cfg = parse_config(&text).unwrap();
        assert!(!cfg.validation.is_ok());
        let issues = cfg.violation_issues();
        let b_line = 1 + text
            .lines()
            .position(|l| l.starts_with("b ="))
            .expect("b line");
        assert!(
            issues.iter().any(|i| i.line == b_line && i.message.contains("b = -1")),
            "issues: {issues:?}"
        );
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let text = format!("{}q_spline = 3\n", unit_model_text(0.25));
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert!(err.issues[0].message.contains("q_spline"));
        assert_eq!(err.issues[0].line, 14);
    }

    #[test]
    fn missing_g_y_is_derived_from_identity() {
        let text = unit_model_text(0.25)
            .replace("g_y = 1\n", "")
            .replace("i0 = 1", "i0 = 2")
            .replace("h_y = 1", "h_y = 0.5");
        let cfg = parse_config(&text).unwrap();
        // g_y = I0^2 h_y / P0^2 = 4 * 0.5 = 2.
        assert_eq!(cfg.model.g_y, 2.0);
        assert!(cfg
            .validation
            .violations
            .iter()
            .all(|v| v.constraint != "I0^2 h_y = P0^2 g_y"));
    }

    #[test]
    fn render_round_trips() {
        let mut text = unit_model_text(0.25);
        text.push_str("\n[mode]\nomega = 2\nk = 0.5\npolicy = pin-zero\n");
        text.push_str("\n[sim]\nprobes = 0.1:0.2,0.125:0.125\nsteps = 17\n");
        let cfg = parse_config(&text).unwrap();
        let rendered = cfg.render();
        let again = parse_config(&rendered).unwrap();
        assert_eq!(cfg.model, again.model);
        assert_eq!(cfg.mode, again.mode);
        assert_eq!(cfg.sim, again.sim);
        assert_eq!(cfg.kinetic, again.kinetic);
        assert_eq!(cfg.aggregate, again.aggregate);
        assert_eq!(cfg.trajectory, again.trajectory);
    }

    #[test]
    fn syntax_errors_are_line_addressed() {
        let text = "[model\na1 = 1\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.issues[0].line, 1);
        assert!(err.issues[0].message.contains("malformed section"));
        // Key outside a section.
        let text2 = "a1 = 1\n";
        let err2 = parse_config(text2).unwrap_err();
        assert!(err2.issues[0].message.contains("outside any"));
    }
}
