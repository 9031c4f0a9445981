//! Finite-difference time-domain integrator for the linearized perturbation
//! system on the risk rectangle.
//!
//! Perturbations about the linear steady state obey
//!
//! ```text
//! dI/dt + I0 div v = a1 u_y        I0 dv/dt = b grad dP
//! dP/dt + P0 div u = a2 v_y        P0 du/dt = d grad dI
//! ```
//!
//! (the constant acceleration terms cancel against the steady-state tilt, so
//! the simulator never carries the steady profile). Scalars live at cell
//! centers, velocity components at faces, and a leapfrog update staggers
//! velocities half a step behind scalars. Border forcing prescribes the
//! normal velocity along y = Y from an analytic mode; the bottom border is
//! closed, the lateral borders are periodic or closed by configuration.

use thiserror::Error;

use crate::dispersion::WaveMode;
use crate::model::{ModelError, ModelParams};
use crate::wavefield;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("time step {dt} violates the stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },
    #[error(
        "instability detected at step {step}: max |field| {max_abs:e} exceeds \
         1e12 x initial scale {scale:e}"
    )]
    Instability { step: u64, max_abs: f64, scale: f64 },
    #[error("probe ({x}, {y}) outside the domain")]
    ProbeOutOfDomain { x: f64, y: f64 },
}

/// Lateral (x) boundary handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LateralBoundary {
    #[default]
    PeriodicX,
    /// Zero normal velocity at x = 0 and x = X.
    ClosedX,
}

/// Prescribed border velocity at y = Y: `v_y = u_y = A f'(0) cos(kx - wt)`,
/// the kinematic rate of the forcing mode's border shape.
#[derive(Debug, Clone)]
pub struct BoundaryForcing {
    pub mode: WaveMode,
    pub amplitude: f64,
}

/// Grid, stepping and boundary configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub nx: usize,
    pub ny: usize,
    /// Time step; `None` picks the stability bound.
    pub dt: Option<f64>,
    pub lateral: LateralBoundary,
    pub forcing: Option<BoundaryForcing>,
    /// Diagnostic override forcing `a1 = a2 = 0` in the update, leaving all
    /// other coefficients untouched.
    pub zero_coupling: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            nx: 32,
            ny: 32,
            dt: None,
            lateral: LateralBoundary::PeriodicX,
            forcing: None,
            zero_coupling: false,
        }
    }
}

/// Initial state selector.
#[derive(Debug, Clone)]
pub enum Initial {
    Zero,
    /// Sample an analytic mode: scalars at t = 0, velocities at t = -dt/2.
    AnalyticMode { mode: WaveMode, amplitude: f64 },
}

/// The six perturbation fields plus bookkeeping. Scalars `delta_i`,
/// `delta_p` sit at cell centers (row-major, `nx` per row); `vx`, `ux` at
/// x-faces (`nx + 1` per row); `vy`, `uy` at y-faces (`nx` per row,
/// `ny + 1` rows).
#[derive(Debug, Clone)]
pub struct SimState {
    pub params: ModelParams,
    pub cfg: SimConfig,
    pub dt: f64,
    /// Time of the scalar fields; velocities sit at `t - dt/2`.
    pub t: f64,
    pub step_count: u64,
    pub delta_i: Vec<f64>,
    pub delta_p: Vec<f64>,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    /// Reference scale for the instability detector.
    pub initial_scale: f64,
    /// Non-fatal configuration notes (e.g. incommensurate forcing).
    pub warnings: Vec<String>,
}

/// Stability bound on the time step.
///
/// The configured bound is the minimum of the gradient-coupling estimate
/// `0.5 min(dx, dy) / c_max` with `c_max = sqrt(max(b P0/I0, |d| I0/P0))`
/// and a continuity-coupling estimate `1 / Omega` with
/// `Omega^2 = max(a1 |d|/P0, |a2| b/I0) (2/dy) + sqrt(b |d|) kappa_max^2`,
/// which accounts for the stiffness the a-couplings add at grid scale.
pub fn max_stable_dt(p: &ModelParams, nx: usize, ny: usize) -> f64 {
    let dx = p.x_extent / nx as f64;
    let dy = p.y_extent / ny as f64;
    let c_max = (p.b * p.p0 / p.i0)
        .max(p.d.abs() * p.i0 / p.p0)
        .sqrt();
    let gradient_bound = 0.5 * dx.min(dy) / c_max;
    let a_scale = (p.a1 * p.d.abs() / p.p0).max(p.a2.abs() * p.b / p.i0);
    let kappa2 = 4.0 / (dx * dx) + 4.0 / (dy * dy);
    let omega2 = a_scale * 2.0 / dy + (p.b.abs() * p.d.abs()).sqrt() * kappa2;
    gradient_bound.min(1.0 / omega2.sqrt())
}

fn max_abs(fields: &[&[f64]]) -> f64 {
    fields
        .iter()
        .flat_map(|f| f.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Builds a simulation state, validating grid, parameters and time step.
pub fn init_sim(p: &ModelParams, cfg: SimConfig, initial: Initial) -> Result<SimState, SimError> {
    p.validate_for_waves()?;
    if cfg.nx < 8 || cfg.ny < 8 {
        return Err(SimError::BadGrid(format!(
            "nx = {}, ny = {}: both must be at least 8",
            cfg.nx, cfg.ny
        )));
    }
    let bound = max_stable_dt(p, cfg.nx, cfg.ny);
    let dt = cfg.dt.unwrap_or(bound);
    if dt > bound * (1.0 + 1e-12) || !(dt > 0.0) {
        return Err(SimError::CflViolation { dt, bound });
    }

    let mut warnings = Vec::new();
    if let Some(forcing) = &cfg.forcing {
        let cycles = forcing.mode.k * p.x_extent / (2.0 * std::f64::consts::PI);
        if cfg.lateral == LateralBoundary::PeriodicX
            && (cycles - cycles.round()).abs() > 1e-9 * (1.0 + cycles.abs())
        {
            warnings.push(format!(
                "forcing wavenumber is incommensurate with the periodic width: \
                 k X / 2 pi = {cycles}"
            ));
        }
    }

    let (nx, ny) = (cfg.nx, cfg.ny);
    let dx = p.x_extent / nx as f64;
    let dy = p.y_extent / ny as f64;
    let mut state = SimState {
        params: *p,
        dt,
        t: 0.0,
        step_count: 0,
        delta_i: vec![0.0; nx * ny],
        delta_p: vec![0.0; nx * ny],
        vx: vec![0.0; (nx + 1) * ny],
        vy: vec![0.0; nx * (ny + 1)],
        ux: vec![0.0; (nx + 1) * ny],
        uy: vec![0.0; nx * (ny + 1)],
        initial_scale: 0.0,
        warnings,
        cfg,
    };

    if let Initial::AnalyticMode { mode, amplitude } = &initial {
        let t_vel = -dt / 2.0;
        for j in 0..ny {
            let y = (j as f64 + 0.5) * dy;
            for i in 0..nx {
                let x = (i as f64 + 0.5) * dx;
                let cell = j * nx + i;
                state.delta_i[cell] =
                    wavefield::investment_perturbation(mode, p, *amplitude, 0.0, x, y);
                state.delta_p[cell] =
                    wavefield::profits_perturbation(mode, p, *amplitude, 0.0, x, y);
            }
        }
        for j in 0..ny {
            let y = (j as f64 + 0.5) * dy;
            for i in 0..=nx {
                let x = i as f64 * dx;
                let v = wavefield::potential_and_velocity(mode, p, *amplitude, t_vel, x, y).v;
                state.vx[j * (nx + 1) + i] = v[0];
                state.ux[j * (nx + 1) + i] = v[0];
            }
        }
        for j in 0..=ny {
            let y = j as f64 * dy;
            for i in 0..nx {
                let x = (i as f64 + 0.5) * dx;
                let v = wavefield::potential_and_velocity(mode, p, *amplitude, t_vel, x, y).v;
                state.vy[j * nx + i] = v[1];
                state.uy[j * nx + i] = v[1];
            }
        }
    }

    let mut scale = max_abs(&[
        &state.delta_i,
        &state.delta_p,
        &state.vx,
        &state.vy,
        &state.ux,
        &state.uy,
    ]);
    if let Some(forcing) = &state.cfg.forcing {
        scale = scale.max((forcing.amplitude * forcing.mode.target_slope).abs());
    }
    state.initial_scale = scale.max(1e-30);
    Ok(state)
}

impl SimState {
    pub fn dx(&self) -> f64 {
        self.params.x_extent / self.cfg.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.params.y_extent / self.cfg.ny as f64
    }

    /// One leapfrog update: velocities advance half a step from scalar
    /// gradients, border conditions are applied, scalars advance a full step
    /// from velocity divergences plus the continuity couplings.
    pub fn step(&mut self) -> Result<(), SimError> {
        let (nx, ny) = (self.cfg.nx, self.cfg.ny);
        let (dx, dy) = (self.dx(), self.dy());
        let p = self.params;
        let dt = self.dt;
        let (a1, a2) = if self.cfg.zero_coupling {
            (0.0, 0.0)
        } else {
            (p.a1, p.a2)
        };
        let cv = dt * p.b / p.i0;
        let cu = dt * p.d / p.p0;

        // Velocity half-step from scalar gradients.
        for j in 0..ny {
            let row = j * nx;
            let frow = j * (nx + 1);
            for i in 1..nx {
                let gp = (self.delta_p[row + i] - self.delta_p[row + i - 1]) / dx;
                let gi = (self.delta_i[row + i] - self.delta_i[row + i - 1]) / dx;
                self.vx[frow + i] += cv * gp;
                self.ux[frow + i] += cu * gi;
            }
            match self.cfg.lateral {
                LateralBoundary::PeriodicX => {
                    let gp = (self.delta_p[row] - self.delta_p[row + nx - 1]) / dx;
                    let gi = (self.delta_i[row] - self.delta_i[row + nx - 1]) / dx;
                    self.vx[frow] += cv * gp;
                    self.ux[frow] += cu * gi;
                    self.vx[frow + nx] = self.vx[frow];
                    self.ux[frow + nx] = self.ux[frow];
                }
                LateralBoundary::ClosedX => {
                    self.vx[frow] = 0.0;
                    self.ux[frow] = 0.0;
                    self.vx[frow + nx] = 0.0;
                    self.ux[frow + nx] = 0.0;
                }
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let gp = (self.delta_p[j * nx + i] - self.delta_p[(j - 1) * nx + i]) / dy;
                let gi = (self.delta_i[j * nx + i] - self.delta_i[(j - 1) * nx + i]) / dy;
                self.vy[j * nx + i] += cv * gp;
                self.uy[j * nx + i] += cu * gi;
            }
        }
        // Closed bottom, forced or closed top.
        for i in 0..nx {
            self.vy[i] = 0.0;
            self.uy[i] = 0.0;
        }
        let t_half = self.t + dt / 2.0;
        for i in 0..nx {
            let top = ny * nx + i;
            let value = match &self.cfg.forcing {
                Some(forcing) => {
                    let x = (i as f64 + 0.5) * dx;
                    forcing.amplitude
                        * forcing.mode.target_slope
                        * (forcing.mode.k * x - forcing.mode.omega * t_half).cos()
                }
                None => 0.0,
            };
            self.vy[top] = value;
            self.uy[top] = value;
        }

        // Scalar full step from divergences and continuity couplings.
        let ci = dt * p.i0;
        let cp = dt * p.p0;
        for j in 0..ny {
            let row = j * nx;
            let frow = j * (nx + 1);
            for i in 0..nx {
                let div_v = (self.vx[frow + i + 1] - self.vx[frow + i]) / dx
                    + (self.vy[(j + 1) * nx + i] - self.vy[row + i]) / dy;
                let div_u = (self.ux[frow + i + 1] - self.ux[frow + i]) / dx
                    + (self.uy[(j + 1) * nx + i] - self.uy[row + i]) / dy;
                let uy_mid = 0.5 * (self.uy[row + i] + self.uy[(j + 1) * nx + i]);
                let vy_mid = 0.5 * (self.vy[row + i] + self.vy[(j + 1) * nx + i]);
                self.delta_i[row + i] += dt * a1 * uy_mid - ci * div_v;
                self.delta_p[row + i] += dt * a2 * vy_mid - cp * div_u;
            }
        }

        self.t += dt;
        self.step_count += 1;

        let max = max_abs(&[
            &self.delta_i,
            &self.delta_p,
            &self.vx,
            &self.vy,
            &self.ux,
            &self.uy,
        ]);
        if !max.is_finite() || max > 1e12 * self.initial_scale {
            return Err(SimError::Instability {
                step: self.step_count,
                max_abs: max,
                scale: self.initial_scale,
            });
        }
        Ok(())
    }

    pub fn run(&mut self, steps: usize) -> Result<(), SimError> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Discrete diagnostic energy
    /// `sum(b dP^2/P0 + |d| dI^2/I0 + I0 |v|^2 + P0 |u|^2) dx dy`,
    /// with each velocity component summed where it lives.
    pub fn energy(&self) -> f64 {
        let p = &self.params;
        let cell: f64 = self
            .delta_p
            .iter()
            .map(|dp| p.b * dp * dp / p.p0)
            .sum::<f64>()
            + self
                .delta_i
                .iter()
                .map(|di| p.d.abs() * di * di / p.i0)
                .sum::<f64>();
        let vel: f64 = self.vx.iter().chain(self.vy.iter()).map(|v| p.i0 * v * v).sum::<f64>()
            + self.ux.iter().chain(self.uy.iter()).map(|u| p.p0 * u * u).sum::<f64>();
        (cell + vel) * self.dx() * self.dy()
    }

    fn bilinear(&self, values: &[f64], nx: usize, ny: usize, gx: f64, gy: f64) -> f64 {
        // Sample a lattice `values[j * nx + i]` at fractional coordinates,
        // clamped to the lattice hull.
        let cx = gx.clamp(0.0, (nx - 1) as f64);
        let cy = gy.clamp(0.0, (ny - 1) as f64);
        let i0 = (cx.floor() as usize).min(nx.saturating_sub(2));
        let j0 = (cy.floor() as usize).min(ny.saturating_sub(2));
        let wx = cx - i0 as f64;
        let wy = cy - j0 as f64;
        let v00 = values[j0 * nx + i0];
        let v10 = values[j0 * nx + i0 + 1];
        let v01 = values[(j0 + 1) * nx + i0];
        let v11 = values[(j0 + 1) * nx + i0 + 1];
        v00 * (1.0 - wx) * (1.0 - wy) + v10 * wx * (1.0 - wy) + v01 * (1.0 - wx) * wy
            + v11 * wx * wy
    }

    /// Interpolated sample of all six fields at a point.
    pub fn sample(&self, x: f64, y: f64) -> Result<ProbeSample, SimError> {
        if !self.params.contains(x, y) {
            return Err(SimError::ProbeOutOfDomain { x, y });
        }
        let (nx, ny) = (self.cfg.nx, self.cfg.ny);
        let (dx, dy) = (self.dx(), self.dy());
        let center_x = x / dx - 0.5;
        let center_y = y / dy - 0.5;
        Ok(ProbeSample {
            delta_i: self.bilinear(&self.delta_i, nx, ny, center_x, center_y),
            delta_p: self.bilinear(&self.delta_p, nx, ny, center_x, center_y),
            vx: self.bilinear(&self.vx, nx + 1, ny, x / dx, center_y),
            vy: self.bilinear(&self.vy, nx, ny + 1, center_x, y / dy),
            ux: self.bilinear(&self.ux, nx + 1, ny, x / dx, center_y),
            uy: self.bilinear(&self.uy, nx, ny + 1, center_x, y / dy),
        })
    }

    /// x-integral of the Investment perturbation along the top cell row, the
    /// discrete analogue of the border-aggregated wave part.
    pub fn border_integral(&self) -> f64 {
        let (nx, ny) = (self.cfg.nx, self.cfg.ny);
        let row = (ny - 1) * nx;
        self.delta_i[row..row + nx].iter().sum::<f64>() * self.dx()
    }

    /// L2 norm of the difference between `delta_i` and the analytic mode's
    /// Investment perturbation at the current time.
    pub fn l2_error_vs_mode(&self, mode: &WaveMode, amplitude: f64) -> f64 {
        let (nx, ny) = (self.cfg.nx, self.cfg.ny);
        let (dx, dy) = (self.dx(), self.dy());
        let mut acc = 0.0;
        for j in 0..ny {
            let y = (j as f64 + 0.5) * dy;
            for i in 0..nx {
                let x = (i as f64 + 0.5) * dx;
                let exact =
                    wavefield::investment_perturbation(mode, &self.params, amplitude, self.t, x, y);
                let diff = self.delta_i[j * nx + i] - exact;
                acc += diff * diff;
            }
        }
        (acc * dx * dy).sqrt()
    }
}

/// One interpolated probe reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub delta_i: f64,
    pub delta_p: f64,
    pub vx: f64,
    pub vy: f64,
    pub ux: f64,
    pub uy: f64,
}

/// Probe time series collected by [`run_and_probe`].
#[derive(Debug, Clone)]
pub struct ProbeSeries {
    /// Scalar-field times of each sample.
    pub times: Vec<f64>,
    /// `samples[p][k]` is probe `p` at time `times[k]`.
    pub samples: Vec<Vec<ProbeSample>>,
    /// Border-row x-integral of the Investment perturbation per sample.
    pub border_integral: Vec<f64>,
}

/// Advances `steps` steps, sampling every `cadence` steps (and at t = 0).
pub fn run_and_probe(
    state: &mut SimState,
    probes: &[(f64, f64)],
    cadence: usize,
    steps: usize,
) -> Result<ProbeSeries, SimError> {
    for &(x, y) in probes {
        if !state.params.contains(x, y) {
            return Err(SimError::ProbeOutOfDomain { x, y });
        }
    }
    let cadence = cadence.max(1);
    let mut series = ProbeSeries {
        times: Vec::new(),
        samples: vec![Vec::new(); probes.len()],
        border_integral: Vec::new(),
    };
    let record = |state: &SimState, series: &mut ProbeSeries| -> Result<(), SimError> {
        series.times.push(state.t);
        for (slot, &(x, y)) in probes.iter().enumerate() {
            series.samples[slot].push(state.sample(x, y)?);
        }
        series.border_integral.push(state.border_integral());
        Ok(())
    };
    record(state, &mut series)?;
    for n in 1..=steps {
        state.step()?;
        if n % cadence == 0 {
            record(state, &mut series)?;
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::WaveMode;
    use crate::model::{unit_params, ModelParams};

    fn wave_params(x_extent: f64, y_extent: f64) -> ModelParams {
        ModelParams {
            x_extent,
            y_extent,
            ..unit_params(1.0)
        }
    }

    #[test]
    fn zero_init_stays_zero() {
        let p = wave_params(1.0, 1.0);
        let cfg = SimConfig {
            nx: 8,
            ny: 8,
            ..SimConfig::default()
        };
        let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
        state.run(50).unwrap();
        assert!(state.delta_i.iter().all(|v| *v == 0.0));
        assert!(state.vx.iter().all(|v| *v == 0.0));
        assert!(state.uy.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cfl_violation_detected() {
        let p = wave_params(1.0, 1.0);
        let bound = max_stable_dt(&p, 8, 8);
        let cfg = SimConfig {
            nx: 8,
            ny: 8,
            dt: Some(bound * 2.0),
            ..SimConfig::default()
        };
        assert!(matches!(
            init_sim(&p, cfg, Initial::Zero),
            Err(SimError::CflViolation { .. })
        ));
    }

    #[test]
    fn grid_minimum_enforced() {
        let p = wave_params(1.0, 1.0);
        let cfg = SimConfig {
            nx: 4,
            ny: 8,
            ..SimConfig::default()
        };
        assert!(matches!(
            init_sim(&p, cfg, Initial::Zero),
            Err(SimError::BadGrid(_))
        ));
    }

    #[test]
    fn incommensurate_forcing_warns() {
        let p = wave_params(1.0, 1.0);
        let mode = WaveMode::simplest(&p, 1.0, 1.0).unwrap();
        let cfg = SimConfig {
            nx: 8,
            ny: 8,
            forcing: Some(BoundaryForcing {
                mode,
                amplitude: 0.01,
            }),
            ..SimConfig::default()
        };
        let state = init_sim(&p, cfg, Initial::Zero).unwrap();
        assert_eq!(state.warnings.len(), 1, "warnings: {:?}", state.warnings);
    }

    #[test]
    fn analytic_init_samples_cell_centers_exactly() {
        let p = wave_params(2.0 * std::f64::consts::PI, 8.0);
        let mode = WaveMode::simplest(&p, 1.0, 1.0).unwrap();
        let amplitude = 0.01;
        let cfg = SimConfig {
            nx: 16,
            ny: 16,
            ..SimConfig::default()
        };
        let state = init_sim(
            &p,
            cfg,
            Initial::AnalyticMode {
                mode: mode.clone(),
                amplitude,
            },
        )
        .unwrap();
        let (dx, dy) = (state.dx(), state.dy());
        // Top-right cell equals the analytic perturbation at its center.
        let (i, j) = (15usize, 15usize);
        let x = (i as f64 + 0.5) * dx;
        let y = (j as f64 + 0.5) * dy;
        let expect = wavefield::investment_perturbation(&mode, &p, amplitude, 0.0, x, y);
        assert_eq!(state.delta_i[j * 16 + i], expect);
        // And sits within O(dx) of the corner closed form -A P0 w sin(kX)/|d|.
        let corner = -amplitude * p.p0 * mode.omega * (mode.k * p.x_extent).sin() / p.d.abs();
        assert!(
            (state.delta_i[j * 16 + i] - corner).abs() < amplitude * (dx + dy),
            "cell {} vs corner {corner}",
            state.delta_i[j * 16 + i]
        );
    }

    #[test]
    fn uniform_scalar_leaves_interior_velocity_unchanged() {
        let p = wave_params(1.0, 1.0);
        let cfg = SimConfig {
            nx: 8,
            ny: 8,
            ..SimConfig::default()
        };
        let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
        for v in state.delta_p.iter_mut() {
            *v = 0.75;
        }
        state.initial_scale = 1.0;
        state.step().unwrap();
        assert!(state.vx.iter().all(|v| *v == 0.0));
        // Interior y-faces see a zero gradient; border faces are pinned.
        for j in 0..=8usize {
            for i in 0..8usize {
                assert_eq!(state.vy[j * 8 + i], 0.0);
            }
        }
    }

    #[test]
    fn zero_mode_preserved() {
        let p = wave_params(1.0, 1.0);
        let cfg = SimConfig {
            nx: 8,
            ny: 8,
            ..SimConfig::default()
        };
        let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
        for v in state.delta_i.iter_mut() {
            *v = 0.5;
        }
        for v in state.delta_p.iter_mut() {
            *v = -0.25;
        }
        state.initial_scale = 1.0;
        state.run(100).unwrap();
        assert!(state.delta_i.iter().all(|v| *v == 0.5));
        assert!(state.delta_p.iter().all(|v| *v == -0.25));
    }

    #[test]
    fn forcing_linearity_is_exact() {
        let p = wave_params(2.0 * std::f64::consts::PI, 4.0);
        let mode = WaveMode::simplest(&p, 1.0, 1.0).unwrap();
        let run = |amplitude: f64| -> Vec<f64> {
            let cfg = SimConfig {
                nx: 16,
                ny: 16,
                forcing: Some(BoundaryForcing {
                    mode: mode.clone(),
                    amplitude,
                }),
                ..SimConfig::default()
            };
            let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
            let probe = (p.x_extent / 2.0, p.y_extent - state.dy());
            let series = run_and_probe(&mut state, &[probe], 1, 40).unwrap();
            series.samples[0].iter().map(|s| s.delta_i).collect()
        };
        let one = run(0.005);
        let two = run(0.010);
        for (a, b) in one.iter().zip(two.iter()) {
            assert_eq!(*b, 2.0 * *a, "doubling the forcing must double the probe");
        }
    }

    #[test]
    fn probe_out_of_domain_rejected() {
        let p = wave_params(1.0, 1.0);
        let cfg = SimConfig {
            nx: 8,
            ny: 8,
            ..SimConfig::default()
        };
        let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
        assert!(matches!(
            run_and_probe(&mut state, &[(2.0, 0.5)], 1, 1),
            Err(SimError::ProbeOutOfDomain { .. })
        ));
    }

    #[test]
    fn frozen_divergence_free_state_conserves_energy_exactly() {
        // Zero-coupling override, dyadic grid and integer streamfunction:
        // the state is a discrete equilibrium and every update is exact.
        let p = wave_params(16.0, 16.0);
        let cfg = SimConfig {
            nx: 32,
            ny: 32,
            lateral: LateralBoundary::ClosedX,
            zero_coupling: true,
            ..SimConfig::default()
        };
        let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
        let (nx, ny) = (32usize, 32usize);
        let (dx, dy) = (state.dx(), state.dy());
        // Streamfunction on nodes, zero on the border.
        let psi = |i: usize, j: usize| -> f64 {
            if i == 0 || j == 0 || i == nx || j == ny {
                0.0
            } else {
                (((i * 7 + j * 3) % 5) as f64) - 2.0
            }
        };
        for j in 0..ny {
            for i in 0..=nx {
                let flow = (psi(i, j + 1) - psi(i, j)) / dy;
                state.vx[j * (nx + 1) + i] = flow;
                state.ux[j * (nx + 1) + i] = flow;
            }
        }
        for j in 0..=ny {
            for i in 0..nx {
                let flow = -(psi(i + 1, j) - psi(i, j)) / dx;
                state.vy[j * nx + i] = flow;
                state.uy[j * nx + i] = flow;
            }
        }
        for v in state.delta_i.iter_mut() {
            *v = 0.25;
        }
        for v in state.delta_p.iter_mut() {
            *v = 0.5;
        }
        state.initial_scale = 4.0;
        let before = state.energy();
        assert!(before > 0.0);
        state.run(1000).unwrap();
        let after = state.energy();
        assert!(
            (after - before).abs() <= 1e-6 * before,
            "energy drift {before} -> {after}"
        );
    }

    #[test]
    fn grid_noise_amplifies_at_predicted_rate() {
        // The linearized system grows fine-scale content; check the measured
        // e-folding rate against the plane-wave prediction for the seeded
        // mode. This pins the von Neumann analysis used to size test horizons.
        let p = wave_params(8.0, 8.0);
        let nx = 16usize;
        let cfg = SimConfig {
            nx,
            ny: 16,
            zero_coupling: true,
            ..SimConfig::default()
        };
        let mut state = init_sim(&p, cfg, Initial::Zero).unwrap();
        let dy = state.dy();
        // Seed one y-Fourier mode of delta_i at amplitude 1e-8.
        let l = std::f64::consts::PI * 6.0 / p.y_extent;
        for j in 0..16usize {
            let y = (j as f64 + 0.5) * dy;
            for i in 0..nx {
                state.delta_i[j * nx + i] = 1e-8 * (l * y).cos();
            }
        }
        state.initial_scale = 1.0;
        // Measure between two late checkpoints so the eigen-branch mix of
        // the seed has settled onto the growing branch.
        state.run(60).unwrap();
        let mid = state.energy();
        let steps = 60usize;
        state.run(steps).unwrap();
        let end = state.energy();
        let measured_rate = ((end / mid).ln() / 2.0) / (state.dt * steps as f64);
        // Discrete prediction: growth rate lambda_eff/sqrt(2) * |bd|^(1/4)
        // with lambda_eff = 2 sin(l dy / 2) / dy.
        let lambda = 2.0 * (l * dy / 2.0).sin() / dy;
        let predicted = lambda / 2.0f64.sqrt();
        assert!(
            (measured_rate - predicted).abs() <= 0.3 * predicted,
            "measured {measured_rate} vs predicted {predicted}"
        );
    }
}
