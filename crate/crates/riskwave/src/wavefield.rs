//! Space-time reconstruction of a single surface mode: velocity potentials,
//! border shape, Investment/Profits perturbation fields, border-aggregated
//! Investment and circulation trajectories near the border.
//!
//! Everything here is linear in the free amplitude `A`; the underlying
//! closed forms are recovered at `A = 1`.

use thiserror::Error;

use crate::dispersion::WaveMode;
use crate::model::ModelParams;

#[derive(Debug, Error)]
pub enum WavefieldError {
    #[error("point ({x}, {y}) outside the domain [0, {x_extent}] x [0, {y_extent}]")]
    OutOfDomain {
        x: f64,
        y: f64,
        x_extent: f64,
        y_extent: f64,
    },
    #[error("operation requires a simplest (single positive real root) mode")]
    NotSimplestMode,
}

/// Potentials and velocities of one mode at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    /// Investment velocity potential.
    pub phi: f64,
    /// Profits velocity potential; the mode ansatz makes it equal `phi`.
    pub psi: f64,
    /// Investment velocity (gradient of `phi`).
    pub v: [f64; 2],
    /// Profits velocity (gradient of `psi`).
    pub u: [f64; 2],
}

/// Full field sample at one point: steady state plus wave perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub i: f64,
    pub p: f64,
    pub v: [f64; 2],
    pub u: [f64; 2],
}

/// One sampled snapshot row for CSV export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub i: f64,
    pub p: f64,
    pub vx: f64,
    pub vy: f64,
    pub ux: f64,
    pub uy: f64,
}

fn phase(mode: &WaveMode, t: f64, x: f64) -> f64 {
    mode.k * x - mode.omega * t
}

/// Potentials `phi = psi = A cos(kx - wt) f(y - Y)` and their gradients.
///
/// `f` is the mode's depth profile with `f(0) = 1`; velocities are the
/// analytic gradients, no finite differencing involved.
pub fn potential_and_velocity(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    x: f64,
    y: f64,
) -> PotentialSample {
    let dy = y - p.y_extent;
    let (sin, cos) = phase(mode, t, x).sin_cos();
    let f = mode.profile(dy);
    let fp = mode.profile_deriv(dy);
    let phi = amplitude * cos * f;
    let vx = -amplitude * mode.k * sin * f;
    let vy = amplitude * cos * fp;
    PotentialSample {
        phi,
        psi: phi,
        v: [vx, vy],
        u: [vx, vy],
    }
}

/// Border shape `zeta(t, x) = Y - A (omega / g_y) sin(kx - wt)`.
///
/// This is the canonical amplitude form; it agrees with the slope-consistent
/// form `Y - A (omega I0 / (g_y P0)) sin(kx - wt)` exactly when `I0 = P0`,
/// and with `Y - A sqrt(s P0 / (g_y I0)) sin(kx - wt)` for the simplest mode.
/// See [`boundary_amplitude_variants`] for the documented comparisons.
pub fn boundary_shape(mode: &WaveMode, p: &ModelParams, amplitude: f64, t: f64, x: f64) -> f64 {
    p.y_extent - amplitude * (mode.omega / p.g_y) * phase(mode, t, x).sin()
}

/// The distinct printed forms of the border-shape amplitude (at `A = 1`):
/// canonical `omega / g_y`, the slope-consistent `omega I0 / (g_y P0)`, and
/// for simplest modes `sqrt(s P0 / (g_y I0))`.
pub fn boundary_amplitude_variants(mode: &WaveMode, p: &ModelParams) -> (f64, f64, Option<f64>) {
    let canonical = mode.omega / p.g_y;
    let slope_consistent = mode.omega * p.i0 / (p.g_y * p.p0);
    let simplest = mode
        .simplest_root()
        .map(|s| (s * p.p0 / (p.g_y * p.i0)).sqrt());
    (canonical, slope_consistent, simplest)
}

/// Border shapes recovered from each potential through the common-boundary
/// relations: from `phi` via `I0 / (g_y P0)` and from `psi` via
/// `P0 / (h_y I0)`. The two agree whenever `I0^2 h_y = P0^2 g_y` holds.
pub fn boundary_from_potentials(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    x: f64,
) -> (f64, f64) {
    // d(phi)/dt at the border: A omega sin(kx - wt), with f(0) = 1.
    let dphi_dt = amplitude * mode.omega * phase(mode, t, x).sin();
    let from_phi = p.y_extent - p.i0 / (p.g_y * p.p0) * dphi_dt;
    let from_psi = p.y_extent - p.p0 / (p.h_y * p.i0) * dphi_dt;
    (from_phi, from_psi)
}

/// Investment and Profits fields of the mode at `(t, x, y)`: the linear
/// steady state plus the potential-rate perturbations.
pub fn field_perturbations(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    x: f64,
    y: f64,
) -> Result<FieldSample, WavefieldError> {
    if !p.contains(x, y) {
        return Err(WavefieldError::OutOfDomain {
            x,
            y,
            x_extent: p.x_extent,
            y_extent: p.y_extent,
        });
    }
    Ok(field_perturbations_unchecked(mode, p, amplitude, t, x, y))
}

/// Same as [`field_perturbations`] without the domain check; used for
/// sampling at staggered positions that sit marginally outside the rectangle.
pub fn field_perturbations_unchecked(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    x: f64,
    y: f64,
) -> FieldSample {
    let dy = y - p.y_extent;
    let sin = phase(mode, t, x).sin();
    let f = mode.profile(dy);
    // d(phi)/dt = A omega sin(kx - wt) f(dy), shared by both potentials.
    let dphi_dt = amplitude * mode.omega * sin * f;
    let sample = potential_and_velocity(mode, p, amplitude, t, x, y);
    FieldSample {
        i: p.steady_investment(x, y) + p.p0 / p.d * dphi_dt,
        p: p.steady_profits(x, y) + p.i0 / p.b * dphi_dt,
        v: sample.v,
        u: sample.u,
    }
}

/// Wave-only Investment perturbation (no steady part), used by the
/// time-domain simulator for initialization and error measurement.
pub fn investment_perturbation(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    x: f64,
    y: f64,
) -> f64 {
    let dy = y - p.y_extent;
    p.p0 / p.d * amplitude * mode.omega * phase(mode, t, x).sin() * mode.profile(dy)
}

/// Wave-only Profits perturbation (no steady part).
pub fn profits_perturbation(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    x: f64,
    y: f64,
) -> f64 {
    let dy = y - p.y_extent;
    p.i0 / p.b * amplitude * mode.omega * phase(mode, t, x).sin() * mode.profile(dy)
}

/// x-integral of the Investment density along the border row `y = Y`.
///
/// Steady part `I0 (X - h_x X^2 / (2d))` plus the harmonic wave part
/// `-(2 A P0 omega / (d k)) sin(kX/2) sin(wt - kX/2)`. The wave-part sign is
/// the one produced by direct integration of the border density and is
/// verified against quadrature; a commonly printed variant carries the
/// opposite sign.
pub fn aggregate_investment(mode: &WaveMode, p: &ModelParams, amplitude: f64, t: f64) -> f64 {
    let x = p.x_extent;
    let steady = p.i0 * (x - p.h_x * x * x / (2.0 * p.d));
    let wave = -(2.0 * amplitude * p.p0 * mode.omega / (p.d * mode.k))
        * (mode.k * x / 2.0).sin()
        * (mode.omega * t - mode.k * x / 2.0).sin();
    steady + wave
}

/// Steady part of [`aggregate_investment`], exposed for oscillation checks.
pub fn aggregate_investment_steady(p: &ModelParams) -> f64 {
    let x = p.x_extent;
    p.i0 * (x - p.h_x * x * x / (2.0 * p.d))
}

/// Closed-form circulation orbit around `(x0, y0)` for a simplest mode.
///
/// The orbit is an ellipse with semi-axes `A (k/omega) e^{s (y0 - Y)}` along
/// x and `A (s/omega) e^{s (y0 - Y)}` along y; a circle when `s = k`.
pub fn circulation_trajectory(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    x0: f64,
    y0: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64)>, WavefieldError> {
    let s = mode.simplest_root().ok_or(WavefieldError::NotSimplestMode)?;
    let depth = (s * (y0 - p.y_extent)).exp();
    let ax = amplitude * mode.k / mode.omega * depth;
    let ay = amplitude * s / mode.omega * depth;
    Ok(times
        .iter()
        .map(|&t| {
            let (sin, cos) = (mode.k * x0 - mode.omega * t).sin_cos();
            (x0 - ax * cos, y0 - ay * sin)
        })
        .collect())
}

/// Fourth-order fixed-step integration of `d(x, y)/dt = v(t, x, y)` in the
/// mode's velocity field; covers trajectories of non-simplest modes where no
/// closed orbit form applies.
pub fn trajectory_integrate(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    x0: f64,
    y0: f64,
    t_end: f64,
    steps_per_period: usize,
) -> Vec<(f64, f64, f64)> {
    let period = 2.0 * std::f64::consts::PI / mode.omega;
    let dt = period / steps_per_period.max(1) as f64;
    let vel = |t: f64, x: f64, y: f64| -> [f64; 2] {
        potential_and_velocity(mode, p, amplitude, t, x, y).v
    };
    let mut out = Vec::new();
    let (mut x, mut y) = (x0, y0);
    let mut t = 0.0;
    out.push((t, x, y));
    while t < t_end - 1e-12 * t_end.abs().max(1.0) {
        let h = dt.min(t_end - t);
        let k1 = vel(t, x, y);
        let k2 = vel(t + h / 2.0, x + h / 2.0 * k1[0], y + h / 2.0 * k1[1]);
        let k3 = vel(t + h / 2.0, x + h / 2.0 * k2[0], y + h / 2.0 * k2[1]);
        let k4 = vel(t + h, x + h * k3[0], y + h * k3[1]);
        x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        t += h;
        out.push((t, x, y));
    }
    out
}

/// Samples the full wave field on an `nx` by `ny` lattice of cell centers.
pub fn snapshot(
    mode: &WaveMode,
    p: &ModelParams,
    amplitude: f64,
    t: f64,
    nx: usize,
    ny: usize,
) -> Vec<SnapshotRow> {
    let dx = p.x_extent / nx as f64;
    let dy = p.y_extent / ny as f64;
    let mut rows = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = (i as f64 + 0.5) * dx;
            let y = (j as f64 + 0.5) * dy;
            let s = field_perturbations_unchecked(mode, p, amplitude, t, x, y);
            rows.push(SnapshotRow {
                t,
                x,
                y,
                i: s.i,
                p: s.p,
                vx: s.v[0],
                vy: s.v[1],
                ux: s.u[0],
                uy: s.u[1],
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{WaveMode, WeightPolicy};
    use crate::model::{unit_params, ModelParams};

    fn unit_simplest(extent: f64) -> (ModelParams, WaveMode) {
        let p = unit_params(extent);
        let mode = WaveMode::simplest(&p, 1.0, 1.0).unwrap();
        (p, mode)
    }

    #[test]
    fn potential_fixture_at_border() {
        let (p, mode) = unit_simplest(1.0);
        let s = potential_and_velocity(&mode, &p, 1.0, 0.0, 0.0, p.y_extent);
        assert_eq!(s.phi, 1.0);
        assert_eq!(s.v, [0.0, 1.0]);
        assert_eq!(s.u, s.v);
    }

    #[test]
    fn potential_zero_amplitude() {
        let (p, mode) = unit_simplest(1.0);
        let s = potential_and_velocity(&mode, &p, 0.0, 0.3, 0.4, 0.7);
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.v, [0.0, 0.0]);
    }

    #[test]
    fn potential_depth_decay() {
        let (p, mode) = unit_simplest(2.0);
        let s = potential_and_velocity(&mode, &p, 1.0, 0.0, 0.0, p.y_extent - 1.0);
        assert!((s.phi - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn boundary_shape_fixtures() {
        let (p, mode) = unit_simplest(1.0);
        assert_eq!(boundary_shape(&mode, &p, 0.01, 0.0, 0.0), 1.0);
        let z = boundary_shape(&mode, &p, 0.01, 0.0, std::f64::consts::FRAC_PI_2);
        assert!((z - 0.99).abs() < 1e-12);
    }

    #[test]
    fn boundary_kinematics_finite_difference() {
        let (p, mode) = unit_simplest(1.0);
        let (t, x) = (0.3, 0.7);
        let step = 1e-5;
        let a = 1.0;
        let fd = (boundary_shape(&mode, &p, a, t + step, x)
            - boundary_shape(&mode, &p, a, t - step, x))
            / (2.0 * step);
        let vy = potential_and_velocity(&mode, &p, a, t, x, p.y_extent).v[1];
        assert!((fd - vy).abs() <= 1e-6 * vy.abs().max(1.0), "fd {fd} vs vy {vy}");
    }

    #[test]
    fn common_boundary_forms_agree_under_identity() {
        // Non-unit amplitudes with the identity I0^2 h_y = P0^2 g_y in force.
        let g_y = 0.8;
        let (i0, p0) = crate::model::incompressible_amplitudes(0.9, -1.2, 1.1, -0.7, g_y).unwrap();
        let p = ModelParams {
            a1: 0.9,
            a2: -1.2,
            b: 1.1,
            d: -0.7,
            g_x: 1.0,
            g_y,
            h_x: 1.0,
            h_y: crate::model::matching_h_y(i0, p0, g_y),
            i0,
            p0,
            x_extent: 1.0,
            y_extent: 1.0,
        };
        let mode = WaveMode::analyze(&p, 0.9, 1.3, WeightPolicy::MinimalNorm, 1e-9).unwrap();
        for (t, x) in [(0.0, 0.1), (0.4, 0.9), (1.7, 0.3)] {
            let (from_phi, from_psi) = boundary_from_potentials(&mode, &p, 0.02, t, x);
            assert!(
                (from_phi - from_psi).abs() <= 1e-9 * (1.0 + from_phi.abs()),
                "{from_phi} vs {from_psi}"
            );
        }
    }

    #[test]
    fn field_perturbations_fixture() {
        let (p, mode) = unit_simplest(1.0);
        let s = field_perturbations(&mode, &p, 0.01, 0.0, 1.0, 1.0).unwrap();
        let sin1 = 1.0f64.sin();
        assert!((s.i - (1.0 - 0.01 * sin1)).abs() < 1e-12, "I = {}", s.i);
        assert!((s.p - (1.0 + 0.01 * sin1)).abs() < 1e-12, "P = {}", s.p);
    }

    #[test]
    fn field_perturbations_zero_amplitude_is_steady() {
        let (p, mode) = unit_simplest(1.0);
        let s = field_perturbations(&mode, &p, 0.0, 0.8, 0.3, 0.6).unwrap();
        assert_eq!(s.i, p.steady_investment(0.3, 0.6));
        assert_eq!(s.p, p.steady_profits(0.3, 0.6));
    }

    #[test]
    fn field_perturbations_out_of_domain() {
        let (p, mode) = unit_simplest(1.0);
        assert!(matches!(
            field_perturbations(&mode, &p, 0.01, 0.0, 1.5, 0.5),
            Err(WavefieldError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn amplified_depth_ratio_matches_exponential() {
        // All weight on the damped-oscillation pair with r = -1: the envelope
        // between the border and depth 2 grows by e^2.
        let p = unit_params(1.0);
        let mode = WaveMode::with_weights(&p, 1.0, 1.0, [0.0, 0.0, 1.0, 2.0], 1e-9).unwrap();
        let env = |dy: f64| {
            let w = (mode.weights[2] * mode.weights[2] + mode.weights[3] * mode.weights[3]).sqrt();
            let rate = mode.basis.component_rates()[2];
            w * (rate * dy).exp()
        };
        let ratio = env(-2.0) / env(0.0);
        let expect = 2.0f64.exp();
        assert!(
            (ratio - expect).abs() <= 1e-6 * expect,
            "ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn single_root_depth_ratio() {
        let (_p, mode) = unit_simplest(1.0);
        let dy = 0.35;
        for base in [0.0f64, -0.5, -1.2] {
            let ratio = mode.profile(base) / mode.profile(base - dy);
            let expect = (1.0f64 * dy).exp();
            assert!((ratio - expect).abs() <= 1e-9 * expect);
        }
    }

    #[test]
    fn aggregate_fixture_and_oscillation() {
        let (p, mode) = unit_simplest(1.0);
        let total = aggregate_investment(&mode, &p, 1.0, 0.0);
        let expect = 1.5 - (1.0 - 1.0f64.cos());
        assert!((total - expect).abs() < 1e-12, "total {total} vs {expect}");
        assert_eq!(aggregate_investment(&mode, &p, 0.0, 0.37), 1.5);

        // Zero mean of the wave part over one period.
        let steady = aggregate_investment_steady(&p);
        let n = 1024;
        let period = 2.0 * std::f64::consts::PI / mode.omega;
        let mean: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / n as f64 * period;
                aggregate_investment(&mode, &p, 1.0, t) - steady
            })
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 1e-8, "mean {mean}");
    }

    #[test]
    fn aggregate_matches_simpson_quadrature() {
        let (p, mode) = unit_simplest(1.0);
        for &t in &[0.0, 0.3, 1.1, 4.0] {
            let quad = simpson256(|x| {
                field_perturbations_unchecked(&mode, &p, 1.0, t, x, p.y_extent).i
            }, 0.0, p.x_extent);
            let closed = aggregate_investment(&mode, &p, 1.0, t);
            assert!(
                (closed - quad).abs() <= 1e-8 * quad.abs().max(1.0),
                "closed {closed} vs quadrature {quad} at t = {t}"
            );
        }
    }

    fn simpson256(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = 256;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn circulation_circle_fixtures() {
        let (p, mode) = unit_simplest(1.0);
        let times: Vec<f64> = (0..64).map(|i| i as f64 * 0.1).collect();
        let pts = circulation_trajectory(&mode, &p, 1.0, 0.5, p.y_extent, &times).unwrap();
        for (x, y) in &pts {
            let r = ((x - 0.5).powi(2) + (y - p.y_extent).powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-12, "radius {r}");
        }
        let deep = circulation_trajectory(&mode, &p, 1.0, 0.5, p.y_extent - 1.0, &times).unwrap();
        let expect = (-1.0f64).exp();
        for (x, y) in &deep {
            let r = ((x - 0.5).powi(2) + (y - (p.y_extent - 1.0)).powi(2)).sqrt();
            assert!((r - expect).abs() < 1e-12, "radius {r} vs {expect}");
        }
        let frozen = circulation_trajectory(&mode, &p, 0.0, 0.5, 0.5, &times).unwrap();
        for (x, y) in &frozen {
            assert_eq!((*x, *y), (0.5, 0.5));
        }
    }

    #[test]
    fn circulation_rejects_non_simplest() {
        let p = unit_params(1.0);
        let mode = WaveMode::analyze(&p, 1.0, 1.0, WeightPolicy::PinSecondaryZero, 1e-9).unwrap();
        let err = circulation_trajectory(&mode, &p, 1.0, 0.5, 0.5, &[0.0]).unwrap_err();
        assert!(matches!(err, WavefieldError::NotSimplestMode));
    }

    #[test]
    fn circulation_velocity_consistency() {
        // The orbit's time derivative equals the mode velocity at the center.
        let (p, mode) = unit_simplest(1.0);
        let (x0, y0) = (0.4, 0.8);
        let a = 0.01;
        let h = 1e-6;
        for &t in &[0.2, 1.0, 2.9] {
            let pts = circulation_trajectory(&mode, &p, a, x0, y0, &[t - h, t + h]).unwrap();
            let fd = (
                (pts[1].0 - pts[0].0) / (2.0 * h),
                (pts[1].1 - pts[0].1) / (2.0 * h),
            );
            let v = potential_and_velocity(&mode, &p, a, t, x0, y0).v;
            assert!((fd.0 - v[0]).abs() < 1e-7, "{} vs {}", fd.0, v[0]);
            assert!((fd.1 - v[1]).abs() < 1e-7, "{} vs {}", fd.1, v[1]);
        }
    }

    #[test]
    fn linearity_in_amplitude() {
        let (p, mode) = unit_simplest(1.0);
        let (t, x, y) = (0.7, 0.6, 0.9);
        let one = field_perturbations(&mode, &p, 0.004, t, x, y).unwrap();
        let two = field_perturbations(&mode, &p, 0.008, t, x, y).unwrap();
        let steady_i = p.steady_investment(x, y);
        let steady_p = p.steady_profits(x, y);
        assert!(((two.i - steady_i) - 2.0 * (one.i - steady_i)).abs() < 1e-15);
        assert!(((two.p - steady_p) - 2.0 * (one.p - steady_p)).abs() < 1e-15);
        assert_eq!(two.v[0], 2.0 * one.v[0]);
        assert_eq!(two.v[1], 2.0 * one.v[1]);
    }
}
