//! Scratch calibration runs for sizing the acceptance fixtures.

use riskwave::dispersion::WaveMode;
use riskwave::fdsim::{self, BoundaryForcing, Initial, LateralBoundary, SimConfig};
use riskwave::model::ModelParams;

/// Asymmetric coupling family with a SIMPLE real root s = 1 at k = 1,
/// omega = sqrt(alpha): a1 = alpha, a2 = -gamma*alpha, g_y = h_y = alpha.
/// Roots ~ {1, 1/gamma, r +- i alpha sqrt(gamma)} with r = -(1+1/gamma)/2.
fn asym(alpha: f64, gamma: f64, x_extent: f64, y_extent: f64) -> ModelParams {
    ModelParams {
        a1: alpha,
        a2: -gamma * alpha,
        b: 1.0,
        d: -1.0,
        g_x: 1.0,
        g_y: alpha,
        h_x: 1.0,
        h_y: alpha,
        i0: 1.0,
        p0: 1.0,
        x_extent,
        y_extent,
    }
}

fn run_error(
    p: &ModelParams,
    omega: f64,
    nx: usize,
    ny: usize,
    steps: usize,
    periods: f64,
    amp: f64,
) -> Option<f64> {
    let mode = WaveMode::simplest(p, omega, 1.0).ok()?;
    let span = 2.0 * std::f64::consts::PI / omega * periods;
    let dt = span / steps as f64;
    if dt > fdsim::max_stable_dt(p, nx, ny) {
        return None;
    }
    let cfg = SimConfig {
        nx,
        ny,
        dt: Some(dt),
        lateral: LateralBoundary::PeriodicX,
        forcing: Some(BoundaryForcing {
            mode: mode.clone(),
            amplitude: amp,
        }),
        zero_coupling: false,
    };
    let mut state = fdsim::init_sim(
        p,
        cfg,
        Initial::AnalyticMode {
            mode: mode.clone(),
            amplitude: amp,
        },
    )
    .ok()?;
    state.run(steps).ok()?;
    Some(state.l2_error_vs_mode(&mode, amp))
}

fn scan(label: &str, p: &ModelParams, omega: f64, per16: usize) {
    println!("== {label} ==");
    let mut prev: Option<f64> = None;
    for n in [16usize, 32, 64, 128] {
        let steps = per16 * n / 16;
        match run_error(p, omega, n, n, steps, 1.0, 0.01) {
            Some(err) => {
                let ratio = prev.map(|e| e / err);
                println!("n={n:4} steps={steps:5} err={err:.6e} ratio={ratio:?}");
                prev = Some(err);
            }
            None => {
                println!("n={n:4} steps={steps:5} skipped (unstable dt or mode)");
                prev = None;
            }
        }
    }
}

fn main() {
    for (alpha, gamma, y_extent, per16) in [
        (100.0, 2.0, 20.0, 16usize),
        (400.0, 2.0, 20.0, 16),
        (2500.0, 2.0, 20.0, 24),
        (2500.0, 4.0, 20.0, 32),
        (400.0, 2.0, 12.0, 16),
        (400.0, 2.0, 30.0, 16),
        (100.0, 1.5, 20.0, 16),
    ] {
        let p = asym(alpha, gamma, 2.0 * std::f64::consts::PI, y_extent);
        let omega = alpha.sqrt();
        scan(
            &format!("alpha={alpha} gamma={gamma} Y={y_extent} per16={per16}"),
            &p,
            omega,
            per16,
        );
    }
}
