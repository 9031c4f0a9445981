//! Model parameters, constraint validation and the closed-form steady-state
//! distributions of Investment and Profits on the risk rectangle.
//!
//! The steady state is linear in both risk coordinates: Investment is largest
//! at the most secure corner (0, 0) and decreases toward the most risky corner
//! (X, Y), while Profits increase toward (X, Y) ("more risks - more Profits").

use thiserror::Error;

/// Relative tolerance for the amplitude identity `I0^2 h_y = P0^2 g_y`.
pub const AMPLITUDE_IDENTITY_RTOL: f64 = 1e-9;

/// All coupling coefficients, financial accelerations, corner amplitudes and
/// domain extents of the two-variable model.
///
/// Sign conventions: `a1 > 0` (Profits flow attracts Investment), `a2 < 0`
/// (Investment flow crowds out Profits), `b > 0` (Investment accelerates
/// toward higher Profits), `d < 0` (Profits decelerate toward higher
/// Investment). The accelerations `g`, `h` are positive along both risk axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Coupling of Profits y-velocity into the Investment continuity equation.
    pub a1: f64,
    /// Coupling of Investment y-velocity into the Profits continuity equation.
    pub a2: f64,
    /// Profits-gradient coupling in the Investment motion equation.
    pub b: f64,
    /// Investment-gradient coupling in the Profits motion equation.
    pub d: f64,
    /// Financial acceleration acting on Profits, x component.
    pub g_x: f64,
    /// Financial acceleration acting on Profits, y component.
    pub g_y: f64,
    /// Financial acceleration acting on Investment, x component.
    pub h_x: f64,
    /// Financial acceleration acting on Investment, y component.
    pub h_y: f64,
    /// Steady Investment density at the most risky corner (X, Y).
    pub i0: f64,
    /// Steady Profits density at the most risky corner (X, Y).
    pub p0: f64,
    /// Domain extent along the first risk axis.
    pub x_extent: f64,
    /// Domain extent along the second risk axis.
    pub y_extent: f64,
}

/// Steady-state sample at one point of the risk rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyPoint {
    pub x: f64,
    pub y: f64,
    /// Investment density.
    pub i: f64,
    /// Profits density.
    pub p: f64,
}

/// One violated parameter constraint, with the offending values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintViolation {
    /// Short name of the constraint, e.g. `"b > 0"`.
    pub constraint: &'static str,
    /// Parameter keys involved in the constraint.
    pub params: &'static [&'static str],
    /// Human-readable account of the offending values.
    pub detail: String,
}

impl std::fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

/// Outcome of [`validate_params`]: either ok or the list of violations.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<ConstraintViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Sign preconditions of the incompressible amplitude formulas violated.
    #[error("invalid signs: {0}")]
    InvalidSigns(String),
    #[error("point ({x}, {y}) outside the domain [0, {x_extent}] x [0, {y_extent}]")]
    OutOfDomain {
        x: f64,
        y: f64,
        x_extent: f64,
        y_extent: f64,
    },
}

const PARAM_KEYS: [&str; 12] = [
    "a1", "a2", "b", "d", "g_x", "g_y", "h_x", "h_y", "i0", "p0", "x_extent", "y_extent",
];

fn key_slice(name: &str) -> &'static [&'static str] {
    for (slot, key) in PARAM_KEYS.iter().enumerate() {
        if *key == name {
            return &PARAM_KEYS[slot..slot + 1];
        }
    }
    &[]
}

fn check_finite(name: &'static str, value: f64, out: &mut Vec<ConstraintViolation>) {
    if !value.is_finite() {
        out.push(ConstraintViolation {
            constraint: "finite",
            params: key_slice(name),
            detail: format!("{name} = {value}"),
        });
    }
}

fn check_sign(
    name: &'static str,
    value: f64,
    positive: bool,
    out: &mut Vec<ConstraintViolation>,
) {
    let ok = if positive { value > 0.0 } else { value < 0.0 };
    if !ok {
        out.push(ConstraintViolation {
            constraint: if positive { "> 0" } else { "< 0" },
            params: key_slice(name),
            detail: format!("{name} = {value}"),
        });
    }
}

/// Checks every parameter constraint and reports each violation by name.
///
/// Violations are reported, never thrown: any candidate parameter set is
/// accepted as input. Positivity of `h_x` and `g_x` is inferred from the
/// monotonicity of the steady state along the x axis rather than stated
/// coupling conditions; the violation message says so.
pub fn validate_params(p: &ModelParams) -> ValidationReport {
    let mut v = Vec::new();

    for (name, value) in [
        ("a1", p.a1),
        ("a2", p.a2),
        ("b", p.b),
        ("d", p.d),
        ("g_x", p.g_x),
        ("g_y", p.g_y),
        ("h_x", p.h_x),
        ("h_y", p.h_y),
        ("i0", p.i0),
        ("p0", p.p0),
        ("x_extent", p.x_extent),
        ("y_extent", p.y_extent),
    ] {
        check_finite(name, value, &mut v);
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }

    check_sign("a1", p.a1, true, &mut v);
    check_sign("a2", p.a2, false, &mut v);
    check_sign("b", p.b, true, &mut v);
    check_sign("d", p.d, false, &mut v);
    check_sign("g_y", p.g_y, true, &mut v);
    check_sign("h_y", p.h_y, true, &mut v);
    check_sign("i0", p.i0, true, &mut v);
    check_sign("p0", p.p0, true, &mut v);
    check_sign("x_extent", p.x_extent, true, &mut v);
    check_sign("y_extent", p.y_extent, true, &mut v);

    if p.g_x <= 0.0 {
        v.push(ConstraintViolation {
            constraint: "g_x > 0",
            params: key_slice("g_x"),
            detail: format!(
                "g_x = {} (positivity inferred from steady Profits increasing with risk)",
                p.g_x
            ),
        });
    }
    if p.h_x <= 0.0 {
        v.push(ConstraintViolation {
            constraint: "h_x > 0",
            params: key_slice("h_x"),
            detail: format!(
                "h_x = {} (positivity inferred from steady Investment decreasing with risk)",
                p.h_x
            ),
        });
    }

    // Common-boundary identity tying the two accelerations together.
    let lhs = p.i0 * p.i0 * p.h_y;
    let rhs = p.p0 * p.p0 * p.g_y;
    let scale = lhs.abs().max(rhs.abs());
    if scale > 0.0 && (lhs - rhs).abs() > AMPLITUDE_IDENTITY_RTOL * scale {
        v.push(ConstraintViolation {
            constraint: "I0^2 h_y = P0^2 g_y",
            params: &["h_y", "g_y", "i0", "p0"],
            detail: format!("I0^2 h_y = {lhs} but P0^2 g_y = {rhs}"),
        });
    }

    // Positivity of steady Profits at the most secure corner.
    let tilt = p.g_x * p.x_extent + p.g_y * p.y_extent;
    if p.b <= tilt {
        v.push(ConstraintViolation {
            constraint: "b > g_x X + g_y Y",
            params: &["b", "g_x", "g_y", "x_extent", "y_extent"],
            detail: format!("b = {} but g_x X + g_y Y = {tilt}", p.b),
        });
    }

    ValidationReport { violations: v }
}

impl ModelParams {
    /// Consistency used by the wave analysis: coupling signs, acceleration
    /// positivity, the amplitude identity and positive extents. The steady
    /// Profits corner-positivity condition `b > g_x X + g_y Y` is not
    /// required here: it constrains the steady display over the whole
    /// rectangle, not the wave algebra.
    pub fn validate_for_waves(&self) -> Result<(), ModelError> {
        let full = validate_params(self);
        let wave_violations: Vec<&ConstraintViolation> = full
            .violations
            .iter()
            .filter(|v| v.constraint != "b > g_x X + g_y Y")
            .collect();
        if wave_violations.is_empty() {
            Ok(())
        } else {
            let joined = wave_violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            Err(ModelError::InvalidParams(joined))
        }
    }

    /// Full validation, erroring on any violation.
    pub fn validated(&self) -> Result<(), ModelError> {
        let report = validate_params(self);
        if report.is_ok() {
            Ok(())
        } else {
            let joined = report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            Err(ModelError::InvalidParams(joined))
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.x_extent).contains(&x) && (0.0..=self.y_extent).contains(&y)
    }

    /// Steady Investment density, evaluated without validation.
    pub fn steady_investment(&self, x: f64, y: f64) -> f64 {
        self.i0
            * (1.0
                + (self.h_x * (x - self.x_extent) + self.h_y * (y - self.y_extent)) / self.d)
    }

    /// Steady Profits density, evaluated without validation.
    pub fn steady_profits(&self, x: f64, y: f64) -> f64 {
        self.p0
            * (1.0
                + (self.g_x * (x - self.x_extent) + self.g_y * (y - self.y_extent)) / self.b)
    }

    /// Gradient of the steady Investment field, constant over the rectangle.
    pub fn steady_investment_gradient(&self) -> (f64, f64) {
        (self.i0 * self.h_x / self.d, self.i0 * self.h_y / self.d)
    }

    /// Gradient of the steady Profits field, constant over the rectangle.
    pub fn steady_profits_gradient(&self) -> (f64, f64) {
        (self.p0 * self.g_x / self.b, self.p0 * self.g_y / self.b)
    }
}

/// Corner amplitudes forced by the incompressible regime.
///
/// Returns `(I0, P0)` with `P0 = -a2 b / g_y` and `I0 = -(a2 b)^2 / (a1 d g_y)`,
/// both strictly positive under the sign preconditions, and satisfying
/// `I0 = (a2 b / (a1 d)) P0` exactly.
pub fn incompressible_amplitudes(
    a1: f64,
    a2: f64,
    b: f64,
    d: f64,
    g_y: f64,
) -> Result<(f64, f64), ModelError> {
    let mut bad = Vec::new();
    if !(a1 > 0.0) {
        bad.push(format!("a1 = {a1} (want a1 > 0)"));
    }
    if !(a2 < 0.0) {
        bad.push(format!("a2 = {a2} (want a2 < 0)"));
    }
    if !(b > 0.0) {
        bad.push(format!("b = {b} (want b > 0)"));
    }
    if !(d < 0.0) {
        bad.push(format!("d = {d} (want d < 0)"));
    }
    if !(g_y > 0.0) {
        bad.push(format!("g_y = {g_y} (want g_y > 0)"));
    }
    if !bad.is_empty() {
        return Err(ModelError::InvalidSigns(bad.join("; ")));
    }
    let p0 = -a2 * b / g_y;
    let i0 = (a2 * b / (a1 * d)) * p0;
    Ok((i0, p0))
}

/// The `h_y` that pairs with given amplitudes under the identity
/// `I0^2 h_y = P0^2 g_y`.
pub fn matching_h_y(i0: f64, p0: f64, g_y: f64) -> f64 {
    p0 * p0 * g_y / (i0 * i0)
}

/// Checked steady-state sample at `(x, y)`.
pub fn steady_fields(p: &ModelParams, x: f64, y: f64) -> Result<SteadyPoint, ModelError> {
    p.validated()?;
    if !p.contains(x, y) {
        return Err(ModelError::OutOfDomain {
            x,
            y,
            x_extent: p.x_extent,
            y_extent: p.y_extent,
        });
    }
    Ok(SteadyPoint {
        x,
        y,
        i: p.steady_investment(x, y),
        p: p.steady_profits(x, y),
    })
}

/// Steady densities at the two extreme corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerValues {
    /// Investment at the most secure corner (0, 0).
    pub i_secure: f64,
    /// Profits at the most secure corner (0, 0).
    pub p_secure: f64,
    /// Investment at the most risky corner (X, Y); equals `I0`.
    pub i_risky: f64,
    /// Profits at the most risky corner (X, Y); equals `P0`.
    pub p_risky: f64,
}

/// Steady values at (0, 0) and (X, Y). Investment peaks at the secure corner,
/// Profits at the risky corner.
pub fn corner_values(p: &ModelParams) -> Result<CornerValues, ModelError> {
    p.validated()?;
    Ok(CornerValues {
        i_secure: p.steady_investment(0.0, 0.0),
        p_secure: p.steady_profits(0.0, 0.0),
        i_risky: p.i0,
        p_risky: p.p0,
    })
}

#[cfg(test)]
pub(crate) fn unit_params(extent: f64) -> ModelParams {
    ModelParams {
        a1: 1.0,
        a2: -1.0,
        b: 1.0,
        d: -1.0,
        g_x: 1.0,
        g_y: 1.0,
        h_x: 1.0,
        h_y: 1.0,
        i0: 1.0,
        p0: 1.0,
        x_extent: extent,
        y_extent: extent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_params_validate_ok() {
        let report = validate_params(&unit_params(0.25));
        assert!(report.is_ok(), "unexpected violations: {:?}", report.violations);
    }

    #[test]
    fn negative_b_is_named() {
        let p = ModelParams {
            b: -1.0,
            ..unit_params(0.25)
        };
        let report = validate_params(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| v.constraint == "> 0" && v.detail.starts_with("b =")));
    }

    #[test]
    fn amplitude_identity_violation_reports_values() {
        let p = ModelParams {
            i0: 2.0,
            ..unit_params(0.25)
        };
        let report = validate_params(&p);
        let hit = report
            .violations
            .iter()
            .find(|v| v.constraint == "I0^2 h_y = P0^2 g_y")
            .expect("identity violation expected");
        assert!(hit.detail.contains('4'), "detail: {}", hit.detail);
        assert!(hit.detail.contains('1'));
    }

    #[test]
    fn corner_positivity_condition() {
        // b = 1 but g_x X + g_y Y = 2.
        let p = unit_params(1.0);
        let report = validate_params(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| v.constraint == "b > g_x X + g_y Y"));
        // The wave-side validation deliberately does not require it.
        p.validate_for_waves().unwrap();
    }

    #[test]
    fn incompressible_amplitudes_unit_case() {
        let (i0, p0) = incompressible_amplitudes(1.0, -1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!((i0, p0), (1.0, 1.0));
    }

    #[test]
    fn incompressible_amplitudes_derived_case() {
        // Independent route: the amplitude ratio must equal a2 b / (a1 d).
        let (a1, a2, b, d, g_y) = (1.0, -2.0, 1.0, -1.0, 2.0);
        let (i0, p0) = incompressible_amplitudes(a1, a2, b, d, g_y).unwrap();
        assert_eq!((i0, p0), (2.0, 1.0));
        let ratio = a2 * b / (a1 * d);
        assert_eq!(i0, ratio * p0);
    }

    #[test]
    fn incompressible_amplitudes_rejects_bad_signs() {
        let err = incompressible_amplitudes(1.0, -1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, ModelError::InvalidSigns(_)), "{err}");
    }

    #[test]
    fn amplitudes_pass_validation_with_matching_h_y() {
        let (a1, a2, b, d, g_y) = (0.7, -1.3, 2.0, -0.4, 0.9);
        let (i0, p0) = incompressible_amplitudes(a1, a2, b, d, g_y).unwrap();
        let p = ModelParams {
            a1,
            a2,
            b,
            d,
            g_x: 0.5,
            g_y,
            h_x: 0.5,
            h_y: matching_h_y(i0, p0, g_y),
            i0,
            p0,
            x_extent: 0.5,
            y_extent: 0.5,
        };
        let report = validate_params(&p);
        assert!(report.is_ok(), "violations: {:?}", report.violations);
    }

    #[test]
    fn steady_fields_corner_normalization() {
        let p = unit_params(0.25);
        let s = steady_fields(&p, 0.25, 0.25).unwrap();
        assert_eq!((s.i, s.p), (1.0, 1.0));
    }

    #[test]
    fn steady_fields_secure_corner() {
        let p = unit_params(0.25);
        let s = steady_fields(&p, 0.0, 0.0).unwrap();
        assert_eq!((s.i, s.p), (1.5, 0.5));
    }

    #[test]
    fn steady_fields_out_of_domain() {
        let p = unit_params(0.25);
        let err = steady_fields(&p, 0.5, 0.5).unwrap_err();
        assert!(matches!(err, ModelError::OutOfDomain { .. }));
    }

    #[test]
    fn corner_values_unit_fixture() {
        let c = corner_values(&unit_params(0.25)).unwrap();
        assert_eq!(c.i_secure, 1.5);
        assert_eq!(c.p_secure, 0.5);
        assert_eq!(c.i_risky, 1.0);
        assert_eq!(c.p_risky, 1.0);
    }

    #[test]
    fn steady_gradients_match_finite_differences() {
        let p = ModelParams {
            a1: 0.9,
            a2: -1.1,
            b: 3.0,
            d: -0.8,
            g_x: 0.7,
            g_y: 1.2,
            h_x: 0.6,
            h_y: matching_h_y(1.4, 0.9, 1.2),
            i0: 1.4,
            p0: 0.9,
            x_extent: 0.8,
            y_extent: 0.9,
        };
        assert!(validate_params(&p).is_ok());
        let step = 1e-5;
        let (x, y) = (0.4, 0.45);
        let fd_ix = (p.steady_investment(x + step, y) - p.steady_investment(x - step, y))
            / (2.0 * step);
        let fd_iy = (p.steady_investment(x, y + step) - p.steady_investment(x, y - step))
            / (2.0 * step);
        let fd_px =
            (p.steady_profits(x + step, y) - p.steady_profits(x - step, y)) / (2.0 * step);
        let fd_py =
            (p.steady_profits(x, y + step) - p.steady_profits(x, y - step)) / (2.0 * step);
        let (gi_x, gi_y) = p.steady_investment_gradient();
        let (gp_x, gp_y) = p.steady_profits_gradient();
        for (fd, exact) in [(fd_ix, gi_x), (fd_iy, gi_y), (fd_px, gp_x), (fd_py, gp_y)] {
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs(),
                "fd {fd} vs exact {exact}"
            );
        }
    }
}
