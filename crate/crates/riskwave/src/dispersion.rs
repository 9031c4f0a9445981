//! Analytic mode analysis along the risky border y = Y.
//!
//! The incompressible regime has a square-root dispersion law and a single
//! evanescent depth profile. The compressible regime leads to a quartic
//! characteristic polynomial whose root pattern selects one of three depth
//! profile families; the two linear constraints on the family weights
//! (profile value 1 and prescribed slope at the border) leave two degrees of
//! freedom that are resolved by an explicit policy.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{incompressible_amplitudes, ModelError, ModelParams};
use crate::quartic::{solve_quartic, QuarticCoeffs, QuarticError};

/// Default tolerance for real/complex root discrimination,
/// `|Im s| <= tol * (1 + |s|)`.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DispersionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quartic(#[from] QuarticError),
    #[error("wavenumber must be positive, got k = {0}")]
    NonPositiveWavenumber(f64),
    #[error("frequency must be non-negative, got omega = {0}")]
    NegativeFrequency(f64),
    #[error(
        "amplitude mismatch: (I0, P0) = ({i0}, {p0}) but the incompressible regime \
         requires ({want_i0}, {want_p0})"
    )]
    AmplitudeMismatch {
        i0: f64,
        p0: f64,
        want_i0: f64,
        want_p0: f64,
    },
    #[error("weight constraints infeasible under policy {policy:?}: {detail}")]
    InfeasibleConstraints {
        policy: WeightPolicy,
        detail: String,
    },
    #[error("mode is not a single-real-root (simplest) mode")]
    NotSimplestMode,
}

/// One incompressible surface mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompressibleMode {
    /// Wavenumber along the border.
    pub k: f64,
    /// Angular frequency.
    pub omega: f64,
    /// Group velocity, `omega / (2k)`.
    pub c: f64,
    /// Inward decay coefficient of the depth profile; equals `k`.
    pub kappa: f64,
    /// Wavelength `2 pi / k`.
    pub wavelength: f64,
}

/// Wave mode regime by quartic root pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    AllReal,
    TwoRealTwoComplex,
    AllComplex,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Regime::AllReal => "AllReal",
            Regime::TwoRealTwoComplex => "TwoRealTwoComplex",
            Regime::AllComplex => "AllComplex",
        };
        f.write_str(name)
    }
}

/// How the two remaining weight degrees of freedom are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightPolicy {
    /// Minimum Euclidean norm solution of the two constraints.
    #[default]
    MinimalNorm,
    /// Pin the last two weights to zero and solve the 2x2 system for the
    /// first two; repeated leading roots fall back to a symmetric split.
    PinSecondaryZero,
}

impl std::fmt::Display for WeightPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightPolicy::MinimalNorm => f.write_str("minimal-norm"),
            WeightPolicy::PinSecondaryZero => f.write_str("pin-zero"),
        }
    }
}

/// Depth-profile basis extracted from the classified roots. The profile is
/// `f(dy) = sum_i w_i * basis_i(dy)` with `dy = y - Y <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileBasis {
    /// Four real exponentials `exp(s_i dy)`.
    Real4([f64; 4]),
    /// Two real exponentials plus one damped oscillation:
    /// `exp(s1 dy)`, `exp(s2 dy)`, `exp(r dy) cos(theta dy)`,
    /// `exp(r dy) sin(theta dy)`.
    Real2Complex1 { s1: f64, s2: f64, r: f64, theta: f64 },
    /// Two damped oscillations with envelopes `exp(r1 dy)`, `exp(r2 dy)`:
    /// cos terms carry weights 1 and 2, sin terms weights 3 and 4.
    Complex2 {
        r1: f64,
        theta1: f64,
        r2: f64,
        theta2: f64,
    },
}

impl ProfileBasis {
    /// Basis values at depth offset `dy`.
    pub fn values(&self, dy: f64) -> [f64; 4] {
        match *self {
            ProfileBasis::Real4(s) => {
                [0, 1, 2, 3].map(|i| (s[i] * dy).exp())
            }
            ProfileBasis::Real2Complex1 { s1, s2, r, theta } => {
                let env = (r * dy).exp();
                [
                    (s1 * dy).exp(),
                    (s2 * dy).exp(),
                    env * (theta * dy).cos(),
                    env * (theta * dy).sin(),
                ]
            }
            ProfileBasis::Complex2 {
                r1,
                theta1,
                r2,
                theta2,
            } => {
                let e1 = (r1 * dy).exp();
                let e2 = (r2 * dy).exp();
                [
                    e1 * (theta1 * dy).cos(),
                    e2 * (theta2 * dy).cos(),
                    e1 * (theta1 * dy).sin(),
                    e2 * (theta2 * dy).sin(),
                ]
            }
        }
    }

    /// Derivatives of the basis values with respect to `dy`.
    pub fn derivs(&self, dy: f64) -> [f64; 4] {
        match *self {
            ProfileBasis::Real4(s) => {
                [0, 1, 2, 3].map(|i| s[i] * (s[i] * dy).exp())
            }
            ProfileBasis::Real2Complex1 { s1, s2, r, theta } => {
                let env = (r * dy).exp();
                let (sin, cos) = (theta * dy).sin_cos();
                [
                    s1 * (s1 * dy).exp(),
                    s2 * (s2 * dy).exp(),
                    env * (r * cos - theta * sin),
                    env * (r * sin + theta * cos),
                ]
            }
            ProfileBasis::Complex2 {
                r1,
                theta1,
                r2,
                theta2,
            } => {
                let e1 = (r1 * dy).exp();
                let e2 = (r2 * dy).exp();
                let (sin1, cos1) = (theta1 * dy).sin_cos();
                let (sin2, cos2) = (theta2 * dy).sin_cos();
                [
                    e1 * (r1 * cos1 - theta1 * sin1),
                    e2 * (r2 * cos2 - theta2 * sin2),
                    e1 * (r1 * sin1 + theta1 * cos1),
                    e2 * (r2 * sin2 + theta2 * cos2),
                ]
            }
        }
    }

    /// Constraint rows: basis values and derivatives at the border (`dy = 0`).
    fn constraint_rows(&self) -> ([f64; 4], [f64; 4]) {
        (self.values(0.0), self.derivs(0.0))
    }

    /// Exponential envelope rate seen by each weight component.
    pub fn component_rates(&self) -> [f64; 4] {
        match *self {
            ProfileBasis::Real4(s) => s,
            ProfileBasis::Real2Complex1 { s1, s2, r, .. } => [s1, s2, r, r],
            ProfileBasis::Complex2 { r1, r2, .. } => [r1, r2, r1, r2],
        }
    }

    /// Oscillation frequency in depth seen by each weight component.
    pub fn component_thetas(&self) -> [f64; 4] {
        match *self {
            ProfileBasis::Real4(_) => [0.0; 4],
            ProfileBasis::Real2Complex1 { theta, .. } => [0.0, 0.0, theta, theta],
            ProfileBasis::Complex2 { theta1, theta2, .. } => [theta1, theta2, theta1, theta2],
        }
    }
}

/// One surface mode of the compressible analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveMode {
    pub omega: f64,
    pub k: f64,
    /// Quartic roots sorted by (real part, imaginary part).
    pub roots: [Complex64; 4],
    pub regime: Regime,
    pub basis: ProfileBasis,
    /// Family weights attached to the basis components.
    pub weights: [f64; 4],
    /// Border slope of the depth profile, `omega^2 I0 / (g_y P0)`.
    pub target_slope: f64,
    pub policy: WeightPolicy,
    /// Set when some root sits close to the real/complex decision boundary.
    pub near_degenerate: bool,
}

/// Growth diagnosis of one weighted profile component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthComponent {
    /// Index of the weight in the mode.
    pub index: usize,
    pub weight: f64,
    /// Envelope exponent: the root real part seen by this component.
    pub rate: f64,
    /// True when the component amplifies toward the domain interior
    /// (negative envelope exponent).
    pub grows_inward: bool,
}

/// Per-component inward growth report for a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// Components with nonzero weight.
    pub components: Vec<GrowthComponent>,
    /// True when any weighted component grows inward.
    pub amplifying: bool,
}

/// Incompressible dispersion at wavenumber `k`: `omega^2` is linear in `k`
/// and the profile decays inward at rate `kappa = k`.
///
/// The corner amplitudes must equal the values forced by the incompressible
/// regime; anything else is an amplitude mismatch.
pub fn incompressible_mode(p: &ModelParams, k: f64) -> Result<IncompressibleMode, DispersionError> {
    p.validate_for_waves()?;
    if !(k > 0.0) {
        return Err(DispersionError::NonPositiveWavenumber(k));
    }
    let (want_i0, want_p0) = incompressible_amplitudes(p.a1, p.a2, p.b, p.d, p.g_y)?;
    let mismatch = |have: f64, want: f64| (have - want).abs() > 1e-9 * want.abs().max(have.abs());
    if mismatch(p.i0, want_i0) || mismatch(p.p0, want_p0) {
        return Err(DispersionError::AmplitudeMismatch {
            i0: p.i0,
            p0: p.p0,
            want_i0,
            want_p0,
        });
    }
    let omega = ((p.a1 * p.d) / (p.a2 * p.b) * p.g_y * k).sqrt();
    let kappa = -p.p0 * omega * omega / (p.a1 * p.d);
    Ok(IncompressibleMode {
        k,
        omega,
        c: omega / (2.0 * k),
        kappa,
        wavelength: 2.0 * std::f64::consts::PI / k,
    })
}

/// Characteristic quartic coefficients of the compressible depth equation.
///
/// Always produces `q3 = 0`; the sign pattern `q4 > 0`, `q1 <= 0`, `q0 > 0`
/// holds for every valid parameter set and `omega >= 0`, `k > 0`.
pub fn quartic_coefficients(
    p: &ModelParams,
    omega: f64,
    k: f64,
) -> Result<QuarticCoeffs, DispersionError> {
    p.validate_for_waves()?;
    if !(k > 0.0) {
        return Err(DispersionError::NonPositiveWavenumber(k));
    }
    if !(omega >= 0.0) {
        return Err(DispersionError::NegativeFrequency(omega));
    }
    let bd = p.b * p.d;
    let pi = p.p0 * p.i0;
    Ok(QuarticCoeffs {
        q4: -bd * pi,
        q3: 0.0,
        q2: p.a1 * p.a2 * bd + 2.0 * k * k * bd * pi,
        q1: omega * omega * (p.p0 * p.a2 * p.b + p.i0 * p.a1 * p.d),
        q0: pi * omega.powi(4) - bd * pi * k.powi(4),
    })
}

/// Root classification outcome before weights are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub regime: Regime,
    pub basis: ProfileBasis,
    pub near_degenerate: bool,
}

/// Splits the sorted root multiset into its regime and profile basis.
///
/// A root is real when `|Im s| <= tol (1 + |s|)`; roots within a factor of
/// 100 of that boundary mark the classification near-degenerate.
pub fn classify_roots(roots: &[Complex64; 4], tol: f64) -> Classification {
    let ratio = |s: &Complex64| s.im.abs() / (1.0 + s.norm());
    let near = |s: &Complex64| {
        let r = ratio(s);
        r > tol / 100.0 && r < tol * 100.0
    };
    let near_degenerate = roots.iter().any(near);

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| ratio(&roots[i]).partial_cmp(&ratio(&roots[j])).expect("finite"));
    let mut n_real = order.iter().filter(|&&i| ratio(&roots[i]) <= tol).count();
    // Conjugate symmetry makes the count even for solver output; promote the
    // most marginal complex root when handed an asymmetric multiset.
    if n_real % 2 == 1 {
        n_real += 1;
    }

    let reals: Vec<f64> = order[..n_real].iter().map(|&i| roots[i].re).collect();
    let mut complexes: Vec<Complex64> = order[n_real..].iter().map(|&i| roots[i]).collect();
    complexes.sort_by(|u, w| {
        (u.re, u.im.abs(), u.im)
            .partial_cmp(&(w.re, w.im.abs(), w.im))
            .expect("finite roots")
    });
    let pairs: Vec<(f64, f64)> = complexes
        .chunks(2)
        .map(|pair| {
            (
                (pair[0].re + pair[1].re) / 2.0,
                (pair[0].im.abs() + pair[1].im.abs()) / 2.0,
            )
        })
        .collect();
    match (reals.len(), pairs.len()) {
        (4, 0) => {
            let mut s = [reals[0], reals[1], reals[2], reals[3]];
            s.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
            Classification {
                regime: Regime::AllReal,
                basis: ProfileBasis::Real4(s),
                near_degenerate,
            }
        }
        (2, 1) => Classification {
            regime: Regime::TwoRealTwoComplex,
            basis: ProfileBasis::Real2Complex1 {
                s1: reals[0].min(reals[1]),
                s2: reals[0].max(reals[1]),
                r: pairs[0].0,
                theta: pairs[0].1,
            },
            near_degenerate,
        },
        (0, 2) => {
            // Larger envelope rate first.
            let (hi, lo) = if pairs[0].0 >= pairs[1].0 {
                (pairs[0], pairs[1])
            } else {
                (pairs[1], pairs[0])
            };
            Classification {
                regime: Regime::AllComplex,
                basis: ProfileBasis::Complex2 {
                    r1: hi.0,
                    theta1: hi.1,
                    r2: lo.0,
                    theta2: lo.1,
                },
                near_degenerate,
            }
        }
        other => unreachable!("root partition always yields even counts, got {other:?}"),
    }
}

/// Minimum-Euclidean-norm solution of the underdetermined 2x4 system.
fn minimal_norm_weights(
    rows: (&[f64; 4], &[f64; 4]),
    rhs: (f64, f64),
) -> Result<[f64; 4], String> {
    let (r0, r1) = rows;
    let g00: f64 = r0.iter().map(|v| v * v).sum();
    let g01: f64 = r0.iter().zip(r1).map(|(u, v)| u * v).sum();
    let g11: f64 = r1.iter().map(|v| v * v).sum();
    let det = g00 * g11 - g01 * g01;
    let scale = g00.max(g11).max(1.0);
    if det.abs() > 1e-12 * scale * scale {
        let mu0 = (g11 * rhs.0 - g01 * rhs.1) / det;
        let mu1 = (g00 * rhs.1 - g01 * rhs.0) / det;
        let mut w = [0.0; 4];
        for i in 0..4 {
            w[i] = r0[i] * mu0 + r1[i] * mu1;
        }
        return Ok(w);
    }
    // Rank one: the rows are proportional; consistent only if the rhs is too.
    let (row, val) = if g00 >= g11 {
        (r0, rhs.0)
    } else {
        (r1, rhs.1)
    };
    let norm2: f64 = row.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return if rhs.0 == 0.0 && rhs.1 == 0.0 {
            Ok([0.0; 4])
        } else {
            Err("zero constraint rows with nonzero targets".to_string())
        };
    }
    let t = if g00 >= g11 {
        if g00 == 0.0 { 0.0 } else { g01 / g00 }
    } else if g11 == 0.0 {
        0.0
    } else {
        g01 / g11
    };
    let (other_val, expect) = if g00 >= g11 {
        (rhs.1, t * rhs.0)
    } else {
        (rhs.0, t * rhs.1)
    };
    if (other_val - expect).abs() > 1e-9 * (1.0 + other_val.abs().max(expect.abs())) {
        return Err(format!(
            "dependent constraint rows with inconsistent targets ({other_val} vs {expect})"
        ));
    }
    let mut w = [0.0; 4];
    for i in 0..4 {
        w[i] = row[i] * val / norm2;
    }
    Ok(w)
}

/// Pin the last two weights to zero and solve for the first two.
fn pin_secondary_weights(
    rows: (&[f64; 4], &[f64; 4]),
    rhs: (f64, f64),
) -> Result<[f64; 4], String> {
    let (r0, r1) = rows;
    let (a, b, c, d) = (r0[0], r0[1], r1[0], r1[1]);
    let det = a * d - b * c;
    let scale = [a, b, c, d].iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if det.abs() > 1e-9 * scale * scale {
        let w0 = (rhs.0 * d - b * rhs.1) / det;
        let w1 = (a * rhs.1 - rhs.0 * c) / det;
        return Ok([w0, w1, 0.0, 0.0]);
    }
    // Singular 2x2 (typically a repeated leading root): consistent targets
    // admit the symmetric split, anything else is infeasible.
    let sum_scale = 1.0 + rhs.0.abs();
    let implied = if a != 0.0 { c / a * rhs.0 } else { 0.0 };
    if (rhs.1 - implied).abs() <= 1e-9 * sum_scale.max(rhs.1.abs()) {
        let half = rhs.0 / 2.0;
        Ok([half, half, 0.0, 0.0])
    } else {
        Err(format!(
            "pinned 2x2 system singular and inconsistent (targets {} vs implied {implied})",
            rhs.1
        ))
    }
}

/// Attaches family weights to a classified root multiset.
///
/// The two constraints are the border conditions of the depth profile:
/// `f(0) = 1` and `f'(0) = omega^2 I0 / (g_y P0)`.
pub fn classify_and_weights(
    roots: &[Complex64; 4],
    omega: f64,
    i0: f64,
    p0: f64,
    g_y: f64,
    policy: WeightPolicy,
    tol: f64,
) -> Result<(Classification, [f64; 4], f64), DispersionError> {
    let classification = classify_roots(roots, tol);
    let slope = omega * omega * i0 / (g_y * p0);
    let (row0, row1) = classification.basis.constraint_rows();
    let solved = match policy {
        WeightPolicy::MinimalNorm => minimal_norm_weights((&row0, &row1), (1.0, slope)),
        WeightPolicy::PinSecondaryZero => pin_secondary_weights((&row0, &row1), (1.0, slope)),
    };
    let weights = solved.map_err(|detail| DispersionError::InfeasibleConstraints {
        policy,
        detail,
    })?;
    Ok((classification, weights, slope))
}

impl WaveMode {
    /// Full pipeline: quartic coefficients, roots, classification, weights.
    pub fn analyze(
        p: &ModelParams,
        omega: f64,
        k: f64,
        policy: WeightPolicy,
        tol: f64,
    ) -> Result<WaveMode, DispersionError> {
        let coeffs = quartic_coefficients(p, omega, k)?;
        let roots = solve_quartic(&coeffs)?;
        let (classification, weights, slope) =
            classify_and_weights(&roots, omega, p.i0, p.p0, p.g_y, policy, tol)?;
        Ok(WaveMode {
            omega,
            k,
            roots,
            regime: classification.regime,
            basis: classification.basis,
            weights,
            target_slope: slope,
            policy,
            near_degenerate: classification.near_degenerate,
        })
    }

    /// Builds a mode with explicitly chosen weights, verifying the two border
    /// constraints against the mode's own basis.
    pub fn with_weights(
        p: &ModelParams,
        omega: f64,
        k: f64,
        weights: [f64; 4],
        tol: f64,
    ) -> Result<WaveMode, DispersionError> {
        let coeffs = quartic_coefficients(p, omega, k)?;
        let roots = solve_quartic(&coeffs)?;
        let classification = classify_roots(&roots, tol);
        let slope = omega * omega * p.i0 / (p.g_y * p.p0);
        let (row0, row1) = classification.basis.constraint_rows();
        let sum: f64 = (0..4).map(|i| row0[i] * weights[i]).sum();
        let got_slope: f64 = (0..4).map(|i| row1[i] * weights[i]).sum();
        if (sum - 1.0).abs() > 1e-9 || (got_slope - slope).abs() > 1e-9 * (1.0 + slope.abs()) {
            return Err(DispersionError::InfeasibleConstraints {
                policy: WeightPolicy::MinimalNorm,
                detail: format!(
                    "explicit weights violate border constraints: sum {sum} (want 1), \
                     slope {got_slope} (want {slope})"
                ),
            });
        }
        Ok(WaveMode {
            omega,
            k,
            roots,
            regime: classification.regime,
            basis: classification.basis,
            weights,
            target_slope: slope,
            policy: WeightPolicy::MinimalNorm,
            near_degenerate: classification.near_degenerate,
        })
    }

    /// The single-real-root family member: full weight on one positive real
    /// root that matches the border slope, zero elsewhere.
    pub fn simplest(p: &ModelParams, omega: f64, k: f64) -> Result<WaveMode, DispersionError> {
        let coeffs = quartic_coefficients(p, omega, k)?;
        let roots = solve_quartic(&coeffs)?;
        let classification = classify_roots(&roots, DEFAULT_CLASSIFY_TOL);
        let slope = omega * omega * p.i0 / (p.g_y * p.p0);
        let rates = classification.basis.component_rates();
        let thetas = classification.basis.component_thetas();
        let slot = (0..4).find(|&i| {
            thetas[i] == 0.0
                && rates[i] > 0.0
                && (rates[i] - slope).abs() <= 1e-6 * (1.0 + slope.abs())
        });
        let Some(slot) = slot else {
            return Err(DispersionError::NotSimplestMode);
        };
        let mut weights = [0.0; 4];
        weights[slot] = 1.0;
        Ok(WaveMode {
            omega,
            k,
            roots,
            regime: classification.regime,
            basis: classification.basis,
            weights,
            target_slope: slope,
            policy: WeightPolicy::PinSecondaryZero,
            near_degenerate: classification.near_degenerate,
        })
    }

    /// Depth profile `f(dy)` with `dy = y - Y`.
    pub fn profile(&self, dy: f64) -> f64 {
        let v = self.basis.values(dy);
        (0..4).map(|i| self.weights[i] * v[i]).sum()
    }

    /// Depth profile derivative `f'(dy)`.
    pub fn profile_deriv(&self, dy: f64) -> f64 {
        let v = self.basis.derivs(dy);
        (0..4).map(|i| self.weights[i] * v[i]).sum()
    }

    /// The single positive real root when this is a simplest mode.
    pub fn simplest_root(&self) -> Option<f64> {
        let rates = self.basis.component_rates();
        let thetas = self.basis.component_thetas();
        let mut found = None;
        for i in 0..4 {
            if self.weights[i] == 0.0 {
                continue;
            }
            if thetas[i] != 0.0 || rates[i] <= 0.0 || self.weights[i] != 1.0 || found.is_some() {
                return None;
            }
            found = Some(rates[i]);
        }
        found
    }

    /// Case-2 sign observation: with two real roots and one complex pair the
    /// real roots' signs should oppose the sign of the pair's real part.
    /// `None` when the mode is not in that regime.
    pub fn case2_sign_consistent(&self) -> Option<bool> {
        if let ProfileBasis::Real2Complex1 { s1, s2, r, .. } = self.basis {
            if r > 0.0 {
                Some(s1 < 0.0 && s2 < 0.0)
            } else if r < 0.0 {
                Some(s1 > 0.0 && s2 > 0.0)
            } else {
                Some(true)
            }
        } else {
            None
        }
    }
}

/// Per-component inward growth rates for the weighted profile.
///
/// A component with envelope exponent `rate < 0` amplifies toward the domain
/// interior with e-folding rate `|rate|` per unit depth.
pub fn inward_growth_rates(mode: &WaveMode) -> GrowthReport {
    let rates = mode.basis.component_rates();
    let mut components = Vec::new();
    for (index, (&weight, &rate)) in mode.weights.iter().zip(rates.iter()).enumerate() {
        if weight == 0.0 {
            continue;
        }
        components.push(GrowthComponent {
            index,
            weight,
            rate,
            grows_inward: rate < 0.0,
        });
    }
    let amplifying = components.iter().any(|c| c.grows_inward);
    GrowthReport {
        components,
        amplifying,
    }
}
