//! Closed-form quartic root solver in complex arithmetic.
//!
//! The depressed quartic is split into two quadratics through a resolvent
//! cubic, and every root is polished with two guarded Newton steps on the
//! original polynomial. The accuracy contract is the residual bound checked
//! by [`residual_ok`], not the factorization route.

use num_complex::Complex64;
use thiserror::Error;

/// Real coefficients `q4 s^4 + q3 s^3 + q2 s^2 + q1 s + q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoeffs {
    pub q4: f64,
    pub q3: f64,
    pub q2: f64,
    pub q1: f64,
    pub q0: f64,
}

#[derive(Debug, Error)]
pub enum QuarticError {
    #[error("degenerate leading coefficient q4 = {0}")]
    DegenerateLeading(f64),
    #[error("non-finite coefficient in {0:?}")]
    NonFinite(QuarticCoeffs),
}

impl QuarticCoeffs {
    pub fn as_array(&self) -> [f64; 5] {
        [self.q4, self.q3, self.q2, self.q1, self.q0]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Polynomial value at a complex point (Horner).
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(self.q4, 0.0);
        for c in [self.q3, self.q2, self.q1, self.q0] {
            acc = acc * s + c;
        }
        acc
    }

    /// Derivative value at a complex point.
    pub fn eval_deriv(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(4.0 * self.q4, 0.0);
        for c in [3.0 * self.q3, 2.0 * self.q2, self.q1] {
            acc = acc * s + c;
        }
        acc
    }
}

/// Residual acceptance bound: `|p(s)| <= rtol * max|q_i| * max(1, |s|^4)`.
pub fn residual_ok(q: &QuarticCoeffs, s: Complex64, rtol: f64) -> bool {
    let scale = q.max_abs() * s.norm().powi(4).max(1.0);
    q.eval(s).norm() <= rtol * scale
}

/// All three roots of `z^3 + p z + q` with real `p`, `q`.
fn depressed_cubic_roots(p: f64, q: f64) -> [Complex64; 3] {
    if p == 0.0 && q == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let half_q = Complex64::new(-q / 2.0, 0.0);
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    // Pick the branch that avoids cancellation in the cube-root argument.
    let c = if (half_q + disc).norm() >= (half_q - disc).norm() {
        half_q + disc
    } else {
        half_q - disc
    };
    let s0 = c.cbrt();
    let omega = Complex64::new(-0.5, 0.75_f64.sqrt());
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    let mut w = Complex64::new(1.0, 0.0);
    for root in &mut roots {
        let sk = s0 * w;
        *root = sk - Complex64::new(p / 3.0, 0.0) / sk;
        w *= omega;
    }
    roots
}

fn quadratic_roots(bc: Complex64, cc: Complex64) -> [Complex64; 2] {
    // t^2 + bc t + cc, with the stable sign choice for the first root.
    let disc = (bc * bc - 4.0 * cc).sqrt();
    let sign = if (bc.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let big = -(bc + disc * sign) / 2.0;
    if big.norm() == 0.0 {
        [big, -bc - big]
    } else {
        [big, cc / big]
    }
}

fn polish(q: &QuarticCoeffs, mut s: Complex64) -> Complex64 {
    for _ in 0..2 {
        let f = q.eval(s);
        if f.norm() == 0.0 {
            break;
        }
        let df = q.eval_deriv(s);
        if df.norm() < 1e-300 {
            break;
        }
        let step = f / df;
        if step.norm() > 0.5 * (1.0 + s.norm()) {
            break;
        }
        let candidate = s - step;
        if q.eval(candidate).norm() < f.norm() {
            s = candidate;
        } else {
            break;
        }
    }
    s
}

/// Pair near-conjugate roots into exact conjugates so that downstream regime
/// classification sees a clean multiset. Real-coefficient quartics always
/// admit such a pairing up to solver round-off; unpaired residual imaginary
/// dust is left untouched.
fn symmetrize_conjugates(roots: &mut [Complex64; 4]) {
    let tol = 1e-9 * (1.0 + roots.iter().fold(0.0f64, |m, r| m.max(r.norm())));
    let mut used = [false; 4];
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| {
        roots[j]
            .im
            .abs()
            .partial_cmp(&roots[i].im.abs())
            .expect("finite roots")
    });
    for &i in &order {
        if used[i] || roots[i].im == 0.0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..4 {
            if j == i || used[j] {
                continue;
            }
            let asym = (roots[i].re - roots[j].re)
                .abs()
                .max((roots[i].im + roots[j].im).abs());
            if asym <= tol && best.map_or(true, |(_, b)| asym < b) {
                best = Some((j, asym));
            }
        }
        if let Some((j, _)) = best {
            used[i] = true;
            used[j] = true;
            let re = (roots[i].re + roots[j].re) / 2.0;
            let im = (roots[i].im - roots[j].im).abs() / 2.0;
            let (lo, hi) = if roots[i].im < roots[j].im { (i, j) } else { (j, i) };
            roots[lo] = Complex64::new(re, -im);
            roots[hi] = Complex64::new(re, im);
        }
    }
}

/// Solves the quartic and returns its four roots sorted by
/// (real part, imaginary part).
pub fn solve_quartic(q: &QuarticCoeffs) -> Result<[Complex64; 4], QuarticError> {
    if q.as_array().iter().any(|c| !c.is_finite()) {
        return Err(QuarticError::NonFinite(*q));
    }
    if q.q4 == 0.0 {
        return Err(QuarticError::DegenerateLeading(q.q4));
    }

    let p3 = q.q3 / q.q4;
    let p2 = q.q2 / q.q4;
    let p1 = q.q1 / q.q4;
    let p0 = q.q0 / q.q4;

    // Depressed form t^4 + a t^2 + b t + c via s = t - p3/4.
    let shift = p3 / 4.0;
    let a = p2 - 3.0 * p3 * p3 / 8.0;
    let b = p1 - p3 * p2 / 2.0 + p3 * p3 * p3 / 8.0;
    let c = p0 - p3 * p1 / 4.0 + p3 * p3 * p2 / 16.0 - 3.0 * p3 * p3 * p3 * p3 / 256.0;

    let mut roots: [Complex64; 4];
    if b == 0.0 {
        // Biquadratic: t^2 solves a quadratic.
        let t2 = quadratic_roots(Complex64::new(a, 0.0), Complex64::new(c, 0.0));
        let r0 = t2[0].sqrt();
        let r1 = t2[1].sqrt();
        roots = [r0, -r0, r1, -r1];
    } else {
        // Resolvent cubic 8m^3 + 8am^2 + (2a^2 - 8c)m - b^2 = 0, monic form
        // m^3 + a m^2 + (a^2/4 - c) m - b^2/8 = 0.
        let cb = a;
        let cc = a * a / 4.0 - c;
        let cd = -b * b / 8.0;
        let cubic = depressed_cubic_roots(
            cc - cb * cb / 3.0,
            2.0 * cb * cb * cb / 27.0 - cb * cc / 3.0 + cd,
        );
        let m = cubic
            .iter()
            .map(|z| z - cb / 3.0)
            .max_by(|u, w| u.norm().partial_cmp(&w.norm()).expect("finite"))
            .expect("three roots");
        let e = (2.0 * m).sqrt();
        let half = Complex64::new(a / 2.0, 0.0) + m;
        let q_over = Complex64::new(b, 0.0) / (2.0 * e);
        let first = quadratic_roots(-e, half + q_over);
        let second = quadratic_roots(e, half - q_over);
        roots = [first[0], first[1], second[0], second[1]];
    }

    // Undo the depressing shift, then polish on the original quartic.
    for r in &mut roots {
        *r = polish(q, *r - shift);
    }

    symmetrize_conjugates(&mut roots);
    roots.sort_by(|u, w| {
        (u.re, u.im)
            .partial_cmp(&(w.re, w.im))
            .expect("finite roots")
    });
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, Complex};

    /// Independent oracle: eigenvalues of the companion matrix.
    fn companion_roots(q: &QuarticCoeffs) -> Vec<Complex64> {
        let m = DMatrix::<f64>::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -q.q0 / q.q4,
                1.0, 0.0, 0.0, -q.q1 / q.q4,
                0.0, 1.0, 0.0, -q.q2 / q.q4,
                0.0, 0.0, 1.0, -q.q3 / q.q4,
            ],
        );
        let eig = m.complex_eigenvalues();
        let mut out: Vec<Complex64> = eig
            .iter()
            .map(|z: &Complex<f64>| Complex64::new(z.re, z.im))
            .collect();
        out.sort_by(|u, w| (u.re, u.im).partial_cmp(&(w.re, w.im)).unwrap());
        out
    }

    fn assert_matches_oracle(q: &QuarticCoeffs, tol: f64) {
        let mine = solve_quartic(q).unwrap();
        let oracle = companion_roots(q);
        for (m, o) in mine.iter().zip(oracle.iter()) {
            assert!(
                (m - o).norm() <= tol * (1.0 + o.norm()),
                "root {m} vs oracle {o} for {q:?}"
            );
        }
    }

    #[test]
    fn canonical_fixture_roots() {
        // s^4 - s^2 - 2s + 2 = (s - 1)^2 (s^2 + 2s + 2)
        let q = QuarticCoeffs {
            q4: 1.0,
            q3: 0.0,
            q2: -1.0,
            q1: -2.0,
            q0: 2.0,
        };
        let roots = solve_quartic(&q).unwrap();
        let expect = [
            Complex64::new(-1.0, -1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert!((r - e).norm() < 1e-7, "{r} vs {e}");
        }
        let sum: Complex64 = roots.iter().sum();
        assert!(sum.norm() < 1e-8);
        assert_matches_oracle(&q, 1e-6);
    }

    #[test]
    fn zero_frequency_fixture_roots() {
        // s^4 - s^2 + 1: roots at +-cos(pi/6) +- i/2.
        let q = QuarticCoeffs {
            q4: 1.0,
            q3: 0.0,
            q2: -1.0,
            q1: 0.0,
            q0: 1.0,
        };
        let roots = solve_quartic(&q).unwrap();
        let c = (std::f64::consts::PI / 6.0).cos();
        let expect = [
            Complex64::new(-c, -0.5),
            Complex64::new(-c, 0.5),
            Complex64::new(c, -0.5),
            Complex64::new(c, 0.5),
        ];
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert!((r - e).norm() < 1e-9, "{r} vs {e}");
        }
        for r in roots {
            assert!(residual_ok(&q, r, 1e-12));
        }
    }

    #[test]
    fn quadruple_zero_root() {
        let q = QuarticCoeffs {
            q4: 1.0,
            q3: 0.0,
            q2: 0.0,
            q1: 0.0,
            q0: 0.0,
        };
        let roots = solve_quartic(&q).unwrap();
        for r in roots {
            assert_eq!(r, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let q = QuarticCoeffs {
            q4: 0.0,
            q3: 1.0,
            q2: 0.0,
            q1: 0.0,
            q0: 1.0,
        };
        assert!(matches!(
            solve_quartic(&q),
            Err(QuarticError::DegenerateLeading(_))
        ));
    }

    #[test]
    fn conjugate_pairs_are_exact() {
        let q = QuarticCoeffs {
            q4: 2.0,
            q3: -3.0,
            q2: 7.0,
            q1: -1.0,
            q0: 5.0,
        };
        let roots = solve_quartic(&q).unwrap();
        for r in &roots {
            assert!(residual_ok(&q, *r, 1e-10), "residual too large at {r}");
            if r.im != 0.0 {
                assert!(
                    roots.iter().any(|o| *o == r.conj()),
                    "no exact conjugate of {r} in {roots:?}"
                );
            }
        }
        assert_matches_oracle(&q, 1e-8);
    }

    #[test]
    fn random_quartics_match_companion_oracle() {
        // Deterministic LCG so the sweep is reproducible.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 20.0 - 10.0
        };
        for _ in 0..500 {
            let q = QuarticCoeffs {
                q4: next().abs().max(0.05),
                q3: next(),
                q2: next(),
                q1: next(),
                q0: next(),
            };
            let roots = solve_quartic(&q).unwrap();
            for r in roots {
                assert!(residual_ok(&q, r, 1e-8), "{q:?} residual at {r}");
            }
            assert_matches_oracle(&q, 1e-5);
        }
    }
}
