//! Lower real branch of the Lambert W function.
//!
//! `W₋₁` inverts `w ↦ w·eʷ` on `w ≤ −1`, mapping `[−1/e, 0)` onto `(−∞, −1]`.
//! It is strictly decreasing on that interval: `W₋₁(−1/e) = −1` and
//! `W₋₁(z) → −∞` as `z → 0⁻`.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// `−1/e`, the branch point.
pub const BRANCH_POINT: f64 = -0.367_879_441_171_442_33;

const MAX_ITER: usize = 50;
const REL_TOL: f64 = 1e-14;

/// Evaluates `W₋₁(z)` for `−1/e ≤ z < 0`.
///
/// Starts from the branch-point series (for `z` close to `−1/e`) or the
/// asymptotic logarithmic expansion (for `z` close to zero) and refines with
/// Halley's iteration.
pub fn w_minus1(z: f64) -> Result<f64> {
    if !(z.is_finite() && z < 0.0) {
        return Err(Error::Domain {
            value: z,
            domain: "[-1/e, 0)",
        });
    }
    // 1 + e·z, computed so that z = BRANCH_POINT gives exactly 0.
    let q = 1.0 + E * z;
    if q < 0.0 {
        // Rounding in E * z can push arguments within an ulp of -1/e below zero.
        if z >= BRANCH_POINT - 4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(Error::Domain {
            value: z,
            domain: "[-1/e, 0)",
        });
    }
    if q == 0.0 {
        return Ok(-1.0);
    }
    if q < 1e-14 {
        return Ok(-1.0 - (2.0 * q).sqrt());
    }

    let mut w = initial_guess(z, q);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = w - step;
        // stay on the lower branch
        let next = if next > -1.0 { 0.5 * (w - 1.0) } else { next };
        let done = (next - w).abs() <= REL_TOL * next.abs();
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

/// Evaluates `W₋₁(z)` given `ln(−z)`, for arguments too close to zero to
/// represent directly. Requires `ln(−z) ≤ −1`.
pub fn w_minus1_from_log(log_neg_z: f64) -> Result<f64> {
    if !(log_neg_z <= -1.0) {
        return Err(Error::Domain {
            value: log_neg_z,
            domain: "ln(-z) <= -1",
        });
    }
    if log_neg_z > -600.0 {
        return w_minus1(-log_neg_z.exp());
    }
    // w + ln(−w) = ln(−z), solved by Halley's method
    let l = log_neg_z;
    let mut w = l - (-l).ln();
    for _ in 0..MAX_ITER {
        let h = w + (-w).ln() - l;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = h / (d1 - 0.5 * h * d2 / d1);
        w -= step;
        if step.abs() <= REL_TOL * w.abs() {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(z: f64, q: f64) -> f64 {
    if z < -0.25 {
        // Series in p = -sqrt(2(1 + e z)) about the branch point.
        let p = -(2.0 * q).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p - 43.0 / 540.0 * p.powi(4)
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(z: f64) -> f64 {
        // w e^w decreases from 0⁻ to -1/e on (-inf, -1]; bracket on [-50, -1].
        let (mut lo, mut hi) = (-50.0_f64, -1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn branch_point_is_minus_one() {
        assert_eq!(w_minus1(-(-1.0_f64).exp()).unwrap(), -1.0);
        assert_eq!(w_minus1(BRANCH_POINT).unwrap(), -1.0);
    }

    #[test]
    fn matches_bisection_at_minus_point_two() {
        let w = w_minus1(-0.2).unwrap();
        assert!((w * w.exp() + 0.2).abs() < 1e-12);
        assert!((w - bisect(-0.2)).abs() < 1e-12, "{w} vs {}", bisect(-0.2));
        // frozen from the bisection oracle
        assert!((w - (-2.542_641_357_773_526_4)).abs() < 1e-12);
    }

    #[test]
    fn tiny_argument_residual() {
        let z = -1e-10;
        let w = w_minus1(z).unwrap();
        assert!((w * w.exp() - z).abs() < 1e-12 * z.abs());
        let guess = (1e-10_f64).ln() - (-(1e-10_f64).ln()).ln();
        assert!((w - guess).abs() < 0.2);
    }

    #[test]
    fn decreasing_on_branch() {
        let zs = [-0.36, -0.2, -1e-3];
        let oracle: Vec<f64> = zs.iter().map(|&z| bisect(z)).collect();
        assert!(oracle[0] > oracle[1] && oracle[1] > oracle[2]);
        let ws: Vec<f64> = zs.iter().map(|&z| w_minus1(z).unwrap()).collect();
        assert!(ws[0] > ws[1] && ws[1] > ws[2]);
    }

    #[test]
    fn log_form_agrees_and_extends() {
        for &z in &[-0.3, -1e-5, -1e-200] {
            let a = w_minus1(z).unwrap();
            let b = w_minus1_from_log((-z).ln()).unwrap();
            assert!((a - b).abs() < 1e-13 * a.abs());
        }
        let l = -5000.0;
        let w = w_minus1_from_log(l).unwrap();
        assert!((w + (-w).ln() - l).abs() < 1e-12 * l.abs());
        assert!(w_minus1_from_log(-0.5).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(w_minus1(0.0).is_err());
        assert!(w_minus1(0.1).is_err());
        assert!(w_minus1(-0.5).is_err());
        assert!(w_minus1(f64::NAN).is_err());
    }

    #[test]
    fn near_branch_point_guard() {
        let z = BRANCH_POINT + 1e-16;
        let w = w_minus1(z).unwrap();
        assert!(w <= -1.0);
        assert!((w * w.exp() - z).abs() < 1e-15);
    }
}
