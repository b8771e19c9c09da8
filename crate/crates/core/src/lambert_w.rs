//! Real branches of the Lambert W function.
//!
//! `lambert_w` solves `w * exp(w) = x` by Halley iteration in `w`. Close to the
//! branch point `-1/e` that formulation loses relative accuracy in `w + 1`, so
//! callers that already know the argument in the form `-exp(-1 - u)` should use
//! [`lambert_w_shifted`], which iterates on `y - ln(1 + y) = u` instead.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const INV_E: f64 = 1.0 / E;
const BRANCH_POINT_TOL: f64 = 4.0 * f64::EPSILON * INV_E;
const MAX_ITER: usize = 100;
/// Largest `u` for which the shifted principal branch keeps `1 + y` resolvable.
pub const PRINCIPAL_SHIFT_MAX: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `W_0`, defined on `[-1/e, inf)` with values in `[-1, inf)`.
    Principal,
    /// `W_{-1}`, defined on `[-1/e, 0)` with values in `(-inf, -1]`.
    Minus1,
}

pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    if x.is_nan() {
        return domain("lambert_w argument is NaN");
    }
    if (x + INV_E).abs() <= BRANCH_POINT_TOL {
        return Ok(-1.0);
    }
    if x < -INV_E {
        return domain(format!("lambert_w argument {x} below -1/e"));
    }
    match branch {
        Branch::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            if x.is_infinite() {
                return Ok(f64::INFINITY);
            }
            halley(x, principal_guess(x))
        }
        Branch::Minus1 => {
            if x >= 0.0 {
                return domain(format!("W_-1 undefined for x = {x} >= 0"));
            }
            halley(x, minus1_guess(x))
        }
    }
}

fn principal_guess(x: f64) -> f64 {
    if x < -0.32 {
        // branch-point series in p = sqrt(2(ex + 1))
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn minus1_guess(x: f64) -> f64 {
    if x > -0.1 {
        let l1 = (-x).ln();
        l1 - (-l1).ln()
    } else {
        // midpoint of the Chatzigeorgiou bracket for W_-1(-exp(-u-1))
        let u = (-(-x).ln() - 1.0).max(0.0);
        -1.0 - (2.0 * u).sqrt() - 5.0 / 6.0 * u
    }
}

fn halley(x: f64, mut w: f64) -> Result<f64> {
    let floor = 2.0 * f64::EPSILON * x.abs();
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= floor {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            // exactly on the branch point; nudge off it
            w += if x > -INV_E { 1e-8 } else { -1e-8 };
            continue;
        }
        let fp = ew * wp1;
        let step = f / (fp - (w + 2.0) * f / (2.0 * wp1));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() < 1e-15 * w.abs().max(1.0) {
            return Ok(w);
        }
    }
    // near -1/e the iteration can dither at the rounding level of f
    if (w * w.exp() - x).abs() <= 1e-14 * x.abs().max(1.0) {
        return Ok(w);
    }
    Err(Error::NoConvergence(format!("lambert_w at x = {x}")))
}

/// `W(-exp(-1 - u))` for `u >= 0` on the requested branch.
///
/// The principal branch is limited to `u <= PRINCIPAL_SHIFT_MAX`.
///
/// Writing `W = -1 - y`, the defining equation becomes `y - ln(1 + y) = u`,
/// with `y >= 0` on `W_-1` and `-1 < y <= 0` on `W_0`. Returns `y` rather than
/// `W` so that `W + 1` keeps full relative precision for small `u`.
pub fn lambert_w_shifted(branch: Branch, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return domain(format!("shifted lambert argument u = {u} must be >= 0"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if branch == Branch::Principal && u > PRINCIPAL_SHIFT_MAX {
        // 1 + y = O(exp(-1 - u)) drops below the spacing of doubles near -1
        return domain(format!("shifted W_0 loses precision for u = {u} > {PRINCIPAL_SHIFT_MAX}; use lambert_w"));
    }
    let s = (2.0 * u).sqrt();
    let mut y = match branch {
        Branch::Minus1 => {
            if u < 0.5 {
                s + s * s / 3.0 + s * s * s / 36.0
            } else {
                s + 5.0 / 6.0 * u
            }
        }
        Branch::Principal => {
            if u < 0.5 {
                -s + s * s / 3.0 - s * s * s / 36.0
            } else {
                // 1 + y ~ exp(-1 - u) for large u
                (-1.0 - u).exp() * (1.0 + (-1.0 - u).exp()) - 1.0
            }
        }
    };
    for _ in 0..MAX_ITER {
        let h = x_minus_ln1p(y) - u;
        let hp = y / (1.0 + y);
        let hpp = 1.0 / ((1.0 + y) * (1.0 + y));
        if hp == 0.0 {
            break;
        }
        let newton = h / hp;
        let step = newton / (1.0 - 0.5 * newton * hpp / hp);
        let mut next = y - step;
        if branch == Branch::Principal && next <= -1.0 {
            next = 0.5 * (y - 1.0);
        }
        if branch == Branch::Minus1 && next < 0.0 {
            next = 0.5 * y;
        }
        let done = (next - y).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300);
        y = next;
        if done || h == 0.0 {
            return Ok(y);
        }
    }
    if (x_minus_ln1p(y) - u).abs() <= 1e-14 * u {
        return Ok(y);
    }
    Err(Error::NoConvergence(format!("shifted lambert at u = {u}")))
}

/// `y - ln(1 + y)` without cancellation for small `|y|`.
pub fn x_minus_ln1p(y: f64) -> f64 {
    if y.abs() < 0.25 {
        // sum_{k>=2} (-1)^k y^k / k
        let mut term = y * y;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            let t = term / k;
            sum += t;
            if t.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -y;
            k += 1.0;
        }
        sum
    } else {
        y - y.ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(w: f64, x: f64) -> f64 {
        (w * w.exp() - x).abs() / x.abs().max(1.0)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(lambert_w(Branch::Principal, 0.0).unwrap(), 0.0);
        assert!((lambert_w(Branch::Principal, E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w(Branch::Minus1, -INV_E).unwrap(), -1.0);
        assert_eq!(lambert_w(Branch::Principal, -INV_E).unwrap(), -1.0);
        let w = lambert_w(Branch::Minus1, -2.0 * (-2.0f64).exp()).unwrap();
        assert!((w + 2.0).abs() < 1e-14, "{w}");
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w(Branch::Principal, -0.5).is_err());
        assert!(lambert_w(Branch::Minus1, -0.5).is_err());
        assert!(lambert_w(Branch::Minus1, 0.0).is_err());
        assert!(lambert_w(Branch::Minus1, 1.0).is_err());
        assert!(lambert_w(Branch::Principal, f64::NAN).is_err());
    }

    #[test]
    fn near_branch_point() {
        for d in [1e-11, 1e-9, 1e-6, 1e-3] {
            let x = -INV_E + d;
            let w0 = lambert_w(Branch::Principal, x).unwrap();
            let wm = lambert_w(Branch::Minus1, x).unwrap();
            assert!(w0 > -1.0 && wm < -1.0, "{d}: {w0} {wm}");
            assert!(residual(w0, x) < 1e-13);
            assert!(residual(wm, x) < 1e-13);
        }
    }

    #[test]
    fn large_arguments() {
        for x in [1e3, 1e10, 1e100, 1e300] {
            let w = lambert_w(Branch::Principal, x).unwrap();
            assert!(residual(w, x) < 1e-13, "{x}");
        }
        let w = lambert_w(Branch::Minus1, -1e-300).unwrap();
        assert!(((w * w.exp()) / -1e-300 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn shifted_matches_direct() {
        for u in [1e-3_f64, 0.1, 0.7, 2.0, 10.0] {
            let x = -(-1.0 - u).exp();
            for branch in [Branch::Principal, Branch::Minus1] {
                let y = lambert_w_shifted(branch, u).unwrap();
                let w = lambert_w(branch, x).unwrap();
                assert!(((-1.0 - y) - w).abs() < 1e-12 * w.abs().max(1.0), "{u} {branch:?}");
            }
        }
    }

    #[test]
    fn x_minus_ln1p_series_matches_direct() {
        for y in [-0.049, -0.01, 0.001, 0.03, 0.0499] {
            let direct = y - f64::ln_1p(y);
            assert!((x_minus_ln1p(y) / direct - 1.0).abs() < 1e-10, "{y}");
        }
        assert_eq!(x_minus_ln1p(0.0), 0.0);
    }

    #[test]
    fn shifted_keeps_relative_precision() {
        // y - ln(1+y) = u at u ~ 1e-20 is resolvable only through the series start
        for u in [1e-20, 1e-14, 1e-10] {
            let ym = lambert_w_shifted(Branch::Minus1, u).unwrap();
            let y0 = lambert_w_shifted(Branch::Principal, u).unwrap();
            let s = (2.0 * u).sqrt();
            assert!((ym / s - 1.0).abs() < 1e-5);
            assert!((y0 / -s - 1.0).abs() < 1e-5);
        }
    }
}
