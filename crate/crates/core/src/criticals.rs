//! Slopes between adjacent Turán points and the critical exponents built on
//! them.
//!
//! Every closed form here is written so that it stays accurate as `n` grows:
//! ratios close to 1 go through `ln_1p`/`expm1`, and the Lambert W arguments
//! are passed in shifted form (see [`crate::lambert_w::lambert_w_shifted`]).

use serde::{Deserialize, Serialize};

use crate::curves::{ln_t_k, t_k_pow};
use crate::error::{domain, Error, Result};
use crate::lambert_w::{lambert_w, lambert_w_shifted, x_minus_ln1p, Branch};

/// `s_k(gamma) = k(k+1)(t_k^gamma - t_{k-1}^gamma)`, the slope of the secant
/// through `v_{k-1}^gamma` and `v_k^gamma`.
pub fn slope(k: u64, gamma: f64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let kf = k as f64;
    let tk = t_k_pow(k, gamma);
    // t_{k-1}/t_k = 1 - (3k+2)/k^3
    let ratio_ln = (-(3.0 * kf + 2.0) / (kf * kf * kf)).ln_1p();
    -kf * (kf + 1.0) * tk * (gamma * ratio_ln).exp_m1()
}

/// `(1, -1/s_k)` for `k >= 1`, `(0, -1)` for `k = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalDirection {
    pub k: u64,
    pub vector: (f64, f64),
}

pub fn critical_direction(k: u64, gamma: f64) -> CriticalDirection {
    let vector = if k == 0 { (0.0, -1.0) } else { (1.0, -1.0 / slope(k, gamma)) };
    CriticalDirection { k, vector }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    Decreasing,
    DecThenInc,
    Increasing,
}

/// Empirical shape of `s_2, ..., s_{k_max}`.
pub fn slope_monotonicity(gamma: f64, k_max: u64) -> Result<Monotonicity> {
    if k_max < 3 {
        return domain(format!("k_max = {k_max} must be >= 3"));
    }
    let signs: Vec<bool> = (2..k_max)
        .filter_map(|k| {
            let d = slope(k + 1, gamma) - slope(k, gamma);
            (d != 0.0).then_some(d > 0.0)
        })
        .collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    match (changes, signs.first()) {
        (0, Some(false)) => Ok(Monotonicity::Decreasing),
        (0, Some(true)) => Ok(Monotonicity::Increasing),
        (1, Some(false)) => Ok(Monotonicity::DecThenInc),
        _ => Err(Error::AmbiguousPattern { changes, k_max }),
    }
}

/// Boundary `5/9` below which `{s_k}` is strictly decreasing.
pub const GAMMA_DECREASING: f64 = 5.0 / 9.0;

/// `log_{27/16}(3/2)`, above which `{s_k}` is strictly increasing (`s_2 = s_3` here).
pub fn gamma_increasing() -> f64 {
    1.5f64.ln() / (27.0f64 / 16.0).ln()
}

/// `gamma* = W_0(2 ln(9/2)) / ln(9/2)`, where `s_2 = 3 gamma`.
pub fn gamma_star() -> f64 {
    let l = 4.5f64.ln();
    lambert_w(Branch::Principal, 2.0 * l).expect("2 ln 4.5 is in the W_0 domain") / l
}

/// Index `k >= 2` minimizing `s_k`; `None` when the sequence decreases for ever
/// (`gamma <= 5/9`). Uses unimodality: doubling, then bisection on the sign of
/// `s_{k+1} - s_k`.
pub fn slope_valley(gamma: f64) -> Option<u64> {
    if gamma <= GAMMA_DECREASING {
        return None;
    }
    let rising = |k: u64| slope(k + 1, gamma) > slope(k, gamma);
    if rising(2) {
        return Some(2);
    }
    let mut lo = 2u64;
    let mut hi = 4u64;
    while !rising(hi) {
        lo = hi;
        hi = hi.checked_mul(2)?;
        if hi > 1 << 40 {
            return None;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rising(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Least `k >= from` with `s_k >= level`, assuming `s` is nondecreasing from
/// `from` on and `level < 3 gamma`.
pub fn first_slope_at_least(gamma: f64, level: f64, from: u64) -> u64 {
    if slope(from, gamma) >= level {
        return from;
    }
    let mut lo = from;
    let mut step = 1u64;
    let mut hi = from + 1;
    while slope(hi, gamma) < level {
        lo = hi;
        step = step.saturating_mul(2);
        hi = hi.saturating_add(step);
        if hi >= 1 << 52 {
            return hi;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if slope(mid, gamma) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Quantities behind `gamma_n`: `1 + a gamma = p^gamma` with
/// `a = 3/((n+1)(n-2))`, `p = n^3/((n+1)^2(n-2))`, `q = -ln(p)/a`,
/// `u = -q - ln(-q) - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambertAux {
    pub n: u64,
    pub a_n: f64,
    pub p_n: f64,
    pub q_n: f64,
    pub u_n: f64,
    /// `1 + q_n`, kept separately because it is tiny for large `n`.
    pub delta_n: f64,
    pub ln_p_n: f64,
}

impl LambertAux {
    pub fn new(n: u64) -> Result<Self> {
        if n < 3 {
            return domain(format!("gamma_n needs n >= 3, got {n}"));
        }
        let nf = n as f64;
        let a = 3.0 / ((nf + 1.0) * (nf - 2.0));
        // p - 1 = (3n+2)/((n+1)^2 (n-2))
        let z = (3.0 * nf + 2.0) / ((nf + 1.0) * (nf + 1.0) * (nf - 2.0));
        let ln_p = z.ln_1p();
        // 1 + q = 1 - z/a + (z - ln(1+z))/a and 1 - z/a = 1/(3(n+1))
        let delta = 1.0 / (3.0 * (nf + 1.0)) + x_minus_ln1p(z) / a;
        let u = x_minus_ln1p(-delta);
        Ok(LambertAux { n, a_n: a, p_n: 1.0 + z, q_n: delta - 1.0, u_n: u, delta_n: delta, ln_p_n: ln_p })
    }
}

/// Nonzero root of `1 + a(n) gamma = p(n)^gamma`, via `W_{-1}`.
pub fn gamma_n(n: u64) -> Result<f64> {
    let aux = LambertAux::new(n)?;
    // W_{-1}(q e^q) = -1 - y, so gamma = -(W/ln p + 1/a) = (y + delta)/ln p
    let y = lambert_w_shifted(Branch::Minus1, aux.u_n)?;
    Ok((y + aux.delta_n) / aux.ln_p_n)
}

/// Root of `s_n(gamma) = 3 gamma (n-1)/(n+1) t_n^(gamma-1)`, via `W_0`.
///
/// Dividing by `t_n^gamma` gives `p~^gamma = 1 + a~ gamma` with
/// `p~ = t_{n-1}/t_n` and `a~ = -3/n^2`.
pub fn gamma_tilde_n(n: u64) -> Result<f64> {
    if n < 2 {
        return domain(format!("gamma_tilde_n needs n >= 2, got {n}"));
    }
    if n == 2 {
        // p~ = 0: 6 t_2 = gamma
        return Ok(4.0 / 3.0);
    }
    let nf = n as f64;
    let w = (3.0 * nf + 2.0) / (nf * nf * nf);
    let minus_ln_p = -(-w).ln_1p();
    // q~ = -1 - delta with delta = 2/(3n) + (n^2/3)(-w - ln(1-w))
    let delta = 2.0 / (3.0 * nf) + nf * nf / 3.0 * x_minus_ln1p(-w);
    let u = x_minus_ln1p(delta);
    let y = lambert_w_shifted(Branch::Principal, u)?;
    Ok((delta - y) / minus_ln_p)
}

/// Exponent at which `a_{n-1}(gamma) = s_n(gamma)`.
pub fn gamma_n_star(n: u64) -> Result<f64> {
    if n < 3 {
        return domain(format!("gamma_n_star needs n >= 3, got {n}"));
    }
    let nf = n as f64;
    let num = (-2.0 / (nf * (nf - 1.0))).ln_1p();
    let den = (-(3.0 * nf + 2.0) / (nf * nf * nf)).ln_1p();
    Ok(num / den)
}

/// `a_n = 2(n+1) t_n^gamma / (n-1)`: the level of `-a` at which
/// `g(e_1) = g(e_n)`. Zero for `n <= 1`.
pub fn tie_level(n: u64, gamma: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let nf = n as f64;
    2.0 * (nf + 1.0) / (nf - 1.0) * (gamma * ln_t_k(n)).exp()
}
