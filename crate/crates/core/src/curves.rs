//! Boundary curves of the realizable edge/clique density region.
//!
//! Segment `k >= 1` of the lower boundary lives on `I_k = [e_{k-1}, e_k]` with
//! `e_k = k/(k+1)`. It is evaluated through `z = sqrt(k(k - e(k+1)))/k`, which
//! runs from `1/k` at the left endpoint to `0` at the right one:
//!
//! ```text
//! r_k(e) = (k-1) k (1 - 2z)(1 + z)^2 / (k+1)^2
//! ```

use num_rational::Ratio;

use crate::error::{domain, Result};

/// Slack allowed when checking that `e` lies in a closed segment.
const SEGMENT_SLACK: f64 = 1e-12;

/// The point `v_k = (e_k, t_k)` realized by the Turán graphon on `k+1` classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TuranPoint {
    pub k: u64,
}

impl TuranPoint {
    pub fn new(k: u64) -> Self {
        TuranPoint { k }
    }

    pub fn e(&self) -> Ratio<i64> {
        Ratio::new(self.k as i64, self.k as i64 + 1)
    }

    pub fn t(&self) -> Ratio<i64> {
        let k = self.k as i64;
        if k == 0 {
            return Ratio::from_integer(0);
        }
        Ratio::new(k * (k - 1), (k + 1) * (k + 1))
    }
}

/// `e_k = k/(k+1)`.
pub fn e_k(k: u64) -> f64 {
    let k = k as f64;
    k / (k + 1.0)
}

/// `t_k = k(k-1)/(k+1)^2`.
pub fn t_k(k: u64) -> f64 {
    let k = k as f64;
    k * (k - 1.0) / ((k + 1.0) * (k + 1.0))
}

/// `ln t_k` without forming `t_k` first; `-inf` for `k <= 1`.
pub fn ln_t_k(k: u64) -> f64 {
    if k <= 1 {
        return f64::NEG_INFINITY;
    }
    let kf = k as f64;
    // t_k = 1 - (3k+1)/(k+1)^2
    (-(3.0 * kf + 1.0) / ((kf + 1.0) * (kf + 1.0))).ln_1p()
}

/// `t_k^gamma`, accurate for large `k` where `t_k` is close to 1.
pub fn t_k_pow(k: u64, gamma: f64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    (gamma * ln_t_k(k)).exp()
}

/// Closed domain `[e_{k-1}, e_k]` of segment `k`.
pub fn segment_domain(k: u64) -> (f64, f64) {
    (e_k(k.saturating_sub(1)), e_k(k))
}

/// The substitution variable `z` for segment `k` at `e`, clamped to `>= 0`.
pub fn segment_z(k: u64, e: f64) -> f64 {
    let kf = k as f64;
    let d = 1.0 - e;
    // z^2 = (d(k+1) - 1)/k; exact cancellation at e = e_k
    (d.mul_add(kf + 1.0, -1.0) / kf).max(0.0).sqrt()
}

fn check_segment(k: u64, e: f64) -> Result<()> {
    if k == 0 {
        return domain("segment index must be >= 1");
    }
    let (lo, hi) = segment_domain(k);
    if !(e >= lo - SEGMENT_SLACK && e <= hi + SEGMENT_SLACK) {
        return domain(format!("e = {e} outside I_{k} = [{lo}, {hi}]"));
    }
    Ok(())
}

fn razborov_unchecked(k: u64, e: f64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let kf = k as f64;
    let z = segment_z(k, e);
    let r = (kf - 1.0) * kf * (1.0 - 2.0 * z) * (1.0 + z) * (1.0 + z) / ((kf + 1.0) * (kf + 1.0));
    r.max(0.0)
}

/// Razborov segment `r_k(e)` on `I_k`.
pub fn razborov(k: u64, e: f64) -> Result<f64> {
    check_segment(k, e)?;
    Ok(razborov_unchecked(k, e))
}

/// `d r_k / d e = 3(k-1)(1+z)/(k+1)` on the interior of `I_k`.
pub fn razborov_slope(k: u64, e: f64) -> Result<f64> {
    check_segment(k, e)?;
    let kf = k as f64;
    Ok(3.0 * (kf - 1.0) * (1.0 + segment_z(k, e)) / (kf + 1.0))
}

/// Index of the segment containing `e`; shared endpoints belong to the lower
/// segment. Returns `None` at `e = 1`, which no finite segment contains.
pub fn segment_of(e: f64) -> Result<Option<u64>> {
    if !(0.0..=1.0).contains(&e) {
        return domain(format!("edge density {e} outside [0, 1]"));
    }
    if e == 1.0 {
        return Ok(None);
    }
    let raw = (e / (1.0 - e)).ceil();
    let mut k = if raw >= u64::MAX as f64 { u64::MAX - 1 } else { (raw as u64).max(1) };
    if k >= 2 && e <= e_k(k - 1) {
        k -= 1;
    } else if e > e_k(k) {
        k += 1;
    }
    Ok(Some(k))
}

/// Lower boundary `r(e)^gamma` of the edge-triangle region.
pub fn lower_boundary(e: f64, gamma: f64) -> Result<f64> {
    match segment_of(e)? {
        None => Ok(1.0),
        Some(1) => Ok(0.0),
        Some(k) => Ok(razborov_unchecked(k, e).powf(gamma)),
    }
}

/// Goodman curve `l(e) = max(0, e(2e-1))^gamma`.
pub fn goodman(e: f64, gamma: f64) -> f64 {
    (e * (2.0 * e - 1.0)).max(0.0).powf(gamma)
}

/// Derivative of the Goodman curve, `gamma (2e^2 - e)^(gamma-1) (4e - 1)`, for `e > 1/2`.
pub fn goodman_slope(e: f64, gamma: f64) -> f64 {
    gamma * (e * (2.0 * e - 1.0)).powf(gamma - 1.0) * (4.0 * e - 1.0)
}

/// Inflection point `x_2 = (1 + 1/sqrt(2 gamma - 1))/4` of the Goodman curve,
/// defined for `gamma > 1/2`.
pub fn goodman_inflection(gamma: f64) -> Option<f64> {
    (gamma > 0.5).then(|| 0.25 * (1.0 + 1.0 / (2.0 * gamma - 1.0).sqrt()))
}

/// Kruskal–Katona upper boundary `e^(s gamma / 2)` for `K_s`.
pub fn kruskal_katona(e: f64, s: u32, gamma: f64) -> f64 {
    e.powf(s as f64 * gamma / 2.0)
}

/// Asymptotic lower bound on the `K_s` density for `e` in `[(t-1)/t, t/(t+1)]`.
///
/// Written in `z = sqrt(t(t - e(t+1)))/t` this is
/// `(t-1)!/(t-s+1)! * t (1 - (s-1) z)(1 + z)^(s-1) / (t+1)^(s-1)`.
pub fn clique_lower_bound(s: u32, t: u64, e: f64) -> Result<f64> {
    if s < 2 {
        return domain(format!("clique size s = {s} must be >= 2"));
    }
    if t + 1 < s as u64 {
        return domain(format!("segment t = {t} must be >= s - 1 = {}", s - 1));
    }
    check_segment(t, e)?;
    if s > 2 && e < 1.0 - 1.0 / (s as f64 - 1.0) - SEGMENT_SLACK {
        return domain(format!("e = {e} below 1 - 1/(s-1) for s = {s}"));
    }
    let tf = t as f64;
    let z = segment_z(t, e);
    let falling: f64 = (t + 2 - s as u64..t).map(|j| j as f64).product();
    let sm1 = s as i32 - 1;
    let v = falling * tf * (1.0 - (s as f64 - 1.0) * z) * (1.0 + z).powi(sm1) / (tf + 1.0).powi(sm1);
    Ok(v.max(0.0))
}

/// Inflection point `i_k` of `r_k^gamma`, present only for `gamma > (4+k)/6`.
pub fn inflection_point(k: u64, gamma: f64) -> Result<Option<f64>> {
    if k < 2 {
        return domain(format!("inflection point needs k >= 2, got {k}"));
    }
    if !(gamma > 0.0) {
        return domain(format!("gamma = {gamma} must be > 0"));
    }
    if gamma <= (4.0 + k as f64) / 6.0 {
        return Ok(None);
    }
    let z = 1.0 / (2.0 * (3.0 * gamma - 2.0));
    Ok(Some(e_k(k) * (1.0 - z * z)))
}
