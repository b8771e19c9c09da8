//! The reduced one-dimensional variational problem.
//!
//! For `beta2 -> -inf` the objective is `g(e) = a e + r(e)^gamma` along the
//! lower boundary, to be minimized; for `beta2 -> +inf` it is
//! `a e + e^(s gamma / 2)` along the Kruskal–Katona curve, to be maximized.

use serde::{Deserialize, Serialize};

use crate::curves::{e_k, inflection_point, kruskal_katona, ln_t_k, lower_boundary, segment_of};
use crate::error::{domain, Error, Result};
use crate::par::{self, Exec};

/// Relative gap below which two optimal values count as tied.
pub const TIE_REL: f64 = 1e-9;
/// Grid step of the brute-force oracle.
pub const GRID_STEP: f64 = 1e-4;
/// Golden-section stopping width.
pub const GOLDEN_TOL: f64 = 1e-10;
/// Turán points `e_1..e_K` injected into the oracle's candidate set.
const EXPLICIT_TURAN_POINTS: u64 = 200;
/// Locations closer than this are reported once.
const DEDUPE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Beta2Limit {
    /// `beta2 -> -inf`: minimize along the lower boundary.
    NegativeBeta2,
    /// `beta2 -> +inf`: maximize along the Kruskal–Katona curve.
    PositiveBeta2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub a: f64,
    pub gamma: f64,
    /// Clique size; the lower boundary is only known for `s = 3`.
    pub s: u32,
    pub direction: Beta2Limit,
}

impl Objective {
    pub fn negative(a: f64, gamma: f64) -> Self {
        Objective { a, gamma, s: 3, direction: Beta2Limit::NegativeBeta2 }
    }

    pub fn positive(a: f64, gamma: f64, s: u32) -> Self {
        Objective { a, gamma, s, direction: Beta2Limit::PositiveBeta2 }
    }

    /// `+1` when the objective is minimized, `-1` when maximized.
    fn sign(&self) -> f64 {
        match self.direction {
            Beta2Limit::NegativeBeta2 => 1.0,
            Beta2Limit::PositiveBeta2 => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinimizerKind {
    /// Left endpoint `e_{k-1}` of the reported segment.
    LeftEnd,
    /// Right endpoint `e_k` of the reported segment. Turán points are always
    /// reported this way since shared endpoints belong to the lower segment.
    RightEnd,
    Interior,
    Zero,
    One,
}

/// An optimizer of the reduced objective, with any tied optimizers chained
/// through `tied_with` in increasing order of `e_star`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub e_star: f64,
    pub segment: Option<u64>,
    pub kind: MinimizerKind,
    pub objective_value: f64,
    pub tied_with: Option<Box<Minimizer>>,
}

impl Minimizer {
    /// Describes the point `e` of `obj`, snapping the kind to the landmark it
    /// sits on.
    pub fn at(obj: &Objective, e: f64) -> Result<Self> {
        let value = objective_value(obj, e)?;
        let (kind, segment) = if e == 0.0 {
            (MinimizerKind::Zero, None)
        } else if e == 1.0 {
            (MinimizerKind::One, None)
        } else if obj.direction == Beta2Limit::PositiveBeta2 {
            (MinimizerKind::Interior, None)
        } else {
            let k = segment_of(e)?.expect("e < 1 has a segment");
            let kind = if (e - e_k(k)).abs() <= 1e-12 { MinimizerKind::RightEnd } else { MinimizerKind::Interior };
            (kind, Some(k))
        };
        Ok(Minimizer { e_star: e, segment, kind, objective_value: value, tied_with: None })
    }

    /// All tied locations, in chain order.
    pub fn locations(&self) -> Vec<f64> {
        let mut out = vec![self.e_star];
        let mut cur = &self.tied_with;
        while let Some(m) = cur {
            out.push(m.e_star);
            cur = &m.tied_with;
        }
        out
    }

    /// Chains `items` (nonempty, sorted by `e_star`) through `tied_with`.
    pub fn chain(items: Vec<Minimizer>) -> Minimizer {
        let mut iter = items.into_iter().rev();
        let mut head = iter.next().expect("chain of at least one minimizer");
        for mut m in iter {
            m.tied_with = Some(Box::new(head));
            head = m;
        }
        head
    }
}

pub fn objective_value(obj: &Objective, e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return domain(format!("edge density {e} outside [0, 1]"));
    }
    let boundary = match obj.direction {
        Beta2Limit::NegativeBeta2 => lower_boundary(e, obj.gamma)?,
        Beta2Limit::PositiveBeta2 => kruskal_katona(e, obj.s, obj.gamma),
    };
    Ok(obj.a * e + boundary)
}

/// `t_k^(gamma - 1)` with `0^0 = 1` and `0^(negative) = inf`.
fn t_k_pow_minus_one(k: u64, gamma: f64) -> f64 {
    if k <= 1 {
        0.0f64.powf(gamma - 1.0)
    } else {
        ((gamma - 1.0) * ln_t_k(k)).exp()
    }
}

/// Right derivative of `g` at `e_k`: `a + 3k gamma/(k+1) t_k^(gamma-1)`.
pub fn right_derivative(a: f64, gamma: f64, k: u64) -> f64 {
    let kf = k as f64;
    let coef = 3.0 * kf * gamma / (kf + 1.0);
    if coef == 0.0 {
        return a;
    }
    a + coef * t_k_pow_minus_one(k, gamma)
}

/// Left derivative of `g` at `e_k`: `a + 3(k-1) gamma/(k+1) t_k^(gamma-1)`.
pub fn left_derivative(a: f64, gamma: f64, k: u64) -> Result<f64> {
    if k < 2 {
        return domain(format!("left derivative needs k >= 2, got {k}"));
    }
    let kf = k as f64;
    Ok(a + 3.0 * (kf - 1.0) * gamma / (kf + 1.0) * t_k_pow_minus_one(k, gamma))
}

/// Coefficients of the stationarity condition on segment `k` in the variable
/// `x = k + sqrt(k(k - e(k+1)))`: `x^(2 gamma - 1) (3k - 2x)^(gamma - 1) = c`.
struct Stationarity {
    k: f64,
    gamma: f64,
    ln_c: f64,
}

impl Stationarity {
    fn new(k: u64, a: f64, gamma: f64) -> Result<Self> {
        if k < 2 {
            return domain(format!("interior root needs k >= 2, got {k}"));
        }
        if !(gamma > 1.0) {
            return domain(format!("interior root needs gamma > 1, got {gamma}"));
        }
        if !(a < 0.0) {
            return Err(Error::NoInteriorRoot { k });
        }
        let kf = k as f64;
        let ln_c = (-a).ln() + (kf * (kf + 1.0) / (3.0 * gamma * (kf - 1.0))).ln()
            + (gamma - 1.0) * (2.0 * kf.ln() + 2.0 * (kf + 1.0).ln() - (kf - 1.0).ln());
        Ok(Stationarity { k: kf, gamma, ln_c })
    }

    /// `ln(x^(2g-1)(3k-2x)^(g-1)) - ln c`; same sign as `g'(e(x))`.
    fn residual(&self, x: f64) -> f64 {
        (2.0 * self.gamma - 1.0) * x.ln() + (self.gamma - 1.0) * (3.0 * self.k - 2.0 * x).ln() - self.ln_c
    }

    /// One step of `x -> 3k/2 - c^(1/m)/2 * x^((1-2 gamma)/(gamma-1))`.
    fn step(&self, x: f64) -> f64 {
        let m = self.gamma - 1.0;
        1.5 * self.k - 0.5 * ((self.ln_c + (1.0 - 2.0 * self.gamma) * x.ln()) / m).exp()
    }

    fn e_of_x(&self, x: f64) -> f64 {
        let k = self.k;
        let w = x - k;
        (k * k - w * w) / (k * (k + 1.0))
    }
}

/// Iterates `x_1 = k+1, x_2, ...` of the nested radical for the interior
/// root on segment `k`, stopping after `max_iter` terms, once a step falls
/// below `1e-13`, or as soon as an iterate leaves `(k, k+1]`.
pub fn nested_radical_iterates(k: u64, a: f64, gamma: f64, max_iter: usize) -> Result<Vec<f64>> {
    let st = Stationarity::new(k, a, gamma)?;
    let mut xs = vec![st.k + 1.0];
    for _ in 1..max_iter {
        let x = *xs.last().expect("nonempty");
        let next = st.step(x);
        if !next.is_finite() || next <= st.k || next > st.k + 1.0 {
            break;
        }
        xs.push(next);
        if (next - x).abs() < 1e-13 {
            break;
        }
    }
    Ok(xs)
}

/// Interior stationary point `e*` of `g` on segment `k >= 2` for `gamma > 1`:
/// the first zero of `g'` to the right of `e_{k-1}`, which is the local
/// minimum on the convex part of the segment.
pub fn interior_root(k: u64, a: f64, gamma: f64) -> Result<f64> {
    const MAX_ITER: usize = 100_000;
    let st = Stationarity::new(k, a, gamma)?;
    let hi = st.k + 1.0;
    if !(st.residual(hi) < 0.0) {
        // g is not decreasing at e_{k-1}
        return Err(Error::NoInteriorRoot { k });
    }
    let mut x = hi;
    for _ in 0..MAX_ITER {
        let next = st.step(x);
        if !next.is_finite() || next <= st.k || next > x {
            break;
        }
        if (x - next).abs() < 1e-13 {
            return Ok(st.e_of_x(next));
        }
        x = next;
    }
    // bisection on the convex part, between the inflection point and e_{k-1}
    let lo = match inflection_point(k, gamma)? {
        // x = k(1 + z) with z = 1/(2(3 gamma - 2)) at the inflection point
        Some(_) => st.k * (1.0 + 0.5 / (3.0 * gamma - 2.0)),
        None => st.k,
    };
    let lo = lo.max(st.k * (1.0 + 1e-15));
    if !(st.residual(lo) > 0.0) {
        return Err(Error::NoInteriorRoot { k });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if st.residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(st.e_of_x(0.5 * (lo + hi)))
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Brute-force optimizer of `obj` over `[0, 1]` with the default execution mode.
pub fn grid_minimize(obj: &Objective) -> Minimizer {
    grid_minimize_with(obj, Exec::default())
}

/// Scan on a `1e-4` grid plus every Turán point `e_1..e_200`, refine each
/// local optimum by golden section inside its neighbour bracket, and report
/// all optima within a relative `1e-9` of the best.
pub fn grid_minimize_with(obj: &Objective, exec: Exec) -> Minimizer {
    let sign = obj.sign();
    let f = |e: f64| sign * objective_value(obj, e).expect("candidate inside [0, 1]");

    let steps = (1.0 / GRID_STEP).round() as usize;
    let mut xs: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    if obj.direction == Beta2Limit::NegativeBeta2 {
        xs.extend((1..=EXPLICIT_TURAN_POINTS).map(e_k));
        xs.sort_by(|p, q| p.total_cmp(q));
        xs.dedup();
    }
    let fs = par::map_slice(exec, &xs, |&e| f(e));

    let n = xs.len();
    let local: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || fs[i] < fs[i - 1]) && (i + 1 == n || fs[i] <= fs[i + 1]))
        .collect();
    let refined = par::map_slice(exec, &local, |&i| {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(n - 1)];
        let (x, fx) = golden_section(f, lo, hi, GOLDEN_TOL);
        if fs[i] <= fx { (xs[i], fs[i]) } else { (x, fx) }
    });

    let best = refined.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let tol = TIE_REL * best.abs().max(f64::MIN_POSITIVE);
    let mut winners: Vec<f64> = refined.iter().filter(|r| r.1 - best <= tol).map(|r| r.0).collect();
    winners.sort_by(|p, q| p.total_cmp(q));
    winners.dedup_by(|p, q| (*p - *q).abs() < DEDUPE);

    let items = winners.into_iter().map(|e| Minimizer::at(obj, e).expect("winner inside [0, 1]")).collect();
    Minimizer::chain(items)
}

/// Closed-form maximizer of `a e + e^(s gamma/2)` on `[0, 1]`.
pub fn positive_limit_argmax(s: u32, gamma: f64, a: f64) -> Result<Minimizer> {
    if s < 2 {
        return domain(format!("clique size s = {s} must be >= 2"));
    }
    let obj = Objective::positive(a, gamma, s);
    let sg = s as f64 * gamma;
    if sg >= 2.0 {
        // convex: compare g(0) = 0 with g(1) = a + 1
        if (a + 1.0).abs() <= 1e-12 {
            return Ok(Minimizer::chain(vec![Minimizer::at(&obj, 0.0)?, Minimizer::at(&obj, 1.0)?]));
        }
        return Minimizer::at(&obj, if a > -1.0 { 1.0 } else { 0.0 });
    }
    if a >= -sg / 2.0 {
        return Minimizer::at(&obj, 1.0);
    }
    Minimizer::at(&obj, box_edge_density(s, gamma, a))
}

/// Side `(-2a/(s gamma))^(1/(s gamma - 2))` of the box maximizer.
pub fn box_side(s: u32, gamma: f64, a: f64) -> f64 {
    let sg = s as f64 * gamma;
    (-2.0 * a / sg).powf(1.0 / (sg - 2.0))
}

/// Edge density of the box maximizer, the square of its side.
pub fn box_edge_density(s: u32, gamma: f64, a: f64) -> f64 {
    box_side(s, gamma, a).powi(2)
}
