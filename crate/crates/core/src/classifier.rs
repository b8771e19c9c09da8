//! Case analysis naming the limiting graphon set `U` for a parameter point.
//!
//! The negative-`beta2` analysis splits on `gamma`:
//!
//! | regime                      | shape of `g`                 | candidates                      |
//! |-----------------------------|------------------------------|---------------------------------|
//! | `gamma <= 5/9`              | concave segments, `s_k` down | `e_1`, `1`                      |
//! | `5/9 < gamma <= log`        | concave, `s_k` valley        | `e_1`, `e_{n-1}`, `e_n`, `1`    |
//! | `log < gamma <= 1`          | concave, `s_k` up            | one Turán point or `1`          |
//! | `gamma > 1`                 | convex-then-concave segments | Turán points and interior roots |
//!
//! where `log = log_{27/16}(3/2)`. Every answer is cross-checked against the
//! brute-force oracle in [`crate::variational::grid_minimize`].

use serde::{Deserialize, Serialize};

use crate::criticals::{
    first_slope_at_least, gamma_increasing, gamma_n, gamma_star, gamma_tilde_n, slope, slope_valley, tie_level,
    GAMMA_DECREASING,
};
use crate::curves::{goodman_inflection, goodman_slope, razborov, t_k_pow};
use crate::error::{Error, Result, Unclassified};
use crate::mcmc::sigmoid;
use crate::par::{self, Exec};
use crate::variational::{box_side, grid_minimize, interior_root, Minimizer, Objective};

/// Relative tolerance for landing exactly on a critical value of `-a`.
pub const CRITICAL_REL: f64 = 1e-12;
/// Absolute tolerance for `b = 0`.
pub const B_ZERO: f64 = 1e-12;
/// Agreement required between the classifier and the oracle.
pub const CERTIFY_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    NegativeBeta2,
    PositiveBeta2,
    HorizontalPlus,
    HorizontalMinus,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub direction: Direction,
    pub beta1: Option<f64>,
    pub chromatic_r: Option<u32>,
    pub clique_s: u32,
}

impl ParamPoint {
    pub fn negative(gamma: f64, a: f64, b: f64) -> Self {
        ParamPoint { gamma, a, b, direction: Direction::NegativeBeta2, beta1: None, chromatic_r: None, clique_s: 3 }
    }

    pub fn positive(gamma: f64, a: f64, b: f64) -> Self {
        ParamPoint { direction: Direction::PositiveBeta2, ..ParamPoint::negative(gamma, a, b) }
    }

    pub fn horizontal(plus: bool) -> Self {
        let direction = if plus { Direction::HorizontalPlus } else { Direction::HorizontalMinus };
        ParamPoint { direction, ..ParamPoint::negative(1.0, 0.0, 0.0) }
    }

    pub fn vertical(beta1: f64, chromatic_r: u32) -> Self {
        ParamPoint {
            direction: Direction::Vertical,
            beta1: Some(beta1),
            chromatic_r: Some(chromatic_r),
            ..ParamPoint::negative(1.0, 0.0, 0.0)
        }
    }
}

/// One member of a limiting set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum GraphonDescriptor {
    Empty,
    Complete,
    /// `scale` times the Turán graphon on `k` classes.
    Turan { k: u64, scale: f64 },
    /// Indicator of `[0, side]^2`.
    Box { side: f64 },
    /// Any graphon with these densities on the lower boundary of segment `segment`.
    Interior { segment: u64, e_star: f64, t_star: f64 },
}

impl GraphonDescriptor {
    pub fn turan(k: u64) -> Self {
        GraphonDescriptor::Turan { k, scale: 1.0 }
    }

    pub fn edge_density(&self) -> f64 {
        match *self {
            GraphonDescriptor::Empty => 0.0,
            GraphonDescriptor::Complete => 1.0,
            GraphonDescriptor::Turan { k, scale } => scale * (k as f64 - 1.0) / k as f64,
            GraphonDescriptor::Box { side } => side * side,
            GraphonDescriptor::Interior { e_star, .. } => e_star,
        }
    }

    pub fn triangle_density(&self) -> f64 {
        match *self {
            GraphonDescriptor::Empty => 0.0,
            GraphonDescriptor::Complete => 1.0,
            GraphonDescriptor::Turan { k, scale } => {
                let kf = k as f64;
                scale.powi(3) * (kf - 1.0) * (kf - 2.0) / (kf * kf)
            }
            GraphonDescriptor::Box { side } => side.powi(3),
            GraphonDescriptor::Interior { t_star, .. } => t_star,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GraphonDescriptor::Empty => "empty",
            GraphonDescriptor::Complete => "complete",
            GraphonDescriptor::Turan { .. } => "turan",
            GraphonDescriptor::Box { .. } => "box",
            GraphonDescriptor::Interior { .. } => "interior",
        }
    }
}

/// Nonempty set of limiting graphons, ordered by edge density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSet {
    pub members: Vec<GraphonDescriptor>,
}

impl LimitSet {
    pub fn new(mut members: Vec<GraphonDescriptor>) -> Self {
        assert!(!members.is_empty(), "limit set must be nonempty");
        members.sort_by(|p, q| p.edge_density().total_cmp(&q.edge_density()));
        LimitSet { members }
    }

    pub fn single(m: GraphonDescriptor) -> Self {
        LimitSet { members: vec![m] }
    }

    pub fn is_tie(&self) -> bool {
        self.members.len() > 1
    }

    pub fn edge_densities(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.edge_density()).collect()
    }

    /// `tie` for mixtures, otherwise the single member's kind.
    pub fn kind(&self) -> &'static str {
        if self.is_tie() {
            "tie"
        } else {
            self.members[0].kind()
        }
    }
}

/// Which branch of the case analysis produced an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Horizontal,
    Vertical,
    /// `beta2 -> +inf`, `s gamma >= 2`: convex objective, endpoints only.
    PositiveConvex,
    /// `beta2 -> +inf`, `s gamma < 2`: complete or box.
    PositiveConcave,
    /// `beta2 -> -inf` with `a >= 0`.
    NonNegativeA,
    /// `gamma <= 5/9`.
    SlopesDecreasing,
    /// `5/9 < gamma < gamma*`.
    ValleyBelowStar,
    /// `gamma = gamma*`.
    ValleyAtStar,
    /// `gamma* < gamma <= log_{27/16}(3/2)`.
    ValleyAboveStar,
    /// `log_{27/16}(3/2) < gamma <= 1`.
    SlopesIncreasing,
    /// `gamma > 1`, `0 < -a < s_2`.
    ConvexShallow,
    /// `gamma > 1`, `-a >= 3 gamma`.
    ConvexSteep,
    /// `gamma > 1`, `-a = s_n`.
    ConvexOnCritical,
    /// `gamma > 1`, `s_n < -a < s_{n+1}`.
    ConvexBetween,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub set: LimitSet,
    pub regime: Regime,
    /// Brute-force optimizer of the reduced objective, when one exists.
    pub oracle: Option<Minimizer>,
    /// True when the oracle's optimizer set matches `set` within `1e-4`.
    pub certified: bool,
}

fn near(x: f64, target: f64) -> bool {
    // relative: slopes at large gamma are far below 1
    (x - target).abs() <= CRITICAL_REL * target.abs().max(f64::MIN_POSITIVE)
}

/// Picks from candidates ordered by edge density: `b < 0` favours the
/// sparsest, `b > 0` the densest, `b = 0` keeps all.
fn resolve_by_b(candidates: Vec<GraphonDescriptor>, b: f64) -> LimitSet {
    if b.abs() <= B_ZERO {
        return LimitSet::new(candidates);
    }
    let set = LimitSet::new(candidates);
    let pick = if b < 0.0 { set.members[0] } else { *set.members.last().expect("nonempty") };
    LimitSet::single(pick)
}

/// `a` against `-2`: `g(e_1) = a/2` versus `g(1) = a + 1`.
fn bipartite_or_complete(a: f64, b: f64) -> LimitSet {
    if near(a, -2.0) {
        resolve_by_b(vec![GraphonDescriptor::turan(2), GraphonDescriptor::Complete], b)
    } else if a > -2.0 {
        LimitSet::single(GraphonDescriptor::turan(2))
    } else {
        LimitSet::single(GraphonDescriptor::Complete)
    }
}

/// `(n, on)` with `s_n = A` when `on`, otherwise `s_{n-1} < A < s_n`.
/// Requires `s` nondecreasing from `from` and `A < 3 gamma`.
fn locate(gamma: f64, big_a: f64, from: u64) -> (u64, bool) {
    let n = first_slope_at_least(gamma, big_a, from);
    if n > from && near(big_a, slope(n - 1, gamma)) {
        (n - 1, true)
    } else {
        (n, near(big_a, slope(n, gamma)))
    }
}

fn interior(k: u64, a: f64, gamma: f64) -> Result<GraphonDescriptor> {
    let e_star = interior_root(k, a, gamma)?;
    let t_star = razborov(k, e_star)?;
    Ok(GraphonDescriptor::Interior { segment: k, e_star, t_star })
}

fn unclassified(gamma: f64, a: f64, segment: Option<u64>, reason: String) -> Error {
    let oracle = grid_minimize(&Objective::negative(a, gamma));
    Error::Unclassified(Box::new(Unclassified { reason, segment, oracle }))
}

/// Valley regimes: `e_1` against the Turán point just before `s_k` climbs
/// back above `-a`.
fn valley_scan(gamma: f64, big_a: f64, b: f64) -> LimitSet {
    let k2 = GraphonDescriptor::turan(2);
    let Some(v) = slope_valley(gamma) else {
        return LimitSet::single(k2);
    };
    if big_a <= slope(v, gamma) {
        // every s_k >= -a, so g(e_k) never decreases
        return LimitSet::single(k2);
    }
    let n = first_slope_at_least(gamma, big_a, v);
    let (kn, kn1) = (GraphonDescriptor::turan(n), GraphonDescriptor::turan(n + 1));
    let s_n = slope(n, gamma);
    let a_prev = tie_level(n - 1, gamma);
    let on_slope = near(big_a, s_n);
    let on_tie = near(big_a, a_prev);
    match (on_slope, on_tie) {
        (true, true) => resolve_by_b(vec![k2, kn, kn1], b),
        (true, false) if big_a > a_prev => resolve_by_b(vec![kn, kn1], b),
        (true, false) => LimitSet::single(k2),
        (false, true) => resolve_by_b(vec![k2, kn], b),
        (false, false) if big_a < a_prev => LimitSet::single(k2),
        (false, false) => LimitSet::single(kn),
    }
}

fn classify_valley(gamma: f64, a: f64, b: f64) -> (LimitSet, Regime) {
    let big_a = -a;
    let g_star = gamma_star();
    let regime = if near(gamma, g_star) {
        Regime::ValleyAtStar
    } else if gamma < g_star {
        Regime::ValleyBelowStar
    } else {
        Regime::ValleyAboveStar
    };
    let x2 = goodman_inflection(gamma).expect("gamma > 5/9 > 1/2");
    if big_a <= goodman_slope(x2, gamma) {
        return (LimitSet::single(GraphonDescriptor::turan(2)), regime);
    }
    let three_gamma = 3.0 * gamma;
    let set = match regime {
        Regime::ValleyBelowStar => {
            let s2 = slope(2, gamma);
            if big_a >= s2 || near(big_a, s2) {
                LimitSet::single(GraphonDescriptor::Complete)
            } else if big_a >= three_gamma {
                bipartite_or_complete(a, b)
            } else {
                valley_scan(gamma, big_a, b)
            }
        }
        _ => {
            if big_a >= three_gamma || near(big_a, three_gamma) {
                LimitSet::single(GraphonDescriptor::Complete)
            } else {
                valley_scan(gamma, big_a, b)
            }
        }
    };
    (set, regime)
}

fn classify_increasing(gamma: f64, a: f64, b: f64) -> LimitSet {
    let big_a = -a;
    if big_a >= 3.0 * gamma || near(big_a, 3.0 * gamma) {
        return LimitSet::single(GraphonDescriptor::Complete);
    }
    let (n, on) = locate(gamma, big_a, 1);
    if on {
        resolve_by_b(vec![GraphonDescriptor::turan(n), GraphonDescriptor::turan(n + 1)], b)
    } else {
        // g falls until e_{n-1}, then rises
        LimitSet::single(GraphonDescriptor::turan(n))
    }
}

fn classify_convex(gamma: f64, a: f64, b: f64) -> Result<(LimitSet, Regime)> {
    let big_a = -a;
    let s2 = slope(2, gamma);
    let wrap = |r: Result<GraphonDescriptor>, seg: u64| -> Result<LimitSet> {
        r.map(LimitSet::single).map_err(|e| unclassified(gamma, a, Some(seg), format!("interior root failed: {e}")))
    };
    if big_a < s2 && !near(big_a, s2) {
        // r^gamma leaves e_1 with zero slope, so g keeps falling past e_1
        // for any a < 0; the minimum sits inside the second segment
        return Ok((wrap(interior(2, a, gamma), 2)?, Regime::ConvexShallow));
    }
    if big_a >= 3.0 * gamma || near(big_a, 3.0 * gamma) {
        return Ok((LimitSet::single(GraphonDescriptor::Complete), Regime::ConvexSteep));
    }
    let (n, on) = locate(gamma, big_a, 2);
    if on {
        let set = if n == 2 || gamma > gamma_n(n)? {
            wrap(interior(n, a, gamma), n)?
        } else {
            resolve_by_b(vec![GraphonDescriptor::turan(n), GraphonDescriptor::turan(n + 1)], b)
        };
        return Ok((set, Regime::ConvexOnCritical));
    }
    // s_m < -a < s_{m+1}
    let m = n - 1;
    let mf = m as f64;
    let unit = gamma / (mf + 1.0) * t_k_pow(m, gamma - 1.0);
    let left = 3.0 * (mf - 1.0) * unit;
    let mid = (3.0 * mf - 1.0) * unit;
    let right = 3.0 * mf * unit;
    let set = if m >= 2 && gamma > gamma_tilde_n(m)? && big_a < left {
        wrap(interior(m, a, gamma), m)?
    } else if gamma <= (mf + 4.0) / 6.0 || (mid <= big_a && big_a <= right) {
        LimitSet::single(GraphonDescriptor::turan(m + 1))
    } else if big_a > right && gamma > gamma_n(m + 1)? {
        wrap(interior(m + 1, a, gamma), m + 1)?
    } else {
        return Err(unclassified(
            gamma,
            a,
            Some(m),
            format!("-a = {big_a} in the band [{left}, {mid}) between segments {m} and {}", m + 1),
        ));
    };
    Ok((set, Regime::ConvexBetween))
}

fn classify_negative(gamma: f64, a: f64, b: f64) -> Result<(LimitSet, Regime)> {
    if a >= 0.0 {
        return Ok((LimitSet::single(GraphonDescriptor::Empty), Regime::NonNegativeA));
    }
    if gamma <= GAMMA_DECREASING {
        Ok((bipartite_or_complete(a, b), Regime::SlopesDecreasing))
    } else if gamma <= gamma_increasing() {
        Ok(classify_valley(gamma, a, b))
    } else if gamma <= 1.0 {
        Ok((classify_increasing(gamma, a, b), Regime::SlopesIncreasing))
    } else {
        classify_convex(gamma, a, b)
    }
}

/// Limiting set for `beta2 -> +inf` with clique `K_s`, maximizing
/// `a e + e^(s gamma/2)`.
pub fn classify_clique_positive(s: u32, gamma: f64, a: f64, b: f64) -> Result<LimitSet> {
    if s < 3 {
        return Err(Error::Config(format!("clique size s = {s} must be >= 3")));
    }
    Ok(clique_positive(s, gamma, a, b).0)
}

fn clique_positive(s: u32, gamma: f64, a: f64, b: f64) -> (LimitSet, Regime) {
    let sg = s as f64 * gamma;
    if sg >= 2.0 {
        let set = if near(a, -1.0) {
            resolve_by_b(vec![GraphonDescriptor::Empty, GraphonDescriptor::Complete], b)
        } else if a > -1.0 {
            LimitSet::single(GraphonDescriptor::Complete)
        } else {
            LimitSet::single(GraphonDescriptor::Empty)
        };
        return (set, Regime::PositiveConvex);
    }
    let set = if a >= -sg / 2.0 {
        LimitSet::single(GraphonDescriptor::Complete)
    } else {
        LimitSet::single(GraphonDescriptor::Box { side: box_side(s, gamma, a) })
    };
    (set, Regime::PositiveConcave)
}

/// True when every location in `a` is within `tol` of one in `b` and vice versa.
pub fn same_locations(a: &[f64], b: &[f64], tol: f64) -> bool {
    let covered = |xs: &[f64], ys: &[f64]| xs.iter().all(|x| ys.iter().any(|y| (x - y).abs() <= tol));
    covered(a, b) && covered(b, a)
}

fn validate(p: &ParamPoint) -> Result<()> {
    match p.direction {
        Direction::NegativeBeta2 | Direction::PositiveBeta2 => {
            if !(p.gamma > 0.0 && p.gamma.is_finite()) {
                return Err(Error::Config(format!("gamma = {} must be positive and finite", p.gamma)));
            }
            if !(p.a.is_finite() && p.b.is_finite()) {
                return Err(Error::Config("a and b must be finite".into()));
            }
            if p.clique_s < 3 {
                return Err(Error::Config(format!("clique size s = {} must be >= 3", p.clique_s)));
            }
            if p.direction == Direction::NegativeBeta2 && p.clique_s != 3 {
                return Err(Error::Config("beta2 -> -inf is only classified for triangles (s = 3)".into()));
            }
        }
        Direction::Vertical => match (p.beta1, p.chromatic_r) {
            (Some(b1), Some(r)) if b1.is_finite() && r >= 2 => {}
            _ => return Err(Error::Config("vertical direction needs finite beta1 and chromatic number >= 2".into())),
        },
        Direction::HorizontalPlus | Direction::HorizontalMinus => {}
    }
    Ok(())
}

/// Names the limiting graphon set for `p`.
///
/// Points in the band the case analysis leaves open come back as
/// [`Error::Unclassified`] carrying the oracle's answer.
pub fn classify(p: &ParamPoint) -> Result<Classification> {
    validate(p)?;
    let (set, regime, objective) = match p.direction {
        Direction::HorizontalPlus => (LimitSet::single(GraphonDescriptor::Complete), Regime::Horizontal, None),
        Direction::HorizontalMinus => (LimitSet::single(GraphonDescriptor::Empty), Regime::Horizontal, None),
        Direction::Vertical => {
            let r = p.chromatic_r.expect("validated");
            let scale = sigmoid(2.0 * p.beta1.expect("validated"));
            let member = if r == 2 || scale == 0.0 {
                GraphonDescriptor::Empty
            } else {
                GraphonDescriptor::Turan { k: r as u64 - 1, scale }
            };
            (LimitSet::single(member), Regime::Vertical, None)
        }
        Direction::PositiveBeta2 => {
            let (set, regime) = clique_positive(p.clique_s, p.gamma, p.a, p.b);
            (set, regime, Some(Objective::positive(p.a, p.gamma, p.clique_s)))
        }
        Direction::NegativeBeta2 => {
            let (set, regime) = classify_negative(p.gamma, p.a, p.b)?;
            (set, regime, Some(Objective::negative(p.a, p.gamma)))
        }
    };
    let oracle = objective.map(|o| grid_minimize(&o));
    let certified = oracle.as_ref().is_some_and(|o| {
        // the oracle reports every tie; b picks among them
        let locs = o.locations();
        let ours = set.edge_densities();
        if set.is_tie() || locs.len() == 1 {
            same_locations(&ours, &locs, CERTIFY_TOL)
        } else {
            ours.iter().all(|e| locs.iter().any(|l| (e - l).abs() <= CERTIFY_TOL))
        }
    });
    Ok(Classification { set, regime, oracle, certified })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRow {
    pub a: f64,
    pub result: Result<Classification>,
}

/// Classifies `(gamma, a, b)` for every `a` in the grid, ordered by `a`.
pub fn phase_sweep(gamma: f64, a_grid: &[f64], b: f64, exec: Exec) -> Result<Vec<PhaseRow>> {
    if a_grid.is_empty() {
        return Err(Error::Config("phase sweep needs a nonempty a grid".into()));
    }
    let mut grid = a_grid.to_vec();
    grid.sort_by(|p, q| p.total_cmp(q));
    Ok(par::map_slice(exec, &grid, |&a| PhaseRow { a, result: classify(&ParamPoint::negative(gamma, a, b)) }))
}
