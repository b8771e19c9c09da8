//! Step graphons and their clique homomorphism densities.
//!
//! The scalar type is generic so that Turán identities can be checked exactly
//! with `Ratio<i64>` while general graphons use `f64`.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::Num;

use crate::error::{domain, Error, Result};

/// Largest number of block tuples `clique_density` will enumerate.
pub const MAX_TUPLES: f64 = 1e8;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Send + Sync {
    fn from_u64(n: u64) -> Self;
    /// Equality up to the type's representation error.
    fn approx_eq(&self, other: &Self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Ratio<i64> {
    fn from_u64(n: u64) -> Self {
        Ratio::from_integer(n as i64)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Graphon constant on the blocks of a finite partition of `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon<T: Scalar = f64> {
    weights: Vec<T>,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> StepGraphon<T> {
    pub fn new(weights: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return domain("step graphon needs at least one block");
        }
        if weights.iter().any(|w| !(w > &T::zero())) {
            return domain("block weights must be positive");
        }
        let total = weights.iter().cloned().fold(T::zero(), |acc, w| acc + w);
        if !total.approx_eq(&T::one()) {
            return domain(format!("block weights sum to {:?}, not 1", total));
        }
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return domain(format!("value matrix must be {n}x{n}"));
        }
        for i in 0..n {
            for j in 0..n {
                let v = &values[i][j];
                if v < &T::zero() || v > &T::one() {
                    return domain(format!("value {:?} at ({i}, {j}) outside [0, 1]", v));
                }
                if values[i][j] != values[j][i] {
                    return domain(format!("value matrix not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(StepGraphon { weights, values })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }

    pub fn blocks(&self) -> usize {
        self.weights.len()
    }

    /// Constant graphon `p`.
    pub fn constant(p: T) -> Result<Self> {
        StepGraphon::new(vec![T::one()], vec![vec![p]])
    }

    pub fn edge_density(&self) -> T {
        clique_density(2, self).expect("one-block pairs never exceed the guard")
    }

    pub fn triangle_density(&self) -> Result<T> {
        clique_density(3, self)
    }
}

/// Turán graphon on `k` equal classes; `k = 1` is the empty graphon.
pub fn turan_graphon<T: Scalar>(k: u64) -> Result<StepGraphon<T>> {
    if k == 0 {
        return domain("Turán graphon needs k >= 1");
    }
    let w = T::one() / T::from_u64(k);
    let k = k as usize;
    let values = (0..k).map(|i| (0..k).map(|j| if i == j { T::zero() } else { T::one() }).collect()).collect();
    StepGraphon::new(vec![w; k], values)
}

/// Graphon equal to 1 on `[0, side]^2` and 0 elsewhere.
pub fn box_graphon<T: Scalar>(side: T) -> Result<StepGraphon<T>> {
    if !(side > T::zero() && side < T::one()) {
        return domain(format!("box side {:?} outside (0, 1)", side));
    }
    let rest = T::one() - side.clone();
    StepGraphon::new(vec![side, rest], vec![vec![T::one(), T::zero()], vec![T::zero(), T::zero()]])
}

/// `p * g`.
pub fn scale_graphon<T: Scalar>(g: &StepGraphon<T>, p: T) -> Result<StepGraphon<T>> {
    if p < T::zero() || p > T::one() {
        return domain(format!("scale {:?} outside [0, 1]", p));
    }
    let values = g.values.iter().map(|row| row.iter().map(|v| v.clone() * p.clone()).collect()).collect();
    StepGraphon::new(g.weights.clone(), values)
}

/// Homomorphism density of `K_s`: the sum over `s`-tuples of blocks of the
/// product of block weights and pairwise block values.
pub fn clique_density<T: Scalar>(s: usize, g: &StepGraphon<T>) -> Result<T> {
    if s < 2 {
        return domain(format!("clique size s = {s} must be >= 2"));
    }
    let blocks = g.blocks();
    if (blocks as f64).powi(s as i32) > MAX_TUPLES {
        return Err(Error::TooManyTuples { blocks, s });
    }
    let mut tuple = Vec::with_capacity(s);
    Ok(accumulate(g, s, &mut tuple, T::one()))
}

fn accumulate<T: Scalar>(g: &StepGraphon<T>, s: usize, tuple: &mut Vec<usize>, partial: T) -> T {
    if tuple.len() == s {
        return partial;
    }
    let mut total = T::zero();
    for b in 0..g.blocks() {
        let mut term = partial.clone() * g.weights[b].clone();
        for &prev in tuple.iter() {
            term = term * g.values[prev][b].clone();
        }
        if term.is_zero() {
            continue;
        }
        tuple.push(b);
        total = total + accumulate(g, s, tuple, term);
        tuple.pop();
    }
    total
}

/// `I(u) = u ln(u)/2 + (1-u) ln(1-u)/2`, with `I(0) = I(1) = 0`.
pub fn rate_function(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return domain(format!("rate function argument {u} outside [0, 1]"));
    }
    let h = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    Ok(0.5 * h(u) + 0.5 * h(1.0 - u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::TuranPoint;

    type Q = Ratio<i64>;

    #[test]
    fn turan_densities_exact() {
        assert_eq!(turan_graphon::<Q>(1).unwrap().edge_density(), Q::from_integer(0));
        for k in 1..=10u64 {
            let g = turan_graphon::<Q>(k + 1).unwrap();
            let v = TuranPoint::new(k);
            assert_eq!(g.edge_density(), v.e());
            assert_eq!(g.triangle_density().unwrap(), v.t());
        }
        let g4 = turan_graphon::<Q>(4).unwrap();
        assert_eq!(g4.edge_density(), Q::new(3, 4));
        assert_eq!(g4.triangle_density().unwrap(), Q::new(3, 8));
        assert_eq!(clique_density(4, &g4).unwrap(), Q::new(3, 32));
    }

    #[test]
    fn constant_and_box() {
        let c = StepGraphon::constant(0.5).unwrap();
        assert!((c.triangle_density().unwrap() - 0.125).abs() < 1e-15);
        let b = box_graphon(Q::new(9, 16)).unwrap();
        assert_eq!(b.edge_density(), Q::new(81, 256));
        assert_eq!(b.triangle_density().unwrap(), Q::new(729, 4096));
        let half = box_graphon(0.5).unwrap();
        assert!((half.edge_density() - 0.25).abs() < 1e-15);
        assert!(box_graphon(1.0).is_err());
    }

    #[test]
    fn scaling() {
        let g = turan_graphon::<f64>(2).unwrap();
        assert!((scale_graphon(&g, 0.5).unwrap().edge_density() - 0.25).abs() < 1e-15);
        assert_eq!(scale_graphon(&g, 1.0).unwrap(), g);
        assert_eq!(scale_graphon(&g, 0.0).unwrap().edge_density(), 0.0);
        assert!(scale_graphon(&g, 1.5).is_err());
    }

    #[test]
    fn validation_and_guard() {
        assert!(StepGraphon::new(vec![0.5, 0.4], vec![vec![0.0; 2]; 2]).is_err());
        assert!(StepGraphon::new(vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![0.0, 0.0]]).is_err());
        assert!(StepGraphon::new(vec![1.0], vec![vec![1.5]]).is_err());
        let big = turan_graphon::<f64>(101).unwrap();
        assert!(matches!(clique_density(4, &big), Err(Error::TooManyTuples { .. })));
    }

    #[test]
    fn rate_function_values() {
        assert!((rate_function(0.5).unwrap() + 2f64.ln() / 2.0).abs() < 1e-15);
        assert_eq!(rate_function(0.0).unwrap(), 0.0);
        assert_eq!(rate_function(1.0).unwrap(), 0.0);
        for i in 1..100 {
            let u = i as f64 / 100.0;
            assert!((rate_function(u).unwrap() - rate_function(1.0 - u).unwrap()).abs() < 1e-15);
        }
        assert!(rate_function(-0.1).is_err());
    }
}
