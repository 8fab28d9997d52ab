//! Piecewise-constant densities on `[-1, 1]` and the one-step walk operators.
//!
//! `gamma_minus(q, a)` is the mass that moves left by `a`: half of it from the
//! interior, all of it from within `a` of the right wall. `gamma_plus` is the
//! mirror image and `phi` is their sum, the law of a particle after one step
//! of a walk that is forced away from a wall it is close to and otherwise
//! moves by a fair coin.
//!
//! Densities are stored as open-interval pieces, so values at breakpoints are
//! never consulted.

mod certificate;
mod walk;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use certificate::{
    certify_upper_bound, claim_check, default_epsilon, fringe_mass, pipeline, BoundCertificate,
    ClaimReport,
};
pub use walk::{monte_carlo_walk, WalkHistogram};

/// A nonnegative step function on `[-1, 1]`.
///
/// Invariants: `breakpoints` is strictly increasing from `-1` to `1`,
/// `values.len() + 1 == breakpoints.len()`, every value is nonnegative and no
/// two adjacent pieces share a value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DensityFile", into = "DensityFile")]
pub struct PiecewiseConstantDensity {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    #[serde(with = "rational::serde_vec")]
    breakpoints: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    values: Vec<Rational>,
}

impl TryFrom<DensityFile> for PiecewiseConstantDensity {
    type Error = Error;

    fn try_from(f: DensityFile) -> Result<Self> {
        PiecewiseConstantDensity::new(f.breakpoints, f.values)
    }
}

impl From<PiecewiseConstantDensity> for DensityFile {
    fn from(d: PiecewiseConstantDensity) -> Self {
        DensityFile {
            breakpoints: d.breakpoints,
            values: d.values,
        }
    }
}

impl PiecewiseConstantDensity {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() + 1 {
            return Err(Error::invalid(format!(
                "need one more breakpoint than values (got {} and {})",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != -Rational::one() || *breakpoints.last().unwrap() != Rational::one() {
            return Err(Error::invalid("breakpoints must start at -1 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::invalid("density values must be nonnegative"));
        }
        Ok(Self::coalesced(breakpoints, values))
    }

    fn coalesced(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Self {
        let mut bps = vec![breakpoints[0].clone()];
        let mut vals: Vec<Rational> = Vec::with_capacity(values.len());
        for (v, right) in values.into_iter().zip(breakpoints.into_iter().skip(1)) {
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = right;
            } else {
                vals.push(v);
                bps.push(right);
            }
        }
        PiecewiseConstantDensity {
            breakpoints: bps,
            values: vals,
        }
    }

    /// Samples `f` at the midpoint of every cell of `grid` (clipped to
    /// `[-1, 1]`, sorted and deduplicated).
    fn from_cells(mut grid: Vec<Rational>, f: impl Fn(&Rational) -> Rational) -> Self {
        let one = Rational::one();
        grid.push(-one.clone());
        grid.push(one.clone());
        grid.retain(|x| x.abs() <= one);
        grid.sort();
        grid.dedup();
        let values = grid
            .windows(2)
            .map(|w| f(&((&w[0] + &w[1]) / rational::two())))
            .collect();
        Self::coalesced(grid, values)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, &Rational)> {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    /// Value on the piece whose interior contains `x`; zero outside `(-1, 1)`.
    /// At a breakpoint the piece to the right is used.
    pub fn value_at(&self, x: &Rational) -> Rational {
        let one = Rational::one();
        if *x < -one.clone() || *x >= one {
            return Rational::zero();
        }
        let j = self.breakpoints.partition_point(|b| b <= x) - 1;
        self.values[j].clone()
    }

    pub fn integral(&self) -> Rational {
        self.pieces().map(|(l, r, v)| (r - l) * v).sum()
    }

    /// Integral over `[lo, hi]`.
    pub fn integral_over(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.pieces()
            .map(|(l, r, v)| {
                let left = l.max(lo);
                let right = r.min(hi);
                if left < right {
                    (right - left) * v
                } else {
                    Rational::zero()
                }
            })
            .sum()
    }

    pub fn is_probability(&self) -> bool {
        self.integral().is_one()
    }

    /// Mirror image `x -> -x`.
    pub fn reflect(&self) -> Self {
        PiecewiseConstantDensity {
            breakpoints: self.breakpoints.iter().rev().map(|b| -b).collect(),
            values: self.values.iter().rev().cloned().collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::coalesced(vec![-Rational::one(), Rational::one()], vec![Rational::zero()]);
        }
        PiecewiseConstantDensity {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let grid = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .cloned()
            .collect();
        Self::from_cells(grid, |x| self.value_at(x) + other.value_at(x))
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("density serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for PiecewiseConstantDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, r, v)) in self.pieces().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} on [{l}, {r}]")?;
        }
        Ok(())
    }
}

/// The uniform density `1/2` on `[-1, 1]`.
pub fn uniform_density() -> PiecewiseConstantDensity {
    PiecewiseConstantDensity {
        breakpoints: vec![-Rational::one(), Rational::one()],
        values: vec![rational::half()],
    }
}

fn check_step(a: &Rational) -> Result<()> {
    if rational::in_unit_interval(a) {
        Ok(())
    } else {
        Err(Error::invalid(format!("step length {a} lies outside [0, 1]")))
    }
}

/// Leftward part of one step: `q(x+a)/2` on `[-1, 1-2a]`, `q(x+a)` on
/// `[1-2a, 1-a]`, zero on `[1-a, 1]`.
pub fn gamma_minus(q: &PiecewiseConstantDensity, a: &Rational) -> Result<PiecewiseConstantDensity> {
    check_step(a)?;
    let one = Rational::one();
    let forced = &one - a;
    let interior = &one - a * rational::two();
    let mut grid: Vec<Rational> = q.breakpoints.iter().map(|b| b - a).collect();
    grid.push(forced.clone());
    grid.push(interior.clone());
    Ok(PiecewiseConstantDensity::from_cells(grid, |x| {
        if *x > forced {
            Rational::zero()
        } else if *x < interior {
            q.value_at(&(x + a)) / rational::two()
        } else {
            q.value_at(&(x + a))
        }
    }))
}

/// Rightward part of one step: mirror image of [`gamma_minus`].
pub fn gamma_plus(q: &PiecewiseConstantDensity, a: &Rational) -> Result<PiecewiseConstantDensity> {
    check_step(a)?;
    let one = Rational::one();
    let forced = a - &one;
    let interior = a * rational::two() - &one;
    let mut grid: Vec<Rational> = q.breakpoints.iter().map(|b| b + a).collect();
    grid.push(forced.clone());
    grid.push(interior.clone());
    Ok(PiecewiseConstantDensity::from_cells(grid, |x| {
        if *x < forced {
            Rational::zero()
        } else if *x > interior {
            q.value_at(&(x - a)) / rational::two()
        } else {
            q.value_at(&(x - a))
        }
    }))
}

/// Law after one step of size `a`.
pub fn phi(q: &PiecewiseConstantDensity, a: &Rational) -> Result<PiecewiseConstantDensity> {
    Ok(gamma_minus(q, a)?.add(&gamma_plus(q, a)?))
}

pub fn max_density(q: &PiecewiseConstantDensity) -> Rational {
    q.values.iter().max().expect("at least one piece").clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn density(bps: &[(i64, i64)], vals: &[(i64, i64)]) -> PiecewiseConstantDensity {
        PiecewiseConstantDensity::new(
            bps.iter().map(|&(p, q)| ratio(p, q)).collect(),
            vals.iter().map(|&(p, q)| ratio(p, q)).collect(),
        )
        .unwrap()
    }

    /// Direct reading of the three-branch definition at a point.
    fn gamma_minus_at(q: &PiecewiseConstantDensity, a: &Rational, x: &Rational) -> Rational {
        let one = int(1);
        if *x <= &one - a * int(2) {
            q.value_at(&(x + a)) / int(2)
        } else if *x <= &one - a {
            q.value_at(&(x + a))
        } else {
            int(0)
        }
    }

    #[test]
    fn uniform_basics() {
        let u = uniform_density();
        assert_eq!(u.breakpoints(), &[int(-1), int(1)]);
        assert_eq!(u.values(), &[ratio(1, 2)]);
        assert_eq!(u.integral(), int(1));
        assert_eq!(max_density(&u), ratio(1, 2));
    }

    #[test]
    fn validation() {
        let bad = |b: Vec<Rational>, v: Vec<Rational>| PiecewiseConstantDensity::new(b, v).is_err();
        assert!(bad(vec![int(-1)], vec![]));
        assert!(bad(vec![int(-1), int(0)], vec![int(1)]));
        assert!(bad(vec![int(-1), int(0), int(0), int(1)], vec![int(1), int(1), int(1)]));
        assert!(bad(vec![int(-1), int(1)], vec![int(-1)]));
        assert!(bad(vec![int(-1), int(1)], vec![int(1), int(1)]));
    }

    #[test]
    fn coalesces_equal_neighbours() {
        let d = density(&[(-1, 1), (0, 1), (1, 1)], &[(1, 2), (1, 2)]);
        assert_eq!(d, uniform_density());
    }

    #[test]
    fn gamma_minus_uniform_three_tenths() {
        let g = gamma_minus(&uniform_density(), &ratio(3, 10)).unwrap();
        assert_eq!(g, density(&[(-1, 1), (2, 5), (7, 10), (1, 1)], &[(1, 4), (1, 2), (0, 1)]));
    }

    #[test]
    fn gamma_plus_uniform_three_tenths() {
        let g = gamma_plus(&uniform_density(), &ratio(3, 10)).unwrap();
        assert_eq!(g, density(&[(-1, 1), (-7, 10), (-2, 5), (1, 1)], &[(0, 1), (1, 2), (1, 4)]));
    }

    #[test]
    fn phi_uniform_three_tenths() {
        let p = phi(&uniform_density(), &ratio(3, 10)).unwrap();
        let expected = density(
            &[(-1, 1), (-7, 10), (-2, 5), (2, 5), (7, 10), (1, 1)],
            &[(1, 4), (3, 4), (1, 2), (3, 4), (1, 4)],
        );
        assert_eq!(p, expected);
        assert_eq!(max_density(&p), ratio(3, 4));
        assert!(p.is_probability());
    }

    #[test]
    fn step_of_zero_halves_each_part() {
        let q = density(&[(-1, 1), (-1, 3), (1, 2), (1, 1)], &[(1, 4), (1, 1), (1, 3)]);
        assert_eq!(gamma_minus(&q, &int(0)).unwrap(), q.scale(&ratio(1, 2)));
        assert_eq!(gamma_plus(&q, &int(0)).unwrap(), q.scale(&ratio(1, 2)));
        assert_eq!(phi(&q, &int(0)).unwrap(), q);
    }

    #[test]
    fn step_of_one() {
        let q = density(&[(-1, 1), (-1, 2), (1, 1)], &[(1, 1), (1, 3)]);
        let g = gamma_minus(&q, &int(1)).unwrap();
        // q(x + 1) on [-1, 0] reads the right half of q; [0, 1] is empty
        assert_eq!(g, density(&[(-1, 1), (0, 1), (1, 1)], &[(1, 3), (0, 1)]));
        assert_eq!(phi(&uniform_density(), &int(1)).unwrap(), uniform_density());
    }

    #[test]
    fn operators_agree_with_pointwise_definition() {
        let q = density(&[(-1, 1), (-3, 5), (1, 7), (4, 5), (1, 1)], &[(1, 5), (3, 4), (1, 2), (1, 9)]);
        for a in [ratio(0, 1), ratio(1, 7), ratio(2, 5), ratio(1, 2), ratio(5, 6), int(1)] {
            let g = gamma_minus(&q, &a).unwrap();
            for k in 1..200 {
                let x = ratio(2 * k - 199, 199) + ratio(1, 1000);
                if x >= int(1) {
                    continue;
                }
                assert_eq!(g.value_at(&x), gamma_minus_at(&q, &a, &x), "a = {a}, x = {x}");
            }
        }
    }

    #[test]
    fn reflection_swaps_the_two_parts() {
        let q = density(&[(-1, 1), (-1, 4), (2, 3), (1, 1)], &[(1, 3), (1, 1), (1, 6)]);
        let a = ratio(3, 8);
        assert_eq!(gamma_plus(&q, &a).unwrap(), gamma_minus(&q.reflect(), &a).unwrap().reflect());
        assert_eq!(max_density(&q.reflect()), max_density(&q));
    }

    #[test]
    fn rejects_bad_step() {
        assert!(gamma_minus(&uniform_density(), &ratio(3, 2)).is_err());
        assert!(gamma_plus(&uniform_density(), &ratio(-1, 2)).is_err());
    }

    #[test]
    fn partial_integrals() {
        let q = density(&[(-1, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1)]);
        assert_eq!(q.integral_over(&ratio(-1, 2), &ratio(1, 2)), ratio(1, 2));
        assert_eq!(q.integral_over(&int(0), &int(1)), int(0));
    }

    #[test]
    fn json_format() {
        let p = phi(&uniform_density(), &ratio(3, 10)).unwrap();
        let json = p.to_json();
        assert_eq!(
            json,
            r#"{"breakpoints":["-1","-7/10","-2/5","2/5","7/10","1"],"values":["1/4","3/4","1/2","3/4","1/4"]}"#
        );
        assert_eq!(PiecewiseConstantDensity::from_json(&json).unwrap(), p);
    }
}
