//! The density pipeline over a ruler and the fringe-mass certificate.
//!
//! For `n = 4m` the pipeline starts from the uniform density at index `2m`
//! and applies one walk step per segment outward in both directions. If the
//! total mass found within `epsilon/2` of the walls, summed over all indices,
//! is at most one, some folding has range at most `2 - epsilon`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{max_density, phi, uniform_density, PiecewiseConstantDensity};
use crate::error::{Error, Result};
use crate::instance::RulerInstance;
use crate::rational::{self, Rational};

/// Densities `q_0..q_{4m}` for an instance with `n = 4m`.
///
/// `q_{2m}` is uniform; `q_{i+1} = phi(q_i, a_{i+1})` going right and
/// `q_{i-1} = phi(q_i, a_i)` going left.
pub fn pipeline(instance: &RulerInstance) -> Result<Vec<PiecewiseConstantDensity>> {
    let n = instance.len();
    if !n.is_multiple_of(4) {
        return Err(Error::invalid(format!(
            "the density pipeline needs n divisible by 4 but n = {n}; pad with zeros first"
        )));
    }
    let a = instance.lengths();
    let mid = n / 2;
    let mut qs: Vec<Option<PiecewiseConstantDensity>> = vec![None; n + 1];
    qs[mid] = Some(uniform_density());
    for i in mid..n {
        let next = phi(qs[i].as_ref().unwrap(), &a[i])?;
        qs[i + 1] = Some(next);
    }
    for i in (1..=mid).rev() {
        let prev = phi(qs[i].as_ref().unwrap(), &a[i - 1])?;
        qs[i - 1] = Some(prev);
    }
    Ok(qs.into_iter().map(|q| q.expect("all indices filled")).collect())
}

/// Mass of `q` within `epsilon / 2` of either wall.
pub fn fringe_mass(q: &PiecewiseConstantDensity, epsilon: &Rational) -> Result<Rational> {
    if *epsilon <= Rational::zero() || *epsilon > rational::two() {
        return Err(Error::invalid(format!("epsilon = {epsilon} must lie in (0, 2]")));
    }
    let one = Rational::one();
    let w = epsilon / rational::two();
    Ok(q.integral_over(&-one.clone(), &(&w - &one)) + q.integral_over(&(&one - &w), &one))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    #[serde(with = "rational::serde_str")]
    pub max_q: Rational,
    #[serde(with = "rational::serde_str")]
    pub max_after_first: Rational,
    #[serde(with = "rational::serde_str")]
    pub max_after_second: Rational,
    /// `max_after_second <= 2 * max_q`.
    pub holds: bool,
}

/// Two steps whose lengths sum past one at most double the peak density.
pub fn claim_check(q: &PiecewiseConstantDensity, b: &Rational, b2: &Rational) -> Result<ClaimReport> {
    if !rational::in_unit_interval(b) || !rational::in_unit_interval(b2) {
        return Err(Error::invalid(format!("steps {b} and {b2} must lie in [0, 1]")));
    }
    if b + b2 <= Rational::one() {
        return Err(Error::invalid(format!(
            "steps {b} and {b2} sum to at most 1; the doubling bound needs b + b2 > 1"
        )));
    }
    let q1 = phi(q, b)?;
    let q2 = phi(&q1, b2)?;
    let max_q = max_density(q);
    let max_after_second = max_density(&q2);
    Ok(ClaimReport {
        holds: max_after_second <= rational::two() * &max_q,
        max_after_first: max_density(&q1),
        max_after_second,
        max_q,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub m: usize,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    /// `r_0..r_{4m}`.
    #[serde(rename = "r", with = "rational::serde_vec")]
    pub fringe_masses: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub total: Rational,
    /// `total <= 1`: some folding has range at most `2 - epsilon`.
    pub holds: bool,
}

/// `1 / (2^(m+3) - 7)`.
pub fn default_epsilon(m: usize) -> Rational {
    let den = (BigInt::one() << (m + 3)) - 7;
    Rational::new(BigInt::one(), den)
}

/// Runs the pipeline on a merge-reduced instance with `n = 4m` and sums the
/// fringe masses. `epsilon` defaults to [`default_epsilon`].
pub fn certify_upper_bound(instance: &RulerInstance, epsilon: Option<&Rational>) -> Result<BoundCertificate> {
    let n = instance.len();
    if !n.is_multiple_of(4) {
        return Err(Error::invalid(format!(
            "certificate needs n = 4m but n = {n}; pad with zeros to a multiple of 4, then merge_reduce"
        )));
    }
    if !instance.is_merge_reduced() {
        return Err(Error::invalid(
            "some adjacent pair sums to at most 1; run merge_reduce on the instance first",
        ));
    }
    let m = n / 4;
    let epsilon = epsilon.cloned().unwrap_or_else(|| default_epsilon(m));
    let fringe_masses = pipeline(instance)?
        .iter()
        .map(|q| fringe_mass(q, &epsilon))
        .collect::<Result<Vec<_>>>()?;
    let total: Rational = fringe_masses.iter().sum();
    Ok(BoundCertificate {
        m,
        holds: total <= Rational::one(),
        epsilon,
        fringe_masses,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{phi, uniform_density};
    use crate::rational::{int, ratio};

    #[test]
    fn epsilon_values() {
        assert_eq!(default_epsilon(1), ratio(1, 9));
        assert_eq!(default_epsilon(4), ratio(1, 121));
    }

    #[test]
    fn fringe_of_uniform() {
        let u = uniform_density();
        for eps in [ratio(1, 9), ratio(1, 121), ratio(3, 2)] {
            assert_eq!(fringe_mass(&u, &eps).unwrap(), &eps / int(2));
        }
        assert_eq!(fringe_mass(&u, &int(2)).unwrap(), int(1));
        assert!(fringe_mass(&u, &int(0)).is_err());
        assert!(fringe_mass(&u, &ratio(5, 2)).is_err());
    }

    #[test]
    fn fringe_of_centred_mass() {
        let q = PiecewiseConstantDensity::new(
            vec![int(-1), ratio(-1, 2), ratio(1, 2), int(1)],
            vec![int(0), int(1), int(0)],
        )
        .unwrap();
        assert_eq!(fringe_mass(&q, &int(1)).unwrap(), int(0));
        assert_eq!(fringe_mass(&q, &ratio(1, 3)).unwrap(), int(0));
    }

    #[test]
    fn pipeline_shape() {
        let inst = RulerInstance::from_ratios(&[(3, 5), (1, 2), (4, 5), (1, 3)]).unwrap();
        let qs = pipeline(&inst).unwrap();
        assert_eq!(qs.len(), 5);
        assert_eq!(qs[2], uniform_density());
        assert_eq!(qs[3], phi(&qs[2], &ratio(4, 5)).unwrap());
        assert_eq!(qs[4], phi(&qs[3], &ratio(1, 3)).unwrap());
        assert_eq!(qs[1], phi(&qs[2], &ratio(1, 2)).unwrap());
        assert_eq!(qs[0], phi(&qs[1], &ratio(3, 5)).unwrap());
        assert!(qs.iter().all(|q| q.is_probability()));
        assert!(pipeline(&RulerInstance::from_ratios(&[(1, 2); 3]).unwrap()).is_err());
    }

    #[test]
    fn zero_steps_keep_uniform() {
        let inst = RulerInstance::from_ratios(&[(0, 1); 8]).unwrap();
        assert!(pipeline(&inst).unwrap().iter().all(|q| *q == uniform_density()));
    }

    #[test]
    fn unit_steps_certificate() {
        let inst = RulerInstance::from_ratios(&[(1, 1); 4]).unwrap();
        let cert = certify_upper_bound(&inst, None).unwrap();
        assert_eq!(cert.m, 1);
        assert_eq!(cert.epsilon, ratio(1, 9));
        assert_eq!(cert.fringe_masses, vec![ratio(1, 18); 5]);
        assert_eq!(cert.total, ratio(5, 18));
        assert!(cert.holds);
    }

    #[test]
    fn certificate_preconditions() {
        let not_multiple = RulerInstance::from_ratios(&[(1, 1); 5]).unwrap();
        assert!(matches!(certify_upper_bound(&not_multiple, None), Err(Error::InvalidInput(_))));
        let not_reduced = RulerInstance::from_ratios(&[(1, 2); 4]).unwrap();
        let err = certify_upper_bound(&not_reduced, None).unwrap_err();
        assert!(err.to_string().contains("merge_reduce"));
    }

    #[test]
    fn large_epsilon_override_fails() {
        let inst = RulerInstance::from_ratios(&[(1, 1); 4]).unwrap();
        let cert = certify_upper_bound(&inst, Some(&int(1))).unwrap();
        assert_eq!(cert.total, ratio(5, 2));
        assert!(!cert.holds);
    }

    #[test]
    fn claim_preconditions_and_examples() {
        let u = uniform_density();
        assert!(claim_check(&u, &ratio(1, 2), &ratio(1, 2)).is_err());
        assert!(claim_check(&u, &ratio(3, 2), &ratio(1, 2)).is_err());
        let r = claim_check(&u, &ratio(3, 5), &ratio(1, 2)).unwrap();
        assert!(r.holds);
        assert!(r.max_after_second <= int(1));
        let r = claim_check(&u, &int(1), &int(1)).unwrap();
        assert_eq!(r.max_after_second, ratio(1, 2));
        assert_eq!(r.max_after_first, ratio(1, 2));
    }
}
