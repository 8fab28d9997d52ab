//! Integer view of an instance: every length multiplied by the common
//! denominator `D`. Prefix sums and ranges become integers, so the search
//! loops compare machine words instead of fractions while staying exact.

use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::instance::RulerInstance;
use crate::rational::{self, Rational};

pub(crate) trait Exact:
    Clone + Ord + Send + Sync + Zero + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    fn to_bigint(&self) -> BigInt;
    fn from_bigint(v: &BigInt) -> Option<Self>;
}

impl Exact for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl Exact for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

pub(crate) struct Scaled<T> {
    pub steps: Vec<T>,
    pub denominator: BigInt,
}

impl<T: Exact> Scaled<T> {
    pub fn to_rational(&self, v: &T) -> Rational {
        Rational::new(v.to_bigint(), self.denominator.clone())
    }

    pub fn scaled_integer(&self, r: &Rational) -> BigInt {
        // r * D is integral whenever r's denominator divides D
        (r * Rational::from_integer(self.denominator.clone())).to_integer()
    }
}

pub(crate) enum ScaledInstance {
    Small(Scaled<i64>),
    Big(Scaled<BigInt>),
}

pub(crate) fn scale(instance: &RulerInstance) -> ScaledInstance {
    let d = rational::common_denominator(instance.lengths());
    let steps: Vec<BigInt> = instance
        .lengths()
        .iter()
        .map(|a| (a * Rational::from_integer(d.clone())).to_integer())
        .collect();
    // every prefix sum is bounded by n * D; keep well clear of overflow
    let bound = &d * BigInt::from(instance.len() as u64 + 1) * BigInt::from(4);
    if bound.to_i64().is_some() {
        ScaledInstance::Small(Scaled {
            steps: steps.iter().map(|s| s.to_i64().expect("bounded")).collect(),
            denominator: d,
        })
    } else {
        ScaledInstance::Big(Scaled { steps, denominator: d })
    }
}
