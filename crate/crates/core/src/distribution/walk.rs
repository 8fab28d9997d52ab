//! Seeded simulation of the walk whose exact laws the pipeline computes.
//!
//! Positions live on an integer lattice: the common denominator `D` of the
//! steps and bins times `2^32` units per unit length. Start points are the
//! midpoints of `2^32` equal cells of `[-1, 1]`, so the uniform start is
//! exact up to that discretisation and no floating point is involved.

use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::RulerInstance;
use crate::rational::{self, Rational};

const CELL_BITS: u32 = 32;
const SHARD_SIZE: u64 = 1 << 16;

/// Counts of final positions per bin; bin `j` is `[breakpoints[j], breakpoints[j+1])`
/// with the last bin closed on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkHistogram {
    #[serde(with = "rational::serde_vec")]
    pub breakpoints: Vec<Rational>,
    pub counts: Vec<u64>,
    pub samples: u64,
}

/// Simulates `samples` particles started uniformly on `[-1, 1]` taking the
/// steps `a_{start_index+1}..a_n`. A particle within `a` of a wall moves away
/// from it; otherwise a fair coin picks the direction.
///
/// Sampling is split into fixed-size shards, each with its own ChaCha stream
/// derived from `seed`, so the result depends only on the arguments.
pub fn monte_carlo_walk(
    instance: &RulerInstance,
    start_index: usize,
    samples: u64,
    seed: u64,
    bins: &[Rational],
) -> Result<WalkHistogram> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    if start_index > instance.len() {
        return Err(Error::invalid(format!(
            "start index {start_index} exceeds n = {}",
            instance.len()
        )));
    }
    let one = Rational::one();
    if bins.len() < 2
        || bins[0] != -one.clone()
        || *bins.last().unwrap() != one
        || bins.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::invalid("bins must increase strictly from -1 to 1"));
    }
    let steps = &instance.lengths()[start_index..];

    let d = rational::common_denominator(steps.iter().chain(bins));
    let unit = Rational::from_integer(d.clone() << CELL_BITS);
    let to_lattice = |r: &Rational| -> Result<i128> {
        (r * &unit)
            .to_integer()
            .to_i128()
            .filter(|v| v.unsigned_abs() < 1u128 << 120)
            .ok_or_else(|| Error::SizeLimit("denominators too large for the walk lattice".into()))
    };
    let wall = to_lattice(&one)?;
    let step_units: Vec<i128> = steps.iter().map(to_lattice).collect::<Result<_>>()?;
    let bin_units: Vec<i128> = bins.iter().map(to_lattice).collect::<Result<_>>()?;
    let cell = d.to_i128().expect("bounded by the wall check");

    let shards = samples.div_ceil(SHARD_SIZE);
    let parts: Vec<Vec<u64>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut counts = vec![0u64; bin_units.len() - 1];
            for _ in 0..count {
                let u: u32 = rng.random();
                let mut x = -wall + cell * (2 * i128::from(u) + 1);
                for &a in &step_units {
                    x = if x < -wall + a {
                        x + a
                    } else if x > wall - a {
                        x - a
                    } else if rng.random::<bool>() {
                        x + a
                    } else {
                        x - a
                    };
                }
                let j = bin_units.partition_point(|&b| b <= x).clamp(1, bin_units.len() - 1) - 1;
                counts[j] += 1;
            }
            counts
        })
        .collect();

    let mut counts = vec![0u64; bins.len() - 1];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    Ok(WalkHistogram {
        breakpoints: bins.to_vec(),
        counts,
        samples,
    })
}
