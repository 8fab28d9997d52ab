#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepcover::rational::{int, ratio};
use stepcover::{PiecewiseConstantDensity, Rational, RulerInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lengths `k/den` with a random denominator in `1..=max_den`.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, max_den: i64) -> RulerInstance {
    let lengths = (0..n)
        .map(|_| {
            let den = rng.random_range(1..=max_den);
            ratio(rng.random_range(0..=den), den)
        })
        .collect();
    RulerInstance::new(lengths).unwrap()
}

/// A random probability density with up to `max_pieces` pieces.
pub fn random_density(rng: &mut ChaCha8Rng, max_pieces: usize) -> PiecewiseConstantDensity {
    let pieces = rng.random_range(1..=max_pieces);
    let mut inner: Vec<Rational> = (0..pieces - 1)
        .map(|_| {
            let den = rng.random_range(2..=16i64);
            ratio(rng.random_range(-den + 1..den), den)
        })
        .collect();
    inner.sort();
    inner.dedup();
    let mut bps = vec![int(-1)];
    bps.extend(inner);
    bps.push(int(1));
    let raw: Vec<Rational> = (0..bps.len() - 1)
        .map(|_| ratio(rng.random_range(0..=9), rng.random_range(1..=5)))
        .collect();
    let raw = if raw.iter().all(|v| *v == int(0)) {
        vec![int(1); raw.len()]
    } else {
        raw
    };
    let mass: Rational = bps.windows(2).zip(&raw).map(|(w, v)| (&w[1] - &w[0]) * v).sum();
    let values = raw.iter().map(|v| v / &mass).collect();
    PiecewiseConstantDensity::new(bps, values).unwrap()
}

/// `(b, b2)` in `[0, 1]^2` with `b + b2 > 1`.
pub fn random_claim_pair(rng: &mut ChaCha8Rng) -> (Rational, Rational) {
    loop {
        let den = rng.random_range(1..=24i64);
        let b = ratio(rng.random_range(0..=den), den);
        let den2 = rng.random_range(1..=24i64);
        let b2 = ratio(rng.random_range(0..=den2), den2);
        if &b + &b2 > int(1) {
            return (b, b2);
        }
    }
}

/// Random step in `[0, 1]`.
pub fn random_step(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.random_range(1..=30i64);
    ratio(rng.random_range(0..=den), den)
}

prop_compose! {
    pub fn length()(den in 1i64..=12, k in 0i64..=12) -> Rational {
        ratio(k.min(den), den)
    }
}

prop_compose! {
    pub fn instance(max_n: usize)(lengths in prop::collection::vec(length(), 1..=max_n)) -> RulerInstance {
        RulerInstance::new(lengths).unwrap()
    }
}

pub fn signs_for(n: usize) -> impl Strategy<Value = stepcover::SignVector> {
    prop::collection::vec(prop::bool::ANY, n).prop_map(|bits| {
        stepcover::SignVector(
            bits.into_iter()
                .map(|b| if b { stepcover::Sign::Plus } else { stepcover::Sign::Minus })
                .collect(),
        )
    })
}
