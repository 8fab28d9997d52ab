//! Extremal instances: `n = 4m - 1` segments whose step-cover is exactly
//! `2 - delta` with `delta = 1 / (3 * 2^(m-1) - 1)`.
//!
//! Odd positions have length one. Even position `i` has length
//! `1 - 2^k delta`, where `k` climbs `0, 1, ..., m-2` toward the centre,
//! peaks at `m - 1` for `i = 2m`, and falls back to `0` symmetrically.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{evaluate_folding, RulerInstance, Sign, SignVector};
use crate::rational::{self, Rational};
use crate::scaled::{scale, Exact, Scaled, ScaledInstance};
use crate::solvers::SolverConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalInstance {
    pub m: u32,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub instance: RulerInstance,
}

impl ExtremalInstance {
    /// `2 - delta`, the exact step-cover of the instance.
    pub fn target(&self) -> Rational {
        rational::two() - &self.delta
    }
}

/// `delta = 1 / (3 * 2^(m-1) - 1)`.
pub fn extremal_delta(m: u32) -> Rational {
    let den = BigInt::from(3) * (BigInt::one() << (m - 1)) - 1;
    Rational::new(BigInt::one(), den)
}

pub fn build_extremal(m: u32) -> Result<ExtremalInstance> {
    if m == 0 {
        return Err(Error::invalid("extremal construction needs m >= 1"));
    }
    let delta = extremal_delta(m);
    let n = 4 * m - 1;
    let one = Rational::one();
    let lengths = (1..=n)
        .map(|i| {
            if i % 2 == 1 {
                return one.clone();
            }
            let k = if i == 2 * m {
                m - 1
            } else if i < 2 * m {
                i / 2 - 1
            } else {
                (2 * m - 1) - i / 2
            };
            &one - rational::pow2(k) * &delta
        })
        .collect();
    Ok(ExtremalInstance {
        m,
        delta,
        instance: RulerInstance::new(lengths)?,
    })
}

/// Range of the perfectly alternating folding `+ - + - ... +`.
pub fn alternating_range(ext: &ExtremalInstance) -> Rational {
    let signs = SignVector::alternating(ext.instance.len());
    evaluate_folding(&ext.instance, &signs)
        .expect("alternating vector has matching length")
        .range
}

/// Exhaustive census of all foldings of an extremal instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub m: u32,
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    /// `2 - delta`.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    /// Minimum range over every sign vector.
    #[serde(with = "rational::serde_str")]
    pub step_cover: Rational,
    pub count_at_min: u64,
    #[serde(with = "rational::serde_str")]
    pub alternating_range: Rational,
    /// Number of foldings whose range is below `bound`; zero when the bound holds.
    pub below_bound: u64,
    /// Smallest range among foldings other than the alternating one and its mirror.
    #[serde(with = "rational::serde_opt")]
    pub non_alternating_min: Option<Rational>,
    pub total_foldings: u64,
    /// `(range, count)` over all `2^n` foldings, ascending by range.
    pub histogram: Vec<HistogramBin>,
    /// Every folding has range `>= bound` and the alternating folding attains it.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    #[serde(with = "rational::serde_str")]
    pub range: Rational,
    pub count: u64,
}

pub fn verify_lower_bound(ext: &ExtremalInstance, config: &SolverConfig) -> Result<LowerBoundReport> {
    let n = ext.instance.len();
    if n > config.brute_force_limit {
        return Err(Error::SizeLimit(format!(
            "verifying m = {} needs n = {n} but brute force is limited to n <= {}",
            ext.m, config.brute_force_limit
        )));
    }
    let histogram = match scale(&ext.instance) {
        ScaledInstance::Small(s) => census(&s),
        ScaledInstance::Big(s) => census(&s),
    };
    let bound = ext.target();
    let alt = SignVector::alternating(n);
    let alt_range = alternating_range(ext);

    // the two alternating vectors are the only ones excluded from the
    // non-alternating minimum
    let mut non_alternating = histogram.clone();
    if let Some(c) = non_alternating.get_mut(&alt_range) {
        *c -= 2.min(*c);
    }
    debug_assert_eq!(
        evaluate_folding(&ext.instance, &alt.negated()).unwrap().range,
        alt_range
    );
    let non_alternating_min = non_alternating
        .iter()
        .find(|(_, &c)| c > 0)
        .map(|(r, _)| r.clone());

    let (step_cover, count_at_min) = histogram
        .iter()
        .next()
        .map(|(r, c)| (r.clone(), *c))
        .expect("at least one folding");
    let below_bound = histogram.range(..bound.clone()).map(|(_, c)| c).sum();
    let total_foldings = histogram.values().sum();
    let holds = below_bound == 0 && alt_range == bound;
    Ok(LowerBoundReport {
        m: ext.m,
        n,
        delta: ext.delta.clone(),
        bound,
        step_cover,
        count_at_min,
        alternating_range: alt_range,
        below_bound,
        non_alternating_min,
        total_foldings,
        histogram: histogram
            .into_iter()
            .map(|(range, count)| HistogramBin { range, count })
            .collect(),
        holds,
    })
}

const CENSUS_SPLIT_DEPTH: usize = 8;

/// Range histogram over all `2^n` sign vectors (zero steps included in both
/// directions).
fn census<T: Exact>(scaled: &Scaled<T>) -> BTreeMap<Rational, u64> {
    let steps = &scaled.steps;
    let depth = CENSUS_SPLIT_DEPTH.min(steps.len());
    let parts: Vec<BTreeMap<T, u64>> = (0u64..1 << depth)
        .into_par_iter()
        .map(|bits| {
            let (mut s, mut lo, mut hi) = (T::zero(), T::zero(), T::zero());
            for (i, a) in steps[..depth].iter().enumerate() {
                s = if bits >> (depth - 1 - i) & 1 == 1 {
                    s + a.clone()
                } else {
                    s - a.clone()
                };
                lo = lo.min(s.clone());
                hi = hi.max(s.clone());
            }
            let mut hist = BTreeMap::new();
            census_from(&steps[depth..], s, lo, hi, &mut hist);
            hist
        })
        .collect();
    let mut merged: BTreeMap<T, u64> = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *merged.entry(k).or_default() += c;
        }
    }
    merged
        .into_iter()
        .map(|(k, c)| (scaled.to_rational(&k), c))
        .collect()
}

fn census_from<T: Exact>(steps: &[T], s: T, lo: T, hi: T, hist: &mut BTreeMap<T, u64>) {
    match steps.split_first() {
        None => *hist.entry(hi - lo).or_default() += 1,
        Some((a, rest)) => {
            for next in [s.clone() - a.clone(), s + a.clone()] {
                let nlo = lo.clone().min(next.clone());
                let nhi = hi.clone().max(next.clone());
                census_from(rest, next, nlo, nhi, hist);
            }
        }
    }
}

/// Minimum range over all foldings that agree with `fixed` (1-based index,
/// sign) at the given positions.
pub fn constrained_min_range(
    instance: &RulerInstance,
    fixed: &[(usize, Sign)],
    config: &SolverConfig,
) -> Result<Rational> {
    let n = instance.len();
    if let Some((i, _)) = fixed.iter().find(|(i, _)| *i == 0 || *i > n) {
        return Err(Error::invalid(format!("position {i} is outside 1..={n}")));
    }
    let free = n - fixed.len();
    if free > config.brute_force_limit {
        return Err(Error::SizeLimit(format!(
            "{free} free signs exceed the brute-force limit of {}",
            config.brute_force_limit
        )));
    }
    let allowed: Vec<Vec<Sign>> = (1..=n)
        .map(|i| match fixed.iter().find(|(j, _)| *j == i) {
            Some((_, s)) => vec![*s],
            None => vec![Sign::Minus, Sign::Plus],
        })
        .collect();

    fn walk(
        lengths: &[Rational],
        allowed: &[Vec<Sign>],
        s: Rational,
        lo: Rational,
        hi: Rational,
        best: &mut Option<Rational>,
    ) {
        let Some((a, rest)) = lengths.split_first() else {
            let r = hi - lo;
            if best.as_ref().is_none_or(|b| r < *b) {
                *best = Some(r);
            }
            return;
        };
        for sign in &allowed[0] {
            let next = match sign {
                Sign::Plus => &s + a,
                Sign::Minus => &s - a,
            };
            let nlo = lo.clone().min(next.clone());
            let nhi = hi.clone().max(next.clone());
            walk(rest, &allowed[1..], next, nlo, nhi, best);
        }
    }

    let mut best = None;
    let z = Rational::zero();
    walk(instance.lengths(), &allowed, z.clone(), z.clone(), z, &mut best);
    Ok(best.expect("at least one folding"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::reverse;
    use crate::rational::{int, ratio};

    #[test]
    fn m4_matches_worked_example() {
        let ext = build_extremal(4).unwrap();
        let expected = [
            (1, 1), (22, 23), (1, 1), (21, 23), (1, 1), (19, 23), (1, 1), (15, 23),
            (1, 1), (19, 23), (1, 1), (21, 23), (1, 1), (22, 23), (1, 1),
        ];
        assert_eq!(ext.instance, RulerInstance::from_ratios(&expected).unwrap());
        assert_eq!(ext.delta, ratio(1, 23));
    }

    #[test]
    fn small_m_substitutions() {
        let e1 = build_extremal(1).unwrap();
        assert_eq!(e1.delta, ratio(1, 2));
        assert_eq!(e1.instance.lengths(), &[int(1), ratio(1, 2), int(1)]);
        let e2 = build_extremal(2).unwrap();
        assert_eq!(e2.delta, ratio(1, 5));
        assert_eq!(
            e2.instance,
            RulerInstance::from_ratios(&[(1, 1), (4, 5), (1, 1), (3, 5), (1, 1), (4, 5), (1, 1)]).unwrap()
        );
        assert!(build_extremal(0).is_err());
    }

    #[test]
    fn alternating_ranges() {
        assert_eq!(alternating_range(&build_extremal(1).unwrap()), ratio(3, 2));
        assert_eq!(alternating_range(&build_extremal(2).unwrap()), ratio(9, 5));
        assert_eq!(alternating_range(&build_extremal(4).unwrap()), ratio(45, 23));
    }

    #[test]
    fn structure_for_many_m() {
        for m in 1..=12 {
            let ext = build_extremal(m).unwrap();
            let inst = &ext.instance;
            assert_eq!(inst.len() as u32, 4 * m - 1);
            assert_eq!(&reverse(inst), inst, "palindrome for m = {m}");
            assert!(inst.lengths().iter().all(|a| *a > int(0)));
            assert!(inst.is_merge_reduced());
            assert_eq!(inst.lengths()[2 * m as usize - 1], int(1) - rational::pow2(m - 1) * &ext.delta);
            // telescoped alternating range: 1 + (2^m + 2^(m-1) - 2) delta = 2 - delta
            let telescoped = int(1) + (rational::pow2(m) + rational::pow2(m - 1) - int(2)) * &ext.delta;
            assert_eq!(telescoped, ext.target());
            assert_eq!(alternating_range(&ext), ext.target());
        }
    }

    #[test]
    fn census_for_m1() {
        let ext = build_extremal(1).unwrap();
        let report = verify_lower_bound(&ext, &SolverConfig::default()).unwrap();
        assert_eq!(report.step_cover, ratio(3, 2));
        assert_eq!(report.total_foldings, 8);
        assert_eq!(report.below_bound, 0);
        assert!(report.holds);
        // +++ and --- have range 5/2
        let top = report.histogram.last().unwrap();
        assert_eq!(top.range, ratio(5, 2));
        assert_eq!(top.count, 2);
    }

    #[test]
    fn verification_respects_size_limit() {
        let ext = build_extremal(7).unwrap();
        assert!(matches!(
            verify_lower_bound(&ext, &SolverConfig::default()),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn non_alternating_middle_is_expensive() {
        // (e_7, e_8, e_9, e_10) = (+, -, +, +) already forces 2 + (2^3 - 2^2) delta
        let ext = build_extremal(4).unwrap();
        let fixed = [(7, Sign::Plus), (8, Sign::Minus), (9, Sign::Plus), (10, Sign::Plus)];
        let min = constrained_min_range(&ext.instance, &fixed, &SolverConfig::default()).unwrap();
        assert!(min >= int(2) + int(4) * &ext.delta);
        // and with (e_7..e_12) = (+,-,+,-,+,+): 2 + (2^3 + 2^2 - 2^1) delta
        let fixed = [
            (7, Sign::Plus), (8, Sign::Minus), (9, Sign::Plus),
            (10, Sign::Minus), (11, Sign::Plus), (12, Sign::Plus),
        ];
        let min = constrained_min_range(&ext.instance, &fixed, &SolverConfig::default()).unwrap();
        assert!(min >= int(2) + int(10) * &ext.delta);
    }

    #[test]
    fn all_plus_sums_lengths() {
        let ext = build_extremal(1).unwrap();
        let ev = evaluate_folding(&ext.instance, &"+++".parse().unwrap()).unwrap();
        assert_eq!(ev.range, ratio(5, 2));
    }
}
