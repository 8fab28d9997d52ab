//! Exact step-cover solvers and the greedy folding.
//!
//! Both exact solvers return the same witness: the lexicographically smallest
//! optimal sign vector (with `-` before `+`) among those whose zero-length
//! steps carry `+`.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{evaluate_folding, FoldingEvaluation, RulerInstance, Sign, SignVector};
use crate::rational::{self, Rational};
use crate::scaled::{scale, Exact, Scaled, ScaledInstance};

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 24;

/// Prefix depth at which the parallel brute force splits work.
const PARALLEL_SPLIT_DEPTH: usize = 10;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Largest `n` the exhaustive solver accepts.
    pub brute_force_limit: usize,
    /// Optional cap on branch-and-bound search nodes.
    pub max_nodes: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            brute_force_limit: DEFAULT_BRUTE_FORCE_LIMIT,
            max_nodes: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCoverResult {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub witness: SignVector,
    pub explored: u64,
}

/// Exhaustive minimum over all `2^n` sign vectors.
pub fn brute_force_step_cover(instance: &RulerInstance) -> Result<StepCoverResult> {
    brute_force_with(instance, &SolverConfig::default())
}

pub fn brute_force_with(instance: &RulerInstance, config: &SolverConfig) -> Result<StepCoverResult> {
    check_brute_force_size(instance, config)?;
    Ok(match scale(instance) {
        ScaledInstance::Small(s) => exhaustive(&s, 0, Vec::new(), 0, 0, 0),
        ScaledInstance::Big(s) => {
            let zero = num_bigint::BigInt::zero();
            exhaustive(&s, 0, Vec::new(), zero.clone(), zero.clone(), zero)
        }
    })
}

/// Same contract as [`brute_force_step_cover`], with the search split over
/// fixed sign prefixes and reduced in prefix order.
pub fn brute_force_step_cover_parallel(
    instance: &RulerInstance,
    config: &SolverConfig,
) -> Result<StepCoverResult> {
    check_brute_force_size(instance, config)?;
    Ok(match scale(instance) {
        ScaledInstance::Small(s) => exhaustive_parallel(&s),
        ScaledInstance::Big(s) => exhaustive_parallel(&s),
    })
}

fn check_brute_force_size(instance: &RulerInstance, config: &SolverConfig) -> Result<()> {
    if instance.len() > config.brute_force_limit {
        return Err(Error::SizeLimit(format!(
            "brute force is limited to n <= {} but n = {}; use branch_and_bound_step_cover",
            config.brute_force_limit,
            instance.len()
        )));
    }
    Ok(())
}

/// Candidate signs at a position, in lexicographic order.
fn choices<T: Exact>(a: &T) -> &'static [Sign] {
    if a.is_zero() {
        &[Sign::Plus]
    } else {
        &[Sign::Minus, Sign::Plus]
    }
}

fn step<T: Exact>(s: &T, a: &T, sign: Sign) -> T {
    match sign {
        Sign::Plus => s.clone() + a.clone(),
        Sign::Minus => s.clone() - a.clone(),
    }
}

struct Exhaustive<'a, T> {
    steps: &'a [T],
    current: Vec<Sign>,
    best: Option<(T, Vec<Sign>)>,
    explored: u64,
}

impl<T: Exact> Exhaustive<'_, T> {
    fn visit(&mut self, s: T, lo: T, hi: T) {
        self.explored += 1;
        let i = self.current.len();
        if i == self.steps.len() {
            let range = hi - lo;
            if self.best.as_ref().is_none_or(|(b, _)| range < *b) {
                self.best = Some((range, self.current.clone()));
            }
            return;
        }
        let a = &self.steps[i];
        for &sign in choices(a) {
            let next = step(&s, a, sign);
            let lo = lo.clone().min(next.clone());
            let hi = hi.clone().max(next.clone());
            self.current.push(sign);
            self.visit(next, lo, hi);
            self.current.pop();
        }
    }
}

fn exhaustive<T: Exact>(
    scaled: &Scaled<T>,
    explored_before: u64,
    prefix: Vec<Sign>,
    s: T,
    lo: T,
    hi: T,
) -> StepCoverResult {
    let (best, explored) = exhaustive_from(&scaled.steps, prefix, s, lo, hi);
    let (value, witness) = best.expect("at least one leaf");
    StepCoverResult {
        value: scaled.to_rational(&value),
        witness: SignVector(witness),
        explored: explored_before + explored,
    }
}

fn exhaustive_from<T: Exact>(
    steps: &[T],
    prefix: Vec<Sign>,
    s: T,
    lo: T,
    hi: T,
) -> (Option<(T, Vec<Sign>)>, u64) {
    let mut search = Exhaustive {
        steps,
        current: prefix,
        best: None,
        explored: 0,
    };
    search.visit(s, lo, hi);
    (search.best, search.explored)
}

struct Prefix<T> {
    signs: Vec<Sign>,
    s: T,
    lo: T,
    hi: T,
}

/// Canonical sign prefixes of length `depth`, in lexicographic order.
fn prefixes<T: Exact>(steps: &[T], depth: usize) -> Vec<Prefix<T>> {
    let mut out = vec![Prefix {
        signs: Vec::new(),
        s: T::zero(),
        lo: T::zero(),
        hi: T::zero(),
    }];
    for a in &steps[..depth] {
        out = out
            .into_iter()
            .flat_map(|p| {
                choices(a).iter().map(move |&sign| {
                    let next = step(&p.s, a, sign);
                    let mut signs = p.signs.clone();
                    signs.push(sign);
                    Prefix {
                        signs,
                        lo: p.lo.clone().min(next.clone()),
                        hi: p.hi.clone().max(next.clone()),
                        s: next,
                    }
                })
            })
            .collect();
    }
    out
}

fn exhaustive_parallel<T: Exact>(scaled: &Scaled<T>) -> StepCoverResult {
    let depth = PARALLEL_SPLIT_DEPTH.min(scaled.steps.len());
    let parts: Vec<_> = prefixes(&scaled.steps, depth)
        .into_par_iter()
        .map(|p| exhaustive_from(&scaled.steps, p.signs, p.s, p.lo, p.hi))
        .collect();
    let mut explored = 0;
    let mut best: Option<(T, Vec<Sign>)> = None;
    for (part, n) in parts {
        explored += n;
        if let Some((v, w)) = part {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, w));
            }
        }
    }
    let (value, witness) = best.expect("at least one leaf");
    StepCoverResult {
        value: scaled.to_rational(&value),
        witness: SignVector(witness),
        explored,
    }
}

/// Exact step-cover by depth-first branch and bound.
///
/// The first pass finds the optimal value: it fixes the first nonzero step to
/// `+` (global flip symmetry), tries `+` before `-`, starts from the greedy
/// range as incumbent, and cuts a branch once its partial range (or the
/// longest remaining step) reaches the incumbent. The second pass recovers the
/// canonical witness by searching in lexicographic order for the first folding
/// whose range does not exceed that value. An optimal canonical vector can
/// always be flipped to start with `-` at its first nonzero step, so that
/// step is fixed to `-` there.
pub fn branch_and_bound_step_cover(instance: &RulerInstance) -> StepCoverResult {
    branch_and_bound_with(instance, &SolverConfig::default())
        .expect("no node limit configured")
}

pub fn branch_and_bound_with(instance: &RulerInstance, config: &SolverConfig) -> Result<StepCoverResult> {
    let (_, greedy) = greedy_fold(instance);
    match scale(instance) {
        ScaledInstance::Small(s) => bnb(&s, &greedy.range, config),
        ScaledInstance::Big(s) => bnb(&s, &greedy.range, config),
    }
}

struct Bnb<'a, T> {
    steps: &'a [T],
    /// `suffix_max[i]` is the longest step among `i..n`; any completion has
    /// at least that range.
    suffix_max: Vec<T>,
    first_nonzero: Option<usize>,
    explored: u64,
    max_nodes: Option<u64>,
}

impl<'a, T: Exact> Bnb<'a, T> {
    fn new(steps: &'a [T], max_nodes: Option<u64>) -> Self {
        let mut suffix_max = vec![T::zero(); steps.len() + 1];
        for i in (0..steps.len()).rev() {
            suffix_max[i] = suffix_max[i + 1].clone().max(steps[i].clone());
        }
        Bnb {
            steps,
            suffix_max,
            first_nonzero: steps.iter().position(|a| !a.is_zero()),
            explored: 0,
            max_nodes,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.explored += 1;
        match self.max_nodes {
            Some(cap) if self.explored > cap => Err(Error::SizeLimit(format!(
                "branch and bound exceeded the node limit of {cap}"
            ))),
            _ => Ok(()),
        }
    }

    fn bound(&self, i: usize, lo: &T, hi: &T) -> T {
        (hi.clone() - lo.clone()).max(self.suffix_max[i].clone())
    }

    /// Lowers `incumbent` whenever a strictly better leaf is found.
    fn improve(&mut self, i: usize, s: T, lo: T, hi: T, incumbent: &mut T) -> Result<()> {
        self.tick()?;
        if self.bound(i, &lo, &hi) >= *incumbent {
            return Ok(());
        }
        if i == self.steps.len() {
            *incumbent = hi - lo;
            return Ok(());
        }
        let a = self.steps[i].clone();
        let order: &[Sign] = if a.is_zero() || Some(i) == self.first_nonzero {
            &[Sign::Plus]
        } else {
            &[Sign::Plus, Sign::Minus]
        };
        for &sign in order {
            let next = step(&s, &a, sign);
            let nlo = lo.clone().min(next.clone());
            let nhi = hi.clone().max(next.clone());
            self.improve(i + 1, next, nlo, nhi, incumbent)?;
        }
        Ok(())
    }

    /// First canonical folding in lexicographic order with range `<= target`.
    fn first_within(
        &mut self,
        i: usize,
        s: T,
        lo: T,
        hi: T,
        target: &T,
        path: &mut Vec<Sign>,
    ) -> Result<bool> {
        self.tick()?;
        if self.bound(i, &lo, &hi) > *target {
            return Ok(false);
        }
        if i == self.steps.len() {
            return Ok(true);
        }
        let a = self.steps[i].clone();
        let order: &[Sign] = if a.is_zero() {
            &[Sign::Plus]
        } else if Some(i) == self.first_nonzero {
            &[Sign::Minus]
        } else {
            &[Sign::Minus, Sign::Plus]
        };
        for &sign in order {
            let next = step(&s, &a, sign);
            let nlo = lo.clone().min(next.clone());
            let nhi = hi.clone().max(next.clone());
            path.push(sign);
            if self.first_within(i + 1, next, nlo, nhi, target, path)? {
                return Ok(true);
            }
            path.pop();
        }
        Ok(false)
    }
}

fn bnb<T: Exact>(scaled: &Scaled<T>, greedy_range: &Rational, config: &SolverConfig) -> Result<StepCoverResult> {
    let mut search = Bnb::new(&scaled.steps, config.max_nodes);
    let greedy = scaled.scaled_integer(greedy_range);
    let mut incumbent = T::from_bigint(&greedy).expect("greedy range fits the scaled bound");
    let zero = T::zero();
    search.improve(0, zero.clone(), zero.clone(), zero.clone(), &mut incumbent)?;

    let mut path = Vec::with_capacity(scaled.steps.len());
    let found = search.first_within(0, zero.clone(), zero.clone(), zero, &incumbent, &mut path)?;
    debug_assert!(found, "the optimum is attained by some folding");
    Ok(StepCoverResult {
        value: scaled.to_rational(&incumbent),
        witness: SignVector(path),
        explored: search.explored,
    })
}

/// Greedy folding keeping every prefix sum in `[-1, 1]`: step toward zero,
/// and step `+` when the current sum is exactly zero.
///
/// Zero-length steps are reported with `+`.
pub fn greedy_fold(instance: &RulerInstance) -> (SignVector, FoldingEvaluation) {
    let mut s = Rational::zero();
    let signs: Vec<Sign> = instance
        .lengths()
        .iter()
        .map(|a| {
            let sign = if a.is_zero() || !s.is_positive() {
                Sign::Plus
            } else {
                Sign::Minus
            };
            match sign {
                Sign::Plus => s += a,
                Sign::Minus => s -= a,
            }
            sign
        })
        .collect();
    let signs = SignVector(signs);
    let eval = evaluate_folding(instance, &signs).expect("lengths match by construction");
    (signs, eval)
}
