//! Heuristic lower bounds on the fit: the largest step-cover over all
//! length vectors of a given size.
//!
//! The fit is a maximum over a continuum, so this module only ever reports
//! lower bounds. Candidates live on rational grids with denominators `2^k`;
//! every candidate is scored with the exact solver.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::default_epsilon;
use crate::error::{Error, Result};
use crate::extremal::build_extremal;
use crate::instance::{pad_with_zeros, RulerInstance};
use crate::rational::{self, Rational};
use crate::solvers::{branch_and_bound_step_cover, DEFAULT_BRUTE_FORCE_LIMIT};

/// Largest grid exponent used by restarts (denominator `2^MAX_GRID_LEVEL`).
const MAX_GRID_LEVEL: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Grid,
    Local,
    ExtremalSeeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitEstimate {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub best_value: Rational,
    pub best_instance: RulerInstance,
    pub method: SearchMethod,
    pub iterations: u64,
    pub seed: u64,
}

#[derive(Clone)]
struct Candidate {
    instance: RulerInstance,
    value: Rational,
    method: SearchMethod,
}

impl Candidate {
    /// Higher value wins; ties go to the lexicographically smaller instance.
    fn beats(&self, other: &Candidate) -> bool {
        self.value > other.value || (self.value == other.value && self.instance < other.instance)
    }
}

struct Search {
    budget: u64,
    iterations: u64,
    rng: ChaCha8Rng,
}

impl Search {
    fn exhausted(&self) -> bool {
        self.iterations >= self.budget
    }

    fn score(&mut self, instance: RulerInstance, method: SearchMethod) -> Candidate {
        self.iterations += 1;
        let value = branch_and_bound_step_cover(&instance).value;
        Candidate { instance, value, method }
    }

    fn random_instance(&mut self, n: usize, den: i64) -> RulerInstance {
        let lengths = (0..n)
            .map(|_| rational::ratio(self.rng.random_range(0..=den), den))
            .collect();
        RulerInstance::new(lengths).expect("grid points lie in [0, 1]")
    }

    /// Coordinate moves of one grid unit, accepting strict improvement or an
    /// equal value at a lexicographically smaller instance.
    fn climb(&mut self, mut current: Candidate, den: i64) -> Candidate {
        let unit = rational::ratio(1, den);
        let start_value = current.value.clone();
        let n = current.instance.len();
        'outer: loop {
            for i in 0..n {
                for dir in [-1i64, 1] {
                    if self.exhausted() {
                        break 'outer;
                    }
                    let mut lengths = current.instance.lengths().to_vec();
                    let moved = &lengths[i] + &unit * rational::int(dir);
                    let moved = moved.clamp(Rational::zero(), Rational::one());
                    if moved == lengths[i] {
                        continue;
                    }
                    lengths[i] = moved;
                    let inst = RulerInstance::new(lengths).expect("clamped to [0, 1]");
                    let cand = self.score(inst, current.method);
                    if cand.beats(&current) {
                        current = cand;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        if current.value > start_value {
            current.method = SearchMethod::Local;
        }
        current
    }
}

/// Seed instances that are always scored: the all-ones ruler and, when it
/// fits, the largest extremal instance padded with zeros to length `n`.
fn seeds(n: usize) -> Vec<RulerInstance> {
    let mut out = vec![RulerInstance::new(vec![Rational::one(); n]).expect("n >= 1")];
    let m = (n + 1) / 4;
    if m >= 1 {
        let ext = build_extremal(m as u32).expect("m >= 1");
        out.push(pad_with_zeros(&ext.instance, n - ext.instance.len()));
    }
    out
}

/// Extremal lower bound `2 - 1/(3 * 2^(m-1) - 1)` with `m = floor((n+1)/4)`,
/// or `None` when `n < 3`.
pub fn extremal_lower_bound(n: usize) -> Option<Rational> {
    let m = (n + 1) / 4;
    (m >= 1).then(|| build_extremal(m as u32).expect("m >= 1").target())
}

/// Upper bound `2 - 1/(2^(m+3) - 7)` for `n = 4m`, otherwise `2`.
pub fn upper_bound(n: usize) -> Rational {
    if n.is_multiple_of(4) && n > 0 {
        rational::two() - default_epsilon(n / 4)
    } else {
        rational::two()
    }
}

pub fn fit_lower_bound_search(n: usize, budget: u64, seed: u64) -> Result<FitEstimate> {
    fit_lower_bound_search_from(n, budget, seed, &[])
}

/// Like [`fit_lower_bound_search`], additionally scoring `extra` seeds
/// (each must have length `n`).
pub fn fit_lower_bound_search_from(
    n: usize,
    budget: u64,
    seed: u64,
    extra: &[RulerInstance],
) -> Result<FitEstimate> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if n > DEFAULT_BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit(format!(
            "fit search scores candidates exactly and is limited to n <= {DEFAULT_BRUTE_FORCE_LIMIT}"
        )));
    }
    if let Some(bad) = extra.iter().find(|e| e.len() != n) {
        return Err(Error::invalid(format!("seed instance has n = {} instead of {n}", bad.len())));
    }
    let mut search = Search {
        budget,
        iterations: 0,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };

    let mut best: Option<Candidate> = None;
    let consider = |c: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            *best = Some(c);
        }
    };
    for s in seeds(n).into_iter().chain(extra.iter().cloned()) {
        let c = search.score(s, SearchMethod::ExtremalSeeded);
        consider(c, &mut best);
    }

    let mut restart: u64 = 0;
    while !search.exhausted() {
        // levels 1..=L, with L growing by one every L restarts
        let cap = (1 + (restart as f64).sqrt() as u32).min(MAX_GRID_LEVEL);
        let level = 1 + (restart % u64::from(cap)) as u32;
        let den = 1i64 << level;
        restart += 1;

        let start = search.random_instance(n, den);
        let cand = search.score(start, SearchMethod::Grid);
        let climbed = search.climb(cand, den);
        consider(climbed, &mut best);

        // refine the champion on the current grid every few restarts
        if restart.is_multiple_of(4) && !search.exhausted() {
            let champ = best.clone().expect("seeded");
            let refined = search.climb(champ, den);
            consider(refined, &mut best);
        }
    }

    let best = best.expect("seeds are always scored");
    Ok(FitEstimate {
        n,
        best_value: best.value,
        best_instance: best.instance,
        method: best.method,
        iterations: search.iterations,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Estimates sorted by `n`, with deficient entries replaced by the padded
    /// champion of `n - 1`.
    pub estimates: Vec<FitEstimate>,
    /// Sizes whose estimate fell below the estimate for `n - 1`.
    pub repaired: Vec<usize>,
    /// Sizes where padding the previous champion changed its step-cover.
    /// Always empty unless the solver is broken.
    pub padding_mismatches: Vec<usize>,
    /// Sizes whose estimate exceeds the proven upper bound.
    pub upper_bound_violations: Vec<usize>,
}

impl MonotonicityReport {
    pub fn consistent(&self) -> bool {
        self.padding_mismatches.is_empty() && self.upper_bound_violations.is_empty()
    }
}

/// Checks that estimates do not decrease with `n`, repairing any that do by
/// padding the previous champion with a zero.
pub fn fit_monotonicity_check(results: &[FitEstimate]) -> Result<MonotonicityReport> {
    let mut estimates = results.to_vec();
    estimates.sort_by_key(|e| e.n);
    if estimates.windows(2).any(|w| w[1].n != w[0].n + 1) {
        return Err(Error::invalid("estimates must cover consecutive sizes"));
    }
    let mut repaired = Vec::new();
    let mut padding_mismatches = Vec::new();
    for i in 1..estimates.len() {
        let prev = estimates[i - 1].clone();
        let padded = pad_with_zeros(&prev.best_instance, 1);
        let padded_value = branch_and_bound_step_cover(&padded).value;
        if padded_value != prev.best_value {
            padding_mismatches.push(prev.n + 1);
        }
        let cur = &mut estimates[i];
        if cur.best_value < padded_value {
            repaired.push(cur.n);
            cur.best_value = padded_value;
            cur.best_instance = padded;
            cur.method = prev.method;
        }
    }
    let upper_bound_violations = estimates
        .iter()
        .filter(|e| e.best_value > upper_bound(e.n))
        .map(|e| e.n)
        .collect();
    Ok(MonotonicityReport {
        estimates,
        repaired,
        padding_mismatches,
        upper_bound_violations,
    })
}
