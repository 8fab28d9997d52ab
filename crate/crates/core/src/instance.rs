//! Ruler instances, foldings and their evaluation.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Direction of one segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

/// A folding: one direction per segment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|s| s.flip()).collect())
    }

    /// `e_i = (-1)^(i+1)` for 1-based `i`, i.e. `+ - + - ...`.
    pub fn alternating(n: usize) -> SignVector {
        SignVector(
            (0..n)
                .map(|i| if i % 2 == 0 { Sign::Plus } else { Sign::Minus })
                .collect(),
        )
    }

    /// Forces the sign of every zero-length step to `+`.
    pub fn canonicalize_zeros(&mut self, instance: &RulerInstance) {
        for (s, a) in self.0.iter_mut().zip(instance.lengths()) {
            if a.is_zero() {
                *s = Sign::Plus;
            }
        }
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;

    /// Accepts `+`/`-` (or `−`), ignoring commas, spaces and parentheses.
    fn from_str(text: &str) -> Result<SignVector> {
        let mut signs = Vec::new();
        for c in text.chars() {
            match c {
                '+' => signs.push(Sign::Plus),
                '-' | '−' => signs.push(Sign::Minus),
                ',' | '(' | ')' | '[' | ']' => {}
                c if c.is_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in sign string"))),
            }
        }
        if signs.is_empty() {
            return Err(Error::Parse("empty sign string".into()));
        }
        Ok(SignVector(signs))
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Segment lengths `a_1..a_n`, each in `[0, 1]`, with `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct RulerInstance {
    lengths: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    #[serde(with = "rational::serde_vec")]
    lengths: Vec<Rational>,
}

impl TryFrom<InstanceFile> for RulerInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        RulerInstance::new(file.lengths)
    }
}

impl From<RulerInstance> for InstanceFile {
    fn from(inst: RulerInstance) -> Self {
        InstanceFile { lengths: inst.lengths }
    }
}

impl RulerInstance {
    pub fn new(lengths: Vec<Rational>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::invalid("instance must have at least one segment"));
        }
        if let Some((i, a)) = lengths
            .iter()
            .enumerate()
            .find(|(_, a)| !rational::in_unit_interval(a))
        {
            return Err(Error::invalid(format!(
                "length a_{} = {} lies outside [0, 1]",
                i + 1,
                a
            )));
        }
        Ok(RulerInstance { lengths })
    }

    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        RulerInstance::new(pairs.iter().map(|&(p, q)| rational::ratio(p, q)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization is infallible")
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    /// Always false; instances are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn max_length(&self) -> &Rational {
        self.lengths.iter().max().expect("non-empty")
    }

    /// True when every adjacent pair sums to more than one (or `n == 1`).
    pub fn is_merge_reduced(&self) -> bool {
        self.lengths
            .windows(2)
            .all(|w| &w[0] + &w[1] > Rational::one())
    }
}

impl fmt::Display for RulerInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.lengths.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Prefix sums of a folding together with their extremes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingEvaluation {
    #[serde(with = "rational::serde_vec")]
    pub prefix_sums: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub max_s: Rational,
    #[serde(with = "rational::serde_str")]
    pub min_s: Rational,
    #[serde(with = "rational::serde_str")]
    pub range: Rational,
}

/// Computes `s_0 = 0, s_i = s_{i-1} + e_i a_i` and the range `max s - min s`.
pub fn evaluate_folding(instance: &RulerInstance, signs: &SignVector) -> Result<FoldingEvaluation> {
    if instance.len() != signs.len() {
        return Err(Error::invalid(format!(
            "instance has {} segments but {} signs were given",
            instance.len(),
            signs.len()
        )));
    }
    let mut prefix_sums = Vec::with_capacity(instance.len() + 1);
    let mut s = Rational::zero();
    prefix_sums.push(s.clone());
    for (a, e) in instance.lengths().iter().zip(signs.signs()) {
        match e {
            Sign::Plus => s += a,
            Sign::Minus => s -= a,
        }
        prefix_sums.push(s.clone());
    }
    let max_s = prefix_sums.iter().max().expect("s_0 exists").clone();
    let min_s = prefix_sums.iter().min().expect("s_0 exists").clone();
    let range = &max_s - &min_s;
    Ok(FoldingEvaluation {
        prefix_sums,
        max_s,
        min_s,
        range,
    })
}

/// Appends `k` zero-length segments.
pub fn pad_with_zeros(instance: &RulerInstance, k: usize) -> RulerInstance {
    let mut lengths = instance.lengths.clone();
    lengths.extend(std::iter::repeat_n(Rational::zero(), k));
    RulerInstance { lengths }
}

/// While some adjacent pair has `a_i + a_{i+1} <= 1`, replaces the leftmost
/// such pair by its sum and appends a unit segment, so `n` is preserved.
///
/// Each merge raises the total length by one and the total never exceeds
/// `n`, so at most `n` merges happen.
pub fn merge_reduce(instance: &RulerInstance) -> RulerInstance {
    let one = Rational::one();
    let mut lengths = instance.lengths.clone();
    while let Some(i) = lengths.windows(2).position(|w| &w[0] + &w[1] <= one) {
        let next = lengths.remove(i + 1);
        lengths[i] += next;
        lengths.push(one.clone());
    }
    RulerInstance { lengths }
}

pub fn reverse(instance: &RulerInstance) -> RulerInstance {
    let mut lengths = instance.lengths.clone();
    lengths.reverse();
    RulerInstance { lengths }
}
