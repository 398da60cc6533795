//! Integer partitions, the part-shift and multiset-sum operators, gap
//! predicates, and brute-force enumeration oracles.
//!
//! Everything here is deliberately naive: these are the ground-truth
//! counters that the graph and multisum machinery is checked against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::PartitionParseError;
use crate::series::Series;

/// A partition stored as a non-increasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Builds a partition from parts in any order. Zero parts are rejected.
    pub fn from_parts(mut parts: Vec<u32>) -> Result<Self, PartitionParseError> {
        if let Some(bad) = parts.iter().find(|&&p| p == 0) {
            return Err(PartitionParseError::BadPart(bad.to_string()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of parts.
    pub fn len(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of parts.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn largest(&self) -> Option<u32> {
        self.parts.first().copied()
    }

    pub fn smallest(&self) -> Option<u32> {
        self.parts.last().copied()
    }

    /// Adds `k` to every part.
    pub fn phi(&self, k: u32) -> Partition {
        Partition {
            parts: self.parts.iter().map(|p| p + k).collect(),
        }
    }

    /// Multiset union of parts.
    pub fn oplus(&self, other: &Partition) -> Partition {
        let mut parts = Vec::with_capacity(self.parts.len() + other.parts.len());
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            if self.parts[i] >= other.parts[j] {
                parts.push(self.parts[i]);
                i += 1;
            } else {
                parts.push(other.parts[j]);
                j += 1;
            }
        }
        parts.extend_from_slice(&self.parts[i..]);
        parts.extend_from_slice(&other.parts[j..]);
        Partition { parts }
    }

    /// The parts `<= s`.
    pub fn s_tail(&self, s: u32) -> Partition {
        Partition {
            parts: self.parts.iter().copied().filter(|&p| p <= s).collect(),
        }
    }

    /// The parts `> s`; `s_tail(s) ⊕ above(s)` is the original partition.
    pub fn above(&self, s: u32) -> Partition {
        Partition {
            parts: self.parts.iter().copied().filter(|&p| p > s).collect(),
        }
    }

    /// Difference at least `d` at distance `k`: `λ_j - λ_{j+k} >= d` for all
    /// valid `j`.
    pub fn satisfies_gap(&self, d: i64, k: usize) -> bool {
        assert!(k >= 1, "distance must be positive");
        self.parts
            .iter()
            .zip(self.parts.iter().skip(k))
            .all(|(&a, &b)| a as i64 - b as i64 >= d)
    }

    /// Gap 3 at distance 2, and any two consecutive parts differing by at
    /// most 1 have a sum divisible by 3.
    pub fn kr_i1(&self) -> bool {
        self.satisfies_gap(3, 2)
            && self
                .parts
                .windows(2)
                .all(|w| w[0] - w[1] > 1 || (w[0] + w[1]) % 3 == 0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("empty");
        }
        let text: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&text.join("+"))
    }
}

impl FromStr for Partition {
    type Err = PartitionParseError;

    /// Parses `a+b+c` (non-increasing) or `empty`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "empty" || s == "∅" {
            return Ok(Partition::empty());
        }
        if s.is_empty() {
            return Err(PartitionParseError::Blank);
        }
        let parts = s
            .split('+')
            .map(|t| match t.trim().parse::<u32>() {
                Ok(p) if p > 0 => Ok(p),
                _ => Err(PartitionParseError::BadPart(t.trim().to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionParseError::NotSorted(s.to_string()));
        }
        Ok(Partition { parts })
    }
}

/// Named partition predicates, as exposed by the `oracle` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    /// Difference at least `d` at distance `k`.
    Gap { d: i64, k: usize },
    KrI1,
    Always,
    Never,
}

impl Predicate {
    pub fn test(&self, p: &Partition) -> bool {
        match *self {
            Predicate::Gap { d, k } => p.satisfies_gap(d, k),
            Predicate::KrI1 => p.kr_i1(),
            Predicate::Always => true,
            Predicate::Never => false,
        }
    }
}

/// All partitions of `n`, in lexicographic order of their part lists.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for first in 1..=n.min(max) {
            prefix.push(first);
            go(n - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `sum x^{#λ} q^{|λ|}` over all partitions with `|λ| <= q_max` accepted by
/// `pred`, by exhaustive enumeration. Includes the empty partition when
/// `pred` accepts it.
pub fn oracle_genfun<F>(pred: F, q_max: u32) -> Series
where
    F: Fn(&Partition) -> bool,
{
    let terms = (0..=q_max)
        .flat_map(partitions_of)
        .filter(|p| pred(p))
        .map(|p| ((p.len(), p.size()), BigInt::one()));
    let mut s = Series::from_terms(q_max, q_max, terms);
    // the empty partition is always a member of an ideal
    if s.coeff(0, 0).map(|c| c.is_one()) != Ok(true) {
        s = &s + &Series::one(q_max, q_max);
    }
    s
}
