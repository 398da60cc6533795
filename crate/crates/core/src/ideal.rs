//! Span-one linked partition ideals and their associated directed graphs.
//!
//! An ideal is a finite alphabet `Π = [π_1 = ∅, π_2, …, π_K]` of partitions,
//! a linking set for each letter, and a shift `S`. Members are the partitions
//! `λ_0 ⊕ φ^S(λ_1) ⊕ φ^{2S}(λ_2) ⊕ ⋯` built from chains with
//! `λ_k ∈ ℒ(λ_{k-1})`.
//!
//! Three independent routes to the generating function live here:
//! [`ideal_genfun_vec`] (a truncated product of transfer matrices),
//! [`enumerate_members`] (a depth-first walk over chains) and, in
//! [`crate::partition`], predicate-based brute force.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::partition::Partition;
use crate::series::{Monomial, Series};

/// A single reason an ideal description is invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealViolation {
    NoLetters,
    FirstNotEmpty,
    DuplicateLetter { first: usize, second: usize },
    LinkingArity { letters: usize, sets: usize },
    IndexOutOfRange { letter: usize, index: usize },
    EmptyLinkingIncomplete,
    MissingEmpty { letter: usize },
    ShiftTooSmall { shift: u32, largest: u32 },
    ZeroShift,
    ZeroIndex { letter: usize },
}

impl fmt::Display for IdealViolation {
    /// Letter indices are printed 1-based, matching the file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealViolation::NoLetters => write!(f, "the alphabet is empty"),
            IdealViolation::FirstNotEmpty => write!(f, "pi[1] must be the empty partition"),
            IdealViolation::DuplicateLetter { first, second } => {
                write!(f, "pi[{}] and pi[{}] are the same partition", first + 1, second + 1)
            }
            IdealViolation::LinkingArity { letters, sets } => {
                write!(f, "{letters} letters but {sets} linking sets")
            }
            IdealViolation::IndexOutOfRange { letter, index } => {
                write!(f, "linking set of pi[{}] names unknown index {}", letter + 1, index + 1)
            }
            IdealViolation::EmptyLinkingIncomplete => {
                write!(f, "the linking set of the empty partition must be all of Pi")
            }
            IdealViolation::MissingEmpty { letter } => {
                write!(f, "the linking set of pi[{}] does not contain the empty partition", letter + 1)
            }
            IdealViolation::ShiftTooSmall { shift, largest } => {
                write!(f, "shift S = {shift} is smaller than the largest part {largest}")
            }
            IdealViolation::ZeroShift => write!(f, "shift S must be positive"),
            IdealViolation::ZeroIndex { letter } => {
                write!(f, "linking set of pi[{}] contains 0; indices are 1-based", letter + 1)
            }
        }
    }
}

/// `ℐ(⟨Π, ℒ⟩, S)`. Indices are zero-based in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanOneIdeal {
    pub pi: Vec<Partition>,
    pub linking: Vec<Vec<usize>>,
    pub shift: u32,
}

impl SpanOneIdeal {
    pub fn new(pi: Vec<Partition>, linking: Vec<Vec<usize>>, shift: u32) -> Result<Self, Vec<IdealViolation>> {
        let ideal = SpanOneIdeal { pi, linking, shift };
        ideal.validate()?;
        Ok(ideal)
    }

    /// The trivial ideal `Π = {∅}` whose only member is `∅`.
    pub fn trivial(shift: u32) -> Self {
        SpanOneIdeal {
            pi: vec![Partition::empty()],
            linking: vec![vec![0]],
            shift,
        }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Checks every structural requirement and reports all violations.
    pub fn validate(&self) -> Result<(), Vec<IdealViolation>> {
        let mut errs = Vec::new();
        let k = self.pi.len();
        if k == 0 {
            return Err(vec![IdealViolation::NoLetters]);
        }
        if self.shift == 0 {
            errs.push(IdealViolation::ZeroShift);
        }
        if !self.pi[0].is_empty() {
            errs.push(IdealViolation::FirstNotEmpty);
        }
        for i in 0..k {
            for j in i + 1..k {
                if self.pi[i] == self.pi[j] {
                    errs.push(IdealViolation::DuplicateLetter { first: i, second: j });
                }
            }
        }
        if self.linking.len() != k {
            errs.push(IdealViolation::LinkingArity {
                letters: k,
                sets: self.linking.len(),
            });
        } else {
            for (letter, set) in self.linking.iter().enumerate() {
                for &index in set {
                    if index >= k {
                        errs.push(IdealViolation::IndexOutOfRange { letter, index });
                    }
                }
                if !set.contains(&0) {
                    errs.push(IdealViolation::MissingEmpty { letter });
                }
            }
            if (0..k).any(|j| !self.linking[0].contains(&j)) {
                errs.push(IdealViolation::EmptyLinkingIncomplete);
            }
        }
        let largest = self.pi.iter().filter_map(Partition::largest).max().unwrap_or(0);
        if self.shift != 0 && largest > self.shift {
            errs.push(IdealViolation::ShiftTooSmall {
                shift: self.shift,
                largest,
            });
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.pi.iter().position(|q| q == p)
    }

    /// Whether `π_to ∈ ℒ(π_from)`.
    pub fn links(&self, from: usize, to: usize) -> bool {
        self.linking[from].contains(&to)
    }

    pub fn associated_graph(&self) -> Digraph {
        let k = self.pi.len();
        Digraph {
            adjacency: (0..k)
                .map(|i| (0..k).map(|j| self.links(i, j)).collect())
                .collect(),
            weights: self.pi.iter().map(|p| Monomial::new(p.len(), p.size())).collect(),
        }
    }
}

/// Vertex-weighted directed graph with at most one edge per ordered pair.
///
/// Each vertex carries a length and a size, stored together as the monomial
/// `x^{length} q^{size}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub adjacency: Vec<Vec<bool>>,
    pub weights: Vec<Monomial>,
}

impl Digraph {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        self.adjacency
            .iter()
            .map(|row| row.iter().map(|&b| b as u8).collect())
            .collect()
    }

    /// Diagonal of `𝒲(x)`.
    pub fn weight_diag(&self) -> &[Monomial] {
        &self.weights
    }

    /// Whether vertex 1 is an empty vertex that every vertex points to, and
    /// every other vertex has positive length and size.
    pub fn is_modified(&self) -> bool {
        !self.weights.is_empty()
            && self.weights[0] == Monomial::ONE
            && self.weights[1..].iter().all(|w| w.x >= 1 && w.q >= 1)
            && self.adjacency.iter().all(|row| row[0])
    }
}

/// Coefficient types for walk products: symbolic [`Series`] or plain
/// integers (every monomial evaluated at `x = q = 1`).
pub trait WalkWeight: Clone {
    fn zero_like(&self) -> Self;
    fn accumulate(&mut self, other: &Self);
    /// `self · (x q^{level·shift})^{w.x} q^{w.q}`.
    fn weigh(&self, w: Monomial, level: u32, shift: u32) -> Self;
}

impl WalkWeight for Series {
    fn zero_like(&self) -> Self {
        Series::zero(self.x_max(), self.q_max())
    }

    fn accumulate(&mut self, other: &Self) {
        *self = &*self + other;
    }

    fn weigh(&self, w: Monomial, level: u32, shift: u32) -> Self {
        self.mul_monomial(Monomial::new(w.x, w.q + level * shift * w.x))
    }
}

impl WalkWeight for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }

    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }

    fn weigh(&self, _w: Monomial, _level: u32, _shift: u32) -> Self {
        self.clone()
    }
}

/// `𝒲(x)·𝒜·𝒲(xq^S)·𝒜·⋯·𝒜·𝒲(xq^{MS})` over any [`WalkWeight`], starting
/// from the identity element `unit`.
pub fn walk_product<W: WalkWeight>(g: &Digraph, steps: u32, shift: u32, unit: &W) -> Vec<Vec<W>> {
    let k = g.len();
    let zero = unit.zero_like();
    let mut mat: Vec<Vec<W>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { unit.weigh(g.weights[i], 0, shift) } else { zero.clone() })
                .collect()
        })
        .collect();
    for level in 1..=steps {
        let mut next = vec![vec![zero.clone(); k]; k];
        for (i, row) in mat.iter().enumerate() {
            for (j, slot) in next[i].iter_mut().enumerate() {
                let mut acc = zero.clone();
                for (l, entry) in row.iter().enumerate() {
                    if g.adjacency[l][j] {
                        acc.accumulate(entry);
                    }
                }
                *slot = acc.weigh(g.weights[j], level, shift);
            }
        }
        mat = next;
    }
    mat
}

/// Walk generating functions `𝒢_{i,j}(𝒲_M | x)` of a vertex-weighted graph.
pub fn walk_genfun_matrix(g: &Digraph, steps: u32, shift: u32, x_max: u32, q_max: u32) -> Vec<Vec<Series>> {
    walk_product(g, steps, shift, &Series::one(x_max, q_max))
}

/// Number of product factors after which the truncated product is stable:
/// a non-empty vertex at level `m` carries q-order at least `mS + 1`.
pub fn stable_levels(shift: u32, q_max: u32) -> u32 {
    q_max.div_ceil(shift) + 1
}

/// `(𝒢_1, …, 𝒢_K)` truncated at the given orders.
pub fn ideal_genfun_vec(ideal: &SpanOneIdeal, x_max: u32, q_max: u32) -> Vec<Series> {
    ideal_genfun_vec_with_levels(ideal, stable_levels(ideal.shift, q_max), x_max, q_max)
}

/// As [`ideal_genfun_vec`] with an explicit number of transfer factors,
/// applied right to left against `(1, 0, …, 0)ᵀ`.
pub fn ideal_genfun_vec_with_levels(ideal: &SpanOneIdeal, levels: u32, x_max: u32, q_max: u32) -> Vec<Series> {
    let g = ideal.associated_graph();
    let k = g.len();
    let mut v = vec![Series::zero(x_max, q_max); k];
    v[0] = Series::one(x_max, q_max);
    for level in (1..=levels).rev() {
        let weighted: Vec<Series> = v
            .iter()
            .zip(&g.weights)
            .map(|(s, &w)| s.weigh(w, level, ideal.shift))
            .collect();
        v = (0..k)
            .map(|i| {
                let mut acc = Series::zero(x_max, q_max);
                for (j, s) in weighted.iter().enumerate() {
                    if g.adjacency[i][j] {
                        acc = &acc + s;
                    }
                }
                acc
            })
            .collect();
    }
    v.iter()
        .zip(&g.weights)
        .map(|(s, &w)| s.weigh(w, 0, ideal.shift))
        .collect()
}

/// Decomposes `λ` into blocks of parts in `(mS, (m+1)S]`, each de-shifted
/// by `φ^{-mS}`, and returns the chain of letter indices when `λ` is a
/// member. The chain is empty for `λ = ∅` and otherwise ends at a non-empty
/// letter.
pub fn contains(ideal: &SpanOneIdeal, lambda: &Partition) -> Option<Vec<usize>> {
    let s = ideal.shift;
    let Some(top) = lambda.largest() else {
        return Some(Vec::new());
    };
    let blocks = (top - 1) / s + 1;
    let mut chain = Vec::with_capacity(blocks as usize);
    for m in 0..blocks {
        let (lo, hi) = (m * s, (m + 1) * s);
        let parts: Vec<u32> = lambda
            .parts()
            .iter()
            .copied()
            .filter(|&p| p > lo && p <= hi)
            .map(|p| p - lo)
            .collect();
        let block = Partition::from_parts(parts).ok()?;
        let idx = ideal.index_of(&block)?;
        if let Some(&prev) = chain.last() {
            if !ideal.links(prev, idx) {
                return None;
            }
        }
        chain.push(idx);
    }
    Some(chain)
}

/// Members of an ideal up to a size bound, found by walking chains.
#[derive(Debug, Clone)]
pub struct Members {
    /// `(member, index of its S-tail letter)` in discovery order.
    pub members: Vec<(Partition, usize)>,
    /// Per-letter generating functions `𝒢_k`.
    pub per_tail: Vec<Series>,
}

impl Members {
    pub fn total(&self) -> Series {
        let first = self.per_tail[0].clone();
        self.per_tail[1..].iter().fold(first, |acc, s| &acc + s)
    }
}

/// All members with `|λ| <= q_max`, by pruned depth-first search over chains.
pub fn enumerate_members(ideal: &SpanOneIdeal, q_max: u32) -> Members {
    struct Walk<'a> {
        ideal: &'a SpanOneIdeal,
        q_max: u32,
        out: Vec<(Partition, usize)>,
    }

    impl Walk<'_> {
        fn cheapest_nonempty(&self, level: u32) -> Option<u32> {
            self.ideal.pi[1..]
                .iter()
                .map(|p| p.size() + level * self.ideal.shift * p.len())
                .min()
        }

        fn go(&mut self, level: u32, prev: usize, acc: &Partition, tail: usize) {
            for &j in &self.ideal.linking[prev] {
                let letter = &self.ideal.pi[j];
                let tail = if level == 0 { j } else { tail };
                if j == 0 {
                    // an empty block: continue only if something can still fit
                    match self.cheapest_nonempty(level + 1) {
                        Some(c) if acc.size() + c <= self.q_max => {
                            self.go(level + 1, 0, acc, tail);
                        }
                        _ => {}
                    }
                    continue;
                }
                let next = acc.oplus(&letter.phi(level * self.ideal.shift));
                if next.size() > self.q_max {
                    continue;
                }
                self.out.push((next.clone(), tail));
                self.go(level + 1, j, &next, tail);
            }
        }
    }

    let mut walk = Walk {
        ideal,
        q_max,
        out: vec![(Partition::empty(), 0)],
    };
    walk.go(0, 0, &Partition::empty(), 0);

    let mut per_tail = vec![Series::zero(q_max, q_max); ideal.len()];
    for (k, slot) in per_tail.iter_mut().enumerate() {
        *slot = Series::from_terms(
            q_max,
            q_max,
            walk.out
                .iter()
                .filter(|(_, t)| *t == k)
                .map(|(p, _)| ((p.len(), p.size()), BigInt::one())),
        );
    }
    Members {
        members: walk.out,
        per_tail,
    }
}

/// Ideal description file: `{"S": 2, "pi": ["empty", "1", "2"], "linking": [[1,2,3], ...]}`
/// with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealFile {
    #[serde(rename = "S")]
    pub shift: u32,
    pub pi: Vec<String>,
    pub linking: Vec<Vec<usize>>,
}

impl IdealFile {
    pub fn into_ideal(self) -> Result<SpanOneIdeal, crate::Error> {
        let pi = self
            .pi
            .iter()
            .map(|s| s.parse::<Partition>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut violations = Vec::new();
        let linking = self
            .linking
            .iter()
            .enumerate()
            .map(|(letter, set)| {
                set.iter()
                    .map(|&i| {
                        if i == 0 {
                            violations.push(IdealViolation::ZeroIndex { letter });
                        }
                        i.saturating_sub(1)
                    })
                    .collect()
            })
            .collect();
        if !violations.is_empty() {
            return Err(crate::Error::Ideal(violations));
        }
        SpanOneIdeal::new(pi, linking, self.shift).map_err(crate::Error::Ideal)
    }

    pub fn from_ideal(ideal: &SpanOneIdeal) -> Self {
        IdealFile {
            shift: ideal.shift,
            pi: ideal.pi.iter().map(|p| p.to_string()).collect(),
            linking: ideal
                .linking
                .iter()
                .map(|set| set.iter().map(|i| i + 1).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::oracle_genfun;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    pub(crate) fn rr() -> SpanOneIdeal {
        SpanOneIdeal::new(
            vec![Partition::empty(), p("1"), p("2")],
            vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 2]],
            2,
        )
        .unwrap()
    }

    fn kr() -> SpanOneIdeal {
        let all = (0..7).collect::<Vec<_>>();
        SpanOneIdeal::new(
            ["empty", "1", "2+1", "3+1", "2", "3", "3+3"].iter().map(|s| p(s)).collect(),
            vec![
                all.clone(),
                all.clone(),
                all.clone(),
                vec![0, 4, 5, 6],
                all,
                vec![0, 4, 5, 6],
                vec![0, 5, 6],
            ],
            3,
        )
        .unwrap()
    }

    #[test]
    fn validate_reports_each_violation() {
        let mut bad = rr();
        bad.shift = 1;
        assert_eq!(
            bad.validate(),
            Err(vec![IdealViolation::ShiftTooSmall { shift: 1, largest: 2 }])
        );
        let mut bad = rr();
        bad.linking[2] = vec![2];
        assert_eq!(bad.validate(), Err(vec![IdealViolation::MissingEmpty { letter: 2 }]));
        let mut bad = rr();
        bad.linking[0] = vec![0, 1];
        assert_eq!(bad.validate(), Err(vec![IdealViolation::EmptyLinkingIncomplete]));
        let mut bad = rr();
        bad.pi.swap(0, 1);
        assert!(bad.validate().unwrap_err().contains(&IdealViolation::FirstNotEmpty));
        let mut bad = rr();
        bad.pi[2] = p("1");
        assert!(bad
            .validate()
            .unwrap_err()
            .contains(&IdealViolation::DuplicateLetter { first: 1, second: 2 }));
    }

    #[test]
    fn rr_graph() {
        let g = rr().associated_graph();
        assert_eq!(g.adjacency_matrix(), vec![vec![1, 1, 1], vec![1, 1, 1], vec![1, 0, 1]]);
        assert_eq!(g.weight_diag(), &[Monomial::ONE, Monomial::new(1, 1), Monomial::new(1, 2)]);
        assert!(g.is_modified());
    }

    #[test]
    fn kr_graph() {
        let g = kr().associated_graph();
        let a = g.adjacency_matrix();
        assert_eq!(a[3], vec![1, 0, 0, 0, 1, 1, 1]);
        assert_eq!(a[5], vec![1, 0, 0, 0, 1, 1, 1]);
        assert_eq!(a[6], vec![1, 0, 0, 0, 0, 1, 1]);
        let diag: Vec<(u32, u32)> = g.weight_diag().iter().map(|&m| m.into()).collect();
        assert_eq!(diag, vec![(0, 0), (1, 1), (2, 3), (2, 4), (1, 2), (1, 3), (2, 6)]);
    }

    #[test]
    fn trivial_graph() {
        let g = SpanOneIdeal::trivial(1).associated_graph();
        assert_eq!(g.adjacency_matrix(), vec![vec![1]]);
        assert_eq!(g.weight_diag(), &[Monomial::ONE]);
        assert_eq!(ideal_genfun_vec(&SpanOneIdeal::trivial(1), 5, 5), vec![Series::one(5, 5)]);
        assert_eq!(enumerate_members(&SpanOneIdeal::trivial(1), 5).total(), Series::one(5, 5));
    }

    #[test]
    fn walk_base_case_is_weight_diag() {
        let g = rr().associated_graph();
        let m = walk_genfun_matrix(&g, 0, 2, 6, 6);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { g.weights[i].to_series(6, 6) } else { Series::zero(6, 6) };
                assert_eq!(m[i][j], want);
            }
        }
    }

    #[test]
    fn walk_counts_at_one() {
        let g = rr().associated_graph();
        let m = walk_product(&g, 2, 2, &BigInt::one());
        // A^2 for [[1,1,1],[1,1,1],[1,0,1]]
        let want = [[3, 2, 3], [3, 2, 3], [2, 1, 2]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j], BigInt::from(want[i][j]));
            }
        }
    }

    #[test]
    fn walk_step_one_entry() {
        // walks π_i -> π_j with weights w_i(x) w_j(xq^2)
        let g = rr().associated_graph();
        let m = walk_genfun_matrix(&g, 1, 2, 6, 10);
        assert_eq!(m[0][0].to_string(), "1");
        assert_eq!(m[0][1].to_string(), "x*q^3");
        assert_eq!(m[2][1], Series::zero(6, 10));
        assert_eq!(m[1][2].to_string(), "x^2*q^5");
    }

    #[test]
    fn contains_examples() {
        let rr = rr();
        assert_eq!(contains(&rr, &p("6+4+1")), Some(vec![1, 2, 2]));
        assert_eq!(contains(&rr, &Partition::empty()), Some(vec![]));
        assert_eq!(contains(&rr, &p("2+1")), None);
        assert_eq!(contains(&rr, &p("5+1")), Some(vec![1, 0, 1]));
        assert_eq!(contains(&rr, &p("3+2")), None);
    }

    #[test]
    fn rr_three_routes_agree() {
        let rr = rr();
        let oracle = oracle_genfun(|p| p.satisfies_gap(2, 1), 12);
        let members = enumerate_members(&rr, 12);
        let g = ideal_genfun_vec(&rr, 12, 12);
        let sum = g.iter().skip(1).fold(g[0].clone(), |a, s| &a + s);
        assert_eq!(members.total(), oracle);
        assert_eq!(sum, oracle);
        for k in 0..3 {
            assert_eq!(members.per_tail[k], g[k], "G_{}", k + 1);
        }
    }

    #[test]
    fn rr_smallest_part_two() {
        let g = ideal_genfun_vec(&rr(), 6, 6);
        let s = &g[0] + &g[2];
        assert_eq!(s.coeff(1, 2).unwrap(), BigInt::one());
        assert_eq!(s.coeff(1, 3).unwrap(), BigInt::one());
        assert_eq!(s.coeff(1, 1).unwrap(), BigInt::zero());
        let oracle = oracle_genfun(|p| p.satisfies_gap(2, 1) && p.smallest().unwrap_or(2) >= 2, 6);
        assert_eq!(s, oracle);
    }

    #[test]
    fn kr_members_small() {
        let m = enumerate_members(&kr(), 3);
        assert_eq!(m.total().to_string(), "1 + x*q + x*q^2 + x*q^3 + x^2*q^3");
        let mut names: Vec<String> = m.members.iter().map(|(p, _)| p.to_string()).collect();
        names.sort();
        assert_eq!(names, ["1", "2", "2+1", "3", "empty"]);
    }

    #[test]
    fn ideal_file_round_trip() {
        let file = IdealFile::from_ideal(&kr());
        assert_eq!(file.linking[6], vec![1, 6, 7]);
        assert_eq!(file.clone().into_ideal().unwrap(), kr());
    }
}
