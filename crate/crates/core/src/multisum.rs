//! The q-multi-summations
//!
//! ```text
//! H(β) = Σ_{n ∈ ℕ^R} q^{Σ α_rr n_r(n_r-1)/2 + Σ_{i<j} α_ij n_i n_j + Σ β_r n_r} x^{Σ γ_r n_r}
//!        / ((q^{A_1};q^{A_1})_{n_1} ⋯ (q^{A_R};q^{A_R})_{n_R})
//! ```
//!
//! with the two-term recurrence
//! `H(β) = H(β + A_r e_r) + x^{γ_r} q^{β_r} H(β + α_r)` in each coordinate
//! and the shift rule `H(β)(x q^S) = H(β + S γ)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::MultisumError;
use crate::series::{q_poly_div_one_minus, Monomial, Series};

/// The fixed data `(α, γ, A)` of a family of multisums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProfileFile", into = "ProfileFile")]
pub struct MultisumProfile {
    alpha: Vec<Vec<u32>>,
    gamma: Vec<u32>,
    a: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    alpha: Vec<Vec<u32>>,
    gamma: Vec<u32>,
    #[serde(rename = "A")]
    a: Vec<u32>,
}

impl TryFrom<ProfileFile> for MultisumProfile {
    type Error = MultisumError;
    fn try_from(f: ProfileFile) -> Result<Self, Self::Error> {
        MultisumProfile::new(f.alpha, f.gamma, f.a)
    }
}

impl From<MultisumProfile> for ProfileFile {
    fn from(p: MultisumProfile) -> Self {
        ProfileFile {
            alpha: p.alpha,
            gamma: p.gamma,
            a: p.a,
        }
    }
}

impl MultisumProfile {
    pub fn new(alpha: Vec<Vec<u32>>, gamma: Vec<u32>, a: Vec<u32>) -> Result<Self, MultisumError> {
        let rank = gamma.len();
        if rank == 0 {
            return Err(MultisumError::Dimension("rank must be at least 1".into()));
        }
        if a.len() != rank || alpha.len() != rank || alpha.iter().any(|row| row.len() != rank) {
            return Err(MultisumError::Dimension(format!(
                "alpha must be {rank}x{rank} and A must have {rank} entries"
            )));
        }
        for i in 0..rank {
            for j in i + 1..rank {
                if alpha[i][j] != alpha[j][i] {
                    return Err(MultisumError::NotSymmetric(i, j));
                }
            }
        }
        if gamma.contains(&0) {
            return Err(MultisumError::NonPositive("gamma"));
        }
        if a.contains(&0) {
            return Err(MultisumError::NonPositive("A"));
        }
        Ok(MultisumProfile { alpha, gamma, a })
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    pub fn alpha(&self) -> &[Vec<u32>] {
        &self.alpha
    }

    pub fn gamma(&self) -> &[u32] {
        &self.gamma
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    fn check_beta(&self, beta: &Beta) -> Result<(), MultisumError> {
        if beta.0.len() != self.rank() {
            return Err(MultisumError::BetaLength {
                got: beta.0.len(),
                rank: self.rank(),
            });
        }
        Ok(())
    }

    /// `Σ α_rr n_r(n_r-1)/2 + Σ_{i<j} α_ij n_i n_j + Σ β_r n_r`.
    pub fn exponent(&self, beta: &Beta, n: &[u32]) -> i64 {
        let mut e = 0i64;
        for r in 0..self.rank() {
            let nr = n[r] as i64;
            e += self.alpha[r][r] as i64 * nr * (nr - 1) / 2 + beta.0[r] * nr;
            for s in r + 1..self.rank() {
                e += self.alpha[r][s] as i64 * nr * n[s] as i64;
            }
        }
        e
    }

    /// Total x-degree `Σ γ_r n_r`.
    pub fn x_degree(&self, n: &[u32]) -> u32 {
        n.iter().zip(&self.gamma).map(|(a, b)| a * b).sum()
    }
}

/// A shift vector `β ∈ ℤ^R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Beta(pub Vec<i64>);

impl Beta {
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Beta) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<i64>> for Beta {
    fn from(v: Vec<i64>) -> Self {
        Beta(v)
    }
}

impl<const N: usize> From<[i64; N]> for Beta {
    fn from(v: [i64; N]) -> Self {
        Beta(v.to_vec())
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// One application of the recurrence in coordinate `coord`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub coord: usize,
    pub left: Beta,
    pub weight: Monomial,
    pub right: Beta,
}

/// Whether the exponent of every non-zero term is positive.
///
/// Fast path when every `β_r >= 1`; otherwise an exhaustive scan of the box
/// `‖n‖∞ <= B`, `B = 2 + max_r ⌈2|β_r| / max(α_rr, 1)⌉`, together with the
/// ray condition that `α_rr = 0` forces `β_r > 0`.
pub fn check_positivity(p: &MultisumProfile, beta: &Beta) -> Result<bool, MultisumError> {
    p.check_beta(beta)?;
    if beta.0.iter().all(|&b| b >= 1) {
        return Ok(true);
    }
    let rank = p.rank();
    for r in 0..rank {
        if p.alpha[r][r] == 0 && beta.0[r] <= 0 {
            return Ok(false);
        }
    }
    let bound = 2 + (0..rank)
        .map(|r| {
            let d = p.alpha[r][r].max(1) as i64;
            (2 * beta.0[r].abs() + d - 1) / d
        })
        .max()
        .unwrap_or(0) as u32;
    let mut n = vec![0u32; rank];
    loop {
        // odometer over [0, bound]^R
        let mut r = 0;
        while r < rank {
            if n[r] < bound {
                n[r] += 1;
                break;
            }
            n[r] = 0;
            r += 1;
        }
        if r == rank {
            return Ok(true);
        }
        if p.exponent(beta, &n) <= 0 {
            return Ok(false);
        }
    }
}

/// `1/(q^a;q^a)_n` for `n = 0..=n_max` as dense q-vectors.
fn pochhammer_reciprocals(a: u32, n_max: u32, q_max: u32) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut cur = vec![BigInt::zero(); q_max as usize + 1];
    cur[0] = BigInt::one();
    out.push(cur.clone());
    for k in 1..=n_max {
        let step = a as u64 * k as u64;
        if step <= q_max as u64 {
            q_poly_div_one_minus(&mut cur, step as usize);
        }
        out.push(cur.clone());
    }
    out
}

/// Truncated expansion of `H(β)`.
///
/// Tuples are enumerated by x-degree `Σ γ_r n_r <= x_max`, so `β` outside
/// the positivity region is fine as long as no term has a negative
/// q-exponent.
pub fn eval_h(p: &MultisumProfile, beta: &Beta, x_max: u32, q_max: u32) -> Result<Series, MultisumError> {
    p.check_beta(beta)?;
    let rank = p.rank();
    let recips: Vec<Vec<Vec<BigInt>>> = (0..rank)
        .map(|r| pochhammer_reciprocals(p.a[r], x_max / p.gamma[r], q_max))
        .collect();

    let mut terms: Vec<((u32, u32), BigInt)> = Vec::new();
    let mut n = vec![0u32; rank];
    let mut err = None;
    for_each_tuple(&p.gamma, x_max, &mut n, 0, &mut |n| {
        if err.is_some() {
            return;
        }
        let e = p.exponent(beta, n);
        if e < 0 {
            err = Some(MultisumError::NegativeExponent {
                n: n.to_vec(),
                exponent: e,
            });
            return;
        }
        if e > q_max as i64 {
            return;
        }
        let e = e as usize;
        let room = q_max as usize - e;
        let mut acc = recips[0][n[0] as usize][..=room].to_vec();
        for r in 1..rank {
            acc = crate::series::q_poly_mul(&acc, &recips[r][n[r] as usize], room);
        }
        let m = p.x_degree(n);
        for (k, c) in acc.into_iter().enumerate() {
            if !c.is_zero() {
                terms.push(((m, (e + k) as u32), c));
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Series::from_terms(x_max, q_max, terms))
}

fn for_each_tuple(gamma: &[u32], budget: u32, n: &mut Vec<u32>, r: usize, f: &mut impl FnMut(&[u32])) {
    if r == gamma.len() {
        f(n);
        return;
    }
    let mut k = 0;
    while k * gamma[r] <= budget {
        n[r] = k;
        for_each_tuple(gamma, budget - k * gamma[r], n, r + 1, f);
        k += 1;
    }
    n[r] = 0;
}

/// Children of `H(β)` under the recurrence in coordinate `coord` (0-based):
/// `left = β + A_r e_r`, `weight = x^{γ_r} q^{β_r}`, `right = β + α_r`.
pub fn rec_children(p: &MultisumProfile, beta: &Beta, coord: usize) -> Result<Recurrence, MultisumError> {
    p.check_beta(beta)?;
    let rank = p.rank();
    if coord >= rank {
        return Err(MultisumError::Coordinate { r: coord, rank });
    }
    let q = beta.0[coord];
    if q < 0 {
        return Err(MultisumError::NegativeExponent {
            n: Vec::new(),
            exponent: q,
        });
    }
    let mut left = beta.clone();
    left.0[coord] += p.a[coord] as i64;
    let right = Beta(
        beta.0
            .iter()
            .zip(&p.alpha[coord])
            .map(|(b, a)| b + *a as i64)
            .collect(),
    );
    Ok(Recurrence {
        coord,
        left,
        weight: Monomial::new(p.gamma[coord], q as u32),
        right,
    })
}

/// `β + S γ`, the parameter of `H(β)(x q^S)`.
pub fn shift_beta(p: &MultisumProfile, beta: &Beta, shift: u32) -> Result<Beta, MultisumError> {
    p.check_beta(beta)?;
    if shift == 0 {
        return Err(MultisumError::ZeroShift);
    }
    Ok(Beta(
        beta.0
            .iter()
            .zip(&p.gamma)
            .map(|(b, g)| b + shift as i64 * *g as i64)
            .collect(),
    ))
}

/// For all `s`: `A_s | γ_s S` and `A_s | α_{r,s}` for every `r`.
pub fn check_additional(p: &MultisumProfile, shift: u32) -> bool {
    (0..p.rank()).all(|s| {
        let a = p.a[s];
        (p.gamma[s] * shift).is_multiple_of(a) && p.alpha.iter().all(|row| row[s].is_multiple_of(a))
    })
}

/// Checks `H(β) = H(left) + weight · H(right)` on the truncation region by
/// evaluating all three series.
pub fn verify_recurrence_numeric(
    p: &MultisumProfile,
    beta: &Beta,
    coord: usize,
    x_max: u32,
    q_max: u32,
) -> Result<bool, MultisumError> {
    let rec = rec_children(p, beta, coord)?;
    let lhs = eval_h(p, beta, x_max, q_max)?;
    let left = eval_h(p, &rec.left, x_max, q_max)?;
    let right = eval_h(p, &rec.right, x_max, q_max)?;
    let rhs = &left + &right.mul_monomial(rec.weight);
    Ok(lhs.eq_upto(&rhs))
}
