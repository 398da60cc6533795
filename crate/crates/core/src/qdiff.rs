//! The q-difference system `F(x) = 𝒜·𝒲(x)·F(x q^S)`.
//!
//! Writing `F_k(x) = Σ f_k(n) x^n`, the system is equivalent to
//!
//! ```text
//! f_k(n) = q^{nS} f_1(n) + Σ_{j>=2} 𝒜_{k,j} q^{|π_j| + (n - #π_j) S} f_j(n - #π_j)
//! ```
//!
//! with `f_k(0) = 1`. Since `#π_j >= 1` for `j >= 2`, the right-hand side only
//! refers to `f_1(n)` and earlier x-degrees. For `k = 1` the first-row
//! relation is solved for `f_1(n)` by dividing by the unit `1 - q^{nS}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ideal::SpanOneIdeal;
use crate::series::{q_poly_div_one_minus, Monomial, Series};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QDiffSystem {
    adjacency: Vec<Vec<bool>>,
    weights: Vec<Monomial>,
    shift: u32,
}

/// Standalone system file: `{"A": [[...]], "weights": [[m, n], ...], "S": 2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<u8>>,
    pub weights: Vec<Monomial>,
    #[serde(rename = "S")]
    pub shift: u32,
}

impl QDiffSystem {
    pub fn new(adjacency: Vec<Vec<bool>>, weights: Vec<Monomial>, shift: u32) -> Result<Self, Error> {
        let k = weights.len();
        let bad = |m: &str| Err(Error::System(m.to_string()));
        if k == 0 {
            return bad("empty system");
        }
        if shift == 0 {
            return bad("S must be positive");
        }
        if adjacency.len() != k || adjacency.iter().any(|r| r.len() != k) {
            return bad("A must be square and match the number of weights");
        }
        if weights[0] != Monomial::ONE {
            return bad("the first weight must be 1");
        }
        if let Some(j) = weights.iter().skip(1).position(|w| w.x == 0) {
            return Err(Error::System(format!("weight {} has x-degree 0", j + 2)));
        }
        if adjacency.iter().any(|row| !row[0]) {
            return bad("the first column of A must be all ones");
        }
        if adjacency[0].iter().any(|&b| !b) {
            return bad("the first row of A must be all ones");
        }
        Ok(QDiffSystem {
            adjacency,
            weights,
            shift,
        })
    }

    /// The system attached to an ideal through its associated graph.
    pub fn from_ideal(ideal: &SpanOneIdeal) -> Result<Self, Error> {
        let g = ideal.associated_graph();
        QDiffSystem::new(g.adjacency, g.weights, ideal.shift)
    }

    pub fn from_file(f: SystemFile) -> Result<Self, Error> {
        let adjacency = f
            .a
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| match v {
                        0 => Ok(false),
                        1 => Ok(true),
                        _ => Err(Error::System(format!("A has entry {v}; expected 0 or 1"))),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        QDiffSystem::new(adjacency, f.weights, f.shift)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            a: self
                .adjacency
                .iter()
                .map(|r| r.iter().map(|&b| b as u8).collect())
                .collect(),
            weights: self.weights.clone(),
            shift: self.shift,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn weights(&self) -> &[Monomial] {
        &self.weights
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// `𝒜·𝒲(x)·F(x q^S)`.
    pub fn apply(&self, f: &[Series]) -> Vec<Series> {
        let shifted: Vec<Series> = f
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| s.shift_x(self.shift).mul_monomial(w))
            .collect();
        mat_vec(&self.adjacency, &shifted)
    }
}

fn mat_vec(a: &[Vec<bool>], v: &[Series]) -> Vec<Series> {
    a.iter()
        .map(|row| {
            let zero = Series::zero(v[0].x_max(), v[0].q_max());
            row.iter()
                .zip(v)
                .filter(|(b, _)| **b)
                .fold(zero, |acc, (_, s)| &acc + s)
        })
        .collect()
}

/// The unique solution with `F_1(0) = ⋯ = F_K(0) = 1`.
pub fn solve(sys: &QDiffSystem, x_max: u32, q_max: u32) -> Vec<Series> {
    let k = sys.len();
    let s = sys.shift as u64;
    let len = q_max as usize + 1;
    // f[j][n] is the dense q-vector of the coefficient of x^n in F_j
    let mut f: Vec<Vec<Vec<BigInt>>> = vec![Vec::with_capacity(x_max as usize + 1); k];

    // Σ_{j>=2} 𝒜_{row,j} q^{|π_j| + (n - #π_j) S} f_j(n - #π_j)
    let tail_sum = |f: &Vec<Vec<Vec<BigInt>>>, row: usize, n: u32| -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); len];
        for j in 1..k {
            let w = sys.weights[j];
            if !sys.adjacency[row][j] || w.x > n {
                continue;
            }
            let prev = n - w.x;
            let shift = w.q as u64 + prev as u64 * s;
            if shift >= len as u64 {
                continue;
            }
            let shift = shift as usize;
            for (i, c) in f[j][prev as usize][..len - shift].iter().enumerate() {
                if !c.is_zero() {
                    acc[i + shift] += c;
                }
            }
        }
        acc
    };

    for n in 0..=x_max {
        if n == 0 {
            let mut one = vec![BigInt::zero(); len];
            one[0] = BigInt::one();
            for fj in f.iter_mut() {
                fj.push(one.clone());
            }
            continue;
        }
        // (1 - q^{nS}) f_1(n) = tail_sum(row 1)
        let mut f1 = tail_sum(&f, 0, n);
        let step = n as u64 * s;
        if step < len as u64 {
            q_poly_div_one_minus(&mut f1, step as usize);
        }
        let step = step as usize;
        let others: Vec<Vec<BigInt>> = (1..k)
            .map(|row| {
                let mut v = tail_sum(&f, row, n);
                if step < len {
                    for i in 0..len - step {
                        if !f1[i].is_zero() {
                            let c = f1[i].clone();
                            v[i + step] += c;
                        }
                    }
                }
                v
            })
            .collect();
        f[0].push(f1);
        for (row, v) in others.into_iter().enumerate() {
            f[row + 1].push(v);
        }
    }

    f.into_iter()
        .map(|per_n| {
            Series::from_terms(
                x_max,
                q_max,
                per_n.into_iter().enumerate().flat_map(|(n, qs)| {
                    qs.into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(move |(i, c)| ((n as u32, i as u32), c))
                }),
            )
        })
        .collect()
}

/// `F = 𝒜·(𝒢_1, …, 𝒢_K)ᵀ`.
pub fn f_from_g(a: &[Vec<bool>], g: &[Series]) -> Vec<Series> {
    assert_eq!(a.len(), g.len(), "dimension mismatch");
    mat_vec(a, g)
}

/// Whether `F(x) - 𝒜·𝒲(x)·F(x q^S)` vanishes on the shared truncation region.
pub fn check_system(f: &[Series], sys: &QDiffSystem) -> bool {
    f.len() == sys.len() && f.iter().zip(sys.apply(f)).all(|(lhs, rhs)| lhs.eq_upto(&rhs))
}
