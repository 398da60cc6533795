//! Truncated bivariate power series in `x` (part count) and `q` (size).
//!
//! A [`Series`] stores exact integer coefficients of `x^m q^n` for
//! `m <= x_max` and `n <= q_max`. Binary operations work on the intersection
//! of the operands' truncation regions and record the componentwise minimum
//! of their orders, so a result never claims more precision than its inputs.
//!
//! Coefficients are [`BigInt`]s; zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;

/// Default q-truncation order when none is given.
pub const DEFAULT_Q_MAX: u32 = 30;

/// A monic monomial `x^x q^q`.
///
/// Serialized as the pair `[x, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct Monomial {
    pub x: u32,
    pub q: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, q: 0 };

    pub fn new(x: u32, q: u32) -> Self {
        Monomial { x, q }
    }

    pub fn times(self, other: Monomial) -> Monomial {
        Monomial {
            x: self.x + other.x,
            q: self.q + other.q,
        }
    }

    pub fn to_series(self, x_max: u32, q_max: u32) -> Series {
        Series::from_terms(x_max, q_max, [((self.x, self.q), BigInt::one())])
    }
}

impl From<(u32, u32)> for Monomial {
    fn from((x, q): (u32, u32)) -> Self {
        Monomial { x, q }
    }
}

impl From<Monomial> for (u32, u32) {
    fn from(m: Monomial) -> Self {
        (m.x, m.q)
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, m: u32, n: u32) -> fmt::Result {
    let mut first = true;
    for (var, e) in [("x", m), ("q", n)] {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        if e == 1 {
            f.write_str(var)?;
        } else {
            write!(f, "{var}^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x == 0 && self.q == 0 {
            return f.write_str("1");
        }
        write_factors(f, self.x, self.q)
    }
}

/// Exact truncated series in `x` and `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: BTreeMap<(u32, u32), BigInt>,
    x_max: u32,
    q_max: u32,
}

impl Series {
    pub fn zero(x_max: u32, q_max: u32) -> Self {
        Series {
            coeffs: BTreeMap::new(),
            x_max,
            q_max,
        }
    }

    pub fn one(x_max: u32, q_max: u32) -> Self {
        Monomial::ONE.to_series(x_max, q_max)
    }

    /// `c * x^m * q^n`, empty when the monomial lies beyond the truncation.
    pub fn monomial(
        c: impl Into<BigInt>,
        m: i64,
        n: i64,
        x_max: u32,
        q_max: u32,
    ) -> Result<Self, SeriesError> {
        if m < 0 || n < 0 {
            return Err(SeriesError::NegativeDegree { m, n });
        }
        let mut s = Series::zero(x_max, q_max);
        if m <= x_max as i64 && n <= q_max as i64 {
            s.add_at(m as u32, n as u32, c.into());
        }
        Ok(s)
    }

    /// Builds a series from `((m, n), c)` pairs; terms outside the region are
    /// dropped and repeated keys accumulate.
    pub fn from_terms<I>(x_max: u32, q_max: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), BigInt)>,
    {
        let mut s = Series::zero(x_max, q_max);
        for ((m, n), c) in terms {
            s.add_at(m, n, c);
        }
        s
    }

    /// `sum_{k >= 0} q^{j k}`, the expansion of `1 / (1 - q^j)`.
    pub fn geom_inverse(j: u32, x_max: u32, q_max: u32) -> Result<Self, SeriesError> {
        if j == 0 {
            return Err(SeriesError::ZeroStep);
        }
        Ok(Series::from_terms(
            x_max,
            q_max,
            (0..=q_max).step_by(j as usize).map(|n| ((0, n), BigInt::one())),
        ))
    }

    pub fn x_max(&self) -> u32 {
        self.x_max
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (non-zero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Non-zero terms keyed by `(x-degree, q-degree)`, ascending in x first.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> {
        self.coeffs.iter().map(|(&(m, n), c)| (m, n, c))
    }

    fn add_at(&mut self, m: u32, n: u32, c: BigInt) {
        if m > self.x_max || n > self.q_max || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry((m, n)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Exact coefficient of `x^m q^n`.
    pub fn coeff(&self, m: u32, n: u32) -> Result<BigInt, SeriesError> {
        if m > self.x_max || n > self.q_max {
            return Err(SeriesError::OutOfRange {
                m,
                n,
                x_max: self.x_max,
                q_max: self.q_max,
            });
        }
        Ok(self.coeffs.get(&(m, n)).cloned().unwrap_or_default())
    }

    /// Coefficients of `x^m` as a dense q-vector of length `q_max + 1`.
    pub fn x_coeff(&self, m: u32) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.q_max as usize + 1];
        for (&(mm, n), c) in self.coeffs.range((m, 0)..=(m, self.q_max)) {
            debug_assert_eq!(mm, m);
            out[n as usize] = c.clone();
        }
        out
    }

    /// Sum over x-degrees: the q-series obtained by setting `x = 1`.
    pub fn at_x_one(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.q_max as usize + 1];
        for (&(_, n), c) in &self.coeffs {
            out[n as usize] += c;
        }
        out
    }

    /// Sum of every stored coefficient (the value at `x = q = 1` of the
    /// truncated polynomial).
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Restricts to a smaller region; orders never grow.
    pub fn truncate(&self, x_max: u32, q_max: u32) -> Series {
        let x_max = x_max.min(self.x_max);
        let q_max = q_max.min(self.q_max);
        Series {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(m, n), _)| m <= x_max && n <= q_max)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            x_max,
            q_max,
        }
    }

    /// Equality over the shared truncation region.
    pub fn eq_upto(&self, other: &Series) -> bool {
        let x_max = self.x_max.min(other.x_max);
        let q_max = self.q_max.min(other.q_max);
        self.truncate(x_max, q_max).coeffs == other.truncate(x_max, q_max).coeffs
    }

    pub fn scale(&self, c: &BigInt) -> Series {
        if c.is_zero() {
            return Series::zero(self.x_max, self.q_max);
        }
        Series {
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
            x_max: self.x_max,
            q_max: self.q_max,
        }
    }

    /// Multiplication by a monic monomial, i.e. an exponent shift.
    pub fn mul_monomial(&self, mono: Monomial) -> Series {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .filter_map(|(&(m, n), c)| {
                    let (m, n) = (m + mono.x, n + mono.q);
                    (m <= self.x_max && n <= self.q_max).then(|| ((m, n), c.clone()))
                })
                .collect(),
            x_max: self.x_max,
            q_max: self.q_max,
        }
    }

    /// The substitution `x -> x q^s`: the coefficient at `(m, n)` moves to
    /// `(m, n + m s)`.
    pub fn shift_x(&self, s: u32) -> Series {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .filter_map(|(&(m, n), c)| {
                    let n = n as u64 + m as u64 * s as u64;
                    (n <= self.q_max as u64).then(|| ((m, n as u32), c.clone()))
                })
                .collect(),
            x_max: self.x_max,
            q_max: self.q_max,
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out = self.truncate(other.x_max, other.q_max);
        for (&(m, n), c) in &other.coeffs {
            out.add_at(m, n, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        let mut out = self.truncate(other.x_max, other.q_max);
        for (&(m, n), c) in &other.coeffs {
            out.add_at(m, n, -c);
        }
        out
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Series) -> Series {
        let x_max = self.x_max.min(other.x_max);
        let q_max = self.q_max.min(other.q_max);
        let mut out = Series::zero(x_max, q_max);
        for (&(m1, n1), c1) in &self.coeffs {
            if m1 > x_max || n1 > q_max {
                continue;
            }
            for (&(m2, n2), c2) in &other.coeffs {
                if m1 + m2 > x_max {
                    // keys ascend in m, nothing further fits
                    break;
                }
                if n1 + n2 <= q_max {
                    out.add_at(m1 + m2, n1 + n2, c1 * c2);
                }
            }
        }
        out
    }
}

impl fmt::Display for Series {
    /// Sum of terms `c*x^m*q^n` in graded-lex order (by q-degree, then
    /// x-degree). Unit coefficients and zero exponents are elided.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<_> = self.coeffs.keys().copied().collect();
        keys.sort_by_key(|&(m, n)| (n, m));
        for (i, (m, n)) in keys.into_iter().enumerate() {
            let c = &self.coeffs[&(m, n)];
            let negative = c < &BigInt::zero();
            let abs = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m == 0 && n == 0 {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            write_factors(f, m, n)?;
        }
        Ok(())
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(&BigInt::from(-1))
    }
}

/// Dense truncated series in `q` alone, used for the `1/(q^a;q^a)_n` factors.
pub(crate) fn q_poly_mul(a: &[BigInt], b: &[BigInt], q_max: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); q_max + 1];
    for (i, ai) in a.iter().enumerate().take(q_max + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(q_max + 1 - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Multiplies a dense q-series by `1 / (1 - q^j)` in place (prefix sums with
/// stride `j`).
pub(crate) fn q_poly_div_one_minus(a: &mut [BigInt], j: usize) {
    debug_assert!(j > 0);
    for n in j..a.len() {
        let prev = a[n - j].clone();
        a[n] += prev;
    }
}
