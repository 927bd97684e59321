//! Exact combinatorics and base-2 entropy helpers.
//!
//! Binomials and the alternating inner sums are kept as arbitrary-precision
//! integers; squared amplitudes are exact rationals. Floating point only
//! enters through [`log2_big`], which is accurate to well below 1e-12 at any
//! magnitude.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Exact nonnegative count, e.g. a binomial coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn new(value: BigUint) -> Self {
        BigCount(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn log2(&self) -> Result<f64> {
        log2_big(&self.0)
    }

    /// `Some(m)` when the count equals `2^m`.
    pub fn power_of_two_exponent(&self) -> Option<u64> {
        let bits = self.0.bits();
        if bits == 0 {
            return None;
        }
        if self.0.trailing_zeros() == Some(bits - 1) {
            Some(bits - 1)
        } else {
            None
        }
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Exact rational, always in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(domain("rational with zero denominator"));
        }
        Ok(ExactRational(BigRational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.numer().sign() == Sign::Minus
    }

    /// `log2 |q|`, computed without ever forming `q` as a float, so values far
    /// below the f64 range are fine.
    pub fn log2_abs(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(domain("log2 of zero rational"));
        }
        Ok(log2_big(self.numer().magnitude())? - log2_big(self.denom().magnitude())?)
    }

    /// Nearest f64; underflows to 0 for very small magnitudes.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let sign = if self.is_negative() { -1.0 } else { 1.0 };
        // log2_abs cannot fail here: the value is nonzero.
        let l = self.log2_abs().unwrap_or(f64::NEG_INFINITY);
        sign * libm::exp2(l)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        ExactRational(BigRational::from_integer(v))
    }
}

impl Add for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a ExactRational> for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &'a ExactRational) -> ExactRational {
        ExactRational(self.0 + &rhs.0)
    }
}

impl Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 * rhs.0)
    }
}

impl core::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// A probability in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Prob(f64);

impl Prob {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Prob(p))
        } else {
            Err(domain(format!("probability {p} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Prob {
        Prob(1.0 - self.0)
    }
}

pub fn binom(n: u64, k: u64) -> Result<BigCount> {
    if k > n {
        return Err(domain(format!("binom({n}, {k}) with k > n")));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    Ok(BigCount(acc))
}

/// `log2 x` from the bit length plus the top 64 bits, so the result stays
/// accurate for integers far beyond the f64 range.
pub fn log2_big(x: &BigUint) -> Result<f64> {
    let bits = x.bits();
    if bits == 0 {
        return Err(domain("log2 of zero"));
    }
    if bits <= 64 {
        let v = x.to_u64().unwrap_or(u64::MAX);
        return Ok(libm::log2(v as f64));
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    Ok(shift as f64 + libm::log2(top as f64))
}

/// `x log2 x` with the `0 log 0 = 0` convention.
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * libm::log2(x)
    }
}

/// Binary Shannon entropy in bits.
pub fn shannon_h(p: Prob) -> f64 {
    let p = p.value();
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Rows `0..=n` of Pascal's triangle, for evaluating many inner sums at the
/// same `n` without recomputing binomials.
#[derive(Clone, Debug)]
pub struct PascalRows {
    rows: Vec<Vec<BigUint>>,
}

impl PascalRows {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        rows.push(alloc::vec![BigUint::one()]);
        for m in 1..=n {
            let prev = &rows[m - 1];
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigUint::one());
            for j in 1..m {
                row.push(&prev[j - 1] + &prev[j]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        PascalRows { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(m, j)`, zero when `j > m`.
    pub fn get(&self, m: usize, j: usize) -> BigUint {
        self.rows[m].get(j).cloned().unwrap_or_default()
    }

    fn get_ref(&self, m: usize, j: usize) -> &BigUint {
        &self.rows[m][j]
    }
}

/// The exact alternating sum
/// `S_i = sum_x (-1)^x C(n-i, k-x) C(i, x)` over
/// `x = max(0, i-(n-k)) ..= min(i, k)`.
pub fn inner_sum(n: usize, k: usize, i: usize) -> Result<BigInt> {
    if k > n || i > n {
        return Err(domain(format!("inner_sum({n}, {k}, {i}) out of range")));
    }
    let rows = PascalRows::new(n);
    Ok(inner_sum_with(&rows, n, k, i))
}

/// [`inner_sum`] against a precomputed table; indices must already be valid
/// and `rows.max_n() >= n`.
pub fn inner_sum_with(rows: &PascalRows, n: usize, k: usize, i: usize) -> BigInt {
    let lo = i.saturating_sub(n - k);
    let hi = i.min(k);
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for x in lo..=hi {
        let term = rows.get_ref(n - i, k - x) * rows.get_ref(i, x);
        if x % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
    }
    BigInt::from(pos) - BigInt::from(neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pascal_oracle(n: usize) -> Vec<Vec<u128>> {
        let mut t = vec![vec![1u128]];
        for m in 1..=n {
            let mut row = vec![1u128; m + 1];
            for j in 1..m {
                row[j] = t[m - 1][j - 1] + t[m - 1][j];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(4, 1).unwrap(), BigCount::from(4));
        assert_eq!(binom(17, 0).unwrap(), BigCount::from(1));
        assert_eq!(binom(0, 0).unwrap(), BigCount::from(1));
        let t = pascal_oracle(10);
        assert_eq!(t[10][5], 252);
        assert_eq!(binom(10, 5).unwrap(), BigCount::from(252));
    }

    #[test]
    fn binom_matches_pascal_oracle() {
        let t = pascal_oracle(100);
        for (n, row) in t.iter().enumerate() {
            for (k, &want) in row.iter().enumerate().take(n + 1) {
                let b = binom(n as u64, k as u64).unwrap();
                assert_eq!(b.value(), &BigUint::from(want), "C({n},{k})");
            }
        }
    }

    #[test]
    fn binom_rejects_k_above_n() {
        assert!(matches!(binom(3, 4), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn log2_big_exact_powers_and_zero() {
        assert_eq!(log2_big(&BigUint::one()).unwrap(), 0.0);
        assert_eq!(log2_big(&(BigUint::one() << 53u32)).unwrap(), 53.0);
        assert_eq!(log2_big(&(BigUint::one() << 4000u32)).unwrap(), 4000.0);
        assert!(log2_big(&BigUint::zero()).is_err());
    }

    #[test]
    fn log2_big_of_central_binomial() {
        // log2 C(100,50) = sum log2(51..=100) - sum log2(1..=50)
        let oracle: f64 = (51..=100).map(|j| libm::log2(j as f64)).sum::<f64>()
            - (1..=50).map(|j| libm::log2(j as f64)).sum::<f64>();
        let got = binom(100, 50).unwrap().log2().unwrap();
        assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
    }

    #[test]
    fn log2_big_huge_value() {
        // 3 * 2^10000
        let x = BigUint::from(3u32) << 10000u32;
        let got = log2_big(&x).unwrap();
        assert!((got - (10000.0 + libm::log2(3.0))).abs() < 1e-12);
    }

    #[test]
    fn shannon_h_values() {
        assert_eq!(shannon_h(Prob::new(0.5).unwrap()), 1.0);
        assert_eq!(shannon_h(Prob::new(0.0).unwrap()), 0.0);
        assert_eq!(shannon_h(Prob::new(1.0).unwrap()), 0.0);
        // -0.8 log2 0.8 - 0.2 log2 0.2, evaluated with mpmath
        let h = shannon_h(Prob::new(0.8).unwrap());
        assert!((h - 0.721_928_094_887_362_3).abs() < 1e-14);
    }

    #[test]
    fn prob_rejects_out_of_range() {
        assert!(Prob::new(-0.1).is_err());
        assert!(Prob::new(1.5).is_err());
        assert!(Prob::new(f64::NAN).is_err());
    }

    #[test]
    fn inner_sum_four_one() {
        assert_eq!(inner_sum(4, 1, 0).unwrap(), BigInt::from(4));
        assert_eq!(inner_sum(4, 1, 1).unwrap(), BigInt::from(2));
        assert_eq!(inner_sum(4, 1, 2).unwrap(), BigInt::from(0));
        assert_eq!(inner_sum(4, 1, 3).unwrap(), BigInt::from(-2));
        assert_eq!(inner_sum(4, 1, 4).unwrap(), BigInt::from(-4));
        assert!(inner_sum(4, 5, 0).is_err());
        assert!(inner_sum(4, 1, 5).is_err());
    }

    /// Brute force: S_i = sum over weight-k strings s of (-1)^{popcount(s & b)}
    /// for any b of weight i.
    #[test]
    fn inner_sum_matches_character_sum() {
        for n in 0..=10usize {
            for k in 0..=n {
                for i in 0..=n {
                    let b: u32 = (1u32 << i) - 1;
                    let mut acc: i64 = 0;
                    for s in 0u32..(1 << n) {
                        if s.count_ones() as usize == k {
                            acc += if (s & b).count_ones().is_multiple_of(2) { 1 } else { -1 };
                        }
                    }
                    assert_eq!(inner_sum(n, k, i).unwrap(), BigInt::from(acc), "{n} {k} {i}");
                }
            }
        }
    }

    #[test]
    fn weighted_square_sum_normalization() {
        for n in 0..=30usize {
            let rows = PascalRows::new(n);
            for k in 0..=n {
                let total: BigInt = (0..=n)
                    .map(|i| {
                        let s = inner_sum_with(&rows, n, k, i);
                        BigInt::from(rows.get(n, i)) * &s * &s
                    })
                    .sum();
                let expect = BigInt::from(rows.get(n, k)) << n;
                assert_eq!(total, expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn power_of_two_detection() {
        assert_eq!(BigCount::from(1).power_of_two_exponent(), Some(0));
        assert_eq!(BigCount::from(8).power_of_two_exponent(), Some(3));
        assert_eq!(BigCount::from(6).power_of_two_exponent(), None);
        assert_eq!(BigCount::from(0).power_of_two_exponent(), None);
    }

    #[test]
    fn rational_reduces() {
        let q = ExactRational::new(BigInt::from(6), BigInt::from(-8)).unwrap();
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(4));
        assert!(ExactRational::new(BigInt::from(1), BigInt::from(0)).is_err());
        assert!((q.log2_abs().unwrap() - libm::log2(0.75)).abs() < 1e-15);
    }
}
