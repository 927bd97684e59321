//! Closed-form entanglement of the permutation test state before and after
//! the compression relabeling.
//!
//! The test state on `n` pairs is the uniform superposition of every
//! arrangement of `k` copies of `tau` among `n - k` copies of `theta`. With the
//! Bell-pair encoding its Schmidt basis is the computational one, and the
//! amplitude on `|b>_B |b>_C` depends only on the Hamming weight `i` of `b`:
//! `xi_i = S_i / sqrt(2^n C(n,k))` with `S_i` the exact alternating sum from
//! [`crate::math::inner_sum`].

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::math::{binom, log2_big, ExactRational, PascalRows, Prob};

/// Which orthonormal pair `(theta, tau)` the two-qubit B|C registers use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// `theta = |00>`, `tau = |11>`: the family reduces to non-maximal GHZ states.
    Product,
    /// `theta = (|00> + |11>)/sqrt 2`, `tau = (|00> - |11>)/sqrt 2`.
    Bell,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TestStateSpec {
    n: usize,
    k: usize,
    encoding: Encoding,
}

impl TestStateSpec {
    pub fn new(n: usize, k: usize, encoding: Encoding) -> Result<Self> {
        if n == 0 {
            return Err(domain("test state needs at least one pair"));
        }
        if k > n {
            return Err(domain(alloc::format!("k = {k} exceeds n = {n}")));
        }
        Ok(TestStateSpec { n, k, encoding })
    }

    pub fn bell(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Encoding::Bell)
    }

    pub fn product(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Encoding::Product)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    fn log2_count(&self) -> f64 {
        // C(n,k) >= 1, so the log is always defined.
        binom(self.n as u64, self.k as u64)
            .and_then(|c| c.log2())
            .unwrap_or(0.0)
    }
}

/// Exact Schmidt data of a Bell-encoded test state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplitudeTable {
    pub n: usize,
    pub k: usize,
    /// `S_i` for `i = 0..=n`.
    pub s: Vec<BigInt>,
    /// `xi_i^2 = S_i^2 / (2^n C(n,k))`, reduced.
    pub xi_sq: Vec<ExactRational>,
}

impl AmplitudeTable {
    /// Sign of `xi_i`: -1, 0 or 1.
    pub fn sign(&self, i: usize) -> i32 {
        if self.s[i].is_zero() {
            0
        } else if self.s[i].is_negative() {
            -1
        } else {
            1
        }
    }

    /// Signed amplitudes as floats. Underflows to zero for very large `n`.
    pub fn xi_f64(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|i| f64::from(self.sign(i)) * libm::sqrt(self.xi_sq[i].to_f64()))
            .collect()
    }

    /// `sum_i C(n,i) xi_i^2`, which must be exactly one.
    pub fn weighted_norm(&self) -> ExactRational {
        let rows = PascalRows::new(self.n);
        (0..=self.n)
            .map(|i| ExactRational::from(BigInt::from(rows.get(self.n, i))) * self.xi_sq[i].clone())
            .sum()
    }
}

pub fn amplitude_table(spec: &TestStateSpec) -> Result<AmplitudeTable> {
    if spec.encoding != Encoding::Bell {
        return Err(Error::UnsupportedEncoding);
    }
    let (n, k) = (spec.n, spec.k);
    let rows = PascalRows::new(n);
    let denom = BigInt::from(rows.get(n, k)) << n;
    let s: Vec<BigInt> = (0..=n)
        .map(|i| crate::math::inner_sum_with(&rows, n, k, i))
        .collect();
    let xi_sq = s
        .iter()
        .map(|si| ExactRational::new(si * si, denom.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeTable { n, k, s, xi_sq })
}

/// Entanglement of the test state across the B|C cut, in ebits.
pub fn e_in(spec: &TestStateSpec) -> f64 {
    match spec.encoding {
        Encoding::Product => spec.log2_count(),
        Encoding::Bell => {
            let (n, k) = (spec.n, spec.k);
            let rows = PascalRows::new(n);
            let log_count = spec.log2_count();
            let mut e = 0.0;
            for i in 0..=n {
                let si = crate::math::inner_sum_with(&rows, n, k, i);
                if si.is_zero() {
                    continue;
                }
                // log2 xi_i^2 = 2 log2|S_i| - n - log2 C(n,k)
                let log_xi_sq = 2.0 * log2_big(si.magnitude()).unwrap_or(0.0) - n as f64 - log_count;
                let log_mult = log2_big(&rows.get(n, i)).unwrap_or(0.0);
                let weight = libm::exp2(log_mult + log_xi_sq);
                e -= weight * log_xi_sq;
            }
            e
        }
    }
}

/// Entanglement after the relabeling, taking `C(n,k)` as if it were an exact
/// power of two for the Bell encoding.
pub fn e_out(spec: &TestStateSpec) -> f64 {
    match spec.encoding {
        Encoding::Product => spec.log2_count(),
        Encoding::Bell => spec.n as f64 - spec.log2_count(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementReport {
    pub n: usize,
    pub k: usize,
    pub e_in: f64,
    pub e_out: f64,
    pub gap: f64,
}

pub fn report(spec: &TestStateSpec) -> EntanglementReport {
    let e_in = e_in(spec);
    let e_out = e_out(spec);
    EntanglementReport {
        n: spec.n,
        k: spec.k,
        e_in,
        e_out,
        gap: e_in - e_out,
    }
}

/// `k = n p` when that is an integer (within float noise).
pub fn integer_k(n: usize, p: Prob) -> Result<usize> {
    let x = n as f64 * p.value();
    let r = libm::round(x);
    if (x - r).abs() > 1e-9 * (1.0 + x.abs()) {
        return Err(Error::NonIntegerK { n, p: p.value() });
    }
    Ok(r as usize)
}

/// Bell-encoded reports for each `n`, with `k = n p`.
pub fn gap_scan(p: Prob, n_list: &[usize]) -> Result<Vec<EntanglementReport>> {
    n_list
        .iter()
        .map(|&n| {
            let k = integer_k(n, p)?;
            Ok(report(&TestStateSpec::bell(n, k)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub p: Prob,
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the points from the fitted line.
    pub residual: f64,
}

/// Ordinary least squares `y = slope x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn ols(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(domain("least-squares fit with all x equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    Ok((slope, intercept, libm::sqrt(ss / m)))
}

pub fn slope_fit(p: Prob, n_list: &[usize]) -> Result<SlopeFit> {
    if n_list.len() < 3 {
        return Err(Error::TooFewPoints(n_list.len()));
    }
    let reports = gap_scan(p, n_list)?;
    let points: Vec<(usize, f64)> = reports.iter().map(|r| (r.n, r.gap)).collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, g)| (n as f64, g)).collect();
    let (slope, intercept, residual) = ols(&xy)?;
    Ok(SlopeFit {
        p,
        points,
        slope,
        intercept,
        residual,
    })
}
