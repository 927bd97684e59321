use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::PairEncoding;
use crate::error::{domain, Error, Result};
use crate::math::binom;
use crate::teststate::TestStateSpec;

/// Largest number of pairs the dense representation accepts (4^10 amplitudes).
pub const MAX_PAIRS: usize = 10;

/// Pure state of `n_pairs` B|C pairs.
///
/// `amps[(b << n) | c]` is the amplitude of `|b>_B |c>_C`, with pair `j`
/// stored in bit `n - 1 - j` of both strings so pair 0 is the most
/// significant (leftmost) position.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    n_pairs: usize,
    amps: Vec<Complex64>,
}

impl PureStateVector {
    pub fn new(n_pairs: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_pairs(n_pairs)?;
        if amps.len() != 1 << (2 * n_pairs) {
            return Err(domain(alloc::format!(
                "expected {} amplitudes for {n_pairs} pairs, got {}",
                1usize << (2 * n_pairs),
                amps.len()
            )));
        }
        let s = PureStateVector { n_pairs, amps };
        if (s.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(domain("state vector is not normalized"));
        }
        Ok(s)
    }

    pub(crate) fn from_raw(n_pairs: usize, amps: Vec<Complex64>) -> Self {
        PureStateVector { n_pairs, amps }
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amp(&self, b: usize, c: usize) -> Complex64 {
        self.amps[(b << self.n_pairs) | c]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureStateVector) -> Result<Complex64> {
        if self.n_pairs != other.n_pairs {
            return Err(domain("inner product of states on different pair counts"));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn fidelity(&self, other: &PureStateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// `self ⊗ other`, with `self` on the leading pairs.
    pub fn tensor(&self, other: &PureStateVector) -> Result<PureStateVector> {
        let (n1, n2) = (self.n_pairs, other.n_pairs);
        let n = n1 + n2;
        check_pairs(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
        for (i1, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (b1, c1) = (i1 >> n1, i1 & ((1 << n1) - 1));
            for (i2, x) in other.amps.iter().enumerate() {
                let (b2, c2) = (i2 >> n2, i2 & ((1 << n2) - 1));
                let b = (b1 << n2) | b2;
                let c = (c1 << n2) | c2;
                amps[(b << n) | c] = a * x;
            }
        }
        Ok(PureStateVector { n_pairs: n, amps })
    }
}

pub(crate) fn check_pairs(n: usize) -> Result<()> {
    if n > MAX_PAIRS {
        return Err(Error::Resource {
            what: "pairs",
            got: n,
            max: MAX_PAIRS,
        });
    }
    Ok(())
}

/// Index into the pair-major layout, where pair `j` owns base-4 digit
/// `n - 1 - j` with value `2 b_j + c_j`.
fn pair_major_index(idx: usize, n: usize) -> usize {
    let b = idx >> n;
    let c = idx & ((1 << n) - 1);
    let mut out = 0;
    for j in 0..n {
        let shift = n - 1 - j;
        let loc = (((b >> shift) & 1) << 1) | ((c >> shift) & 1);
        out = (out << 2) | loc;
    }
    out
}

/// Apply `m` (rows `dim_out`, cols `dim_in`) to the middle index of a tensor
/// laid out as `[prefix][mid][suffix]`.
fn contract_mid(
    data: &[Complex64],
    prefix: usize,
    dim_in: usize,
    dim_out: usize,
    suffix: usize,
    m: &[[Complex64; 4]],
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); prefix * dim_out * suffix];
    for a in 0..prefix {
        for (o, row) in m.iter().enumerate().take(dim_out) {
            for (i, &w) in row.iter().enumerate().take(dim_in) {
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                let src = (a * dim_in + i) * suffix;
                let dst = (a * dim_out + o) * suffix;
                for z in 0..suffix {
                    out[dst + z] += w * data[src + z];
                }
            }
        }
    }
    out
}

/// Coefficients of `state` in the `{theta, tau}^n` product basis, indexed by
/// pattern with pair `j` in bit `n - 1 - j` (bit set means `tau`).
///
/// Only the projection is returned; use [`from_pair_basis`] to measure what
/// falls outside the span.
pub fn to_pair_basis(state: &PureStateVector, enc: &PairEncoding) -> Vec<Complex64> {
    let n = state.n_pairs;
    let mut data = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for (idx, a) in state.amps.iter().enumerate() {
        data[pair_major_index(idx, n)] = *a;
    }
    let z = Complex64::new(0.0, 0.0);
    let mut bra = [[z; 4]; 2];
    for (bit, row) in bra.iter_mut().enumerate() {
        for (slot, v) in row.iter_mut().zip(enc.state(bit)) {
            *slot = v.conj();
        }
    }
    for j in 0..n {
        data = contract_mid(&data, 1 << j, 4, 2, 1 << (2 * (n - 1 - j)), &bra);
    }
    data
}

/// Expand pattern coefficients back into the computational basis. The result
/// is normalized only if `coeffs` is.
pub fn from_pair_basis(coeffs: &[Complex64], n: usize, enc: &PairEncoding) -> Result<PureStateVector> {
    check_pairs(n)?;
    if coeffs.len() != 1 << n {
        return Err(domain("pattern coefficient vector has the wrong length"));
    }
    let z = Complex64::new(0.0, 0.0);
    let mut ket = [[z; 4]; 4];
    for (loc, row) in ket.iter_mut().enumerate() {
        row[0] = enc.theta[loc];
        row[1] = enc.tau[loc];
    }
    let mut data = coeffs.to_vec();
    for j in 0..n {
        data = contract_mid(&data, 1 << (2 * j), 2, 4, 1 << (n - 1 - j), &ket);
    }
    let mut amps = vec![z; data.len()];
    for (idx, slot) in amps.iter_mut().enumerate() {
        *slot = data[pair_major_index(idx, n)];
    }
    Ok(PureStateVector::from_raw(n, amps))
}

/// Uniform superposition of every arrangement of `k` tau's among `n` pairs.
pub fn build_test_state(spec: &TestStateSpec, enc: &PairEncoding) -> Result<PureStateVector> {
    let (n, k) = (spec.n(), spec.k());
    check_pairs(n)?;
    let count = binom(n as u64, k as u64)?;
    let amp = 1.0 / libm::sqrt(num_traits::ToPrimitive::to_f64(count.value()).unwrap_or(f64::INFINITY));
    let coeffs: Vec<Complex64> = (0..1usize << n)
        .map(|s| {
            if s.count_ones() as usize == k {
                Complex64::new(amp, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    from_pair_basis(&coeffs, n, enc)
}
