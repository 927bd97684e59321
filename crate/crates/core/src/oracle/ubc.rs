use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::state::check_pairs;
use super::{from_pair_basis, to_pair_basis, PairEncoding, PureStateVector};
use crate::error::{domain, Result};
use crate::math::binom;

/// The compression codebook as `(input pattern, image pattern)` pairs.
///
/// Inputs are the weight-`k` patterns in increasing (lexicographic) order;
/// the `j`-th one maps to `j` written on the leading `ceil(log2 C(n,k))`
/// pairs, followed by `theta` on every remaining pair.
pub fn codebook(n: usize, k: usize) -> Result<Vec<(usize, usize)>> {
    check_pairs(n)?;
    if k > n {
        return Err(domain(format!("k = {k} exceeds n = {n}")));
    }
    let count = num_traits::ToPrimitive::to_usize(binom(n as u64, k as u64)?.value()).unwrap_or(usize::MAX);
    let lead = if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    };
    Ok((0..1usize << n)
        .filter(|s| s.count_ones() as usize == k)
        .enumerate()
        .map(|(j, s)| (s, j << (n - lead)))
        .collect())
}

/// Apply the relabeling unitary to a state supported on the weight-`k`
/// permutation subspace of the encoding's pair basis.
pub fn apply_ubc(state: &PureStateVector, n: usize, k: usize, enc: &PairEncoding) -> Result<PureStateVector> {
    if state.n_pairs() != n {
        return Err(domain(format!("state has {} pairs, expected {n}", state.n_pairs())));
    }
    let book = codebook(n, k)?;
    let coeffs = to_pair_basis(state, enc);
    let back = from_pair_basis(&coeffs, n, enc)?;
    let residual: f64 = state
        .amps()
        .iter()
        .zip(back.amps())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>();
    if libm::sqrt(residual) > 1e-10 {
        return Err(domain("state is not in the span of the pair basis"));
    }
    let outside: f64 = coeffs
        .iter()
        .enumerate()
        .filter(|(s, _)| s.count_ones() as usize != k)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if libm::sqrt(outside) > 1e-10 {
        return Err(domain(format!("state leaves the weight-{k} permutation subspace")));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len()];
    for &(src, dst) in &book {
        out[dst] = coeffs[src];
    }
    from_pair_basis(&out, n, enc)
}
