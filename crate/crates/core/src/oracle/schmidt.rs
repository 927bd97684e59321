use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PureStateVector;
use crate::error::{domain, Result};
use crate::math::xlog2x;

/// Amplitudes with magnitude below this are treated as structural zeros when
/// looking for the one-entry-per-row shortcut.
const ZERO_AMP: f64 = 1e-14;
const MERGE_TOL: f64 = 1e-12;

/// Nonzero Schmidt probabilities with multiplicities, largest first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SchmidtSpectrum {
    pub probs: Vec<(f64, usize)>,
}

impl SchmidtSpectrum {
    fn from_values(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.retain(|&v| v > 1e-15);
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
        let mut probs: Vec<(f64, usize)> = Vec::new();
        for v in values {
            match probs.last_mut() {
                Some((head, m)) if (*head - v).abs() <= MERGE_TOL => *m += 1,
                _ => probs.push((v, 1)),
            }
        }
        SchmidtSpectrum { probs }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().map(|&(v, m)| v * m as f64).sum()
    }

    pub fn rank(&self) -> usize {
        self.probs.iter().map(|&(_, m)| m).sum()
    }
}

/// Schmidt spectrum of a `rows x cols` bipartite amplitude matrix stored
/// row-major.
///
/// When every row and column has at most one significant entry the
/// computational basis is already a Schmidt basis and the row weights are the
/// answer; otherwise the smaller reduced density matrix is diagonalized.
pub fn bipartite_spectrum(amps: &[Complex64], rows: usize, cols: usize) -> Result<SchmidtSpectrum> {
    if amps.len() != rows * cols {
        return Err(domain("amplitude matrix has the wrong size"));
    }
    if let Some(values) = monomial_weights(amps, rows, cols) {
        return Ok(SchmidtSpectrum::from_values(values));
    }
    let a = DMatrix::from_row_slice(rows, cols, amps);
    let rho = if rows <= cols { &a * a.adjoint() } else { a.adjoint() * &a };
    let eig = rho.symmetric_eigenvalues();
    Ok(SchmidtSpectrum::from_values(eig.iter().copied().collect()))
}

fn monomial_weights(amps: &[Complex64], rows: usize, cols: usize) -> Option<Vec<f64>> {
    let mut col_used = alloc::vec![false; cols];
    let mut values = Vec::new();
    for r in 0..rows {
        let row = &amps[r * cols..(r + 1) * cols];
        let mut hit = None;
        for (c, a) in row.iter().enumerate() {
            if a.norm() > ZERO_AMP {
                if hit.is_some() || col_used[c] {
                    return None;
                }
                hit = Some(c);
            }
        }
        if let Some(c) = hit {
            col_used[c] = true;
            values.push(row.iter().map(|a| a.norm_sqr()).sum());
        }
    }
    Some(values)
}

/// Spectrum of Bob's reduced density operator.
pub fn schmidt_spectrum(state: &PureStateVector) -> Result<SchmidtSpectrum> {
    if (state.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(domain("Schmidt spectrum of a non-normalized state"));
    }
    let d = 1usize << state.n_pairs();
    bipartite_spectrum(state.amps(), d, d)
}

/// Von Neumann entropy in ebits.
pub fn entropy_of(spec: &SchmidtSpectrum) -> f64 {
    -spec.probs.iter().map(|&(v, m)| m as f64 * xlog2x(v)).sum::<f64>()
}

/// `|E(in) - E(out)|`, a lower bound on the B|C entanglement any unitary
/// mapping one to the other must consume.
pub fn entanglement_delta(state_in: &PureStateVector, state_out: &PureStateVector) -> Result<f64> {
    let a = entropy_of(&schmidt_spectrum(state_in)?);
    let b = entropy_of(&schmidt_spectrum(state_out)?);
    Ok((a - b).abs())
}
