//! Entanglement-of-formation bookkeeping for one copy of the Rohrlich state
//! `sqrt(1-p) |0>_A |theta>_BC + sqrt(p) |1>_A |tau>_BC`.

use alloc::format;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::math::{shannon_h, Prob};
use crate::oracle::PairEncoding;

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix over `{00,01,10,11}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitDensity {
    rho: Matrix4<Complex64>,
}

impl TwoQubitDensity {
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let herm = max_abs(&(rho - rho.adjoint()));
        if herm > 1e-12 {
            return Err(domain(format!("density matrix is not Hermitian (deviation {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(domain(format!("density matrix trace {tr} is not 1")));
        }
        let min_eig = rho.symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return Err(domain(format!("density matrix has eigenvalue {min_eig:e}")));
        }
        Ok(TwoQubitDensity { rho })
    }

    pub fn from_pure(psi: &[Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from_column_slice(psi);
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    /// `(U_B ⊗ U_C) rho (U_B ⊗ U_C)^†`.
    pub fn conjugate_local(&self, u_b: &Matrix2<Complex64>, u_c: &Matrix2<Complex64>) -> Result<Self> {
        let u: Matrix4<Complex64> = u_b.kronecker(u_c);
        let mut rho = u * self.rho * u.adjoint();
        // re-symmetrize rounding noise
        rho = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(rho)
    }
}

/// `(1 - p)|theta><theta| + p |tau><tau|` with the Bell-pair encoding: the BC
/// reduction of one Rohrlich state.
pub fn rp_reduced_bc(p: Prob) -> TwoQubitDensity {
    let enc = PairEncoding::bell();
    let theta = nalgebra::Vector4::from_column_slice(&enc.theta);
    let tau = nalgebra::Vector4::from_column_slice(&enc.tau);
    let w = |x: f64| Complex64::new(x, 0.0);
    let rho = theta * theta.adjoint() * w(1.0 - p.value()) + tau * tau.adjoint() * w(p.value());
    TwoQubitDensity { rho }
}

/// Amplitudes of one Rohrlich state, indexed `4a + 2b + c`.
pub fn rohrlich_state(p: Prob) -> [Complex64; 8] {
    let enc = PairEncoding::bell();
    let (a0, a1) = (libm::sqrt(1.0 - p.value()), libm::sqrt(p.value()));
    let mut out = [Complex64::new(0.0, 0.0); 8];
    for j in 0..4 {
        out[j] = enc.theta[j] * a0;
        out[4 + j] = enc.tau[j] * a1;
    }
    out
}

/// Largest entry magnitude.
pub fn max_abs(m: &Matrix4<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn spin_flip() -> Matrix4<Complex64> {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    // sigma_y ⊗ sigma_y
    Matrix4::new(z, z, z, -o, z, z, o, z, z, o, z, z, -o, z, z, z)
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`. With `rho = W W^†` and
/// `W` built from the scaled eigenvectors, the `l_i` are the singular values
/// of `W^T (Y⊗Y) W`; they equal the square roots of the spectrum of
/// `sqrt(rho) rho~ sqrt(rho)` without the loss of precision from taking square
/// roots of tiny eigenvalues.
pub fn concurrence(rho: &TwoQubitDensity) -> f64 {
    let eig = rho.rho.symmetric_eigen();
    let scale = eig.eigenvalues.map(|v| Complex64::new(libm::sqrt(v.max(0.0)), 0.0));
    let w = eig.eigenvectors * Matrix4::from_diagonal(&scale);
    let t = w.transpose() * spin_flip() * w;
    let mut l: [f64; 4] = [0.0; 4];
    for (slot, v) in l.iter_mut().zip(t.singular_values().iter()) {
        *slot = *v;
    }
    l.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// `H((1 + sqrt(1 - c^2)) / 2)` in ebits.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(domain(format!("concurrence {c} outside [0, 1]")));
    }
    let c = c.clamp(0.0, 1.0);
    let x = (1.0 + libm::sqrt(1.0 - c * c)) / 2.0;
    Ok(shannon_h(Prob::new(x.clamp(0.0, 1.0))?))
}

/// Per-copy quantities before and after the hypothetical reversible
/// concentration into GHZ states and BC singlets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EofLedger {
    pub p: Prob,
    /// `E_F` of the initial BC reduction.
    pub ef_in_per_copy: f64,
    /// `E_F` of the final BC reduction, `1 - H(p)`.
    pub ef_out_per_copy: f64,
    /// `ef_in + H(p) - 1`.
    pub locking_deficit_per_copy: f64,
    pub s_a_per_copy: f64,
    pub s_b_per_copy: f64,
}

pub fn ledger(p: Prob) -> EofLedger {
    let c = concurrence(&rp_reduced_bc(p));
    // concurrence is in [0, 1] by construction
    let ef_in = eof_from_concurrence(c.min(1.0)).unwrap_or(f64::NAN);
    let h = shannon_h(p);
    EofLedger {
        p,
        ef_in_per_copy: ef_in,
        ef_out_per_copy: 1.0 - h,
        locking_deficit_per_copy: ef_in + h - 1.0,
        s_a_per_copy: h,
        s_b_per_copy: 1.0,
    }
}
