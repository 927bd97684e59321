use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::teststate::Encoding;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// An orthonormal pair of two-qubit states over the basis `{00, 01, 10, 11}`,
/// Bob's qubit first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEncoding {
    pub theta: [Complex64; 4],
    pub tau: [Complex64; 4],
}

fn dot(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl PairEncoding {
    pub fn new(theta: [Complex64; 4], tau: [Complex64; 4]) -> Result<Self> {
        let nt = dot(&theta, &theta).re;
        let nu = dot(&tau, &tau).re;
        if (nt - 1.0).abs() > 1e-12 || (nu - 1.0).abs() > 1e-12 {
            return Err(domain("pair encoding states must be normalized"));
        }
        if dot(&theta, &tau).norm() > 1e-12 {
            return Err(domain("pair encoding states must be orthogonal"));
        }
        Ok(PairEncoding { theta, tau })
    }

    /// `|00>` and `|11>`.
    pub fn product() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        PairEncoding {
            theta: [o, z, z, z],
            tau: [z, z, z, o],
        }
    }

    /// `(|00> +- |11>)/sqrt 2`.
    pub fn bell() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        PairEncoding {
            theta: [h, z, z, h],
            tau: [h, z, z, -h],
        }
    }

    /// `theta` for bit 0, `tau` for bit 1.
    pub fn state(&self, bit: usize) -> &[Complex64; 4] {
        if bit == 0 {
            &self.theta
        } else {
            &self.tau
        }
    }
}

impl From<Encoding> for PairEncoding {
    fn from(e: Encoding) -> Self {
        match e {
            Encoding::Product => PairEncoding::product(),
            Encoding::Bell => PairEncoding::bell(),
        }
    }
}
