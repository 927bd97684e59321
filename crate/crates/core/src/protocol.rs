//! Stochastic side of the concentration protocol: Alice's weight
//! measurement, and batching measured blocks until the accumulated Schmidt
//! rank `D_M = prod_i C(n, k_i)` sits just above a power of two.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{domain, Error, Result};
use crate::math::{binom, log2_big, shannon_h, Prob};
use crate::oracle::{entropy_of, from_pair_basis, schmidt_spectrum, PairEncoding, PureStateVector, MAX_PAIRS};

/// `D_M` is kept as an exact integer while it has at most this many bits.
pub const EXACT_BITS: u64 = 10_000;

/// The generator used for every stochastic run.
pub type ProtocolRng = ChaCha8Rng;

/// Independent stream `run_index` of the generator seeded with `seed`.
pub fn run_rng(seed: u64, run_index: u64) -> ProtocolRng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// Number of `1`s Alice finds when measuring `n` copies: one Binomial(n, p) draw.
pub fn sample_k<R: Rng + ?Sized>(n: usize, p: Prob, rng: &mut R) -> usize {
    match Binomial::new(n as u64, p.value()) {
        Ok(dist) => dist.sample(rng) as usize,
        // p is validated, so this is unreachable in practice
        Err(_) => 0,
    }
}

/// Binomial probability mass inside `[np - c sqrt n, np + c sqrt n]`.
pub fn typical_mass(n: usize, p: Prob, c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(domain(format!("typical window half-width c = {c} must be positive")));
    }
    let pv = p.value();
    let centre = n as f64 * pv;
    let half = c * libm::sqrt(n as f64);
    let lo = libm::ceil(centre - half).max(0.0) as usize;
    let hi = (libm::floor(centre + half).min(n as f64)) as usize;
    let mut total = 0.0;
    for k in lo..=hi {
        total += binomial_pmf(n, k, pv)?;
    }
    Ok(total)
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> Result<f64> {
    let (succ, fail) = (k as f64, (n - k) as f64);
    if (p == 0.0 && k > 0) || (p == 1.0 && k < n) {
        return Ok(0.0);
    }
    let lp = if k == 0 { 0.0 } else { succ * libm::log2(p) };
    let lq = if k == n { 0.0 } else { fail * libm::log2(1.0 - p) };
    let lc = binom(n as u64, k as u64)?.log2()?;
    Ok(libm::exp2(lc + lp + lq))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchConfig {
    /// Copies per batch.
    pub n: usize,
    pub p: Prob,
    pub epsilon: f64,
    pub max_batches: usize,
    pub seed: u64,
}

impl BatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("batch size must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(domain(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if self.max_batches == 0 {
            return Err(domain("max_batches must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchRunStats {
    /// Number of batches measured, `M`.
    pub m_batches: usize,
    pub k_list: Vec<usize>,
    /// `floor(log2 D_M)`.
    pub l: u64,
    /// `D_M / 2^l - 1`.
    pub eps_prime: f64,
    /// `log2 D_M`.
    pub gamma_log2: f64,
    /// `N = M n`.
    pub n_total: usize,
    /// `2 (epsilon N + 2)`.
    pub gamma_entropy_bound: f64,
    /// `N (1 - H(p))`, the expected entanglement of the theta tail.
    pub theta_tail_ebits: f64,
    /// Pairs left in `theta` after compression, `N - (l + 1)`.
    pub tail_pairs: usize,
    /// Whether the stopping rule fired (false only inside a truncation error).
    pub terminated: bool,
}

/// Accumulates `log2 D_M` as an exact integer while it is small enough, then
/// as separate integer and fractional parts.
#[derive(Debug, Clone)]
enum RankAccumulator {
    Exact(BigUint),
    Log { int: u64, frac: f64 },
}

impl RankAccumulator {
    fn mul(&mut self, count: &BigUint) -> Result<()> {
        match self {
            RankAccumulator::Exact(d) => {
                *d *= count;
                if d.bits() > EXACT_BITS {
                    let l = log2_big(d)?;
                    let int = libm::floor(l);
                    *self = RankAccumulator::Log {
                        int: int as u64,
                        frac: l - int,
                    };
                }
            }
            RankAccumulator::Log { int, frac } => {
                let l = log2_big(count)?;
                let li = libm::floor(l);
                *int += li as u64;
                *frac += l - li;
                if *frac >= 1.0 {
                    *frac -= 1.0;
                    *int += 1;
                }
            }
        }
        Ok(())
    }

    /// `(l, D / 2^l)` with the ratio in `[1, 2)`.
    fn split(&self) -> Result<(u64, f64)> {
        match self {
            RankAccumulator::Exact(d) => {
                let bits = d.bits();
                if bits == 0 {
                    return Err(domain("empty Schmidt rank"));
                }
                let l = bits - 1;
                // top 64 bits give the ratio to ~1e-19
                let ratio = if bits <= 64 {
                    num_traits::ToPrimitive::to_f64(d).unwrap_or(0.0) / libm::exp2(l as f64)
                } else {
                    let top = num_traits::ToPrimitive::to_u64(&(d >> (bits - 64))).unwrap_or(u64::MAX);
                    top as f64 / libm::exp2(63.0)
                };
                Ok((l, ratio))
            }
            RankAccumulator::Log { int, frac } => Ok((*int, libm::exp2(*frac))),
        }
    }
}

/// Measure batches of `n` copies until `D_M` lies in `[2^l, 2^l (1 + eps)]`.
pub fn run_batches(cfg: &BatchConfig) -> Result<BatchRunStats> {
    run_batches_with(cfg, &mut run_rng(cfg.seed, 0))
}

/// [`run_batches`] drawing from a caller-supplied generator.
pub fn run_batches_with<R: Rng + ?Sized>(cfg: &BatchConfig, rng: &mut R) -> Result<BatchRunStats> {
    cfg.validate()?;
    let mut acc = RankAccumulator::Exact(BigUint::one());
    let mut k_list = Vec::new();
    let mut l = 0;
    let mut ratio = 1.0;
    let mut terminated = false;
    while k_list.len() < cfg.max_batches {
        let k = sample_k(cfg.n, cfg.p, rng);
        k_list.push(k);
        acc.mul(binom(cfg.n as u64, k as u64)?.value())?;
        (l, ratio) = acc.split()?;
        if ratio <= 1.0 + cfg.epsilon {
            terminated = true;
            break;
        }
    }
    let m = k_list.len();
    let n_total = m * cfg.n;
    let stats = BatchRunStats {
        m_batches: m,
        k_list,
        l,
        eps_prime: ratio - 1.0,
        gamma_log2: l as f64 + libm::log2(ratio),
        n_total,
        gamma_entropy_bound: 2.0 * (cfg.epsilon * n_total as f64 + 2.0),
        theta_tail_ebits: n_total as f64 * (1.0 - shannon_h(cfg.p)),
        tail_pairs: n_total.saturating_sub(l as usize + 1),
        terminated,
    };
    if terminated {
        Ok(stats)
    } else {
        Err(Error::Truncated(Box::new(stats)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpositionBoundInput {
    /// `|alpha|^2`, weight of the first branch.
    pub alpha_sq: f64,
    pub e1: f64,
    pub e2: f64,
}

/// `2 [a E1 + (1 - a) E2 + H(a)]`: an upper bound on the entanglement of
/// `sqrt(a) phi_1 + sqrt(1 - a) phi_2` for orthogonal bipartite pure states.
pub fn superposition_bound(inp: &SuperpositionBoundInput) -> Result<f64> {
    if !(0.0..=1.0).contains(&inp.alpha_sq) {
        return Err(domain(format!("alpha^2 = {} outside [0, 1]", inp.alpha_sq)));
    }
    if inp.e1 < 0.0 || inp.e2 < 0.0 {
        return Err(domain("branch entanglements must be nonnegative"));
    }
    let a = inp.alpha_sq;
    Ok(2.0 * (a * inp.e1 + (1.0 - a) * inp.e2 + shannon_h(Prob::new(a)?)))
}

/// Directly computed entanglement of an explicit `Gamma_M` state.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaReport {
    pub l: usize,
    pub eps_prime_count: usize,
    pub tail_pairs: usize,
    /// Total pairs `N = 1 + l + tail_pairs`.
    pub n_total: usize,
    /// `eps_prime_count / 2^l`.
    pub eps_prime: f64,
    /// `1 / (1 + eps_prime)`.
    pub alpha_sq: f64,
    /// Entanglement of `Gamma_M` itself.
    pub entanglement: f64,
    /// Entanglement of `Gamma_M ⊗ theta^tail_pairs`.
    pub with_tail: f64,
    pub e_phi1: f64,
    /// Zero when the second branch is empty.
    pub e_phi2: f64,
    /// [`superposition_bound`] for the two branches.
    pub superposition_bound: f64,
    /// `2 (eps_prime N + 2)`.
    pub batch_bound: f64,
}

fn uniform_over(patterns: &[usize], n: usize, enc: &PairEncoding) -> Result<PureStateVector> {
    let mut coeffs = alloc::vec![Complex64::new(0.0, 0.0); 1 << n];
    let a = 1.0 / libm::sqrt(patterns.len() as f64);
    for &s in patterns {
        coeffs[s] = Complex64::new(a, 0.0);
    }
    from_pair_basis(&coeffs, n, enc)
}

fn state_entropy(s: &PureStateVector) -> Result<f64> {
    Ok(entropy_of(&schmidt_spectrum(s)?))
}

/// Build `Gamma_M` on `1 + l` Bell-encoded pairs: `theta` followed by every
/// `l`-pair string, plus `tau` followed by the first `eps_prime_count`
/// strings, uniformly weighted. `tail_pairs` extra `theta` pairs model the
/// compressed-away remainder of the ensemble.
pub fn gamma_state_direct(l: usize, eps_prime_count: usize, tail_pairs: usize) -> Result<GammaReport> {
    if l > 12 {
        return Err(Error::Resource {
            what: "l",
            got: l,
            max: 12,
        });
    }
    let n_total = 1 + l + tail_pairs;
    if n_total > MAX_PAIRS {
        return Err(Error::Resource {
            what: "pairs",
            got: n_total,
            max: MAX_PAIRS,
        });
    }
    let branch = 1usize << l;
    if eps_prime_count >= branch && eps_prime_count > 0 {
        return Err(domain(format!(
            "eps_prime_count = {eps_prime_count} must be below 2^l = {branch}"
        )));
    }
    let enc = PairEncoding::bell();
    let n = 1 + l;
    let phi1: Vec<usize> = (0..branch).collect();
    let phi2: Vec<usize> = (0..eps_prime_count).map(|j| branch + j).collect();
    let all: Vec<usize> = phi1.iter().chain(&phi2).copied().collect();

    let gamma = uniform_over(&all, n, &enc)?;
    let entanglement = state_entropy(&gamma)?;
    let with_tail = if tail_pairs == 0 {
        entanglement
    } else {
        let tail = uniform_over(&[0], tail_pairs, &enc)?;
        state_entropy(&gamma.tensor(&tail)?)?
    };
    let e_phi1 = state_entropy(&uniform_over(&phi1, n, &enc)?)?;
    let e_phi2 = if phi2.is_empty() {
        0.0
    } else {
        state_entropy(&uniform_over(&phi2, n, &enc)?)?
    };
    let eps_prime = eps_prime_count as f64 / branch as f64;
    let alpha_sq = 1.0 / (1.0 + eps_prime);
    let sb = superposition_bound(&SuperpositionBoundInput {
        alpha_sq,
        e1: e_phi1,
        e2: e_phi2,
    })?;
    Ok(GammaReport {
        l,
        eps_prime_count,
        tail_pairs,
        n_total,
        eps_prime,
        alpha_sq,
        entanglement,
        with_tail,
        e_phi1,
        e_phi2,
        superposition_bound: sb,
        batch_bound: 2.0 * (eps_prime * n_total as f64 + 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, p: f64, epsilon: f64, seed: u64) -> BatchConfig {
        BatchConfig {
            n,
            p: Prob::new(p).unwrap(),
            epsilon,
            max_batches: 100_000,
            seed,
        }
    }

    #[test]
    fn sample_k_edges() {
        let mut rng = run_rng(1, 0);
        for _ in 0..100 {
            assert_eq!(sample_k(17, Prob::new(0.0).unwrap(), &mut rng), 0);
            assert_eq!(sample_k(17, Prob::new(1.0).unwrap(), &mut rng), 17);
        }
    }

    #[test]
    fn sample_k_mean() {
        let mut rng = run_rng(7, 0);
        let p = Prob::new(0.8).unwrap();
        let draws = 100_000;
        let sum: usize = (0..draws).map(|_| sample_k(100, p, &mut rng)).sum();
        let mean = sum as f64 / draws as f64;
        // sd of the mean = sqrt(100 * 0.8 * 0.2 / 1e5) ~ 0.0126
        assert!((mean - 80.0).abs() < 0.4, "{mean}");
    }

    #[test]
    fn typical_mass_examples() {
        let half = Prob::new(0.5).unwrap();
        assert!((typical_mass(100, half, 100.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((typical_mass(1, half, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // window is c sqrt(n) = 20 wide on each side: P(30 <= X <= 70) for
        // X ~ Bin(100, 1/2), summed with exact binomials in Python
        let m = typical_mass(100, half, 2.0).unwrap();
        assert!((m - 0.9999678399847044).abs() < 1e-12, "{m}");
        // c = 1 gives the two-sigma window [40, 60], close to the normal 0.954
        let m = typical_mass(100, half, 1.0).unwrap();
        assert!((m - 0.9647997997822952).abs() < 1e-12, "{m}");
        assert!((m - 0.954).abs() < 0.02);
        assert!(typical_mass(10, half, 0.0).is_err());
    }

    #[test]
    fn typical_mass_degenerate_p() {
        let zero = Prob::new(0.0).unwrap();
        assert!((typical_mass(50, zero, 0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn batching_with_wide_interval_stops_at_once() {
        let mut ones = 0;
        for seed in 0..200 {
            let s = run_batches(&cfg(20, 0.5, 0.999, seed)).unwrap();
            assert!(s.eps_prime >= 0.0 && s.eps_prime <= 0.999);
            if s.m_batches == 1 {
                ones += 1;
            }
        }
        assert!(ones >= 195, "{ones}");
    }

    #[test]
    fn batching_stats_are_consistent() {
        for seed in 0..500 {
            let c = cfg(20, 0.5, 0.1, seed);
            let s = run_batches(&c).unwrap();
            assert!(s.terminated);
            assert_eq!(s.k_list.len(), s.m_batches);
            assert_eq!(s.n_total, 20 * s.m_batches);
            assert!(s.eps_prime >= 0.0 && s.eps_prime <= 0.1);
            // recompute D_M exactly
            let mut d = BigUint::one();
            for &k in &s.k_list {
                d *= binom(20, k as u64).unwrap().into_inner();
            }
            assert_eq!(d.bits() - 1, s.l);
            assert!((log2_big(&d).unwrap() - s.gamma_log2).abs() < 1e-9);
        }
    }

    #[test]
    fn batching_is_deterministic() {
        let c = cfg(30, 0.3, 0.05, 42);
        assert_eq!(run_batches(&c).unwrap(), run_batches(&c).unwrap());
    }

    #[test]
    fn truncation_carries_partial_stats() {
        // C(20, k) has an odd factor for 0 < k < 20, so D_M essentially never
        // lands within 1e-9 of a power of two
        let c = BatchConfig {
            n: 20,
            p: Prob::new(0.5).unwrap(),
            epsilon: 1e-9,
            max_batches: 5,
            seed: 3,
        };
        match run_batches(&c) {
            Err(Error::Truncated(stats)) => {
                assert_eq!(stats.m_batches, 5);
                assert!(!stats.terminated);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn log_accumulation_matches_exact() {
        let counts: Vec<BigUint> = (0..400u64).map(|j| binom(60, 20 + j % 17).unwrap().into_inner()).collect();
        let mut acc = RankAccumulator::Exact(BigUint::one());
        let mut exact = BigUint::one();
        for c in &counts {
            acc.mul(c).unwrap();
            exact *= c;
        }
        assert!(matches!(acc, RankAccumulator::Log { .. }));
        let (l, ratio) = acc.split().unwrap();
        assert_eq!(l, exact.bits() - 1);
        let want = log2_big(&exact).unwrap() - l as f64;
        assert!((libm::log2(ratio) - want).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        assert!(run_batches(&cfg(0, 0.5, 0.1, 0)).is_err());
        assert!(run_batches(&cfg(5, 0.5, 0.0, 0)).is_err());
        assert!(run_batches(&cfg(5, 0.5, 1.0, 0)).is_err());
    }

    #[test]
    fn superposition_bound_examples() {
        let b = |a, e1, e2| superposition_bound(&SuperpositionBoundInput { alpha_sq: a, e1, e2 }).unwrap();
        assert_eq!(b(1.0, 1.0, 123.0), 2.0);
        assert_eq!(b(0.5, 0.0, 0.0), 2.0);
        let (eps, n) = (0.1, 50.0);
        let v = b(1.0 / (1.0 + eps), 1.0, n);
        assert!(v <= 2.0 * (eps * n + 2.0));
        assert!(superposition_bound(&SuperpositionBoundInput { alpha_sq: 1.5, e1: 0.0, e2: 0.0 }).is_err());
    }

    #[test]
    fn gamma_single_branch() {
        let r = gamma_state_direct(3, 0, 1).unwrap();
        assert!((r.entanglement - 1.0).abs() < 1e-12);
        assert!((r.with_tail - 2.0).abs() < 1e-12);
        assert!((r.e_phi1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_two_branch_examples() {
        let r = gamma_state_direct(2, 1, 0).unwrap();
        assert_eq!(r.n_total, 3);
        assert!(r.entanglement <= r.superposition_bound + 1e-12);
        assert!(r.superposition_bound <= r.batch_bound + 1e-12);
        let r = gamma_state_direct(3, 2, 0).unwrap();
        assert_eq!(r.n_total, 4);
        assert!(r.entanglement <= r.superposition_bound + 1e-12);
    }

    #[test]
    fn gamma_scale_limits() {
        assert!(matches!(gamma_state_direct(13, 0, 0), Err(Error::Resource { .. })));
        assert!(matches!(gamma_state_direct(5, 0, 5), Err(Error::Resource { .. })));
        assert!(gamma_state_direct(2, 4, 0).is_err());
    }
}
