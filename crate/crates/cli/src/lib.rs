//! Dataset commands behind the `entconc` binary.

use std::io;

use entconc::eof::ledger;
use entconc::math::binom;
use entconc::oracle::{
    apply_ubc, build_test_state, entanglement_delta, entropy_of, from_pair_basis, n2_locc_check, schmidt_spectrum,
    PairEncoding, PureStateVector,
};
use entconc::protocol::{run_batches_with, run_rng, BatchConfig, BatchRunStats};
use entconc::teststate::{e_in, e_out, gap_scan, integer_k, report, slope_fit};
use entconc::{Prob, TestStateSpec};
use num_complex::Complex64;
use serde_json::{json, Value};

pub mod dataset;

pub use dataset::{format_real, Cell, Dataset};

/// Default for `--seed`.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Largest `n` the brute-force check accepts.
pub const ORACLE_MAX_N: usize = 8;

const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] entconc::Error),

    #[error("output failed: {0}")]
    Io(#[from] io::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn prob(p: f64) -> Result<Prob> {
    Prob::new(p).map_err(|_| usage(format!("probability {p} is outside [0, 1]")))
}

/// Rows `(n, k, e_in, e_out, gap)` for `n = step, 2 step, ...` up to `n_max`.
pub fn fig2(p: Prob, n_max: usize, step: usize) -> Result<Dataset> {
    if step == 0 {
        return Err(usage("--step must be positive"));
    }
    if integer_k(step, p).is_err() {
        return Err(usage(format!("step {step} times p = {} is not an integer", p.value())));
    }
    let n_list: Vec<usize> = (1..).map(|j| j * step).take_while(|&n| n <= n_max).collect();
    if n_list.is_empty() {
        return Err(usage(format!("no n in [{step}, {n_max}]")));
    }
    let mut d = Dataset::new("fig2", &["n", "k", "e_in", "e_out", "gap"]);
    for r in gap_scan(p, &n_list)? {
        d.push(vec![r.n.into(), r.k.into(), r.e_in.into(), r.e_out.into(), r.gap.into()]);
    }
    Ok(d)
}

/// Smallest `s >= 1` with `s p` an integer, searched up to `limit`.
pub fn integer_step(p: Prob, limit: usize) -> Option<usize> {
    (1..=limit).find(|&s| integer_k(s, p).is_ok())
}

/// The `n` grid used for one `p` of Fig. 3: ten evenly spaced multiples of
/// the integer step ending near `n_max`, or every multiple when fewer fit.
pub fn fig3_grid(p: Prob, n_max: usize) -> Vec<usize> {
    let Some(s) = integer_step(p, n_max) else {
        return Vec::new();
    };
    let g = (n_max / 10) / s * s;
    if g == 0 {
        (1..).map(|j| j * s).take_while(|&n| n <= n_max).collect()
    } else {
        (1..=10).map(|j| j * g).collect()
    }
}

/// Rows `(p, slope, residual)`. A `p` whose grid is too small for a fit gets
/// a NaN row and a message in the returned warnings.
pub fn fig3(p_list: &[Prob], n_max: usize) -> Result<(Dataset, Vec<String>)> {
    if p_list.is_empty() {
        return Err(usage("--p-list is empty"));
    }
    let mut d = Dataset::new("fig3", &["p", "slope", "residual"]);
    let mut warnings = Vec::new();
    for &p in p_list {
        let grid = fig3_grid(p, n_max);
        match slope_fit(p, &grid) {
            Ok(fit) => d.push(vec![p.value().into(), fit.slope.into(), fit.residual.into()]),
            Err(e) => {
                warnings.push(format!("p = {}: {e} (grid {grid:?})", p.value()));
                d.push(vec![p.value().into(), f64::NAN.into(), f64::NAN.into()]);
            }
        }
    }
    Ok((d, warnings))
}

/// Outcome of [`oracle_check`]: the JSON report, and every `(n, k)` that failed.
#[derive(Clone, Debug)]
pub struct OracleCheck {
    pub report: Value,
    pub failures: Vec<(usize, usize, String)>,
    pub n2_locc_passed: bool,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.n2_locc_passed
    }
}

fn basis_image(s: usize, n: usize, k: usize, enc: &PairEncoding) -> Result<PureStateVector> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 1 << n];
    coeffs[s] = Complex64::new(1.0, 0.0);
    Ok(apply_ubc(&from_pair_basis(&coeffs, n, enc)?, n, k, enc)?)
}

fn isometry_deviation(n: usize, k: usize, enc: &PairEncoding) -> Result<f64> {
    let images: Vec<PureStateVector> = (0..1usize << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| basis_image(s, n, k, enc))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in images.iter().enumerate() {
        for (j, b) in images.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b)? - Complex64::new(want, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Closed forms against brute force for every `n <= n_max` and `k <= n`.
///
/// `e_in` must agree to 1e-10. `e_out` must agree to 1e-10 when `C(n,k)` is a
/// power of two; otherwise the brute-force value is reported alongside the
/// closed form and only required not to fall below it.
pub fn oracle_check(n_max: usize) -> Result<OracleCheck> {
    if n_max == 0 || n_max > ORACLE_MAX_N {
        return Err(usage(format!("--n-max must be in 1..={ORACLE_MAX_N}")));
    }
    let bell = PairEncoding::bell();
    let product = PairEncoding::product();
    let mut entries = Vec::new();
    let mut isometry = Vec::new();
    let mut example_i = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            let spec = TestStateSpec::bell(n, k)?;
            let state = build_test_state(&spec, &bell)?;
            let oracle_in = entropy_of(&schmidt_spectrum(&state)?);
            let out = apply_ubc(&state, n, k, &bell)?;
            let oracle_out = entropy_of(&schmidt_spectrum(&out)?);
            let (formula_in, formula_out) = (e_in(&spec), e_out(&spec));
            let delta_in = (oracle_in - formula_in).abs();
            let delta_out = oracle_out - formula_out;
            let exact = binom(n as u64, k as u64)?.power_of_two_exponent().is_some();
            let in_ok = delta_in < CHECK_TOL;
            let out_ok = if exact {
                delta_out.abs() < CHECK_TOL
            } else {
                delta_out > -CHECK_TOL
            };
            if !in_ok {
                failures.push((n, k, format!("e_in delta {delta_in:e}")));
            }
            if !out_ok {
                failures.push((n, k, format!("e_out delta {delta_out:e}")));
            }
            entries.push(json!({
                "n": n,
                "k": k,
                "e_in": formula_in,
                "e_in_oracle": oracle_in,
                "e_in_delta": delta_in,
                "e_out": formula_out,
                "e_out_oracle": oracle_out,
                "e_out_delta": delta_out,
                "e_out_mode": if exact { "exact" } else { "lower_bound" },
                "pass": in_ok && out_ok,
            }));

            let dev = isometry_deviation(n, k, &bell)?;
            if dev >= CHECK_TOL {
                failures.push((n, k, format!("isometry deviation {dev:e}")));
            }
            isometry.push(json!({ "n": n, "k": k, "max_gram_deviation": dev, "pass": dev < CHECK_TOL }));

            let pspec = TestStateSpec::product(n, k)?;
            let ps = build_test_state(&pspec, &product)?;
            let delta = entanglement_delta(&ps, &apply_ubc(&ps, n, k, &product)?)?;
            let gap = report(&pspec).gap;
            let ok = delta.abs() < CHECK_TOL && gap.abs() < CHECK_TOL;
            if !ok {
                failures.push((n, k, format!("product encoding gap {gap:e}, oracle delta {delta:e}")));
            }
            example_i.push(json!({ "n": n, "k": k, "gap": gap, "oracle_delta": delta, "pass": ok }));
        }
    }
    let locc = n2_locc_check()?;
    let n2_locc_passed = locc.passed(CHECK_TOL);
    let report = json!({
        "schema": "oracle-check/1",
        "n_max": n_max,
        "tolerance": CHECK_TOL,
        "entries": entries,
        "isometry": isometry,
        "example_i": example_i,
        "n2_locc": if n2_locc_passed { "pass" } else { "fail" },
        "n2_locc_min_fidelity": locc.min_fidelity(),
        "n2_locc_phase_spread": locc.phase_spread(),
        "failures": failures.iter().map(|(n, k, why)| json!({ "n": n, "k": k, "reason": why })).collect::<Vec<_>>(),
    });
    Ok(OracleCheck {
        report,
        failures,
        n2_locc_passed,
    })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// One row per trial plus a summary row. Trial `t` draws from stream `t` of
/// the generator seeded with `cfg.seed`.
pub fn batch(cfg: &BatchConfig, trials: u64) -> Result<Dataset> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    cfg.validate()?;
    let mut d = Dataset::new(
        "batch",
        &["trial", "m_batches", "l", "eps_prime", "n_total", "gamma_bound", "status", "mean_m", "stderr_m"],
    );
    let mut m = Vec::new();
    for t in 0..trials {
        let (stats, status): (BatchRunStats, &str) = match run_batches_with(cfg, &mut run_rng(cfg.seed, t)) {
            Ok(s) => (s, "ok"),
            Err(entconc::Error::Truncated(s)) => (*s, "truncated"),
            Err(e) => return Err(e.into()),
        };
        m.push(stats.m_batches as f64);
        d.push(vec![
            t.into(),
            stats.m_batches.into(),
            stats.l.into(),
            stats.eps_prime.into(),
            stats.n_total.into(),
            stats.gamma_entropy_bound.into(),
            status.into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    let (mean, se) = mean_stderr(&m);
    let mut summary = vec![Cell::from("summary")];
    summary.extend(std::iter::repeat_n(Cell::Empty, 6));
    summary.extend([mean.into(), se.into()]);
    d.push(summary);
    Ok(d)
}

/// The default 101-point grid `0, 0.01, ..., 1`.
pub fn eof_default_grid() -> Vec<Prob> {
    (0..=100).filter_map(|j| Prob::new(j as f64 / 100.0).ok()).collect()
}

/// Rows `(p, ef_in, ef_out, locking_deficit, s_a, s_b)`.
pub fn eof(grid: &[Prob]) -> Result<Dataset> {
    if grid.is_empty() {
        return Err(usage("empty p grid"));
    }
    let mut d = Dataset::new("eof", &["p", "ef_in", "ef_out", "locking_deficit", "s_a", "s_b"]);
    for &p in grid {
        let l = ledger(p);
        d.push(vec![
            p.value().into(),
            l.ef_in_per_copy.into(),
            l.ef_out_per_copy.into(),
            l.locking_deficit_per_copy.into(),
            l.s_a_per_copy.into(),
            l.s_b_per_copy.into(),
        ]);
    }
    Ok(d)
}
