//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use entconc::eof::ledger;
use entconc::math::shannon_h;
use entconc::oracle::{
    apply_ubc, build_test_state, entanglement_delta, entropy_of, n2_locc_check, schmidt_spectrum, PairEncoding,
};
use entconc::protocol::{gamma_state_direct, run_batches_with, run_rng, BatchConfig};
use entconc::teststate::{amplitude_table, e_in, e_out, report, slope_fit};
use entconc::{ExactRational, Prob, TestStateSpec};
use num_bigint::BigInt;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let spent = start.elapsed();
    if let Some(limit) = limit {
        if spent > limit {
            out.pass = false;
            out.detail = format!("{} [took {spent:?}, limit {limit:?}]", out.detail);
        } else {
            out.detail = format!("{} [{spent:?}]", out.detail);
        }
    }
    out
}

fn ratio(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d)).unwrap()
}

fn prob(p: f64) -> Prob {
    Prob::new(p).unwrap()
}

fn fifty_to_five_hundred() -> Vec<usize> {
    (1..=10).map(|j| 50 * j).collect()
}

fn n4_example() -> Outcome {
    let spec = TestStateSpec::bell(4, 1).unwrap();
    let table = amplitude_table(&spec).unwrap();
    let (ei, eo) = (e_in(&spec), e_out(&spec));
    let want_sq = [ratio(1, 4), ratio(1, 16), ratio(0, 1), ratio(1, 16), ratio(1, 4)];
    let want_sign = [1, 1, 0, -1, -1];
    let exact = table.xi_sq == want_sq && (0..=4).all(|i| table.sign(i) == want_sign[i]);
    let pass = exact && (ei - 3.0).abs() < 1e-12 && (eo - 2.0).abs() < 1e-12;
    outcome(pass, format!("xi = {:?}, e_in = {ei:.12}, e_out = {eo:.12}", table.xi_f64()))
}

fn slope_point(p: f64, want: f64) -> Outcome {
    match slope_fit(prob(p), &fifty_to_five_hundred()) {
        Ok(fit) => outcome(
            (fit.slope - want).abs() <= 0.01,
            format!("slope = {:.6} (want {want} +- 0.01), rms residual = {:.3e}", fit.slope, fit.residual),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn oracle_equivalence() -> Outcome {
    let enc = PairEncoding::bell();
    let mut bad_in = Vec::new();
    let mut bad_out = Vec::new();
    for n in 1..=8 {
        for k in 0..=n {
            let spec = TestStateSpec::bell(n, k).unwrap();
            let s = build_test_state(&spec, &enc).unwrap();
            let direct_in = entropy_of(&schmidt_spectrum(&s).unwrap());
            if (direct_in - e_in(&spec)).abs() >= 1e-10 {
                bad_in.push((n, k));
            }
            let out = apply_ubc(&s, n, k, &enc).unwrap();
            let direct_out = entropy_of(&schmidt_spectrum(&out).unwrap());
            if (direct_out - e_out(&spec)).abs() >= 1e-10 {
                bad_out.push((n, k, direct_out - e_out(&spec)));
            }
        }
    }
    let shown: Vec<String> = bad_out
        .iter()
        .take(6)
        .map(|(n, k, d)| format!("({n},{k}) {d:+.4}"))
        .collect();
    outcome(
        bad_in.is_empty() && bad_out.is_empty(),
        format!(
            "e_in mismatches {}, e_out mismatches {} of 44 (oracle - formula: {}{})",
            bad_in.len(),
            bad_out.len(),
            shown.join(", "),
            if bad_out.len() > shown.len() { ", ..." } else { "" }
        ),
    )
}

fn example_one() -> Outcome {
    let enc = PairEncoding::product();
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        for k in 0..=n {
            let spec = TestStateSpec::product(n, k).unwrap();
            worst = worst.max(report(&spec).gap.abs());
            let s = build_test_state(&spec, &enc).unwrap();
            let out = apply_ubc(&s, n, k, &enc).unwrap();
            worst = worst.max(entanglement_delta(&s, &out).unwrap().abs());
        }
    }
    outcome(worst < 1e-12, format!("largest |gap| = {worst:.3e}"))
}

fn normalization() -> Outcome {
    let mut failures = 0;
    for n in 1..=100 {
        for k in 0..=n {
            let t = amplitude_table(&TestStateSpec::bell(n, k).unwrap()).unwrap();
            if !t.weighted_norm().is_one() {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{failures} of 5150 (n,k) not exactly 1"))
}

fn n2_locc() -> Outcome {
    match n2_locc_check() {
        Ok(c) => outcome(
            c.passed(1e-10),
            format!("min fidelity = {:.15}, phase spread = {:.3e}", c.min_fidelity(), c.phase_spread()),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn batching() -> Outcome {
    let cfg = BatchConfig {
        n: 20,
        p: prob(0.5),
        epsilon: 0.1,
        max_batches: 100_000,
        seed: 0xC0FFEE,
    };
    let trials = 2000u64;
    let mut m = Vec::with_capacity(trials as usize);
    let mut eps_ok = true;
    for t in 0..trials {
        match run_batches_with(&cfg, &mut run_rng(cfg.seed, t)) {
            Ok(s) => {
                eps_ok &= (0.0..=cfg.epsilon).contains(&s.eps_prime);
                m.push(s.m_batches as f64);
            }
            Err(e) => return outcome(false, format!("trial {t}: {e}")),
        }
    }
    let len = m.len() as f64;
    let mean = m.iter().sum::<f64>() / len;
    let var = m.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0);
    let se = (var / len).sqrt();
    let mean_ok = (mean - 10.0).abs() <= 3.0 * se;
    outcome(
        mean_ok && eps_ok,
        format!(
            "mean M = {mean:.4} +- {se:.4} ({:.1} stderr from 10), eps' in [0, eps]: {eps_ok}",
            (mean - 10.0).abs() / se
        ),
    )
}

fn gamma_bound() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for l in 0..=3usize {
        for count in 0..(1usize << l).max(1) {
            for tail in 0..=(4 - l) {
                let r = match gamma_state_direct(l, count, tail) {
                    Ok(r) => r,
                    Err(e) => return outcome(false, e.to_string()),
                };
                cases += 1;
                if r.entanglement > r.superposition_bound + 1e-10 || r.superposition_bound > r.batch_bound + 1e-10 {
                    bad.push((l, count, tail));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{cases} constructions, violations: {bad:?}"))
}

fn eof_ledger() -> Outcome {
    let mut worst_in: f64 = 0.0;
    let mut worst_out: f64 = 0.0;
    for j in 0..=100 {
        let p = j as f64 / 100.0;
        let l = ledger(prob(p));
        let want_in = shannon_h(prob(0.5 + (p * (1.0 - p)).sqrt()));
        worst_in = worst_in.max((l.ef_in_per_copy - want_in).abs());
        worst_out = worst_out.max((l.ef_out_per_copy - (1.0 - shannon_h(prob(p)))).abs());
    }
    let close = |a: f64, b: f64| (a - b).abs() < 1e-10;
    let l0 = ledger(prob(0.0));
    let trivial0 = close(l0.ef_in_per_copy, 1.0)
        && close(l0.ef_out_per_copy, 1.0)
        && close(l0.locking_deficit_per_copy, 0.0)
        && close(l0.s_a_per_copy, 0.0)
        && close(l0.s_b_per_copy, 1.0);
    let lh = ledger(prob(0.5));
    let trivial_half = close(lh.ef_in_per_copy, 0.0)
        && close(lh.ef_out_per_copy, 0.0)
        && close(lh.locking_deficit_per_copy, 0.0)
        && close(lh.s_a_per_copy, 1.0)
        && close(lh.s_b_per_copy, 1.0);
    outcome(
        worst_in < 1e-10 && worst_out < 1e-10 && trivial0 && trivial_half,
        format!(
            "max |ef_in err| = {worst_in:.3e}, max |ef_out err| = {worst_out:.3e}, p=0 ok: {trivial0}, p=1/2 ok: {trivial_half}"
        ),
    )
}

fn main() -> ExitCode {
    let ms = Duration::from_millis;
    let criteria: Vec<Criterion> = vec![
        ("n4-exact-example", Box::new(move || timed(Some(ms(1)), n4_example))),
        ("fig2-slope-p0.8", Box::new(move || timed(Some(ms(5_000)), || slope_point(0.8, 0.466)))),
        ("fig3-slope-p0.5", Box::new(move || timed(Some(ms(5_000)), || slope_point(0.5, 0.56)))),
        ("oracle-equivalence", Box::new(move || timed(Some(ms(60_000)), oracle_equivalence))),
        ("example-i-reversibility", Box::new(move || timed(None, example_one))),
        ("exact-normalization", Box::new(move || timed(Some(ms(30_000)), normalization))),
        ("n2-locc-circuit", Box::new(move || timed(None, n2_locc))),
        ("batching-statistics", Box::new(move || timed(Some(ms(10_000)), batching))),
        ("gamma-m-bound", Box::new(move || timed(None, gamma_bound))),
        ("eof-ledger", Box::new(move || timed(None, eof_ledger))),
    ];

    let total = criteria.len();
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {total} passed", total - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
