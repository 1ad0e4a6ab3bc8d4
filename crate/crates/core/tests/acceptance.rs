//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p tribsq --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tribsq::discovery::{
    build_sample_matrix, discover_identity, random_specs, window, Discovery, DiscoveryConfig,
};
use tribsq::genfunc::{
    lemma2_generating_function, series_coefficients, theorem3_squares_genfunc,
    tribonacci_squares_genfunc,
};
use tribsq::identities::{builtin_identities, catalog_to_json, verify_in_window, IdentityTemplate};
use tribsq::output::rerender;
use tribsq::sequence::{term, term_fast, SequenceSpec, TermCache};
use tribsq::sums::{
    direct_sum_oracle, special_sum, theorem2_weighted_square_sum, LinearRecurrence, OracleSum,
    SumVariant,
};

const PRNG_SEED: u64 = 20_240_101;
const IDENTITY_BUDGET: Duration = Duration::from_secs(10);
const FAST_TERM_BUDGET: Duration = Duration::from_secs(1);

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn specs(n: usize) -> Vec<SequenceSpec> {
    random_specs(&mut ChaCha8Rng::seed_from_u64(PRNG_SEED), n)
}

fn with_tribonacci(n: usize) -> Vec<SequenceSpec> {
    let mut v = vec![SequenceSpec::tribonacci()];
    v.extend(specs(n));
    v
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_identities(ids: &[&str], r_lo: i64, r_hi: i64) -> Check {
    let templates: Vec<IdentityTemplate> = builtin_identities()
        .into_iter()
        .filter(|t| ids.contains(&t.id.as_str()))
        .collect();
    ensure(templates.len() == ids.len(), || {
        format!("missing templates among {ids:?}")
    })?;
    let (o_lo, o_hi) = templates
        .iter()
        .map(|t| t.offset_span())
        .fold((i64::MAX, i64::MIN), |(a, b), (lo, hi)| {
            (a.min(lo), b.max(hi))
        });
    let all = with_tribonacci(200);
    let start = Instant::now();
    let mut checked = 0usize;
    for spec in &all {
        let w = TermCache::new(spec.clone())
            .snapshot(r_lo - o_hi, r_hi - o_lo)
            .unwrap();
        for t in &templates {
            let rep = verify_in_window(t, &w, &spec.to_string(), r_lo, r_hi);
            if let Some(f) = rep.failures.first() {
                return Err(format!(
                    "{} seed {} r={} residual={}",
                    t.id, spec, f.r, f.residual
                ));
            }
            checked += (r_hi - r_lo + 1) as usize;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < IDENTITY_BUDGET, || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "{checked} residuals zero over {} seeds in {elapsed:.2?}",
        all.len()
    ))
}

fn criterion_1() -> Check {
    check_identities(&["S1", "S2", "S3", "S4", "S5"], -100, 300)
}

fn criterion_2() -> Check {
    check_identities(&["P1", "P2", "P3", "P4"], -100, 300)
}

fn criterion_3() -> Check {
    check_identities(&["C1"], -50, 200)
}

fn criterion_4() -> Check {
    let xs: Vec<BigRational> = ["-2", "-1", "-1/2", "1/3", "1", "7/5"]
        .iter()
        .map(|s| tribsq::rational::parse_rational(s).unwrap())
        .collect();
    let all = with_tribonacci(20);
    let mut n = 0;
    for spec in &all {
        for x in &xs {
            for k in 0..=60u64 {
                let closed = theorem2_weighted_square_sum(spec, x, k).map_err(|e| e.to_string())?;
                let oracle = direct_sum_oracle(spec, &OracleSum::PowerWeighted(x.clone()), k);
                ensure(closed == oracle, || {
                    format!("seed {spec} x={x} k={k}: {closed} != {oracle}")
                })?;
                n += 1;
            }
        }
        let t0 = term(spec, 0);
        let at_zero = theorem2_weighted_square_sum(spec, &BigRational::from_integer(0.into()), 7)
            .map_err(|e| e.to_string())?;
        ensure(at_zero == BigRational::from_integer(&t0 * &t0), || {
            format!("x=0 for seed {spec}")
        })?;
    }
    Ok(format!("{n} exact matches, x=0 gives T0^2"))
}

fn criterion_5() -> Check {
    let trib = SequenceSpec::tribonacci();
    let general = specs(20);
    let mut n = 0;
    for v in SumVariant::ALL {
        let seeds: Vec<&SequenceSpec> = if v.tribonacci_only() {
            vec![&trib]
        } else {
            std::iter::once(&trib).chain(&general).collect()
        };
        for spec in seeds {
            for k in v.lower_bound()..=200 {
                let closed = special_sum(spec, v, k).map_err(|e| e.to_string())?;
                let oracle = direct_sum_oracle(spec, &OracleSum::Variant(v), k);
                ensure(closed == oracle, || format!("{v} seed {spec} k={k}"))?;
                n += 1;
            }
        }
    }
    let total = special_sum(&trib, SumVariant::TRIB_ALL, 5).map_err(|e| e.to_string())?;
    ensure(total == BigRational::from_integer(71.into()), || {
        format!("k=5 total {total}")
    })?;
    let sq = |j: i64| {
        let t = term(&trib, j);
        &t * &t
    };
    let rhs: BigInt = 9 * sq(5) + 7 * sq(4) + 4 * sq(3) - 2 * sq(2) - sq(1) - sq(0) + 2;
    ensure(
        rhs == BigInt::from(568) && rhs == BigInt::from(8 * 71),
        || format!("anchor rhs {rhs}"),
    )?;
    Ok(format!(
        "{n} exact matches over 14 variants, anchor 71 and 8*71 = 568"
    ))
}

fn criterion_6() -> Check {
    let coeffs =
        series_coefficients(&tribonacci_squares_genfunc(), 128).map_err(|e| e.to_string())?;
    let trib = SequenceSpec::tribonacci();
    for (j, c) in coeffs.iter().enumerate() {
        let t = term(&trib, j as i64);
        ensure(*c == BigRational::from_integer(&t * &t), || {
            format!("G coefficient {j}")
        })?;
    }
    for spec in specs(50) {
        let rf = theorem3_squares_genfunc(&spec);
        let cs = series_coefficients(&rf, 64).map_err(|e| e.to_string())?;
        for (j, c) in cs.iter().enumerate() {
            let t = term(&spec, j as i64);
            ensure(*c == BigRational::from_integer(&t * &t), || {
                format!("seed {spec} coefficient {j}")
            })?;
        }
        let lemma = lemma2_generating_function(&LinearRecurrence::squares(&spec));
        ensure(lemma.equivalent(&rf), || {
            format!("seed {spec}: {lemma} vs {rf}")
        })?;
    }
    Ok("128 Tribonacci + 64 x 50 seeded coefficients, recurrence form equals closed form".into())
}

fn found_vector(power: u32, lo: i64, hi: i64) -> Result<Option<Vec<BigInt>>, String> {
    match discover_identity(power, &window(lo, hi)).map_err(|e| e.to_string())? {
        Discovery::Found(t) => Ok(Some(t.dense_coefficients().1)),
        Discovery::NotFound => Ok(None),
    }
}

fn criterion_7() -> Check {
    let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let s1 = found_vector(2, 0, 6)?;
    ensure(s1 == Some(big(&[1, -2, -3, -6, 1, 0, 1])), || {
        format!("power 2 got {s1:?}")
    })?;
    let c1 = found_vector(3, 0, 10)?;
    ensure(
        c1 == Some(big(&[1, -4, -9, -34, 24, -2, 40, -14, -1, -2, 1])),
        || format!("power 3 got {c1:?}"),
    )?;
    ensure(found_vector(2, 0, 5)?.is_none(), || {
        "power 2 window 0..5 not empty".into()
    })?;
    ensure(found_vector(3, 0, 9)?.is_none(), || {
        "power 3 window 0..9 not empty".into()
    })?;
    let config = DiscoveryConfig::default();
    for t in builtin_identities()
        .iter()
        .filter(|t| t.id.starts_with('S'))
    {
        let (lo, v) = t.dense_coefficients();
        let offsets = window(lo, lo + v.len() as i64 - 1);
        let r_values: Vec<i64> = (10..10 + offsets.len() as i64 + 8).collect();
        let m = build_sample_matrix(&config.specs, &offsets, 2, &r_values)
            .map_err(|e| e.to_string())?;
        ensure(m.annihilates(&v), || {
            format!("{} not in its window kernel", t.id)
        })?;
    }
    Ok("S1 and C1 rediscovered, shorter windows NotFound, S1..S5 in kernel".into())
}

fn criterion_8() -> Check {
    for spec in specs(20) {
        let iter = TermCache::new(spec.clone())
            .range(-200, 2000)
            .map_err(|e| e.to_string())?;
        for (n, t) in (-200..=2000).zip(&iter) {
            ensure(term_fast(&spec, n) == *t, || format!("seed {spec} n={n}"))?;
        }
    }
    let start = Instant::now();
    let big = term_fast(&SequenceSpec::tribonacci(), 10_000);
    let elapsed = start.elapsed();
    ensure(big == term(&SequenceSpec::tribonacci(), 10_000), || {
        "T(10000) mismatch".into()
    })?;
    ensure(elapsed < FAST_TERM_BUDGET, || {
        format!("T(10000) took {elapsed:.2?}")
    })?;
    Ok(format!(
        "agree on [-200, 2000] x 20 seeds, T(10000) in {elapsed:.2?}"
    ))
}

fn tribsq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tribsq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn criterion_9() -> Check {
    let ok = tribsq(&["verify", "all", "--seed", "0,1,1", "--range", "-50..200"]);
    ensure(ok.status.code() == Some(0), || {
        format!("verify all exited {:?}", ok.status.code())
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("corrupt.json");
    let mut bad = builtin_identities().remove(0);
    bad.terms[0].coeff += 1;
    std::fs::write(&path, catalog_to_json(&[bad])).map_err(|e| e.to_string())?;
    let fail = tribsq(&[
        "verify",
        "--template",
        path.to_str().unwrap(),
        "--range",
        "0..20",
    ]);
    ensure(fail.status.code() == Some(1), || {
        format!("corrupt template exited {:?}", fail.status.code())
    })?;

    for args in [
        &[
            "--json", "verify", "all", "--seed", "0,1,1", "--range", "-5..5",
        ][..],
        &["--json", "sum", "--x", "-1/2", "--k", "0..6"],
        &["--json", "genfunc", "--count", "12"],
        &["--json", "discover", "--power", "2", "--window", "0..6"],
        &["--json", "term", "-n", "-6", "--method", "matrix"],
    ] {
        let out = tribsq(args);
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        let body = text.strip_suffix('\n').unwrap_or(&text);
        let again = rerender(body).map_err(|e| format!("{args:?}: {e}"))?;
        ensure(again == body, || format!("{args:?} does not round-trip"))?;
    }
    Ok("exit 0 on builtins, exit 1 on corrupt template, JSON round-trips".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("square identities S1-S5", criterion_1),
        ("cross-product identities P1-P4", criterion_2),
        ("cube identity C1", criterion_3),
        ("weighted square sum vs oracle", criterion_4),
        ("fourteen closed-form sums", criterion_5),
        ("generating functions", criterion_6),
        ("identity discovery", criterion_7),
        ("fast term", criterion_8),
        ("CLI contract", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
