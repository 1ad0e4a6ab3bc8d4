//! Command-line front end.
//!
//! Exit codes: 0 when everything checked holds, 1 when a residual, sum or
//! coefficient check fails (or discovery is ambiguous without `--all`), and 2
//! for usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use tribsq::discovery::{
    discover_with, format_vector, random_specs, template_from_vector, window, Discovery,
    DiscoveryConfig, DiscoveryError,
};
use tribsq::genfunc::{convergence_radius_estimate, series_coefficients, theorem3_squares_genfunc};
use tribsq::identities::{
    builtin_identities, catalog_from_json, catalog_to_json, find_builtin, verify_in_window,
    verify_range, IdentityReport, IdentityTemplate,
};
use tribsq::rational::{format_rational, parse_rational};
use tribsq::sequence::{term_alt, term_fast, SequenceSpec, TermCache};
use tribsq::sums::{compare, compare_weighted, write_csv, SumError, SumReport, SumVariant};
use tribsq::OutputRecord;

#[derive(Parser)]
#[command(
    name = "tribsq",
    version,
    about = "Exact generalized Tribonacci identities, sums and generating functions"
)]
struct Cli {
    /// Print a JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// PRNG seed for `--random` seeds and discovery sampling.
    #[arg(long, global = true, value_name = "U64")]
    rng_seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute T(n).
    Term {
        #[arg(long, default_value = "0,1,1", value_parser = parse_seed, allow_hyphen_values = true)]
        seed: SequenceSpec,
        #[arg(short = 'n', allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Method::Iter)]
        method: Method,
    },
    /// Check identity residuals over a range of r.
    Verify {
        /// Identity ids (S1..S5, P1..P4, C1) or `all`.
        ids: Vec<String>,
        #[arg(long, value_parser = parse_seed, allow_hyphen_values = true, conflicts_with = "random")]
        seed: Option<SequenceSpec>,
        /// Check N seeds drawn uniformly from [-999, 999]^3.
        #[arg(long, value_name = "N")]
        random: Option<usize>,
        /// Inclusive `a..b`.
        #[arg(long, default_value = "0..100", value_parser = parse_range, allow_hyphen_values = true)]
        range: (i64, i64),
        /// Extra templates from a JSON file (one template or an array).
        #[arg(long, value_name = "FILE")]
        template: Vec<PathBuf>,
    },
    /// Evaluate a closed-form sum and compare it with direct summation.
    Sum {
        /// One of GEN_ALL, GEN_ALT, TRIB_ALL, TRIB_ALT, EVEN, ODD, ALT_EVEN,
        /// ALT_ODD, QUAD_0, QUAD_2, QUAD_3, QUAD_1, J_WEIGHT, J2_WEIGHT.
        variant: Option<String>,
        #[arg(long, default_value = "0,1,1", value_parser = parse_seed, allow_hyphen_values = true)]
        seed: SequenceSpec,
        /// A single k or an inclusive range `a..b`.
        #[arg(long, value_parser = parse_k)]
        k: (u64, u64),
        /// Evaluate sum_{j<=k} x^j T(j)^2 instead of a fixed variant.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Print CSV rows.
        #[arg(long)]
        csv: bool,
    },
    /// Expand the generating function of T(j)^2.
    Genfunc {
        #[arg(long, default_value = "0,1,1", value_parser = parse_seed, allow_hyphen_values = true)]
        seed: SequenceSpec,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
    },
    /// Find the identity among T(r-o)^power over a window of offsets.
    Discover {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        power: u32,
        /// Inclusive offset window `a..b`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        window: (i64, i64),
        /// Report every kernel vector when the identity is not unique.
        #[arg(long)]
        all: bool,
        /// Write the discovered template(s) as JSON.
        #[arg(long, value_name = "FILE")]
        emit_json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Iter,
    Alt,
    Matrix,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Iter => "iter",
            Method::Alt => "alt",
            Method::Matrix => "matrix",
        }
    }
}

fn parse_seed(s: &str) -> Result<SequenceSpec, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start in {s:?}"))?;
    let b: i64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

fn parse_k(s: &str) -> Result<(u64, u64), String> {
    if s.contains("..") {
        let (a, b) = parse_range(s)?;
        if a < 0 {
            return Err("k must be nonnegative".into());
        }
        Ok((a as u64, b as u64))
    } else {
        let k: u64 = s.parse().map_err(|_| format!("bad k {s:?}"))?;
        Ok((k, k))
    }
}

struct Outcome {
    record: OutputRecord,
    text: String,
}

struct UsageError(String);

impl<T: std::fmt::Display> From<T> for UsageError {
    fn from(e: T) -> Self {
        UsageError(e.to_string())
    }
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Term { seed, n, method } => Ok(cmd_term(&seed, n, method)),
        Command::Verify {
            ids,
            seed,
            random,
            range,
            template,
        } => cmd_verify(&ids, seed, random, cli.rng_seed, range, &template),
        Command::Sum {
            variant,
            seed,
            k,
            x,
            csv,
        } => cmd_sum(variant.as_deref(), &seed, k, x.as_deref(), csv && !cli.json),
        Command::Genfunc { seed, count } => Ok(cmd_genfunc(&seed, count as usize)),
        Command::Discover {
            power,
            window,
            all,
            emit_json,
        } => cmd_discover(power, window, all, emit_json.as_ref(), cli.rng_seed),
    };
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", out.record.to_json());
            } else {
                print!("{}", out.text);
            }
            if out.record.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_term(seed: &SequenceSpec, n: i64, method: Method) -> Outcome {
    let value = match method {
        Method::Iter => TermCache::new(seed.clone()).term(n).clone(),
        Method::Alt => term_alt(seed, n),
        Method::Matrix => term_fast(seed, n),
    };
    let record = OutputRecord::new(
        "term",
        params(&[
            ("seed", json!(seed.to_string())),
            ("n", json!(n.to_string())),
            ("method", json!(method.name())),
        ]),
        json!({ "value": value.to_string() }),
        true,
    );
    Outcome {
        record,
        text: format!("{value}\n"),
    }
}

fn load_templates(path: &PathBuf) -> Result<Vec<IdentityTemplate>, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    if text.trim_start().starts_with('[') {
        Ok(catalog_from_json(&text)?)
    } else {
        Ok(vec![serde_json::from_str(&text)?])
    }
}

fn cmd_verify(
    ids: &[String],
    seed: Option<SequenceSpec>,
    random: Option<usize>,
    rng_seed: Option<u64>,
    (r_lo, r_hi): (i64, i64),
    files: &[PathBuf],
) -> Result<Outcome, UsageError> {
    let mut templates = Vec::new();
    for id in ids {
        if id.eq_ignore_ascii_case("all") {
            templates.extend(builtin_identities());
        } else {
            templates.push(
                find_builtin(id).ok_or_else(|| UsageError(format!("unknown identity {id:?}")))?,
            );
        }
    }
    for f in files {
        templates.extend(load_templates(f)?);
    }
    if templates.is_empty() {
        return Err(UsageError(
            "no identities given (use an id, `all`, or --template)".into(),
        ));
    }
    for t in &templates {
        t.validate()?;
    }
    templates.sort_by(|a, b| a.id.cmp(&b.id));

    let specs = match random {
        Some(n) => random_specs(&mut ChaCha8Rng::seed_from_u64(rng_seed.unwrap_or(0)), n),
        None => vec![seed.unwrap_or_else(SequenceSpec::tribonacci)],
    };
    let (o_lo, o_hi) = templates
        .iter()
        .map(|t| t.offset_span())
        .fold((i64::MAX, i64::MIN), |(lo, hi), (a, b)| {
            (lo.min(a), hi.max(b))
        });
    let windows: Vec<_> = specs
        .iter()
        .map(|s| {
            TermCache::new(s.clone())
                .snapshot(r_lo - o_hi, r_hi - o_lo)
                .expect("nonempty")
        })
        .collect();
    let seeds: Vec<String> = specs.iter().map(ToString::to_string).collect();

    // One worker per identity; output order follows `templates`.
    let per_template: Vec<Vec<IdentityReport>> = thread::scope(|scope| {
        let handles: Vec<_> = templates
            .iter()
            .map(|t| {
                let (windows, seeds) = (&windows, &seeds);
                scope.spawn(move || {
                    windows
                        .iter()
                        .zip(seeds)
                        .map(|(w, s)| verify_in_window(t, w, s, r_lo, r_hi))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });

    let mut text = String::new();
    let mut all_pass = true;
    for (t, reports) in templates.iter().zip(&per_template) {
        let failed: Vec<&IdentityReport> = reports.iter().filter(|r| !r.pass).collect();
        if failed.is_empty() {
            text += &format!(
                "{:<8} PASS  {} seed(s), r in {r_lo}..{r_hi}\n",
                t.id,
                reports.len()
            );
        } else {
            all_pass = false;
            let first = &failed[0];
            let f = &first.failures[0];
            text += &format!(
                "{:<8} FAIL  {}/{} seed(s) fail; first: seed {} r={} residual={}\n",
                t.id,
                failed.len(),
                reports.len(),
                first.seed,
                f.r,
                f.residual
            );
        }
    }
    text += if all_pass {
        "all identities hold\n"
    } else {
        "verification FAILED\n"
    };

    let reports: Vec<&IdentityReport> = per_template.iter().flatten().collect();
    let record = OutputRecord::new(
        "verify",
        params(&[
            (
                "ids",
                json!(templates.iter().map(|t| t.id.clone()).collect::<Vec<_>>()),
            ),
            ("seeds", json!(seeds)),
            ("range", json!(format!("{r_lo}..{r_hi}"))),
        ]),
        serde_json::to_value(reports)?,
        all_pass,
    );
    Ok(Outcome { record, text })
}

fn cmd_sum(
    variant: Option<&str>,
    seed: &SequenceSpec,
    (k_lo, k_hi): (u64, u64),
    x: Option<&str>,
    csv: bool,
) -> Result<Outcome, UsageError> {
    let run: Box<dyn Fn(u64) -> Result<SumReport, SumError>> = match (variant, x) {
        (Some(_), Some(_)) => {
            return Err(UsageError("give either a variant or --x, not both".into()))
        }
        (None, None) => return Err(UsageError("give a variant or --x".into())),
        (Some(v), None) => {
            let v: SumVariant = v.parse()?;
            Box::new(move |k| compare(seed, v, k))
        }
        (None, Some(x)) => {
            let x: BigRational = parse_rational(x)?;
            Box::new(move |k| compare_weighted(seed, &x, k))
        }
    };
    let reports = (k_lo..=k_hi).map(&run).collect::<Result<Vec<_>, _>>()?;
    let all_equal = reports.iter().all(|r| r.equal);

    let text = if csv {
        let mut buf = Vec::new();
        write_csv(&reports, &mut buf)?;
        String::from_utf8(buf).expect("csv output is utf-8")
    } else {
        reports
            .iter()
            .map(|r| {
                format!(
                    "{} k={} closed={} oracle={} equal={}\n",
                    r.variant,
                    r.k,
                    format_rational(&r.closed),
                    format_rational(&r.oracle),
                    r.equal
                )
            })
            .collect()
    };
    let record = OutputRecord::new(
        "sum",
        params(&[
            ("variant", json!(variant)),
            ("x", json!(x)),
            ("seed", json!(seed.to_string())),
            ("k", json!(format!("{k_lo}..{k_hi}"))),
        ]),
        serde_json::to_value(&reports)?,
        all_equal,
    );
    Ok(Outcome { record, text })
}

fn cmd_genfunc(seed: &SequenceSpec, count: usize) -> Outcome {
    let rf = theorem3_squares_genfunc(seed);
    let coeffs = series_coefficients(&rf, count).expect("denominator has constant term 1");
    let mut cache = TermCache::new(seed.clone());
    let matches: Vec<bool> = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let t = cache.term(j as i64);
            *c == BigRational::from_integer(t * t)
        })
        .collect();
    let all_match = matches.iter().all(|&m| m);
    let radius = convergence_radius_estimate(&rf);
    let shown: Vec<String> = coeffs.iter().map(format_rational).collect();

    let mut text = format!("G(x) = {rf}\n");
    text += &format!("radius estimate (numeric) = {radius:.10}\n");
    text += &format!("coefficients = [{}]\n", shown.join(", "));
    text += &format!(
        "match T(j)^2: {}\n",
        if all_match {
            "all".to_string()
        } else {
            format!("MISMATCH at {:?}", mismatches(&matches))
        }
    );
    let rf_json: Value = serde_json::from_str(&rf.to_json()).expect("valid json");
    let record = OutputRecord::new(
        "genfunc",
        params(&[("seed", json!(seed.to_string())), ("count", json!(count))]),
        json!({
            "generating_function": rf_json,
            "coefficients": shown,
            "matches": matches,
            "radius_estimate": radius,
        }),
        all_match,
    );
    Outcome { record, text }
}

fn mismatches(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &m)| !m)
        .map(|(j, _)| j)
        .collect()
}

fn cmd_discover(
    power: u32,
    (lo, hi): (i64, i64),
    all: bool,
    emit: Option<&PathBuf>,
    rng_seed: Option<u64>,
) -> Result<Outcome, UsageError> {
    let offsets = window(lo, hi);
    let config = rng_seed.map(DiscoveryConfig::seeded).unwrap_or_default();
    let base = params(&[
        ("power", json!(power)),
        ("window", json!(format!("{lo}..{hi}"))),
        ("all", json!(all)),
    ]);
    let (templates, text, pass, status) = match discover_with(power, &offsets, &config) {
        Ok(Discovery::Found(t)) => {
            let v = t.dense_coefficients().1;
            (vec![t], format!("{}\n", format_vector(&v)), true, "found")
        }
        Ok(Discovery::NotFound) => (Vec::new(), "NOT_FOUND\n".to_string(), true, "not_found"),
        Err(DiscoveryError::AmbiguousKernel(basis)) => {
            let mut text = format!("AMBIGUOUS kernel dimension {}\n", basis.dim());
            let mut templates = Vec::new();
            for v in basis.vectors() {
                let t = template_from_vector(power, &offsets, v);
                let (r_lo, r_hi) = config.confirm_range;
                let confirmed = config.confirm_specs.iter().all(|s| {
                    verify_range(&t, s, r_lo, r_hi)
                        .map(|r| r.pass)
                        .unwrap_or(false)
                });
                text += &format!(
                    "{}{}\n",
                    format_vector(v),
                    if confirmed { "" } else { "  (unconfirmed)" }
                );
                templates.push(t);
            }
            (templates, text, all, "ambiguous")
        }
        Err(e @ DiscoveryError::ConfirmationFailed { .. }) => (
            Vec::new(),
            format!("CONFIRMATION_FAILED: {e}\n"),
            false,
            "confirmation_failed",
        ),
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = emit {
        fs::write(path, catalog_to_json(&templates) + "\n")
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
    }
    let record = OutputRecord::new(
        "discover",
        base,
        json!({ "status": status, "templates": serde_json::to_value(&templates)? }),
        pass,
    );
    Ok(Outcome { record, text })
}
