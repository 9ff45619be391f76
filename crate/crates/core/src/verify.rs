//! The cross-check suite run by `betashift verify`.

use std::cmp::Ordering;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::beta::Beta;
use crate::config::RunConfig;
use crate::construct::{build_irregular, schedule, verify_spike};
use crate::cylinder::{cylinders, fullness_laws_check, oracle_violations, partition_oracle, Violation};
use crate::density::{density_trace, DigitStream};
use crate::error::{Error, Result};
use crate::exec;
use crate::expansion::{digits_and_remainder, expansion_of_one, word_value, zero_run_table};
use crate::real::Real;
use crate::word::lex_compare;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Enough to reproduce a failure by hand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub beta: String,
    pub word: String,
    pub n: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub beta: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Deliberate faults for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Added to every `k*` in the cylinder-oracle check.
    pub k_star_offset: isize,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub config: RunConfig,
    pub faults: Faults,
    /// Include wall-clock timings (makes output non-reproducible).
    pub timing: bool,
}

enum Outcome {
    Pass(String),
    Fail(String, Option<(String, usize)>),
    Skipped(String),
}

fn first_violation(vs: &[Violation], n: usize, what: &str, count: usize) -> Outcome {
    match vs.first() {
        None => Outcome::Pass(format!("{count} {what}")),
        Some(v) => Outcome::Fail(
            format!("{} violation(s); first: {}", vs.len(), v.detail),
            Some((v.word.clone(), n)),
        ),
    }
}

fn check_oracle(beta: &Beta, cfg: &RunConfig, faults: Faults) -> Result<Outcome> {
    let mut total = 0;
    for n in 1..=cfg.oracle_n {
        let vs = oracle_violations(beta, n, &cfg.eps, faults.k_star_offset)?;
        if !vs.is_empty() {
            return Ok(first_violation(&vs, n, "", 0));
        }
        total += crate::language::enumerate_words_capped(beta, n, cfg.enum_cap)?.count;
    }
    Ok(Outcome::Pass(format!("{total} words, n <= {}", cfg.oracle_n)))
}

fn check_partition(beta: &Beta, cfg: &RunConfig) -> Result<Outcome> {
    let tol = BigRational::new(BigInt::from(1), BigInt::from(10u64.pow(12)));
    for n in 1..=cfg.oracle_n {
        let parts = partition_oracle(beta, n, cfg.enum_cap)?;
        // spatial order must coincide with lexicographic order
        for w in parts.windows(2) {
            if lex_compare(w[0].word.digits(), w[1].word.digits()) != Ordering::Less {
                return Ok(Outcome::Fail(
                    format!("left endpoints not increasing in lex order at {}", w[1].word),
                    Some((w[1].word.to_string(), n)),
                ));
            }
        }
        let sum = parts.iter().fold(Real::zero(beta), |acc, p| acc + &p.length);
        let diff = sum - Real::one(beta);
        let ok = if beta.is_exact() {
            diff.sign()? == Ordering::Equal
        } else {
            diff.is_identically_zero() || {
                let e = diff.refine(&(&tol / BigRational::from_integer(4.into())))?;
                -&tol <= e.lo && e.hi <= tol
            }
        };
        if !ok {
            return Ok(Outcome::Fail(format!("lengths of order {n} do not sum to 1"), None));
        }
    }
    Ok(Outcome::Pass(format!("n <= {}", cfg.oracle_n)))
}

/// `β^{−(n+Γ_n+1)} ≤ |I(w)| ≤ β^{−n}` for every admissible `w`.
fn check_length_bounds(beta: &Beta, cfg: &RunConfig) -> Result<Outcome> {
    let table = zero_run_table(beta, cfg.bounds_n, cfg.zero_run_budget)?;
    let mut count = 0;
    for n in 1..=cfg.bounds_n {
        let cyls = cylinders(beta, n, cfg.enum_cap)?;
        count += cyls.len();
        let lo = Real::beta_pow(beta, -((n + table.gamma(n) + 1) as i64));
        let hi = Real::beta_pow(beta, -(n as i64));
        let bad = exec::try_map(&cyls, |c| -> Result<bool> {
            Ok(c.length.cmp_real(&lo)? == Ordering::Less || c.length.cmp_real(&hi)? == Ordering::Greater)
        })?;
        if let Some(i) = bad.iter().position(|&b| b) {
            return Ok(Outcome::Fail(
                format!("|I(w)| outside [β^-(n+Γ_n+1), β^-n] for n = {n}"),
                Some((cyls[i].word.to_string(), n)),
            ));
        }
    }
    Ok(Outcome::Pass(format!("{count} words, n <= {}", cfg.bounds_n)))
}

/// `β^{−(m+t_m+1)} ≤ |I(ε*|m)| ≤ β^{−(m+t_m)}`.
fn check_prefix_bounds(beta: &Beta, cfg: &RunConfig) -> Result<Outcome> {
    let table = zero_run_table(beta, cfg.prefix_m, cfg.zero_run_budget)?;
    for m in 1..=cfg.prefix_m {
        let w = expansion_of_one(beta, m)?;
        let c = crate::cylinder::cylinder(beta, &w)?;
        let t = table.t(m) as i64;
        let lo = Real::beta_pow(beta, -(m as i64 + t + 1));
        let hi = Real::beta_pow(beta, -(m as i64 + t));
        if c.length.cmp_real(&lo)? == Ordering::Less || c.length.cmp_real(&hi)? == Ordering::Greater {
            return Ok(Outcome::Fail(
                format!("|I(eps*|{m})| outside [β^-(m+t+1), β^-(m+t)] with t = {t}"),
                Some((w.to_string(), m)),
            ));
        }
    }
    Ok(Outcome::Pass(format!("m <= {}", cfg.prefix_m)))
}

fn check_laws(beta: &Beta, cfg: &RunConfig) -> Result<Outcome> {
    let r = fullness_laws_check(beta, cfg.laws_n, cfg.laws_m, &cfg.eps)?;
    if !r.passed() {
        let v = &r.violations[0];
        return Ok(Outcome::Fail(
            format!("{} violation(s); first: {} ({})", r.violations.len(), v.check, v.detail),
            Some((v.word.clone(), v.word.split(',').count())),
        ));
    }
    Ok(Outcome::Pass(format!(
        "checked {:?} instances, {} undecided",
        r.checked, r.undecided
    )))
}

/// Reconstruction `x = Σ ε_i β^{−i} + β^{−n} T^n x` for a few rationals,
/// and for bases built from a digit sequence, that the expansion of 1
/// reproduces it.
fn check_round_trip(beta: &Beta, cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.round_trip_n;
    if let Some(src) = beta.defining_sequence() {
        let want = src.prefix(n).expect("defining sequences are infinite");
        let got = expansion_of_one(beta, n)?;
        if got.digits() != want.as_slice() {
            let i = got.digits().iter().zip(&want).position(|(a, b)| a != b).unwrap_or(0);
            return Ok(Outcome::Fail(
                format!(
                    "expansion of 1 differs from the defining sequence at position {}",
                    i + 1
                ),
                Some((got.to_string(), n)),
            ));
        }
    }
    let points = [(1, 1), (1, 2), (1, 3), (2, 3), (3, 7)];
    let depth = if beta.is_exact() { 12.min(n) } else { 8.min(n) };
    for (p, q) in points {
        let x = Real::from_ratio(beta, BigRational::new(p.into(), q.into()));
        let (w, rest) = digits_and_remainder(&x, depth)?;
        let rebuilt = word_value(beta, w.digits()) + rest.shift(-(depth as i64));
        let ok = if beta.is_exact() {
            rebuilt.cmp_real(&x)? == Ordering::Equal
        } else {
            crate::cylinder::agree(&rebuilt, &x, &cfg.eps)?
        };
        if !ok || !crate::language::is_admissible(beta, &w)? {
            return Ok(Outcome::Fail(
                format!("reconstruction of {p}/{q} failed"),
                Some((w.to_string(), depth)),
            ));
        }
    }
    Ok(Outcome::Pass(format!(
        "expansions to depth {n}, reconstructions to depth {depth}"
    )))
}

fn check_spike(beta: &Beta, cfg: &RunConfig) -> Result<Outcome> {
    let table = zero_run_table(beta, cfg.search_cap, cfg.zero_run_budget)?;
    if table.records.iter().all(|r| r.t == 0) {
        return Ok(Outcome::Skipped(format!(
            "lambda_hat = 0 within search_cap {}: the construction needs lambda(beta) > 0",
            cfg.search_cap
        )));
    }
    let sched = match schedule(beta, &cfg.seed, cfg.k_blocks, cfg.r, cfg.search_cap) {
        Ok(s) => s,
        Err(e @ Error::ScheduleInfeasible { .. }) => return Ok(Outcome::Fail(e.to_string(), None)),
        Err(e) => return Err(e),
    };
    let built = build_irregular(beta, &sched, &cfg.eps)?;
    if !built.near_seed {
        return Ok(Outcome::Fail(
            "constructed point not within β^-ℓ of the seed".into(),
            None,
        ));
    }
    let trace = density_trace(
        &DigitStream::Constructed {
            beta: beta.clone(),
            prefix: built.prefix.clone(),
        },
        sched.len(),
    )?;
    if let Some(&n) = trace.bracket_violations().first() {
        return Ok(Outcome::Fail(format!("d_{n} outside [1, (n+Γ_n+1)/n]"), None));
    }
    match verify_spike(beta, &sched, &trace) {
        Ok(r) => Ok(Outcome::Pass(format!(
            "K = {}, spikes {:?}, target 1 + lambda_hat = {}",
            sched.blocks.len(),
            r.spikes.iter().map(|s| (s.n, s.d_lo)).collect::<Vec<_>>(),
            r.target
        ))),
        Err(e @ Error::AssertionFailure { .. }) => Ok(Outcome::Fail(e.to_string(), None)),
        Err(e) => Err(e),
    }
}

type Check = fn(&Beta, &RunConfig, Faults) -> Result<Outcome>;

const CHECKS: [(&str, Check); 7] = [
    ("cylinder_oracle", check_oracle),
    ("partition_sum", |b, c, _| check_partition(b, c)),
    ("length_bounds", |b, c, _| check_length_bounds(b, c)),
    ("prefix_length_bounds", |b, c, _| check_prefix_bounds(b, c)),
    ("fullness_laws", |b, c, _| check_laws(b, c)),
    ("round_trip", |b, c, _| check_round_trip(b, c)),
    ("spike", |b, c, _| check_spike(b, c)),
];

/// Runs every check on every base. Failures and errors become report
/// entries; results are sorted by check name, then by spec.
pub fn verify_suite(specs: &[String], opts: &VerifyOptions) -> VerifyReport {
    let cfg = &opts.config;
    let per_beta = exec::map(specs, |spec| {
        let mut out = Vec::new();
        let beta = match Beta::parse_with(spec, &cfg.beta_options()) {
            Ok(b) => b,
            Err(e) => {
                out.push(CheckResult {
                    check: "beta_spec".into(),
                    beta: spec.clone(),
                    status: Status::Fail,
                    detail: e.to_string(),
                    counterexample: Some(Counterexample {
                        beta: spec.clone(),
                        word: String::new(),
                        n: 0,
                        detail: e.kind().into(),
                    }),
                    millis: None,
                });
                return out;
            }
        };
        for (name, check) in CHECKS {
            let start = Instant::now();
            let outcome =
                check(&beta, cfg, opts.faults).unwrap_or_else(|e| Outcome::Fail(format!("{}: {e}", e.kind()), None));
            let millis = opts.timing.then(|| start.elapsed().as_millis());
            let (status, detail, cx) = match outcome {
                Outcome::Pass(d) => (Status::Pass, d, None),
                Outcome::Skipped(d) => (Status::Skipped, d, None),
                Outcome::Fail(d, cx) => {
                    let (word, n) = cx.unwrap_or_default();
                    let c = Counterexample {
                        beta: spec.clone(),
                        word,
                        n,
                        detail: d.clone(),
                    };
                    (Status::Fail, d, Some(c))
                }
            };
            out.push(CheckResult {
                check: name.into(),
                beta: spec.clone(),
                status,
                detail,
                counterexample: cx,
                millis,
            });
        }
        out
    });
    let mut results: Vec<CheckResult> = per_beta.into_iter().flatten().collect();
    results.sort_by(|a, b| a.check.cmp(&b.check).then_with(|| a.beta.cmp(&b.beta)));
    let count = |s| results.iter().filter(|r| r.status == s).count();
    VerifyReport {
        schema_version: crate::SCHEMA_VERSION,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        results,
    }
}
