//! Density traces `d_n = −log_β |I_n(x)| / n` and their finite summaries.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::beta::Beta;
use crate::cylinder::Fullness;
use crate::error::{Error, Result};
use crate::exec;
use crate::expansion::{expansion_of_one, one_orbit, zero_run_table, DEFAULT_ZERO_RUN_BUDGET};
use crate::language::require_admissible;
use crate::numeric::float;
use crate::real::Real;
use crate::word::Word;

/// A lazily evaluated digit sequence of a point in `(0, 1]`.
#[derive(Clone, Debug)]
pub enum DigitStream {
    /// Digits of a point given exactly.
    Point(Real),
    /// The expansion of 1.
    One(Beta),
    /// A fixed admissible prefix ending in a full cylinder, followed by the
    /// expansion of 1 (the point is the right endpoint of that cylinder).
    Constructed { beta: Beta, prefix: Word },
}

impl DigitStream {
    pub fn base(&self) -> &Beta {
        match self {
            DigitStream::Point(x) => x.base(),
            DigitStream::One(b) | DigitStream::Constructed { beta: b, .. } => b,
        }
    }

    pub fn take(&self, n: usize) -> Result<Word> {
        match self {
            DigitStream::Point(x) => crate::expansion::digits(x, n),
            DigitStream::One(b) => expansion_of_one(b, n),
            DigitStream::Constructed { beta, prefix } => {
                if n <= prefix.len() {
                    return Ok(prefix.prefix(n));
                }
                Ok(prefix.concat(&expansion_of_one(beta, n - prefix.len())?))
            }
        }
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitStream::Point(x) => match x.as_rational() {
                Some(r) => write!(f, "point x={r}"),
                None => write!(f, "point x~{}", x.approx()),
            },
            DigitStream::One(_) => write!(f, "expansion of 1"),
            DigitStream::Constructed { prefix, .. } => {
                write!(f, "constructed point (prefix of length {})", prefix.len())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRecord {
    pub n: usize,
    pub d_lo: f64,
    pub d_hi: f64,
    pub k_star: usize,
    /// `t_{n − k*_n}`
    pub t_aux: usize,
    pub gamma: usize,
    pub full: Fullness,
}

impl DensityRecord {
    pub fn d_mid(&self) -> f64 {
        0.5 * (self.d_lo + self.d_hi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityTrace {
    pub beta: String,
    pub source: String,
    pub records: Vec<DensityRecord>,
}

/// CSV shape of a record: `n,d_lo,d_hi,k_star,t_aux,gamma,full`.
#[derive(Serialize)]
pub struct DensityRow {
    pub n: usize,
    pub d_lo: f64,
    pub d_hi: f64,
    pub k_star: usize,
    pub t_aux: usize,
    pub gamma: usize,
    pub full: &'static str,
}

impl DensityTrace {
    pub fn record(&self, n: usize) -> Option<&DensityRecord> {
        self.records.get(n.checked_sub(1)?)
    }

    pub fn rows(&self) -> Vec<DensityRow> {
        self.records
            .iter()
            .map(|r| DensityRow {
                n: r.n,
                d_lo: r.d_lo,
                d_hi: r.d_hi,
                k_star: r.k_star,
                t_aux: r.t_aux,
                gamma: r.gamma,
                full: r.full.as_str(),
            })
            .collect()
    }

    /// Records violating `1 ≤ d_n ≤ (n + Γ_n + 1)/n`.
    pub fn bracket_violations(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| {
                let hi = (r.n + r.gamma + 1) as f64 / r.n as f64;
                r.d_hi < 1.0 || r.d_lo > hi
            })
            .map(|r| r.n)
            .collect()
    }
}

/// Prefix function of `p`: `fail[i]` is the length of the longest proper
/// border of `p[..=i]`.
fn borders(p: &[u32]) -> Vec<usize> {
    let mut fail = vec![0; p.len()];
    let mut k = 0;
    for i in 1..p.len() {
        while k > 0 && p[i] != p[k] {
            k = fail[k - 1];
        }
        if p[i] == p[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// `k*_n` for every prefix of `w`: `n` minus the longest suffix of `w|n`
/// that is a prefix of `star`.
pub(crate) fn k_star_trace(w: &[u32], star: &[u32]) -> Vec<usize> {
    let fail = borders(star);
    let mut out = Vec::with_capacity(w.len());
    let mut q = 0;
    for (i, &c) in w.iter().enumerate() {
        if q == star.len() {
            q = fail[q - 1];
        }
        while q > 0 && star[q] != c {
            q = fail[q - 1];
        }
        if star[q] == c {
            q += 1;
        }
        out.push(i + 1 - q);
    }
    out
}

/// Bits of relative accuracy used for the logarithms.
const LOG_BITS: u32 = 64;
const PAD: f64 = 1e-13;

/// `ln β` as an enclosing pair.
pub(crate) fn ln_beta(beta: &Beta) -> Result<(f64, f64)> {
    let e = beta.refine(&BigRational::new(BigInt::one(), BigInt::one() << 64usize))?;
    Ok((float::ln_bounds(&e.lo).0, float::ln_bounds(&e.hi).1))
}

/// Enclosure of `1 − log_β(v)/n` for `0 < v < 1`.
pub(crate) fn d_enclosure(v: &Real, n: usize, ln_b: (f64, f64)) -> Result<(f64, f64)> {
    let e = v.relative_enclosure(LOG_BITS)?;
    let (ln_lo, _) = float::ln_bounds(&e.lo);
    let (_, ln_hi) = float::ln_bounds(&e.hi);
    let n = n as f64;
    // −ln v ∈ [−ln_hi, −ln_lo], both ≥ 0 up to rounding
    let lo = 1.0 + (-ln_hi).max(0.0) / (n * ln_b.1);
    let hi = 1.0 + (-ln_lo).max(0.0) / (n * ln_b.0);
    Ok((lo * (1.0 - PAD), hi * (1.0 + PAD)))
}

/// Density trace of the first `big_n` digits of `source`.
///
/// With `|I_n| = β^{−n} T^m(1)`, `m = n − k*_n`, each record is
/// `d_n = 1 − log_β T^m(1) / n`, exactly 1 when `I_n` is full.
pub fn density_trace(source: &DigitStream, big_n: usize) -> Result<DensityTrace> {
    let beta = source.base().clone();
    if big_n == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    let w = source.take(big_n)?;
    require_admissible(&beta, &w)?;
    let star = expansion_of_one(&beta, big_n)?;
    let ks = k_star_trace(w.digits(), star.digits());
    let m_max = ks.iter().enumerate().map(|(i, k)| i + 1 - k).max().unwrap_or(0);
    let orbit = one_orbit(&beta, m_max)?;
    let table = zero_run_table(&beta, big_n, DEFAULT_ZERO_RUN_BUDGET)?;
    let ln_b = ln_beta(&beta)?;
    let one = Real::one(&beta);

    let ns: Vec<usize> = (1..=big_n).collect();
    let records = exec::try_map(&ns, |&n| -> Result<DensityRecord> {
        let k = ks[n - 1];
        let m = n - k;
        let tm = &orbit[m];
        let full = if m == 0 {
            Fullness::Full
        } else {
            match (tm - &one).sign() {
                Ok(std::cmp::Ordering::Equal) => Fullness::Full,
                Ok(_) => Fullness::NotFull,
                Err(Error::PrecisionExhausted { .. }) => Fullness::Unknown,
                Err(e) => return Err(e),
            }
        };
        let (d_lo, d_hi) = if full == Fullness::Full {
            (1.0, 1.0)
        } else {
            d_enclosure(tm, n, ln_b)?
        };
        Ok(DensityRecord {
            n,
            d_lo,
            d_hi,
            k_star: k,
            t_aux: if m == 0 { 0 } else { table_t(&table, m, &beta)? },
            gamma: table.gamma(n),
            full,
        })
    })?;
    Ok(DensityTrace {
        beta: beta.label().to_string(),
        source: source.to_string(),
        records,
    })
}

fn table_t(table: &crate::expansion::ZeroRunTable, m: usize, beta: &Beta) -> Result<usize> {
    if m <= table.records.len() {
        Ok(table.t(m))
    } else {
        crate::expansion::zero_run_t(beta, m, DEFAULT_ZERO_RUN_BUDGET)
    }
}

/// Finite-`N` diagnostics; none of these are limits.
#[derive(Clone, Debug, Serialize)]
pub struct DensitySummary {
    pub tail_start: usize,
    pub n_max: usize,
    /// `min d_n` over the tail, as an enclosure.
    pub lower_density: (f64, f64),
    /// `max d_n` over the tail, as an enclosure.
    pub upper_density: (f64, f64),
    /// `max t_{n−k*_n}/n` over the tail.
    pub tau_hat: f64,
    /// `|D̄ − (1 + τ̂)|` using midpoints.
    pub upper_vs_tau_gap: f64,
    /// `max_n (n + t_aux)/n ≤ D̄ ≤ max_n (n + t_aux + 1)/n` over `[1, N]`.
    pub upper_bracket_holds: bool,
    pub gap_tol: f64,
    /// Largest gap in `{1} ∪ {d_n} ∪ {D̄}` over the tail.
    pub max_gap: f64,
    pub covers_interval: bool,
    pub note: &'static str,
}

pub fn density_summary(trace: &DensityTrace, tail_start: usize, gap_tol: f64) -> Result<DensitySummary> {
    if gap_tol.is_nan() || gap_tol <= 0.0 {
        return Err(Error::DomainError("gap_tol must be positive".into()));
    }
    let tail: Vec<&DensityRecord> = trace.records.iter().filter(|r| r.n >= tail_start).collect();
    if tail.is_empty() {
        return Err(Error::EmptyTail { tail_start });
    }
    let fold =
        |f: fn(f64, f64) -> f64, init: f64, g: fn(&DensityRecord) -> f64| tail.iter().map(|r| g(r)).fold(init, f);
    let lower = (
        fold(f64::min, f64::INFINITY, |r| r.d_lo),
        fold(f64::min, f64::INFINITY, |r| r.d_hi),
    );
    let upper = (
        fold(f64::max, f64::NEG_INFINITY, |r| r.d_lo),
        fold(f64::max, f64::NEG_INFINITY, |r| r.d_hi),
    );
    let tau_hat = tail.iter().map(|r| r.t_aux as f64 / r.n as f64).fold(0.0, f64::max);
    let upper_mid = tail.iter().map(|r| r.d_mid()).fold(f64::NEG_INFINITY, f64::max);

    let all = &trace.records;
    let all_upper = (
        all.iter().map(|r| r.d_lo).fold(f64::NEG_INFINITY, f64::max),
        all.iter().map(|r| r.d_hi).fold(f64::NEG_INFINITY, f64::max),
    );
    let bracket_lo = all
        .iter()
        .map(|r| (r.n + r.t_aux) as f64 / r.n as f64)
        .fold(0.0, f64::max);
    let bracket_hi = all
        .iter()
        .map(|r| (r.n + r.t_aux + 1) as f64 / r.n as f64)
        .fold(0.0, f64::max);
    let slack = 1e-12;
    let upper_bracket_holds = bracket_lo <= all_upper.1 + slack && all_upper.0 <= bracket_hi + slack;

    let mut pts: Vec<f64> = tail.iter().map(|r| r.d_mid()).collect();
    pts.push(1.0);
    pts.push(upper_mid);
    pts.sort_by(f64::total_cmp);
    let max_gap = pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);

    Ok(DensitySummary {
        tail_start,
        n_max: all.len(),
        lower_density: lower,
        upper_density: upper,
        tau_hat,
        upper_vs_tau_gap: (upper_mid - (1.0 + tau_hat)).abs(),
        upper_bracket_holds,
        gap_tol,
        max_gap,
        covers_interval: max_gap <= gap_tol,
        note: "finite-N estimates over the tail; not limits",
    })
}

/// `dim_H E_δ = (λ + 1 − δ) / (δ λ)` for `λ > 0`, `1 < δ ≤ 1 + λ`.
pub fn spectrum_dim(lambda: f64, delta: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::DomainError(format!("lambda must be > 0, got {lambda}")));
    }
    if delta.is_nan() || delta <= 1.0 || delta > 1.0 + lambda {
        return Err(Error::DomainError(format!(
            "delta must lie in (1, 1 + lambda] = (1, {}], got {delta}",
            1.0 + lambda
        )));
    }
    Ok((lambda + 1.0 - delta) / (delta * lambda))
}
