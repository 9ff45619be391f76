//! Constructive generation of points with large upper density.
//!
//! Starting from an admissible seed `ε_1 … ε_ℓ`, the digits are
//!
//! ```text
//! seed, 0^{Γ_ℓ+1}, ω_1, …, ω_K, 0^{Γ_L+1}, ε*_1, ε*_2, …
//! ```
//!
//! with blocks `ω_k = (ε*_1, …, ε*_{m_k}, 0^{t_{m_k}+1})`. Every block ends in
//! a full cylinder, so the concatenation stays admissible, and at the end of
//! the `ε*`-part of block `k` (position `n_k = h_k + m_k`, where `h_k` digits
//! precede the block) the cylinder is as short as `β^{−(n_k + t_{m_k} + 1)}`.
//! Choosing `m_k` large compared to `h_k` and with `t_{m_k}/m_k` close to its
//! best value drives `d_{n_k}` towards `1 + λ(β)`.

use std::cmp::Ordering;

use num_rational::BigRational;
use serde::Serialize;

use crate::beta::{Beta, RealEnclosure};
use crate::cylinder::Fullness;
use crate::density::{DensityTrace, DigitStream};
use crate::error::{Error, Result};
use crate::expansion::{
    expansion_of_one, one_orbit, word_value, zero_run_table, ZeroRunTable, DEFAULT_ZERO_RUN_BUDGET,
};
use crate::language::require_admissible;
use crate::real::Real;
use crate::word::Word;

pub const DEFAULT_RATIO: usize = 10;
pub const DEFAULT_BLOCKS: usize = 2;
pub const DEFAULT_SEARCH_CAP: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub k: usize,
    /// Digits before the block.
    pub h: usize,
    pub m: usize,
    pub t_m: usize,
    /// `h + m`: where the density spikes.
    pub n: usize,
    /// `n + t_m + 1`: end of the block, a full position.
    pub end: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionSchedule {
    pub beta: String,
    pub seed: Word,
    pub ell: usize,
    pub gamma_ell: usize,
    pub r: usize,
    pub search_cap: usize,
    pub blocks: Vec<Block>,
    /// `max_{m ≤ search_cap} t_m/m`, the target slope.
    pub lambda_hat: f64,
    pub lambda_hat_at: (usize, usize),
    pub warning: Option<String>,
}

impl ConstructionSchedule {
    /// The first full position, right after `seed, 0^{Γ_ℓ+1}`.
    pub fn h1(&self) -> usize {
        self.ell + self.gamma_ell + 1
    }

    /// Positions where the prefix is a full cylinder.
    pub fn full_positions(&self) -> Vec<usize> {
        std::iter::once(self.h1())
            .chain(self.blocks.iter().map(|b| b.end))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.last().map_or(self.h1(), |b| b.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `Γ_n` then `t_m` lookups; `table` covers `1..=cap`.
fn next_h(table: &ZeroRunTable, h: usize, m: usize) -> usize {
    h + m + table.t(m) + 1
}

/// Smallest reachable `h` after `steps` more blocks, or `None`.
fn min_reach(table: &ZeroRunTable, mut h: usize, steps: usize, r: usize, cap: usize) -> Option<usize> {
    for _ in 0..steps {
        let lo = r.checked_mul(h)?.max(1);
        if lo > cap {
            return None;
        }
        h = (lo..=cap).map(|m| next_h(table, h, m)).min()?;
    }
    Some(h)
}

/// Chooses `m_1, …, m_K` with `r·h_k ≤ m_k ≤ cap`, each maximising
/// `t_m/m` (smallest `m` on ties) among choices that leave the remaining
/// blocks feasible.
pub fn schedule(
    beta: &Beta,
    seed: &Word,
    k_blocks: usize,
    r: usize,
    search_cap: usize,
) -> Result<ConstructionSchedule> {
    if k_blocks == 0 || r == 0 || search_cap == 0 {
        return Err(Error::DomainError("K, r and search_cap must be positive".into()));
    }
    if seed.is_empty() {
        return Err(Error::DomainError("seed must be non-empty".into()));
    }
    require_admissible(beta, seed)?;
    let ell = seed.len();
    let table = zero_run_table(beta, search_cap.max(ell), DEFAULT_ZERO_RUN_BUDGET)?;
    let gamma_ell = table.gamma(ell);
    let cap_table = &table.records[..search_cap];
    let (lambda_gamma, lambda_n) = cap_table.iter().fold((0usize, 1usize), |best, rec| {
        if rec.gamma * best.1 > best.0 * rec.n {
            (rec.gamma, rec.n)
        } else {
            best
        }
    });

    let mut h = ell + gamma_ell + 1;
    let mut blocks = Vec::with_capacity(k_blocks);
    for k in 1..=k_blocks {
        let lo = r * h;
        if lo > search_cap {
            return Err(Error::ScheduleInfeasible {
                k,
                needed: lo,
                cap: search_cap,
            });
        }
        let mut cands: Vec<usize> = (lo..=search_cap).collect();
        // t_a/a > t_b/b first, then smaller m
        cands.sort_by(|&a, &b| (table.t(b) * a).cmp(&(table.t(a) * b)).then(a.cmp(&b)));
        let remaining = k_blocks - k;
        let m = cands
            .into_iter()
            .find(|&m| min_reach(&table, next_h(&table, h, m), remaining, r, search_cap).is_some())
            .ok_or_else(|| {
                let best = (lo..=search_cap).map(|m| next_h(&table, h, m)).min().unwrap_or(h);
                Error::ScheduleInfeasible {
                    k: k + 1,
                    needed: r * best,
                    cap: search_cap,
                }
            })?;
        let t_m = table.t(m);
        blocks.push(Block {
            k,
            h,
            m,
            t_m,
            n: h + m,
            end: h + m + t_m + 1,
            ratio: t_m as f64 / m as f64,
        });
        h = h + m + t_m + 1;
    }
    let warning = (lambda_gamma == 0).then(|| {
        format!("lambda_hat = 0 within search_cap {search_cap}: every t_m is 0, the construction degenerates")
    });
    Ok(ConstructionSchedule {
        beta: beta.label().to_string(),
        seed: seed.clone(),
        ell,
        gamma_ell,
        r,
        search_cap,
        blocks,
        lambda_hat: lambda_gamma as f64 / lambda_n as f64,
        lambda_hat_at: (lambda_gamma, lambda_n),
        warning,
    })
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub schedule: ConstructionSchedule,
    /// The explicit digits: blocks followed by the closing zero run.
    pub prefix: Word,
    pub stream: DigitStream,
    /// The constructed point: the right endpoint of `I(prefix)`.
    pub y: Real,
    pub y_enclosure: RealEnclosure,
    /// `y ∈ I(seed)`, hence within `β^{−ℓ}` of the seed value (certified).
    pub near_seed: bool,
}

#[derive(Serialize)]
pub struct ConstructionSummary<'a> {
    pub schedule: &'a ConstructionSchedule,
    pub prefix_len: usize,
    pub prefix: String,
    pub y: &'a RealEnclosure,
    pub near_seed: bool,
}

impl Construction {
    pub fn summary(&self) -> ConstructionSummary<'_> {
        ConstructionSummary {
            schedule: &self.schedule,
            prefix_len: self.prefix.len(),
            prefix: self.prefix.to_string(),
            y: &self.y_enclosure,
            near_seed: self.near_seed,
        }
    }
}

pub fn build_irregular(beta: &Beta, sched: &ConstructionSchedule, eps: &BigRational) -> Result<Construction> {
    let mut u = sched.seed.with_zeros(sched.gamma_ell + 1);
    for b in &sched.blocks {
        u = u.concat(&expansion_of_one(beta, b.m)?).with_zeros(b.t_m + 1);
    }
    let len = u.len();
    let table = zero_run_table(beta, len, DEFAULT_ZERO_RUN_BUDGET)?;
    let prefix = u.with_zeros(table.gamma(len) + 1);
    require_admissible(beta, &prefix)?;

    let y = word_value(beta, prefix.digits()) + Real::beta_pow(beta, -(prefix.len() as i64));
    let seed_left = word_value(beta, sched.seed.digits());
    let gap = &y - &seed_left;
    let near_seed = gap.sign()? == Ordering::Greater
        && gap.cmp_real(&Real::beta_pow(beta, -(sched.ell as i64)))? != Ordering::Greater;
    Ok(Construction {
        schedule: sched.clone(),
        stream: DigitStream::Constructed {
            beta: beta.clone(),
            prefix: prefix.clone(),
        },
        y_enclosure: y.refine(eps)?,
        prefix,
        y,
        near_seed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpikeRow {
    pub k: usize,
    pub n: usize,
    pub t_m: usize,
    pub d_lo: f64,
    pub d_hi: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpikeReport {
    pub spikes: Vec<SpikeRow>,
    pub full_positions: Vec<usize>,
    pub lambda_hat: f64,
    pub target: f64,
}

/// Checks the spike law `(n_k + t)/n_k ≤ d_{n_k} ≤ (n_k + t + 1)/n_k` for
/// every block and `d_n = 1` at every full position.
///
/// The spike law is certified from the exact orbit of 1 at the trace's
/// `k*`; the recorded `d` enclosure must also meet the bracket, so a
/// corrupted trace is caught either way.
pub fn verify_spike(beta: &Beta, sched: &ConstructionSchedule, trace: &DensityTrace) -> Result<SpikeReport> {
    let need = sched.len();
    if trace.records.len() < need {
        return Err(Error::DomainError(format!(
            "trace has {} records, the schedule needs {need}",
            trace.records.len()
        )));
    }
    let m_max = sched.blocks.iter().map(|b| b.n).max().unwrap_or(0);
    let orbit = one_orbit(beta, m_max)?;
    let mut spikes = Vec::new();
    for b in &sched.blocks {
        let fail = |detail: String| Error::AssertionFailure { k: b.k, detail };
        let rec = trace.record(b.n).unwrap();
        if rec.k_star > b.n {
            return Err(fail(format!("k* = {} exceeds n = {}", rec.k_star, b.n)));
        }
        let tm = &orbit[b.n - rec.k_star];
        let upper = Real::beta_pow(beta, -(b.t_m as i64));
        let lower = Real::beta_pow(beta, -(b.t_m as i64 + 1));
        if tm.cmp_real(&lower)? == Ordering::Less || tm.cmp_real(&upper)? == Ordering::Greater {
            return Err(fail(format!(
                "|I_n| outside [β^-(n+t+1), β^-(n+t)] at n = {} (t = {})",
                b.n, b.t_m
            )));
        }
        let bracket_lo = (b.n + b.t_m) as f64 / b.n as f64;
        let bracket_hi = (b.n + b.t_m + 1) as f64 / b.n as f64;
        let slack = 1e-12;
        if rec.d_hi < bracket_lo - slack || rec.d_lo > bracket_hi + slack {
            return Err(fail(format!(
                "d_{} in [{}, {}] misses the bracket [{bracket_lo}, {bracket_hi}]",
                b.n, rec.d_lo, rec.d_hi
            )));
        }
        spikes.push(SpikeRow {
            k: b.k,
            n: b.n,
            t_m: b.t_m,
            d_lo: rec.d_lo,
            d_hi: rec.d_hi,
            bracket_lo,
            bracket_hi,
        });
    }
    let full_positions = sched.full_positions();
    for (i, &n) in full_positions.iter().enumerate() {
        let rec = trace.record(n).unwrap();
        if rec.full != Fullness::Full || rec.d_lo != 1.0 || rec.d_hi != 1.0 {
            return Err(Error::AssertionFailure {
                k: i,
                detail: format!(
                    "position {n} should be full with d = 1, got [{}, {}]",
                    rec.d_lo, rec.d_hi
                ),
            });
        }
    }
    Ok(SpikeReport {
        spikes,
        full_positions,
        lambda_hat: sched.lambda_hat,
        target: 1.0 + sched.lambda_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dseq::DigitSource;
    use crate::expansion::beta_from_one_expansion;

    fn doubling() -> Beta {
        beta_from_one_expansion(&DigitSource::DoublingRuns, &BigRational::new(1.into(), 65536.into())).unwrap()
    }

    #[test]
    fn schedule_arithmetic() {
        let b = doubling();
        let s = schedule(&b, &Word::from(vec![1]), 2, 4, 200).unwrap();
        assert_eq!(s.h1(), 3);
        assert_eq!((s.blocks[0].m, s.blocks[0].t_m), (20, 16));
        assert_eq!(s.blocks[1].h, 40);
        assert_eq!((s.blocks[1].m, s.blocks[1].t_m), (160, 103));
        assert_eq!(s.lambda_hat, 1.0);
    }

    #[test]
    fn infeasible_and_inadmissible() {
        let b = doubling();
        assert!(matches!(
            schedule(&b, &Word::from(vec![1]), 3, 10, 50),
            Err(Error::ScheduleInfeasible { .. })
        ));
        assert!(matches!(
            schedule(&b, &Word::from(vec![1, 1]), 1, 4, 200),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn binary_schedule_warns() {
        let two = Beta::integer(2).unwrap();
        let s = schedule(&two, &Word::from(vec![1]), 2, 2, 100).unwrap();
        assert!(s.warning.is_some());
        assert_eq!(s.lambda_hat, 0.0);
    }
}
