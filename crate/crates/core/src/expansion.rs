//! The map `T x = βx − ⌈βx⌉ + 1`, digit generation, the expansion of 1 and
//! its zero runs, and the inverse problem of recovering `β` from a prescribed
//! expansion of 1.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::beta::{Beta, BetaOptions};
use crate::dseq::DigitSource;
use crate::error::{Error, Result};
use crate::exec;
use crate::numeric::Poly;
use crate::real::{Elem, Real};
use crate::word::{lex_compare, Word};

/// Digits scanned past position `n` before `zero_run_t` gives up.
pub const DEFAULT_ZERO_RUN_BUDGET: usize = 10_000;

fn check_unit_interval(x: &Real) -> Result<()> {
    if x.sign()? != Ordering::Greater {
        return Err(Error::OutOfDomain(format!("{:?} is not > 0", x.approx())));
    }
    if x.cmp_real(&Real::one(x.base()))? == Ordering::Greater {
        return Err(Error::OutOfDomain(format!("{:?} is not <= 1", x.approx())));
    }
    Ok(())
}

/// One step of `T` returning `(digit, T x)`; no domain check.
fn step(x: &Real) -> Result<(u32, Real)> {
    let bx = x.shift(1);
    let c = bx.ceil()?;
    let d = &c - BigInt::one();
    let digit = d
        .to_u32()
        .ok_or_else(|| Error::OutOfDomain(format!("digit {d} out of range")))?;
    let next = &bx - &Real::from_ratio(x.base(), BigRational::from_integer(d));
    Ok((digit, next))
}

/// `T x = βx − ⌈βx⌉ + 1` for `x ∈ (0, 1]`.
pub fn step_t(x: &Real) -> Result<Real> {
    check_unit_interval(x)?;
    Ok(step(x)?.1)
}

/// First `n` digits of `x ∈ (0, 1]`, `ε_i = ⌈β T^{i−1} x⌉ − 1`.
pub fn digits(x: &Real, n: usize) -> Result<Word> {
    Ok(digits_and_remainder(x, n)?.0)
}

/// Digits together with `T^n x`, so that
/// `x = Σ ε_i β^{−i} + β^{−n} T^n x`.
pub fn digits_and_remainder(x: &Real, n: usize) -> Result<(Word, Real)> {
    check_unit_interval(x)?;
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    for _ in 0..n {
        let (d, next) = step(&cur)?;
        out.push(d);
        cur = next;
    }
    Ok((Word::new(out), cur))
}

/// Digits of a rational point.
pub fn digits_of(beta: &Beta, x: &BigRational, n: usize) -> Result<Word> {
    digits(&Real::from_ratio(beta, x.clone()), n)
}

/// Greedy digits `⌊β T^{i−1} x⌋` with `T x = βx − ⌊βx⌋` on `[0, 1)`; only
/// offered as a cross-check, the two agree except at points with a finite
/// greedy expansion.
pub fn greedy_digits(x: &Real, n: usize) -> Result<Word> {
    let beta = x.base().clone();
    if x.sign()? == Ordering::Less || x.cmp_real(&Real::one(&beta))? != Ordering::Less {
        return Err(Error::OutOfDomain("greedy digits need x in [0, 1)".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    for _ in 0..n {
        let bx = cur.shift(1);
        // ⌊v⌋ = −⌈−v⌉
        let f = -(-&bx).ceil()?;
        out.push(f.to_u32().unwrap_or(u32::MAX));
        cur = &bx - &Real::from_ratio(&beta, BigRational::from_integer(f));
    }
    Ok(Word::new(out))
}

/// Makes sure the first `n` digits of the expansion of 1 are cached.
fn extend_one(beta: &Beta, n: usize) -> Result<()> {
    if beta.orbit().read().unwrap().digits.len() >= n {
        return Ok(());
    }
    let track_cycle = beta.is_exact();
    let mut o = beta.orbit().write().unwrap();
    while o.digits.len() < n {
        let j = o.digits.len();
        if let Some((pre, per)) = o.cycle {
            let d = o.digits[pre + (j - pre) % per];
            o.digits.push(d);
            continue;
        }
        let state = match o.state.take() {
            Some(e) => Real::from_elem(beta, e),
            None => Real::one(beta),
        };
        if track_cycle {
            if let Some(&i) = o.seen.get(state.elem()) {
                o.cycle = Some((i, j - i));
                o.state = Some(state.elem().clone());
                continue;
            }
            o.seen.insert(state.elem().clone(), j);
        }
        match step(&state) {
            Ok((d, next)) => {
                o.digits.push(d);
                o.state = Some(next.elem().clone());
            }
            Err(e) => {
                o.state = Some(state.elem().clone());
                return Err(e);
            }
        }
    }
    Ok(())
}

/// `ε*_i` (1-based).
pub fn one_digit(beta: &Beta, i: usize) -> Result<u32> {
    assert!(i >= 1, "digit positions are 1-based");
    {
        let o = beta.orbit().read().unwrap();
        if let Some(&d) = o.digits.get(i - 1) {
            return Ok(d);
        }
        if let Some((pre, per)) = o.cycle {
            return Ok(o.digits[pre + (i - 1 - pre) % per]);
        }
    }
    extend_one(beta, i)?;
    Ok(beta.orbit().read().unwrap().digits[i - 1])
}

/// `(ε*_1, …, ε*_n)`, the expansion of 1, cached on `beta`.
pub fn expansion_of_one(beta: &Beta, n: usize) -> Result<Word> {
    {
        let o = beta.orbit().read().unwrap();
        if o.digits.len() >= n {
            return Ok(Word::from(&o.digits[..n]));
        }
        if let Some((pre, per)) = o.cycle {
            let d = (0..n)
                .map(|i| {
                    if i < o.digits.len() {
                        o.digits[i]
                    } else {
                        o.digits[pre + (i - pre) % per]
                    }
                })
                .collect();
            return Ok(Word::new(d));
        }
    }
    extend_one(beta, n)?;
    Ok(Word::from(&beta.orbit().read().unwrap().digits[..n]))
}

/// `(preperiod, period)` of the expansion of 1 if it has been seen to cycle.
pub fn one_cycle(beta: &Beta) -> Option<(usize, usize)> {
    beta.orbit().read().unwrap().cycle
}

/// `T^m(1)` for `m = 0..=m_max`, built from the cached digits.
pub fn one_orbit(beta: &Beta, m_max: usize) -> Result<Vec<Real>> {
    let d = expansion_of_one(beta, m_max)?;
    let mut out = Vec::with_capacity(m_max + 1);
    let mut cur = Real::one(beta);
    out.push(cur.clone());
    for &e in d.digits() {
        cur = cur.shift(1).add_int(-(e as i64));
        out.push(cur.clone());
    }
    Ok(out)
}

/// `t_n`: the number of zeros right after position `n` in the expansion of 1.
pub fn zero_run_t(beta: &Beta, n: usize, budget: usize) -> Result<usize> {
    let mut k = 0;
    loop {
        if k >= budget {
            return Err(Error::BudgetExceeded {
                what: format!("zero run after position {n}"),
                budget,
            });
        }
        if one_digit(beta, n + k + 1)? != 0 {
            return Ok(k);
        }
        k += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroRunRecord {
    pub n: usize,
    pub t: usize,
    pub gamma: usize,
}

/// `t_n`, `Γ_n = max_{k≤n} t_k` for `n ≤ N`, and `λ̂_N = max Γ_n / n`.
///
/// `λ̂_N` is a finite sample of `λ(β) = limsup Γ_n/n`; it is not an upper
/// bound, and is reported as such.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroRunTable {
    pub records: Vec<ZeroRunRecord>,
    /// `(Γ_n, n)` attaining `λ̂_N`.
    pub lambda_hat_at: (usize, usize),
    pub lambda_hat: f64,
    pub note: &'static str,
}

pub const LAMBDA_NOTE: &str =
    "lambda_hat is max Gamma_n/n over the computed range; a finite sample of the limsup, not a certified bound";

impl ZeroRunTable {
    pub fn t(&self, n: usize) -> usize {
        self.records[n - 1].t
    }

    pub fn gamma(&self, n: usize) -> usize {
        self.records[n - 1].gamma
    }
}

pub fn zero_run_table(beta: &Beta, big_n: usize, budget: usize) -> Result<ZeroRunTable> {
    if big_n == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    // Fill the shared cache once so the parallel scans only read it.
    expansion_of_one(beta, big_n + 1)?;
    let ns: Vec<usize> = (1..=big_n).collect();
    let ts = exec::try_map(&ns, |&n| zero_run_t(beta, n, budget))?;
    let mut records = Vec::with_capacity(big_n);
    let mut gamma = 0;
    let mut best = (0usize, 1usize);
    for (i, &t) in ts.iter().enumerate() {
        let n = i + 1;
        gamma = gamma.max(t);
        // Γ_n / n > best.0 / best.1
        if gamma * best.1 > best.0 * n {
            best = (gamma, n);
        }
        records.push(ZeroRunRecord { n, t, gamma });
    }
    Ok(ZeroRunTable {
        records,
        lambda_hat_at: best,
        lambda_hat: best.0 as f64 / best.1 as f64,
        note: LAMBDA_NOTE,
    })
}

/// `Σ w_i β^{−i}`, the left endpoint of the cylinder of `w`.
pub fn word_value(beta: &Beta, w: &[u32]) -> Real {
    let n = w.len() as i64;
    let c = w.iter().rev().map(|&d| BigRational::from_integer(d.into())).collect();
    Real::from_elem(beta, Elem { low: -n, c }.normalize())
}

fn check_self_admissible(source: &DigitSource, depth: usize) -> Result<()> {
    let depth = match source {
        // Two periods past the preperiod settle every shift exactly.
        DigitSource::Periodic { prefix, period } => depth.max(2 * (prefix.len() + period.len())),
        _ => depth,
    };
    let d = source
        .prefix(2 * depth + 1)
        .ok_or_else(|| Error::InvalidBetaSpec("sequence shorter than the check depth".into()))?;
    for k in 1..=depth {
        let shifted = &d[k..k + depth];
        if lex_compare(shifted, &d[..depth]) == Ordering::Greater {
            let pos = shifted.iter().zip(&d).position(|(a, b)| a != b).unwrap();
            return Err(Error::NotSelfAdmissible {
                shift: k,
                position: pos + 1,
            });
        }
    }
    Ok(())
}

/// Checks that `source` can be the expansion of 1 of some `β > 1`.
pub fn validate_one_expansion(source: &DigitSource, opts: &BetaOptions) -> Result<()> {
    if !source.is_infinite() {
        return Err(Error::InvalidBetaSpec(
            "finite digit list without a repeat or rule footer; the expansion of 1 is infinite".into(),
        ));
    }
    match source.digit(1) {
        Some(d) if d >= 1 => {}
        _ => return Err(Error::InvalidBetaSpec("first digit must be at least 1".into())),
    }
    if source.is_eventually_zero() {
        return Err(Error::InvalidBetaSpec("sequence is eventually zero".into()));
    }
    check_self_admissible(source, opts.self_check_depth)
}

/// The polynomial in `β` whose root in `(d_1, d_1 + 1]` solves
/// `1 = Σ d_i β^{−i}` for `d = prefix · period^∞`.
fn periodic_polynomial(prefix: &[u32], period: &[u32]) -> Poly {
    let (a, q) = (prefix.len(), period.len());
    let coeffs = |digits: &[u32], offset: usize| {
        let mut c = vec![BigRational::zero(); offset + digits.len() + 1];
        for (i, &d) in digits.iter().enumerate() {
            c[offset + i + 1] = BigRational::from_integer(d.into());
        }
        Poly::new(c)
    };
    let one = Poly::constant(BigRational::one());
    // In γ = 1/β: (1 − γ^q)(1 − A(γ)) − γ^a B(γ) = 0.
    let one_minus_gq = one.sub(&one.shift(q));
    let p_gamma = one_minus_gq.mul(&one.sub(&coeffs(prefix, 0))).sub(&coeffs(period, a));
    let deg = a + q;
    let mut c = vec![BigRational::zero(); deg + 1];
    for (i, v) in p_gamma.coeffs().iter().enumerate() {
        c[deg - i] = v.clone();
    }
    let mut p = Poly::new(c);
    // The factor 1 − γ^q contributes a root at β = 1, never the one sought.
    let x_minus_1 = Poly::from_ints(&[-1, 1]);
    while p.degree().unwrap_or(0) > 1 && p.eval(&BigRational::one()).is_zero() {
        p = p.div_rem(&x_minus_1).0;
    }
    p
}

/// Builds `β` from a validated defining sequence. Eventually periodic
/// sequences give an exact algebraic base.
pub(crate) fn beta_from_source(source: DigitSource, label: String, opts: &BetaOptions) -> Result<Beta> {
    validate_one_expansion(&source, opts)?;
    match &source {
        DigitSource::Periodic { prefix, period } => {
            let d1 = source.digit(1).unwrap();
            let p = periodic_polynomial(prefix, period);
            let lo = BigRational::from_integer(d1.into());
            let hi = BigRational::from_integer((d1 + 1).into());
            Ok(Beta::algebraic_labeled(&p, &lo, &hi, label, opts)?.with_defining(source))
        }
        _ => Beta::series_labeled(source, label, opts),
    }
}

/// `β` with `1 = Σ d_i β^{−i}`, with its enclosure certified to width `eps`.
pub fn beta_from_one_expansion(source: &DigitSource, eps: &BigRational) -> Result<Beta> {
    beta_from_one_expansion_with(source, eps, &BetaOptions::default())
}

pub fn beta_from_one_expansion_with(source: &DigitSource, eps: &BigRational, opts: &BetaOptions) -> Result<Beta> {
    let beta = beta_from_source(source.clone(), format!("dseq:{source}"), opts)?;
    beta.refine(eps)?;
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> Beta {
        Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap()
    }

    #[test]
    fn step_examples() {
        let two = Beta::integer(2).unwrap();
        let one = Real::one(&two);
        assert_eq!(step_t(&one).unwrap().as_rational(), Some(q(1, 1)));
        let half = Real::from_ratio(&two, q(1, 2));
        assert_eq!(step_t(&half).unwrap().as_rational(), Some(q(1, 1)));
        let g = golden();
        let t1 = step_t(&Real::one(&g)).unwrap();
        let expect = Real::beta(&g).add_int(-1);
        assert_eq!(t1.cmp_real(&expect).unwrap(), Ordering::Equal);
        assert!(step_t(&Real::zero(&g)).is_err());
    }

    #[test]
    fn digit_examples() {
        let two = Beta::integer(2).unwrap();
        assert_eq!(digits_of(&two, &q(1, 1), 4).unwrap().digits(), &[1, 1, 1, 1]);
        assert_eq!(digits_of(&two, &q(1, 2), 4).unwrap().digits(), &[0, 1, 1, 1]);
        assert_eq!(expansion_of_one(&golden(), 6).unwrap().digits(), &[1, 0, 1, 0, 1, 0]);
        assert_eq!(one_cycle(&golden()), None);
        let g = golden();
        expansion_of_one(&g, 3).unwrap();
        assert_eq!(one_cycle(&g), Some((0, 2)));
        // greedy form of 1/2 terminates
        let half = Real::from_ratio(&two, q(1, 2));
        assert_eq!(greedy_digits(&half, 3).unwrap().digits(), &[1, 0, 0]);
    }

    #[test]
    fn zero_runs() {
        let two = Beta::integer(2).unwrap();
        let t = zero_run_table(&two, 10, DEFAULT_ZERO_RUN_BUDGET).unwrap();
        assert!(t.records.iter().all(|r| r.t == 0 && r.gamma == 0));
        assert_eq!(t.lambda_hat, 0.0);
        let g = golden();
        assert_eq!(zero_run_t(&g, 1, 100).unwrap(), 1);
        assert_eq!(zero_run_t(&g, 2, 100).unwrap(), 0);
        let t = zero_run_table(&g, 10, 100).unwrap();
        assert!(t.records.iter().all(|r| r.gamma == 1));
        assert_eq!(t.lambda_hat_at, (1, 1));
    }

    #[test]
    fn word_values() {
        let two = Beta::integer(2).unwrap();
        assert_eq!(word_value(&two, &[1, 0, 1]).as_rational(), Some(q(5, 8)));
        let g = golden();
        let v = word_value(&g, &[1, 0]);
        assert_eq!(v.cmp_real(&Real::beta(&g).add_int(-1)).unwrap(), Ordering::Equal);
        assert!(word_value(&g, &[]).is_identically_zero());
    }

    #[test]
    fn inverse_problem_periodic() {
        let ones = DigitSource::periodic(vec![], vec![1]).unwrap();
        let b = beta_from_one_expansion(&ones, &q(1, 1 << 16)).unwrap();
        assert_eq!(b.as_rational(), Some(&q(2, 1)));
        let alt = DigitSource::periodic(vec![], vec![1, 0]).unwrap();
        let b = beta_from_one_expansion(&alt, &q(1, 1 << 16)).unwrap();
        assert_eq!(expansion_of_one(&b, 8).unwrap().digits(), &[1, 0, 1, 0, 1, 0, 1, 0]);
        let phi = Real::beta(&b);
        let lhs = &(&phi * &phi) - &phi;
        assert_eq!(lhs.cmp_real(&Real::one(&b)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn inverse_problem_rejections() {
        let bad = DigitSource::periodic(vec![1], vec![2]).unwrap();
        assert!(matches!(
            beta_from_one_expansion(&bad, &q(1, 16)),
            Err(Error::NotSelfAdmissible { shift: 1, .. })
        ));
        let zero = DigitSource::periodic(vec![1], vec![0]).unwrap();
        assert!(matches!(
            beta_from_one_expansion(&zero, &q(1, 16)),
            Err(Error::InvalidBetaSpec(_))
        ));
        let fin = DigitSource::Finite(vec![1, 1]);
        assert!(matches!(
            beta_from_one_expansion(&fin, &q(1, 16)),
            Err(Error::InvalidBetaSpec(_))
        ));
    }
}
