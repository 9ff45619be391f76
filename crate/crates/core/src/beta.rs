//! The base `β > 1` and its certified enclosures.
//!
//! Three representations are supported:
//!
//! * exact rationals (`dec:` literals),
//! * real algebraic numbers given by an integer polynomial and an isolating
//!   rational interval (`poly:`), with exact arithmetic in `Q(β)`,
//! * series-defined bases, the unique `β` with `1 = Σ d_i β^{-i}` for an
//!   infinite digit sequence `d` (`dseq:`). Eventually periodic sequences are
//!   turned into a polynomial and handled exactly; the others are refined by
//!   monotone bisection with a geometric tail bound.
//!
//! Enclosures come from a fixed bisection grid, so the interval returned for
//! a given width never depends on which refinements happened earlier.

use std::cmp::Ordering;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::dseq::DigitSource;
use crate::error::{Error, Result};
use crate::numeric::{Dyadic, Poly};
use crate::real::Elem;

pub const DEFAULT_REFINE_BUDGET: usize = 4096;
pub const DEFAULT_SELF_CHECK_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaOptions {
    /// Maximum number of bisection steps for any enclosure of `β`.
    pub refine_budget: usize,
    /// Depth to which a defining digit sequence is checked for
    /// self-admissibility.
    pub self_check_depth: usize,
}

impl Default for BetaOptions {
    fn default() -> Self {
        BetaOptions {
            refine_budget: DEFAULT_REFINE_BUDGET,
            self_check_depth: DEFAULT_SELF_CHECK_DEPTH,
        }
    }
}

/// A certified interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealEnclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealEnclosure {
    pub fn point(v: BigRational) -> Self {
        RealEnclosure { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn intersects(&self, o: &RealEnclosure) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn is_subset_of(&self, o: &RealEnclosure) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }

    pub fn lo_f64(&self) -> f64 {
        crate::numeric::float::down(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        crate::numeric::float::up(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        let m = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        m.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for RealEnclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RealEnclosure", 4)?;
        st.serialize_field("lo", &self.lo.to_string())?;
        st.serialize_field("hi", &self.hi.to_string())?;
        st.serialize_field("lo_f64", &self.lo_f64())?;
        st.serialize_field("hi_f64", &self.hi_f64())?;
        st.end()
    }
}

/// Parsed form of the textual β grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaSpec {
    /// `dec:<digits>[.<digits>]`
    Decimal(String),
    /// `poly:<c0>,...,<cd>@[<lo>,<hi>]`
    Polynomial {
        coeffs: Vec<BigInt>,
        lo: BigRational,
        hi: BigRational,
    },
    /// `dseq:<path>`
    DigitFile(PathBuf),
}

/// Exact value of `p/q` or a decimal literal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    parse_decimal(s)
}

/// Exact value of a decimal literal such as `1.5`, `-0.25` or `3`.
pub(crate) fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(n, d);
    Some(if neg { -v } else { v })
}

impl FromStr for BetaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: &str| Error::InvalidBetaSpec(format!("{s:?}: {m}"));
        if let Some(lit) = s.strip_prefix("dec:") {
            if lit.starts_with('-') || lit.starts_with('+') || parse_decimal(lit).is_none() {
                return Err(bad("malformed decimal literal"));
            }
            return Ok(BetaSpec::Decimal(lit.to_string()));
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let (cs, iv) = rest
                .split_once('@')
                .ok_or_else(|| bad("missing '@[lo,hi]' isolating interval"))?;
            let coeffs = cs
                .split(',')
                .map(|c| c.trim().parse::<BigInt>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("coefficients must be integers"))?;
            let iv = iv
                .trim()
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| bad("interval must be written [lo,hi]"))?;
            let (lo, hi) = iv
                .split_once(',')
                .ok_or_else(|| bad("interval must have two endpoints"))?;
            let lo = parse_rational(lo).ok_or_else(|| bad("bad interval endpoint"))?;
            let hi = parse_rational(hi).ok_or_else(|| bad("bad interval endpoint"))?;
            if lo > hi {
                return Err(bad("interval endpoints out of order"));
            }
            return Ok(BetaSpec::Polynomial { coeffs, lo, hi });
        }
        if let Some(p) = s.strip_prefix("dseq:") {
            if p.is_empty() {
                return Err(bad("empty path"));
            }
            return Ok(BetaSpec::DigitFile(PathBuf::from(p)));
        }
        Err(bad("expected dec:, poly: or dseq:"))
    }
}

impl fmt::Display for BetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaSpec::Decimal(l) => write!(f, "dec:{l}"),
            BetaSpec::Polynomial { coeffs, lo, hi } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                let r = |x: &BigRational| format!("{}/{}", x.numer(), x.denom());
                write!(f, "poly:{}@[{},{}]", cs.join(","), r(lo), r(hi))
            }
            BetaSpec::DigitFile(p) => write!(f, "dseq:{}", p.display()),
        }
    }
}

pub(crate) struct Algebraic {
    /// Squarefree, monic, with `β` its only root in `[lo, hi]`.
    pub modulus: Poly,
    pub lo: BigRational,
    pub hi: BigRational,
    lo_sign: Ordering,
    /// `β^{-1}` reduced modulo `modulus`.
    pub inv: Poly,
    pub rational: Option<BigRational>,
}

pub(crate) struct Series {
    pub source: DigitSource,
    pub lo: BigRational,
    pub hi: BigRational,
    max_digit: u32,
}

pub(crate) enum Kind {
    Algebraic(Algebraic),
    Series(Series),
}

#[derive(Default)]
struct Bisection {
    step: usize,
    index: BigInt,
    exact: Option<(usize, BigRational)>,
}

/// Cached prefix of the expansion of 1 together with the orbit state
/// `T^j(1)` needed to extend it.
#[derive(Default)]
pub(crate) struct OrbitCache {
    pub digits: Vec<u32>,
    pub state: Option<Elem>,
    /// `(preperiod, period)` once the orbit of 1 is seen to repeat.
    pub cycle: Option<(usize, usize)>,
    pub seen: std::collections::HashMap<Elem, usize>,
}

struct Core {
    label: String,
    kind: Kind,
    alphabet: u32,
    options: BetaOptions,
    /// The expansion of 1 this base was built from, if any.
    defining: Option<DigitSource>,
    bisection: RwLock<Bisection>,
    orbit: RwLock<OrbitCache>,
}

/// A certified base `β > 1`. Cheap to clone; all clones share caches.
#[derive(Clone)]
pub struct Beta(Arc<Core>);

impl fmt::Debug for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Beta({})", self.0.label)
    }
}

impl PartialEq for Beta {
    fn eq(&self, o: &Beta) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
    }
}

/// Enclosure of `Σ_{i≥1} d_i x^{-i}` for `x > 1`, accurate to about `2^-prec`.
pub(crate) fn series_sum(source: &DigitSource, max_digit: u32, x: &BigRational, prec: u32) -> Dyadic {
    let guard = prec + 16;
    let xd = Dyadic::from_ratio(x, guard);
    let inv = xd.recip().expect("series base must exceed 1");
    let xf = x.to_f64().unwrap_or(2.0);
    let lx = xf.log2().max(1e-9);
    let slack = ((max_digit.max(1) as f64) / (xf - 1.0).max(1e-300)).log2().max(0.0);
    let terms = ((prec as f64 + slack + 4.0) / lx).ceil() as usize + 1;

    let mut sum = Dyadic::from_i64(0, guard);
    let mut pw = Dyadic::from_i64(1, guard);
    let mut last = 0usize;
    for i in 1..=terms {
        let d = source.digit(i).unwrap_or(0);
        if d != 0 {
            pw = pw.mul(&inv.pow((i - last) as u64));
            last = i;
            sum = sum.add(&pw.mul_int(&BigInt::from(d)));
        }
    }
    // tail ≤ max_digit · x^{-terms} / (x - 1)
    let x_minus_1 = xd.add_int(&BigInt::from(-1));
    let tail_hi = inv
        .pow(terms as u64)
        .mul_int(&BigInt::from(max_digit))
        .mul(&x_minus_1.recip().expect("x > 1"));
    let zero = Dyadic::from_i64(0, guard);
    sum.add(&zero.hull(&tail_hi))
}

impl Beta {
    /// Builds a base from its textual spec (`dec:`, `poly:` or `dseq:`).
    pub fn parse(spec: &str) -> Result<Beta> {
        Self::parse_with(spec, &BetaOptions::default())
    }

    pub fn parse_with(spec: &str, opts: &BetaOptions) -> Result<Beta> {
        let parsed: BetaSpec = spec.parse()?;
        Self::from_spec(&parsed, opts)
    }

    pub fn from_spec(spec: &BetaSpec, opts: &BetaOptions) -> Result<Beta> {
        let label = spec.to_string();
        match spec {
            BetaSpec::Decimal(lit) => {
                let v =
                    parse_decimal(lit).ok_or_else(|| Error::InvalidBetaSpec(format!("{label}: malformed literal")))?;
                Self::rational_labeled(v, label, opts)
            }
            BetaSpec::Polynomial { coeffs, lo, hi } => {
                Self::algebraic_labeled(&Poly::from_bigints(coeffs), lo, hi, label, opts)
            }
            BetaSpec::DigitFile(path) => {
                let source = DigitSource::load(path)?;
                crate::expansion::beta_from_source(source, label, opts)
            }
        }
    }

    pub fn rational(v: BigRational) -> Result<Beta> {
        let label = format!("rational:{v}");
        Self::rational_labeled(v, label, &BetaOptions::default())
    }

    pub fn integer(n: i64) -> Result<Beta> {
        Self::rational_labeled(
            BigRational::from_integer(n.into()),
            format!("dec:{n}"),
            &BetaOptions::default(),
        )
    }

    pub(crate) fn rational_labeled(v: BigRational, label: String, opts: &BetaOptions) -> Result<Beta> {
        if v <= BigRational::one() {
            return Err(Error::InvalidBetaSpec(format!("{label}: β = {v} is not > 1")));
        }
        let alphabet = v
            .ceil()
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::InvalidBetaSpec(format!("{label}: alphabet too large")))?;
        let alg = Algebraic {
            modulus: Poly::linear_root(&v),
            lo: v.clone(),
            hi: v.clone(),
            lo_sign: Ordering::Equal,
            inv: Poly::constant(v.recip()),
            rational: Some(v),
        };
        Ok(Self::assemble(label, Kind::Algebraic(alg), alphabet, opts))
    }

    /// Real root of `poly` isolated in `[lo, hi]`.
    pub fn algebraic(poly: &Poly, lo: &BigRational, hi: &BigRational) -> Result<Beta> {
        let cs = poly.primitive_integer();
        let label = BetaSpec::Polynomial {
            coeffs: cs,
            lo: lo.clone(),
            hi: hi.clone(),
        }
        .to_string();
        Self::algebraic_labeled(poly, lo, hi, label, &BetaOptions::default())
    }

    pub(crate) fn algebraic_labeled(
        poly: &Poly,
        lo: &BigRational,
        hi: &BigRational,
        label: String,
        opts: &BetaOptions,
    ) -> Result<Beta> {
        let bad = |m: String| Error::InvalidBetaSpec(format!("{label}: {m}"));
        if poly.degree().unwrap_or(0) == 0 {
            return Err(bad("polynomial must have degree at least 1".into()));
        }
        if lo > hi {
            return Err(bad("interval endpoints out of order".into()));
        }
        let mut p = poly.squarefree();
        // β > 1, so a factor x never carries the root we want.
        while p.coeffs().first().is_some_and(|c| c.is_zero()) && p.degree().unwrap_or(0) > 0 {
            p = Poly::new(p.coeffs()[1..].to_vec());
        }
        let at_lo = p.eval(lo).is_zero();
        let roots = p.count_roots(lo, hi) + usize::from(at_lo);
        if roots == 0 {
            return Err(bad(format!("no root in [{lo}, {hi}] (no sign change)")));
        }
        if roots > 1 {
            return Err(bad(format!("{roots} roots in [{lo}, {hi}]; interval does not isolate")));
        }
        if at_lo {
            return Self::rational_labeled(lo.clone(), label, opts);
        }
        if p.eval(hi).is_zero() {
            return Self::rational_labeled(hi.clone(), label, opts);
        }
        if p.degree() == Some(1) {
            let c = p.coeffs();
            return Self::rational_labeled(-&c[0] / &c[1], label, opts);
        }
        let one = BigRational::one();
        let mut lo = lo.clone();
        if *hi <= one {
            return Err(bad("root is not > 1".into()));
        }
        if lo < one {
            if p.eval(&one).is_zero() || p.count_roots(&lo, &one) > 0 {
                return Err(bad("root is not > 1".into()));
            }
            lo = one.clone();
        }
        // An integer root would make every ceiling decision undecidable by
        // bisection alone; detect it exactly.
        if let Some(r) = integer_root_in(&p, &lo, hi) {
            return Self::rational_labeled(r, label, opts);
        }
        let lo_sign = p.eval(&lo).cmp(&BigRational::zero());
        let modulus = p.monic();
        let inv = Poly::new(vec![BigRational::zero(), one])
            .inverse_mod(&modulus)
            .ok_or_else(|| bad("β is not invertible modulo its polynomial".into()))?;
        let alg = Algebraic {
            modulus,
            lo,
            hi: hi.clone(),
            lo_sign,
            inv,
            rational: None,
        };
        let beta = Self::assemble(label, Kind::Algebraic(alg), 0, opts);
        let alphabet = beta.ceil_of_self()?;
        Ok(beta.with_alphabet(alphabet))
    }

    /// Series base from an infinite, non-eventually-periodic digit source that
    /// has already been validated.
    pub(crate) fn series_labeled(source: DigitSource, label: String, opts: &BetaOptions) -> Result<Beta> {
        let d1 = source
            .digit(1)
            .ok_or_else(|| Error::InvalidBetaSpec(format!("{label}: empty sequence")))?;
        let s = Series {
            lo: BigRational::from_integer(d1.into()),
            hi: BigRational::from_integer((d1 + 1).into()),
            max_digit: source.max_digit(),
            source,
        };
        Ok(Self::assemble(label, Kind::Series(s), d1 + 1, opts))
    }

    fn assemble(label: String, kind: Kind, alphabet: u32, opts: &BetaOptions) -> Beta {
        Beta(Arc::new(Core {
            label,
            kind,
            alphabet,
            options: opts.clone(),
            defining: None,
            bisection: RwLock::new(Bisection::default()),
            orbit: RwLock::new(OrbitCache::default()),
        }))
    }

    fn with_alphabet(self, alphabet: u32) -> Beta {
        let core = Arc::try_unwrap(self.0).unwrap_or_else(|_| unreachable!("fresh base"));
        Beta(Arc::new(Core { alphabet, ..core }))
    }

    fn ceil_of_self(&self) -> Result<u32> {
        for k in 0..=self.0.options.refine_budget {
            let (lo, hi) = self.bracket(k)?;
            if lo == hi {
                return lo
                    .ceil()
                    .to_integer()
                    .to_u32()
                    .ok_or_else(|| Error::InvalidBetaSpec("alphabet too large".into()));
            }
            let c: BigInt = lo.floor().to_integer() + 1;
            if hi <= BigRational::from_integer(c.clone()) {
                return c
                    .to_u32()
                    .ok_or_else(|| Error::InvalidBetaSpec("alphabet too large".into()));
            }
        }
        Err(Error::BudgetExceeded {
            what: "ceiling of β".into(),
            budget: self.0.options.refine_budget,
        })
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    /// `⌈β⌉`, the number of digits.
    pub fn alphabet_size(&self) -> u32 {
        self.0.alphabet
    }

    pub fn options(&self) -> &BetaOptions {
        &self.0.options
    }

    /// True when arithmetic in `Q(β)` is exact (rational or algebraic base).
    pub fn is_exact(&self) -> bool {
        matches!(self.0.kind, Kind::Algebraic(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0.kind {
            Kind::Algebraic(a) => a.rational.as_ref(),
            Kind::Series(_) => None,
        }
    }

    /// Minimal polynomial candidate (squarefree, monic) for exact bases.
    pub fn modulus(&self) -> Option<&Poly> {
        match &self.0.kind {
            Kind::Algebraic(a) => Some(&a.modulus),
            Kind::Series(_) => None,
        }
    }

    /// The digit sequence prescribed as the expansion of 1, for bases built
    /// from one.
    pub fn defining_sequence(&self) -> Option<&DigitSource> {
        match &self.0.kind {
            Kind::Series(s) => Some(&s.source),
            Kind::Algebraic(_) => self.0.defining.as_ref(),
        }
    }

    pub(crate) fn with_defining(self, source: DigitSource) -> Beta {
        match Arc::try_unwrap(self.0) {
            Ok(core) => Beta(Arc::new(Core {
                defining: Some(source),
                ..core
            })),
            Err(shared) => Beta(shared),
        }
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub(crate) fn orbit(&self) -> &RwLock<OrbitCache> {
        &self.0.orbit
    }

    fn base_interval(&self) -> (&BigRational, &BigRational) {
        match &self.0.kind {
            Kind::Algebraic(a) => (&a.lo, &a.hi),
            Kind::Series(s) => (&s.lo, &s.hi),
        }
    }

    /// Bisection interval after `k` steps. Fails with `BudgetExceeded` past
    /// the refinement budget.
    pub(crate) fn bracket(&self, k: usize) -> Result<(BigRational, BigRational)> {
        if let Some(r) = self.as_rational() {
            return Ok((r.clone(), r.clone()));
        }
        if k > self.0.options.refine_budget {
            return Err(Error::BudgetExceeded {
                what: "bisection refinement of β".into(),
                budget: self.0.options.refine_budget,
            });
        }
        {
            let b = self.0.bisection.read().unwrap();
            if let Some(v) = self.exact_at(&b, k) {
                return Ok((v.clone(), v));
            }
            if b.step >= k {
                return Ok(self.grid_interval(k, &(&b.index >> (b.step - k))));
            }
        }
        let mut b = self.0.bisection.write().unwrap();
        while b.step < k && b.exact.is_none() {
            let (lo, hi) = self.grid_interval(b.step, &b.index);
            let mid = (&lo + &hi) / BigRational::from_integer(2.into());
            match self.side_of_root(&mid)? {
                Ordering::Equal => b.exact = Some((b.step + 1, mid)),
                Ordering::Greater => {
                    b.index = (&b.index << 1usize) + 1;
                    b.step += 1;
                }
                Ordering::Less => {
                    b.index <<= 1usize;
                    b.step += 1;
                }
            }
        }
        if let Some(v) = self.exact_at(&b, k) {
            return Ok((v.clone(), v));
        }
        Ok(self.grid_interval(k, &(&b.index >> (b.step - k))))
    }

    fn exact_at(&self, b: &Bisection, k: usize) -> Option<BigRational> {
        match &b.exact {
            Some((s, v)) if *s <= k => Some(v.clone()),
            _ => None,
        }
    }

    fn grid_interval(&self, k: usize, index: &BigInt) -> (BigRational, BigRational) {
        let (lo, hi) = self.base_interval();
        let w = hi - lo;
        let den = BigRational::from_integer(BigInt::one() << k);
        let step = &w / &den;
        let l = lo + &step * BigRational::from_integer(index.clone());
        let h = &l + &step;
        (l, h)
    }

    /// Where `β` lies relative to `x`: `Greater` if `β > x`.
    fn side_of_root(&self, x: &BigRational) -> Result<Ordering> {
        match &self.0.kind {
            Kind::Algebraic(a) => {
                let v = a.modulus.eval(x);
                if v.is_zero() {
                    Ok(Ordering::Equal)
                } else if v.cmp(&BigRational::zero()) == a.lo_sign {
                    Ok(Ordering::Greater)
                } else {
                    Ok(Ordering::Less)
                }
            }
            Kind::Series(s) => {
                // Σ d_i x^{-i} is decreasing in x and equals 1 at β.
                let one = BigRational::one();
                let mut prec = 64u32 + 2 * x.denom().bits() as u32;
                for _ in 0..6 {
                    let v = series_sum(&s.source, s.max_digit, x, prec);
                    if v.lo() > one {
                        return Ok(Ordering::Greater);
                    }
                    if v.hi() < one {
                        return Ok(Ordering::Less);
                    }
                    prec *= 2;
                }
                Err(Error::PrecisionExhausted {
                    context: format!("side of the series root at {x}"),
                    ambiguous: x.to_string(),
                })
            }
        }
    }

    /// Enclosure of `β` of width at most `eps`.
    pub fn refine(&self, eps: &BigRational) -> Result<RealEnclosure> {
        if !eps.is_positive() {
            return Err(Error::DomainError("eps must be positive".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(RealEnclosure::point(r.clone()));
        }
        let (lo, hi) = self.base_interval();
        let w = hi - lo;
        let mut k = 0usize;
        let mut cur = w.clone();
        while &cur > eps {
            k += 1;
            cur /= BigRational::from_integer(2.into());
        }
        let (lo, hi) = self.bracket(k)?;
        Ok(RealEnclosure { lo, hi })
    }

    pub fn alphabet(&self) -> std::ops::Range<u32> {
        0..self.alphabet_size()
    }

    /// Upper bound on `log2 β`, for sizing working precision.
    pub(crate) fn log2_upper(&self) -> f64 {
        let (_, hi) = self.base_interval();
        hi.to_f64().unwrap_or(f64::MAX).log2().max(0.0) + 1e-9
    }
}

/// Integer root of `p` in `[lo, hi]`, found after narrowing by bisection.
fn integer_root_in(p: &Poly, lo: &BigRational, hi: &BigRational) -> Option<BigRational> {
    let two = BigRational::from_integer(2.into());
    let (mut l, mut h) = (lo.clone(), hi.clone());
    let sl = p.eval(&l).cmp(&BigRational::zero());
    while &h - &l >= BigRational::one() {
        let m = (&l + &h) / &two;
        let v = p.eval(&m);
        if v.is_zero() {
            return m.is_integer().then_some(m);
        }
        if v.cmp(&BigRational::zero()) == sl {
            l = m;
        } else {
            h = m;
        }
    }
    let mut c = l.ceil();
    while c <= h {
        if p.eval(&c).is_zero() {
            return Some(c);
        }
        c += BigRational::one();
    }
    None
}
