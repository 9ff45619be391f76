//! Values in `Q(β)` with certified sign, ceiling and comparison.
//!
//! A [`Real`] is a Laurent polynomial in `β` with rational coefficients. For
//! exact bases it is kept reduced modulo the polynomial of `β`, so equality
//! is decidable. For series bases it is kept symbolic and evaluated with
//! interval arithmetic at whatever precision a decision needs; equality is
//! only certified for identically zero expressions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::beta::{Beta, Kind, RealEnclosure};
use crate::error::{Error, Result};
use crate::numeric::{Dyadic, Poly};

/// `Σ_j c[j] · β^(low + j)`, with no leading or trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Elem {
    pub low: i64,
    pub c: Vec<BigRational>,
}

impl Elem {
    fn normalized(mut low: i64, mut c: Vec<BigRational>) -> Elem {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        let lead = c.iter().take_while(|x| x.is_zero()).count();
        if lead == c.len() {
            return Elem::default();
        }
        c.drain(..lead);
        low += lead as i64;
        Elem { low, c }
    }

    pub(crate) fn normalize(self) -> Elem {
        Elem::normalized(self.low, self.c)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn high(&self) -> i64 {
        self.low + self.c.len() as i64 - 1
    }

    fn add(&self, o: &Elem) -> Elem {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![BigRational::zero(); (high - low + 1) as usize];
        for (j, v) in self.c.iter().enumerate() {
            c[(self.low - low) as usize + j] += v;
        }
        for (j, v) in o.c.iter().enumerate() {
            c[(o.low - low) as usize + j] += v;
        }
        Elem::normalized(low, c)
    }

    fn scale(&self, k: &BigRational) -> Elem {
        Elem::normalized(self.low, self.c.iter().map(|x| x * k).collect())
    }

    fn mul(&self, o: &Elem) -> Elem {
        if self.is_zero() || o.is_zero() {
            return Elem::default();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Elem::normalized(self.low + o.low, c)
    }

    fn to_poly(&self) -> Poly {
        debug_assert!(self.is_zero() || self.low >= 0);
        let mut c = vec![BigRational::zero(); self.low.max(0) as usize];
        c.extend(self.c.iter().cloned());
        Poly::new(c)
    }

    fn from_poly(p: Poly) -> Elem {
        Elem::normalized(0, p.into_coeffs())
    }

    fn constant(v: BigRational) -> Elem {
        Elem::normalized(0, vec![v])
    }

    fn as_constant(&self) -> Option<&BigRational> {
        match (self.low, self.c.len()) {
            (_, 0) => None,
            (0, 1) => Some(&self.c[0]),
            _ => None,
        }
    }

    fn coeff_bits(&self) -> u64 {
        self.c
            .iter()
            .map(|x| x.numer().bits().max(x.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

/// A real number in the field generated by a base `β`.
#[derive(Clone)]
pub struct Real {
    beta: Beta,
    e: Elem,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({} ; low={} ; ", self.beta.label(), self.e.low)?;
        let cs: Vec<String> = self.e.c.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}])", cs.join(", "))
    }
}

fn pow_mod(base: &Poly, mut e: u64, m: &Poly) -> Poly {
    let mut acc = Poly::constant(BigRational::one());
    let mut b = base.rem(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).rem(m);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b).rem(m);
        }
    }
    acc
}

/// Rounds of bisection depth tried by every certified decision.
fn rounds(budget: usize) -> impl Iterator<Item = usize> {
    let mut k = 48usize;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        if k >= budget {
            done = true;
            return Some(budget);
        }
        let here = k;
        k *= 2;
        Some(here)
    })
}

impl Real {
    pub(crate) fn from_elem(beta: &Beta, e: Elem) -> Real {
        let e = match beta.kind() {
            Kind::Algebraic(a) => {
                if e.low < 0 || e.high() >= a.modulus.degree().unwrap() as i64 {
                    Self::reduce_algebraic(beta, &e)
                } else {
                    e
                }
            }
            Kind::Series(_) => e,
        };
        Real { beta: beta.clone(), e }
    }

    fn reduce_algebraic(beta: &Beta, e: &Elem) -> Elem {
        let Kind::Algebraic(a) = beta.kind() else {
            unreachable!()
        };
        if e.is_zero() {
            return Elem::default();
        }
        let body = Poly::new(e.c.clone()).rem(&a.modulus);
        let factor = if e.low >= 0 {
            pow_mod(
                &Poly::new(vec![BigRational::zero(), BigRational::one()]),
                e.low as u64,
                &a.modulus,
            )
        } else {
            pow_mod(&a.inv, e.low.unsigned_abs(), &a.modulus)
        };
        Elem::from_poly(body.mul(&factor).rem(&a.modulus))
    }

    pub(crate) fn elem(&self) -> &Elem {
        &self.e
    }

    pub fn base(&self) -> &Beta {
        &self.beta
    }

    pub fn zero(beta: &Beta) -> Real {
        Real {
            beta: beta.clone(),
            e: Elem::default(),
        }
    }

    pub fn one(beta: &Beta) -> Real {
        Self::from_ratio(beta, BigRational::one())
    }

    pub fn from_ratio(beta: &Beta, v: BigRational) -> Real {
        Real {
            beta: beta.clone(),
            e: Elem::constant(v),
        }
    }

    pub fn from_int(beta: &Beta, v: i64) -> Real {
        Self::from_ratio(beta, BigRational::from_integer(v.into()))
    }

    /// `β^k`.
    pub fn beta_pow(beta: &Beta, k: i64) -> Real {
        Self::from_elem(
            beta,
            Elem {
                low: k,
                c: vec![BigRational::one()],
            },
        )
    }

    /// `β` itself as a value.
    pub fn beta(beta: &Beta) -> Real {
        Self::beta_pow(beta, 1)
    }

    fn same_base(&self, o: &Real) {
        assert!(
            self.beta == o.beta,
            "values over different bases: {} vs {}",
            self.beta.label(),
            o.beta.label()
        );
    }

    /// Multiplication by `β^k`.
    pub fn shift(&self, k: i64) -> Real {
        if k == 0 || self.e.is_zero() {
            return self.clone();
        }
        match self.beta.kind() {
            Kind::Series(_) => Real {
                beta: self.beta.clone(),
                e: Elem {
                    low: self.e.low + k,
                    c: self.e.c.clone(),
                },
            },
            Kind::Algebraic(a) => {
                if let Some(r) = &a.rational {
                    let f = if k >= 0 {
                        num_traits::pow(r.clone(), k as usize)
                    } else {
                        num_traits::pow(r.recip(), k.unsigned_abs() as usize)
                    };
                    return Real {
                        beta: self.beta.clone(),
                        e: self.e.scale(&f),
                    };
                }
                let p = self.e.to_poly();
                let shifted = if k == 1 {
                    p.shift(1).rem(&a.modulus)
                } else if k > 0 {
                    let f = pow_mod(
                        &Poly::new(vec![BigRational::zero(), BigRational::one()]),
                        k as u64,
                        &a.modulus,
                    );
                    p.mul(&f).rem(&a.modulus)
                } else {
                    p.mul(&pow_mod(&a.inv, k.unsigned_abs(), &a.modulus)).rem(&a.modulus)
                };
                Real {
                    beta: self.beta.clone(),
                    e: Elem::from_poly(shifted),
                }
            }
        }
    }

    pub fn add_int(&self, k: i64) -> Real {
        self + &Real::from_int(&self.beta, k)
    }

    pub fn mul_ratio(&self, k: &BigRational) -> Real {
        Real {
            beta: self.beta.clone(),
            e: self.e.scale(k),
        }
    }

    pub fn mul_int(&self, k: i64) -> Real {
        self.mul_ratio(&BigRational::from_integer(k.into()))
    }

    /// True when the expression is the zero expression (no evaluation).
    pub fn is_identically_zero(&self) -> bool {
        self.e.is_zero()
    }

    /// The value as a rational, when the representation is a constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.e.is_zero() {
            return Some(BigRational::zero());
        }
        self.e.as_constant().cloned()
    }

    fn working_precision(&self, k: usize) -> u32 {
        let span = (self.e.high().max(0) - self.e.low.min(0)).max(0) as f64;
        let growth = (span * self.beta.log2_upper()).ceil() as u64;
        (k as u64 + 64 + growth + self.e.coeff_bits() + 2 * (self.e.c.len() as u64).max(1).ilog2() as u64)
            .min(u32::MAX as u64 / 4) as u32
    }

    /// Interval evaluation with `β` taken from bisection step `k`.
    pub(crate) fn enclose_at(&self, k: usize, prec: u32) -> Result<Dyadic> {
        if self.e.is_zero() {
            return Ok(Dyadic::from_i64(0, prec));
        }
        if let Some(v) = self.e.as_constant() {
            return Ok(Dyadic::from_ratio(v, prec));
        }
        let (lo, hi) = self.beta.bracket(k)?;
        let b = Dyadic::from_bounds(&lo, &hi, prec);
        let e = &self.e;
        // Non-negative exponents: Horner in β, then times β^low if low > 0.
        let split = if e.low < 0 {
            ((-e.low) as usize).min(e.c.len())
        } else {
            0
        };
        let mut pos = Dyadic::from_i64(0, prec);
        for v in e.c[split..].iter().rev() {
            pos = pos.mul(&b).add(&Dyadic::from_ratio(v, prec));
        }
        if e.low > 0 {
            pos = pos.mul(&b.pow(e.low as u64));
        }
        if split == 0 {
            return Ok(pos);
        }
        // Negative exponents -1 .. low: Horner in 1/β.
        let inv = b.recip().expect("β > 1");
        let mut neg = Dyadic::from_i64(0, prec);
        for v in e.c[..split].iter() {
            neg = neg.add(&Dyadic::from_ratio(v, prec)).mul(&inv);
        }
        // neg now holds Σ_{j<split} c_j β^{-(split - j)}; align to `low`.
        let offset = -e.low - split as i64;
        if offset > 0 {
            neg = neg.mul(&inv.pow(offset as u64));
        }
        // When all exponents are negative and `split` is the full length,
        // the positive part is zero; otherwise the positive coefficients
        // begin at exponent 0 exactly.
        Ok(pos.add(&neg))
    }

    /// Exact zero test for algebraic bases: `q(β) = 0` iff `β` is a root of
    /// `gcd(q, modulus)`.
    fn algebraic_is_zero(&self) -> Option<bool> {
        let Kind::Algebraic(a) = self.beta.kind() else {
            return None;
        };
        if self.e.is_zero() {
            return Some(true);
        }
        let q = self.e.to_poly();
        let g = Poly::gcd(&q, &a.modulus);
        if g.degree().unwrap_or(0) == 0 {
            return Some(false);
        }
        Some(g.eval(&a.lo).is_zero() || g.count_roots(&a.lo, &a.hi) > 0)
    }

    /// Certified sign. `Equal` is only returned when exactness is proven.
    pub fn sign(&self) -> Result<Ordering> {
        if self.e.is_zero() {
            return Ok(Ordering::Equal);
        }
        if self.e.c.len() == 1 {
            return Ok(self.e.c[0].cmp(&BigRational::zero()));
        }
        let budget = self.beta.options().refine_budget;
        for (round, k) in rounds(budget).enumerate() {
            let enc = self.enclose_at(k, self.working_precision(k))?;
            if let Some(s) = enc.sign() {
                return Ok(s);
            }
            if round == 0 && self.algebraic_is_zero() == Some(true) {
                return Ok(Ordering::Equal);
            }
        }
        Err(Error::PrecisionExhausted {
            context: "sign of a value".into(),
            ambiguous: "0".into(),
        })
    }

    /// Certified comparison of two values over the same base.
    pub fn cmp_real(&self, o: &Real) -> Result<Ordering> {
        self.same_base(o);
        (self - o).sign()
    }

    /// Certified `⌈v⌉`: the integer `c` with `c - 1 < v ≤ c`.
    pub fn ceil(&self) -> Result<BigInt> {
        if let Some(r) = self.as_rational() {
            return Ok(r.ceil().to_integer());
        }
        let budget = self.beta.options().refine_budget;
        let mut candidate = BigInt::zero();
        for k in rounds(budget) {
            let enc = self.enclose_at(k, self.working_precision(k))?;
            if let Some(c) = enc.ceil() {
                return Ok(c);
            }
            candidate = enc.ceil_hi();
            if enc.width() < BigRational::one() {
                // The enclosure straddles an integer n; settle v == n exactly
                // when the arithmetic allows it.
                let n = enc.lo().ceil().to_integer();
                let diff = self - &Real::from_ratio(&self.beta, BigRational::from_integer(n.clone()));
                if diff.algebraic_is_zero() == Some(true) {
                    return Ok(n);
                }
                candidate = n;
            }
        }
        Err(Error::PrecisionExhausted {
            context: "ceiling of a value".into(),
            ambiguous: candidate.to_string(),
        })
    }

    pub fn floor_is_exactly(&self, n: i64) -> Result<bool> {
        Ok(self.cmp_real(&Real::from_int(&self.beta, n))? == Ordering::Equal)
    }

    /// Enclosure of width at most `eps`. Enclosures for smaller `eps` are
    /// contained in those for larger `eps`.
    pub fn refine(&self, eps: &BigRational) -> Result<RealEnclosure> {
        if !eps.is_positive() {
            return Err(Error::DomainError("eps must be positive".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(RealEnclosure::point(r));
        }
        let eps_bits = (eps.denom().bits() as i64 - eps.numer().bits() as i64 + 8).max(0) as u32;
        let budget = self.beta.options().refine_budget;
        let mut acc: Option<RealEnclosure> = None;
        for k in rounds(budget) {
            let prec = self.working_precision(k).max(eps_bits + 64);
            let enc = self.enclose_at(k, prec)?;
            let cur = RealEnclosure {
                lo: enc.lo(),
                hi: enc.hi(),
            };
            let next = match acc {
                None => cur,
                Some(prev) => RealEnclosure {
                    lo: prev.lo.max(cur.lo),
                    hi: prev.hi.min(cur.hi),
                },
            };
            if &next.width() <= eps {
                return Ok(next);
            }
            acc = Some(next);
        }
        Err(Error::BudgetExceeded {
            what: format!("refinement to width {eps}"),
            budget,
        })
    }

    /// Cheap `f64` approximation for display only.
    pub fn approx(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return r.to_f64().unwrap_or(f64::NAN);
        }
        match self.enclose_at(64, self.working_precision(64)) {
            Ok(d) => {
                let m = (d.lo() + d.hi()) / BigRational::from_integer(2.into());
                m.to_f64().unwrap_or(f64::NAN)
            }
            Err(_) => f64::NAN,
        }
    }

    /// Enclosure with relative accuracy of about `bits` bits, used for
    /// logarithms and display.
    pub fn relative_enclosure(&self, bits: u32) -> Result<RealEnclosure> {
        if let Some(r) = self.as_rational() {
            return Ok(RealEnclosure::point(r));
        }
        let budget = self.beta.options().refine_budget;
        let mut acc: Option<RealEnclosure> = None;
        for k in rounds(budget) {
            let enc = self.enclose_at(k, self.working_precision(k) + bits)?;
            let cur = RealEnclosure {
                lo: enc.lo(),
                hi: enc.hi(),
            };
            let next = match acc {
                None => cur,
                Some(prev) => RealEnclosure {
                    lo: prev.lo.max(cur.lo),
                    hi: prev.hi.min(cur.hi),
                },
            };
            if !next.lo.is_zero() && next.lo.signum() == next.hi.signum() {
                let rel = next.width() / next.lo.abs();
                let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
                if rel <= target {
                    return Ok(next);
                }
            }
            acc = Some(next);
        }
        Err(Error::PrecisionExhausted {
            context: "relative enclosure".into(),
            ambiguous: "0".into(),
        })
    }

    pub fn to_f64_bounds(&self) -> Result<(f64, f64)> {
        let e = self.relative_enclosure(60)?;
        Ok((e.lo_f64(), e.hi_f64()))
    }

    pub fn approx_u64(&self) -> Option<u64> {
        self.as_rational().and_then(|r| r.to_integer().to_u64())
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, o: &Real) -> Real {
        self.same_base(o);
        Real {
            beta: self.beta.clone(),
            e: self.e.add(&o.e),
        }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, o: &Real) -> Real {
        self.same_base(o);
        Real {
            beta: self.beta.clone(),
            e: self.e.add(&o.e.scale(&-BigRational::one())),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.mul_int(-1)
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, o: &Real) -> Real {
        self.same_base(o);
        Real::from_elem(&self.beta, self.e.mul(&o.e))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                (&self).$m(&o)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                (&self).$m(o)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                self.$m(&o)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// Certified ceiling of a value (see [`Real::ceil`]).
pub fn certified_ceil(v: &Real) -> Result<BigInt> {
    v.ceil()
}

/// Certified ordering of two values (see [`Real::cmp_real`]).
pub fn certified_compare(a: &Real, b: &Real) -> Result<Ordering> {
    a.cmp_real(b)
}

/// Enclosure of `v` with width at most `eps`.
pub fn refine(v: &Real, eps: &BigRational) -> Result<RealEnclosure> {
    v.refine(eps)
}
