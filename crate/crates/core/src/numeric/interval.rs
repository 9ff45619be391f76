//! Dyadic intervals with outward rounding.
//!
//! An interval is stored as a pair of integer numerators over a shared
//! power-of-two denominator `2^prec`. Every operation rounds the lower end
//! down and the upper end up, so the true value is never lost.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    // num-bigint shifts round toward negative infinity.
    x >> s
}

fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    -((-x) >> s)
}

impl Dyadic {
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        let n = v << prec;
        Dyadic {
            lo: n.clone(),
            hi: n,
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(v), prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        Self::from_bounds(r, r, prec)
    }

    /// Encloses `[lo, hi]` (rational endpoints) at the given precision.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        let lo_n = (lo.numer() << prec).div_floor(lo.denom());
        let hi_n = {
            let (q, r) = (hi.numer() << prec).div_mod_floor(hi.denom());
            if r.is_zero() {
                q
            } else {
                q + 1
            }
        };
        Dyadic {
            lo: lo_n,
            hi: hi_n,
            prec,
        }
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.prec)
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.prec)
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << self.prec)
    }

    /// Certified sign: `None` when the interval touches zero without being
    /// the point zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        debug_assert_eq!(self.prec, o.prec);
        Dyadic {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        debug_assert_eq!(self.prec, o.prec);
        Dyadic {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn add_int(&self, k: &BigInt) -> Dyadic {
        let s = k << self.prec;
        Dyadic {
            lo: &self.lo + &s,
            hi: &self.hi + &s,
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Dyadic {
                lo: b,
                hi: a,
                prec: self.prec,
            }
        } else {
            Dyadic {
                lo: a,
                hi: b,
                prec: self.prec,
            }
        }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        debug_assert_eq!(self.prec, o.prec);
        let (lo, hi) = if !self.lo.is_negative() && !o.lo.is_negative() {
            (&self.lo * &o.lo, &self.hi * &o.hi)
        } else {
            let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
            let lo = c.iter().min().cloned().unwrap();
            let hi = c.iter().max().cloned().unwrap();
            (lo, hi)
        };
        Dyadic {
            lo: shr_floor(&lo, self.prec),
            hi: shr_ceil(&hi, self.prec),
            prec: self.prec,
        }
    }

    /// Reciprocal of an interval that excludes zero.
    pub fn recip(&self) -> Option<Dyadic> {
        if !(self.lo.is_positive() || self.hi.is_negative()) {
            return None;
        }
        let one = BigInt::one() << (2 * self.prec);
        let (a, b) = (&self.lo, &self.hi);
        // 1/[a,b] = [1/b, 1/a] for intervals of a single sign.
        let lo = one.div_floor(b);
        let hi = {
            let (q, r) = one.div_mod_floor(a);
            if r.is_zero() {
                q
            } else {
                q + 1
            }
        };
        Some(Dyadic {
            lo,
            hi,
            prec: self.prec,
        })
    }

    pub fn pow(&self, mut e: u64) -> Dyadic {
        let mut base = self.clone();
        let mut acc = Dyadic::from_i64(1, self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Hull of two intervals at the same precision.
    pub fn hull(&self, o: &Dyadic) -> Dyadic {
        Dyadic {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec,
        }
    }

    pub fn widen(&self, ulps: u32) -> Dyadic {
        Dyadic {
            lo: &self.lo - ulps,
            hi: &self.hi + ulps,
            prec: self.prec,
        }
    }

    /// Integer `c` with `c - 1 < v <= c` for every `v` in the interval, if
    /// the interval is narrow enough to pin it.
    pub fn ceil(&self) -> Option<BigInt> {
        let c_lo = shr_ceil(&self.lo, self.prec);
        let c_hi = shr_ceil(&self.hi, self.prec);
        if c_lo == c_hi {
            Some(c_hi)
        } else {
            None
        }
    }

    /// The smallest integer not below the upper end; used as the ambiguous
    /// candidate when `ceil` fails.
    pub fn ceil_hi(&self) -> BigInt {
        shr_ceil(&self.hi, self.prec)
    }
}
