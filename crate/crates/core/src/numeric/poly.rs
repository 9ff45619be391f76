//! Dense univariate polynomials with rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::Dyadic;

/// Coefficients are stored lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    c: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(v: BigRational) -> Self {
        Self::new(vec![v])
    }

    /// `x - r`
    pub fn linear_root(r: &BigRational) -> Self {
        Self::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.c.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        Poly::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRational::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = &r[i] / &lead;
            for (j, dc) in d.c.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] -= &f * dc;
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Inverse of `self` modulo `m`, when they are coprime.
    pub fn inverse_mod(&self, m: &Poly) -> Option<Poly> {
        // Extended Euclid tracking only the coefficient of `self`.
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Poly::zero(), Poly::constant(BigRational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let k = r0.c[0].recip();
        Some(s0.scale(&k).rem(m))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `p / gcd(p, p')`, made monic.
    pub fn squarefree(&self) -> Poly {
        let g = Poly::gcd(self, &self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn eval_dyadic(&self, x: &Dyadic) -> Dyadic {
        let prec = x.precision();
        let mut acc = Dyadic::from_i64(0, prec);
        for a in self.c.iter().rev() {
            acc = acc.mul(x).add(&Dyadic::from_ratio(a, prec));
        }
        acc
    }

    fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(Poly::new(r.c.into_iter().map(|v| -v).collect()));
        }
        chain
    }

    fn variations(chain: &[Poly], x: &BigRational) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in chain {
            let val = p.eval(x);
            let s = if val.is_positive() {
                1
            } else if val.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        if self.degree().unwrap_or(0) == 0 || a >= b {
            return 0;
        }
        let chain = self.squarefree().sturm_chain();
        Self::variations(&chain, a).saturating_sub(Self::variations(&chain, b))
    }

    /// Clears denominators and content, keeping the sign of the leading
    /// coefficient positive.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        use num_integer::Integer;
        if self.is_zero() {
            return Vec::new();
        }
        let l = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut ints: Vec<BigInt> = self.c.iter().map(|x| (x * &l).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() {
            for x in ints.iter_mut() {
                *x /= &g;
            }
        }
        if ints.last().is_some_and(|x| x.is_negative()) {
            for x in ints.iter_mut() {
                *x = -x.clone();
            }
        }
        ints
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.c.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
