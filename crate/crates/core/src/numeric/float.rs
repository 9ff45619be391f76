//! Outward-rounded conversions from exact rationals to `f64`.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

fn nearest(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// `f64` not above `r`.
pub fn down(r: &BigRational) -> f64 {
    let v = nearest(r);
    if v.is_finite() {
        v.next_down().next_down()
    } else {
        v
    }
}

/// `f64` not below `r`.
pub fn up(r: &BigRational) -> f64 {
    let v = nearest(r);
    if v.is_finite() {
        v.next_up().next_up()
    } else {
        v
    }
}

/// Natural log of a positive big integer, to about `f64` precision.
fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert_eq!(n.sign(), Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational, as an enclosing `(lo, hi)` pair.
pub fn ln_bounds(r: &BigRational) -> (f64, f64) {
    assert!(r.is_positive(), "logarithm of a non-positive value");
    if r.numer() == r.denom() {
        return (0.0, 0.0);
    }
    let v = ln_bigint(r.numer()) - ln_bigint(r.denom());
    let pad = 1e-13 * (v.abs() + 1.0);
    (v - pad, v + pad)
}

/// The rational as an `f64` when the conversion is exact.
pub fn exact_f64(r: &BigRational) -> Option<f64> {
    let v = r.to_f64()?;
    if !v.is_finite() {
        return None;
    }
    (BigRational::from_float(v)? == *r).then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_bracket_value() {
        let third = BigRational::new(1.into(), 3.into());
        assert!(down(&third) < 1.0 / 3.0 + 1e-17 && up(&third) > 1.0 / 3.0 - 1e-17);
        assert!(down(&third) <= up(&third));
        let (lo, hi) = ln_bounds(&BigRational::new(1.into(), 1024.into()));
        let t = -(1024f64).ln();
        assert!(lo <= t && t <= hi);
        assert_eq!(exact_f64(&BigRational::new(5.into(), 8.into())), Some(0.625));
        assert_eq!(exact_f64(&third), None);
    }
}
