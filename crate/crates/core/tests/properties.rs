//! Randomised invariants. Rational bases are checked against an
//! independent model: the image `T^n(I(w))` of a cylinder is always an
//! interval `(0, c]`, and `|I(w)| = c β^{−n}`, so admissibility and exact
//! lengths follow from tracking `c` digit by digit.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use betashift::cylinder::{cylinder, cylinders};
use betashift::expansion::{digits, digits_and_remainder, expansion_of_one, word_value, zero_run_table};
use betashift::language::{enumerate_words, is_admissible};
use betashift::real::{certified_ceil, certified_compare};
use betashift::word::lex_compare;
use betashift::{Beta, Real, Word};

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// `β = k/100` for `k` in `105..=390`.
fn rational_beta() -> impl Strategy<Value = (Beta, BigRational)> {
    (105i64..=390).prop_map(|k| {
        let spec = format!("dec:{}.{:02}", k / 100, k % 100);
        (Beta::parse(&spec).unwrap(), ratio(k, 100))
    })
}

fn exact_bases() -> impl Strategy<Value = Beta> {
    prop_oneof![
        rational_beta().prop_map(|(b, _)| b),
        Just(Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap()),
        Just(Beta::parse("poly:-1,-1,-1,1@[1/1,2/1]").unwrap()),
        Just(Beta::parse("poly:-1,0,-1,1@[1/1,2/1]").unwrap()),
    ]
}

/// A point of `(0, 1]` as `p/q`.
fn unit_point() -> impl Strategy<Value = BigRational> {
    (1i64..=1000)
        .prop_flat_map(|q| (1i64..=q, Just(q)))
        .prop_map(|(p, q)| ratio(p, q))
}

/// Image endpoint `c` after reading `w`, or `None` if `I(w)` is empty.
fn image_endpoint(beta: &BigRational, w: &[u32]) -> Option<BigRational> {
    let one = BigRational::one();
    let mut c = one.clone();
    for &a in w {
        let a = BigRational::from_integer(a.into());
        // digit a needs a point y ≤ c with a/β < y
        if beta * &c <= a {
            return None;
        }
        c = (beta * &c - a).min(one.clone());
    }
    Some(c)
}

/// Admissible words found by brute force over the full alphabet.
fn brute_force_words(beta: &BigRational, n: usize) -> Vec<Vec<u32>> {
    let alphabet = beta.ceil().to_integer().to_string().parse::<u32>().unwrap();
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..alphabet).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .filter(|w| image_endpoint(beta, w).is_some())
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enclosures_are_nested(b in exact_bases(), k in 4usize..40) {
        let coarse = b.refine(&ratio(1, 1 << 3)).unwrap();
        let mid = b.refine(&BigRational::new(BigInt::one(), BigInt::one() << k)).unwrap();
        let fine = b.refine(&BigRational::new(BigInt::one(), BigInt::one() << (k + 20))).unwrap();
        prop_assert!(fine.is_subset_of(&mid));
        prop_assert!(mid.is_subset_of(&coarse));
        prop_assert!(fine.width() <= BigRational::new(BigInt::one(), BigInt::one() << (k + 20)));
    }

    #[test]
    fn ceiling_matches_exact_rational(b in exact_bases(), p in -5000i64..5000, q in 1i64..97) {
        let v = ratio(p, q);
        let x = Real::from_ratio(&b, v.clone());
        prop_assert_eq!(certified_ceil(&x).unwrap(), v.ceil().to_integer());
    }

    #[test]
    fn comparison_is_antisymmetric(b in exact_bases(), x in unit_point(), y in unit_point()) {
        let rx = Real::from_ratio(&b, x.clone());
        let ry = Real::from_ratio(&b, y.clone());
        prop_assert_eq!(certified_compare(&rx, &ry).unwrap(), x.cmp(&y));
        prop_assert_eq!(certified_compare(&ry, &rx).unwrap(), y.cmp(&x));
    }

    #[test]
    fn expansions_reconstruct_the_point(b in exact_bases(), x in unit_point(), n in 1usize..10) {
        let rx = Real::from_ratio(&b, x);
        let (w, rest) = digits_and_remainder(&rx, n).unwrap();
        let rebuilt = word_value(&b, w.digits()) + rest.shift(-(n as i64));
        prop_assert_eq!(rebuilt.cmp_real(&rx).unwrap(), Ordering::Equal);
        // the remainder stays in (0, 1]
        prop_assert_eq!(rest.sign().unwrap(), Ordering::Greater);
        prop_assert_ne!(rest.cmp_real(&Real::one(&b)).unwrap(), Ordering::Greater);
    }

    #[test]
    fn expansions_are_monotone_and_admissible(b in exact_bases(), x in unit_point(), y in unit_point()) {
        let n = 8;
        let dx = digits(&Real::from_ratio(&b, x.clone()), n).unwrap();
        let dy = digits(&Real::from_ratio(&b, y.clone()), n).unwrap();
        prop_assert!(is_admissible(&b, &dx).unwrap());
        prop_assert!(is_admissible(&b, &dy).unwrap());
        if x < y {
            prop_assert_ne!(lex_compare(dx.digits(), dy.digits()), Ordering::Greater);
        }
    }

    #[test]
    fn running_max_of_zero_runs(b in exact_bases()) {
        let table = zero_run_table(&b, 60, 10_000).unwrap();
        let mut prev = 0;
        for r in &table.records {
            prop_assert!(r.gamma >= prev);
            prop_assert!(r.gamma >= r.t);
            prev = r.gamma;
        }
        let star = expansion_of_one(&b, 61 + table.records.iter().map(|r| r.t).max().unwrap()).unwrap();
        for r in &table.records {
            let after = &star.digits()[r.n..r.n + r.t];
            prop_assert!(after.iter().all(|&d| d == 0));
            prop_assert_ne!(star.digits()[r.n + r.t], 0);
        }
    }

    #[test]
    fn enumeration_matches_brute_force((b, q) in rational_beta(), n in 1usize..6) {
        let got: Vec<Vec<u32>> = enumerate_words(&b, n)
            .unwrap()
            .words
            .into_iter()
            .map(Word::into_digits)
            .collect();
        prop_assert_eq!(got, brute_force_words(&q, n));
    }

    #[test]
    fn cylinder_lengths_match_image_model((b, q) in rational_beta(), n in 1usize..6) {
        for c in cylinders(&b, n, 16).unwrap() {
            let end = image_endpoint(&q, c.word.digits()).unwrap();
            let want = end / num_traits::pow(q.clone(), n);
            prop_assert_eq!(c.length.as_rational(), Some(want.clone()));
            let full = want == num_traits::pow(q.clone(), n).recip();
            prop_assert_eq!(c.fullness == betashift::Fullness::Full, full);
        }
    }

    #[test]
    fn cylinders_partition_the_unit_interval(b in exact_bases(), n in 1usize..7) {
        let cyls = cylinders(&b, n, 16).unwrap();
        let total = cyls.iter().fold(Real::zero(&b), |acc, c| acc + &c.length);
        prop_assert_eq!(total.cmp_real(&Real::one(&b)).unwrap(), Ordering::Equal);
        // consecutive cylinders abut: right end of one is the left end of the next
        for pair in cyls.windows(2) {
            let right = &pair[0].left + &pair[0].length;
            prop_assert_eq!(right.cmp_real(&pair[1].left).unwrap(), Ordering::Equal);
        }
    }

    #[test]
    fn inadmissible_words_are_rejected((b, q) in rational_beta(), w in prop::collection::vec(0u32..4, 1..7)) {
        let alphabet = b.alphabet_size();
        prop_assume!(w.iter().all(|&d| d < alphabet));
        let word = Word::from(w.clone());
        let expected = image_endpoint(&q, &w).is_some();
        prop_assert_eq!(is_admissible(&b, &word).unwrap(), expected);
        prop_assert_eq!(cylinder(&b, &word).is_ok(), expected);
    }
}

#[test]
fn image_model_sanity() {
    let golden_like = ratio(16, 10);
    assert!(image_endpoint(&golden_like, &[1, 1]).is_none());
    assert_eq!(image_endpoint(&ratio(2, 1), &[0, 1, 1]), Some(BigRational::one()));
    assert!(BigRational::zero() < image_endpoint(&golden_like, &[1, 0]).unwrap());
}
