use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use betashift::config::{load_config, Format};
use betashift::cylinder::{cylinder, cylinders};
use betashift::density::{density_summary, density_trace, DigitStream};
use betashift::exec::{self, ExecMode};
use betashift::expansion::{expansion_of_one, zero_run_table};
use betashift::language::enumerate_words;
use betashift::verify::{verify_suite, VerifyOptions};
use betashift::{Beta, DigitSource, Error, Real, Word};

fn doubling_runs() -> Beta {
    Beta::parse(&format!(
        "dseq:{}/../../data/doubling_runs.dseq",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn eps(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// Root of `Σ d_i x^{−i} = 1` by plain bisection on `[1.01, 2]` in f64.
fn bisect_root(d: &[u32]) -> f64 {
    let f = |x: f64| {
        d.iter()
            .enumerate()
            .map(|(i, &di)| di as f64 * x.powi(-(i as i32 + 1)))
            .sum::<f64>()
            - 1.0
    };
    let (mut lo, mut hi) = (1.01f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn series_base_matches_independent_bisection() {
    let b = doubling_runs();
    let d = DigitSource::DoublingRuns.prefix(2000).unwrap();
    let want = bisect_root(&d);
    assert!((1.5..1.6).contains(&want));
    let e = b.refine(&eps(50)).unwrap();
    assert!((e.lo_f64() - want).abs() < 1e-12, "{} vs {want}", e.lo_f64());
    assert!((e.hi_f64() - want).abs() < 1e-12);
}

#[test]
fn golden_and_tribonacci_expansions_of_one() {
    let golden = Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap();
    assert_eq!(expansion_of_one(&golden, 8).unwrap().to_string(), "1,0,1,0,1,0,1,0");
    let trib = Beta::parse("poly:-1,-1,-1,1@[1/1,2/1]").unwrap();
    assert_eq!(expansion_of_one(&trib, 9).unwrap().to_string(), "1,1,0,1,1,0,1,1,0");
    // 1.5: T(1) = 1/2, T(1/2) = 3/4, T(3/4) = 1/8, ...
    let r = Beta::parse("dec:1.5").unwrap();
    assert_eq!(expansion_of_one(&r, 4).unwrap().to_string(), "1,0,1,0");
}

#[test]
fn golden_cylinder_lengths_in_closed_form() {
    let g = Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    // |I(0)| = 1/φ, |I(1)| = 1/φ², |I(1,0)| = 1/φ², |I(0,1)| = 1/φ³
    for (w, want) in [
        ("0", 1.0 / phi),
        ("1", phi.powi(-2)),
        ("1,0", phi.powi(-2)),
        ("0,1", phi.powi(-3)),
    ] {
        let c = cylinder(&g, &w.parse::<Word>().unwrap()).unwrap();
        let e = c.length.refine(&eps(60)).unwrap();
        assert!((e.mid_f64() - want).abs() < 1e-15, "{w}");
    }
    // Fibonacci counts keep going
    let counts: Vec<usize> = (1..=10).map(|n| enumerate_words(&g, n).unwrap().count).collect();
    assert_eq!(counts, [2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
}

#[test]
fn series_cylinders_tile_within_tolerance() {
    let b = doubling_runs();
    let cyls = cylinders(&b, 7, 16).unwrap();
    let sum = cyls.iter().fold(Real::zero(&b), |acc, c| acc + &c.length);
    let e = (sum - Real::one(&b)).refine(&eps(50)).unwrap();
    assert!(e.lo_f64().abs() < 1e-12 && e.hi_f64().abs() < 1e-12);
}

#[test]
fn doubling_runs_zero_table() {
    let b = doubling_runs();
    let t = zero_run_table(&b, 20, 10_000).unwrap();
    let ts: Vec<usize> = t.records.iter().map(|r| r.t).collect();
    assert_eq!(&ts[..12], &[1, 0, 2, 1, 0, 4, 3, 2, 1, 0, 8, 7]);
    assert_eq!(t.gamma(11), 8);
}

#[test]
fn digit_files_and_configs_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("golden.dseq");
    std::fs::write(&seq, "# (1,0) repeated\n1,0\nrepeat:2\n").unwrap();
    let b = Beta::parse(&format!("dseq:{}", seq.display())).unwrap();
    assert!(b.is_exact());
    let golden = Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap();
    assert_eq!(b.modulus(), golden.modulus());

    // expansions of 1 under T never end in zeros, and start with a nonzero digit
    for bad in ["1,1,0\nrepeat:1\n", "0,1\nrepeat:1\n"] {
        std::fs::write(&seq, bad).unwrap();
        let r = Beta::parse(&format!("dseq:{}", seq.display()));
        assert!(matches!(r, Err(Error::InvalidBetaSpec(_))), "{bad:?}: {r:?}");
    }
    // (1,0,0) then (1,1)...: the shift 1,1,1 exceeds the sequence itself
    std::fs::write(&seq, "1,0,0,1,1\nrepeat:2\n").unwrap();
    let r = Beta::parse(&format!("dseq:{}", seq.display()));
    assert!(matches!(r, Err(Error::NotSelfAdmissible { .. })), "{r:?}");

    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "r = 4\nformat = json\n").unwrap();
    let c = load_config(Some(&cfg)).unwrap();
    assert_eq!((c.r, c.format), (4, Format::Json));
    assert!(matches!(
        load_config(Some(&dir.path().join("missing.cfg"))),
        Err(Error::Io(_))
    ));
}

#[test]
fn trace_summary_for_expansion_of_one() {
    let b = doubling_runs();
    let trace = density_trace(&DigitStream::One(b), 200).unwrap();
    assert!(trace.bracket_violations().is_empty());
    // along ε* every prefix is tight, so k* = 0 and d_n sits in [(n+t_n)/n, (n+t_n+1)/n]
    for r in &trace.records {
        assert_eq!(r.k_star, 0);
        let n = r.n as f64;
        let t = r.t_aux as f64;
        assert!(
            r.d_hi >= (n + t) / n - 1e-12 && r.d_lo <= (n + t + 1.0) / n + 1e-12,
            "n = {}",
            r.n
        );
    }
    let s = density_summary(&trace, 10, 0.2).unwrap();
    assert!(s.upper_bracket_holds);
    assert!(matches!(
        density_summary(&trace, 500, 0.2),
        Err(Error::EmptyTail { tail_start: 500 })
    ));
}

#[test]
fn sequential_and_parallel_agree() {
    let specs = vec![
        "dec:2".to_string(),
        "poly:-1,-1,1@[1/1,2/1]".to_string(),
        "dec:1.5".to_string(),
    ];
    let g = Beta::parse("poly:-1,-1,-1,1@[1/1,2/1]").unwrap();
    let run = || {
        let report = serde_json::to_string(&verify_suite(&specs, &VerifyOptions::default())).unwrap();
        let lefts: Vec<Ordering> = cylinders(&g, 8, 16)
            .unwrap()
            .windows(2)
            .map(|p| p[0].left.cmp_real(&p[1].left).unwrap())
            .collect();
        (report, lefts)
    };
    let before = exec::mode();
    exec::set_mode(ExecMode::Sequential);
    let seq = run();
    exec::set_mode(ExecMode::Parallel);
    let par = run();
    exec::set_mode(before);
    assert_eq!(seq, par);
    assert!(seq.1.iter().all(|&o| o == Ordering::Less));
}
