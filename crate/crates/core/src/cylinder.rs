//! Cylinder geometry: `k*`, exact lengths, fullness, and the brute-force
//! partition oracle used to validate them.

use std::cell::RefCell;
use std::cmp::Ordering;

use num_rational::BigRational;
use serde::Serialize;

use crate::beta::{Beta, RealEnclosure};
use crate::error::{Error, Result};
use crate::exec;
use crate::expansion::{expansion_of_one, word_value, zero_run_table, DEFAULT_ZERO_RUN_BUDGET};
use crate::language::{enumerate_words_capped, is_admissible, require_admissible, DEFAULT_ENUMERATION_CAP};
use crate::real::Real;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fullness {
    Full,
    NotFull,
    Unknown,
}

impl Fullness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Fullness::Full => "true",
            Fullness::NotFull => "false",
            Fullness::Unknown => "unknown",
        }
    }
}

/// Geometry of the cylinder `I(w)`: `left = Σ w_i β^{-i}`, the interval is
/// `(left, right]`.
#[derive(Clone, Debug)]
pub struct CylinderInfo {
    pub word: Word,
    pub k_star: usize,
    pub left: Real,
    pub length: Real,
    pub right: Real,
    pub fullness: Fullness,
}

/// Smallest `k` with `(w_{k+1}, …, w_n) = (ε*_1, …, ε*_{n−k})`, given a
/// prefix of the expansion of 1 at least as long as `w`.
pub(crate) fn k_star_against(w: &[u32], star: &[u32]) -> usize {
    let n = w.len();
    (0..=n).find(|&k| w[k..] == star[..n - k]).unwrap()
}

pub fn k_star(beta: &Beta, w: &Word) -> Result<usize> {
    require_admissible(beta, w)?;
    let star = expansion_of_one(beta, w.len())?;
    Ok(k_star_against(w.digits(), star.digits()))
}

/// `β^{−k}(1 − Σ_{i≤m} ε*_i β^{−i})` with `m = n − k`: the length of a
/// cylinder whose word ends in `ε*|m` after `k` free digits.
pub(crate) fn length_from_k(beta: &Beta, n: usize, k: usize) -> Result<Real> {
    let star = expansion_of_one(beta, n - k)?;
    let tail = Real::one(beta) - word_value(beta, star.digits());
    Ok(tail.shift(-(k as i64)))
}

/// Decides `length = β^{−n}`.
pub(crate) fn decide_fullness(length: &Real, n: usize) -> Result<Fullness> {
    let diff = length - &Real::beta_pow(length.base(), -(n as i64));
    if diff.is_identically_zero() {
        return Ok(Fullness::Full);
    }
    match diff.sign() {
        Ok(Ordering::Equal) => Ok(Fullness::Full),
        Ok(_) => Ok(Fullness::NotFull),
        Err(Error::PrecisionExhausted { .. }) => Ok(Fullness::Unknown),
        Err(e) => Err(e),
    }
}

pub fn cylinder(beta: &Beta, w: &Word) -> Result<CylinderInfo> {
    let k = k_star(beta, w)?;
    cylinder_with_k(beta, w, k)
}

/// Cylinder geometry computed from a caller-supplied `k*`. Only meaningful
/// for the true `k*`; exposed so checks can be exercised against a wrong one.
pub fn cylinder_with_k(beta: &Beta, w: &Word, k: usize) -> Result<CylinderInfo> {
    let n = w.len();
    if k > n {
        return Err(Error::DomainError(format!("k* = {k} exceeds word length {n}")));
    }
    let left = word_value(beta, w.digits());
    let length = length_from_k(beta, n, k)?;
    let right = &left + &length;
    let fullness = decide_fullness(&length, n)?;
    Ok(CylinderInfo {
        word: w.clone(),
        k_star: k,
        left,
        length,
        right,
        fullness,
    })
}

/// Cylinders of every admissible word of length `n`, in lexicographic order.
pub fn cylinders(beta: &Beta, n: usize, cap: usize) -> Result<Vec<CylinderInfo>> {
    let slice = enumerate_words_capped(beta, n, cap)?;
    exec::try_map(&slice.words, |w| cylinder(beta, w))
}

/// One row of cylinder output. Bounds are outward-rounded `f64`s.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderRow {
    pub word: String,
    pub left_lo: f64,
    pub left_hi: f64,
    pub len_lo: f64,
    pub len_hi: f64,
    pub k_star: usize,
    pub full: &'static str,
}

/// Relative accuracy (bits) used for printed enclosures.
const ROW_BITS: u32 = 64;

impl CylinderInfo {
    pub fn row(&self) -> Result<CylinderRow> {
        let l = self.left.relative_enclosure(ROW_BITS)?;
        let len = self.length.relative_enclosure(ROW_BITS)?;
        Ok(CylinderRow {
            word: self.word.to_string(),
            left_lo: l.lo_f64(),
            left_hi: l.hi_f64(),
            len_lo: len.lo_f64(),
            len_hi: len.hi_f64(),
            k_star: self.k_star,
            full: self.fullness.as_str(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct PartitionEntry {
    pub word: Word,
    pub left: Real,
    pub length: Real,
}

/// Lengths of the order-`n` cylinders computed without `k*`: the cylinders
/// tile `(0, 1]`, so each length is the gap to the next left endpoint in
/// spatial order, and the last one reaches 1.
pub fn partition_oracle(beta: &Beta, n: usize, cap: usize) -> Result<Vec<PartitionEntry>> {
    let words = enumerate_words_capped(beta, n, cap)?.words;
    let lefts: Vec<Real> = exec::map(&words, |w| word_value(beta, w.digits()));
    let mut order: Vec<usize> = (0..words.len()).collect();
    let failure = RefCell::new(None);
    order.sort_by(|&a, &b| match lefts[a].cmp_real(&lefts[b]) {
        Ok(o) => o,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Ordering::Equal
        }
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let one = Real::one(beta);
    Ok(order
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let next = order.get(pos + 1).map_or(&one, |&j| &lefts[j]);
            PartitionEntry {
                word: words[i].clone(),
                left: lefts[i].clone(),
                length: next - &lefts[i],
            }
        })
        .collect())
}

/// Certified equality for exact bases; intersection of width-`eps`
/// enclosures otherwise.
pub(crate) fn agree(a: &Real, b: &Real, eps: &BigRational) -> Result<bool> {
    if a.base().is_exact() {
        return Ok(a.cmp_real(b)? == Ordering::Equal);
    }
    if (a - b).is_identically_zero() {
        return Ok(true);
    }
    Ok(a.refine(eps)?.intersects(&b.refine(eps)?))
}

/// A rule broken on a specific word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub word: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FullnessReport {
    pub n_max: usize,
    pub m_max: usize,
    /// Number of instances examined for laws 1–4.
    pub checked: [usize; 4],
    /// Instances whose fullness could not be decided.
    pub undecided: usize,
    pub violations: Vec<Violation>,
}

impl FullnessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const DEFAULT_LAWS_N_MAX: usize = 6;
pub const DEFAULT_LAWS_M_MAX: usize = 4;

/// Exhaustive small-scale check of the fullness laws:
///
/// 1. `I(w)` is full iff `w·w'` is admissible for every admissible `w'`
///    (checked for `|w'| ≤ m_max`);
/// 2. lowering the last digit of an admissible word gives a full cylinder;
/// 3. `|I(w·w')| = |I(w)|·|I(w')|` when `I(w)` is full;
/// 4. `I(w, 0^{Γ_n+1})` and `I(ε*|n, 0^{t_n+1})` are full.
pub fn fullness_laws_check(beta: &Beta, n_max: usize, m_max: usize, eps: &BigRational) -> Result<FullnessReport> {
    let cap = DEFAULT_ENUMERATION_CAP.max(n_max + m_max);
    let table = zero_run_table(beta, n_max, DEFAULT_ZERO_RUN_BUDGET)?;
    let tails: Vec<Vec<Word>> = (1..=m_max)
        .map(|m| Ok(enumerate_words_capped(beta, m, cap)?.words))
        .collect::<Result<_>>()?;
    let tail_cyl: Vec<Vec<CylinderInfo>> = tails
        .iter()
        .map(|ws| exec::try_map(ws, |w| cylinder(beta, w)))
        .collect::<Result<_>>()?;

    let mut report = FullnessReport {
        n_max,
        m_max,
        ..Default::default()
    };
    let v = |law: &str, w: &Word, detail: String| Violation {
        check: format!("fullness_law_{law}"),
        word: w.to_string(),
        detail,
    };

    for n in 1..=n_max {
        let infos = cylinders(beta, n, cap)?;
        let per_word = exec::try_map(&infos, |info| -> Result<(usize, [usize; 4], Vec<Violation>)> {
            let w = &info.word;
            let mut undecided = 0;
            let mut checked = [0usize; 4];
            let mut out = Vec::new();

            // Law 1
            checked[0] += 1;
            let mut all_extend = true;
            'outer: for ws in &tails {
                for t in ws {
                    if !is_admissible(beta, &w.concat(t))? {
                        all_extend = false;
                        break 'outer;
                    }
                }
            }
            match info.fullness {
                Fullness::Unknown => undecided += 1,
                Fullness::Full if !all_extend => {
                    out.push(v("1", w, "full but some concatenation is not admissible".into()))
                }
                Fullness::NotFull if all_extend => out.push(v(
                    "1",
                    w,
                    format!("not full but every extension up to length {m_max} is admissible"),
                )),
                _ => {}
            }

            // Law 2
            let last = *w.digits().last().unwrap();
            for e in 0..last {
                checked[1] += 1;
                let mut d = w.digits().to_vec();
                *d.last_mut().unwrap() = e;
                let lowered = Word::new(d);
                match cylinder(beta, &lowered)?.fullness {
                    Fullness::Full => {}
                    Fullness::Unknown => undecided += 1,
                    Fullness::NotFull => out.push(v("2", &lowered, format!("lowered from {w} but not full"))),
                }
            }

            // Law 3
            if info.fullness == Fullness::Full {
                for (ws, cs) in tails.iter().zip(&tail_cyl) {
                    for (t, ct) in ws.iter().zip(cs) {
                        checked[2] += 1;
                        let joined = cylinder(beta, &w.concat(t))?;
                        let product = &info.length * &ct.length;
                        if !agree(&joined.length, &product, eps)? {
                            out.push(v("3", &joined.word, format!("|I({w}{t})| != |I({w})|*|I({t})|")));
                        }
                    }
                }
            }

            // Law 4, first form
            checked[3] += 1;
            let padded = w.with_zeros(table.gamma(n) + 1);
            match cylinder(beta, &padded)?.fullness {
                Fullness::Full => {}
                Fullness::Unknown => undecided += 1,
                Fullness::NotFull => out.push(v("4", &padded, "w 0^(Gamma_n+1) not full".into())),
            }
            Ok((undecided, checked, out))
        })?;
        for (u, c, mut out) in per_word {
            report.undecided += u;
            for (total, k) in report.checked.iter_mut().zip(c) {
                *total += k;
            }
            report.violations.append(&mut out);
        }

        // Law 4, second form
        report.checked[3] += 1;
        let w = expansion_of_one(beta, n)?.with_zeros(table.t(n) + 1);
        match cylinder(beta, &w)?.fullness {
            Fullness::Full => {}
            Fullness::Unknown => report.undecided += 1,
            Fullness::NotFull => report.violations.push(v("4", &w, "eps*|n 0^(t_n+1) not full".into())),
        }
    }
    Ok(report)
}

/// Checks `cylinder()` lengths against the partition oracle for every
/// admissible word of length `n`. `k_offset` shifts every `k*` (clamped to
/// `[0, n]`) and exists only to demonstrate that the check has teeth.
pub fn oracle_violations(beta: &Beta, n: usize, eps: &BigRational, k_offset: isize) -> Result<Vec<Violation>> {
    let oracle = partition_oracle(beta, n, DEFAULT_ENUMERATION_CAP.max(n))?;
    let star = expansion_of_one(beta, n)?;
    let found = exec::try_map(&oracle, |entry| -> Result<Option<Violation>> {
        let k = k_star_against(entry.word.digits(), star.digits());
        let k = (k as isize + k_offset).clamp(0, n as isize) as usize;
        let info = cylinder_with_k(beta, &entry.word, k)?;
        if agree(&info.length, &entry.length, eps)? {
            return Ok(None);
        }
        let show = |r: &Real| {
            r.refine(eps)
                .map(|e: RealEnclosure| format!("[{:.6e}, {:.6e}]", e.lo_f64(), e.hi_f64()))
                .unwrap_or_else(|_| "?".into())
        };
        Ok(Some(Violation {
            check: "cylinder_oracle".into(),
            word: entry.word.to_string(),
            detail: format!(
                "n={n} k*={k}: formula length {} vs partition length {}",
                show(&info.length),
                show(&entry.length)
            ),
        }))
    })?;
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Beta {
        Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap()
    }

    fn w(d: &[u32]) -> Word {
        Word::from(d)
    }

    #[test]
    fn k_star_examples() {
        let g = golden();
        assert_eq!(k_star(&g, &w(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(k_star(&g, &w(&[0, 1, 0])).unwrap(), 1);
        let two = Beta::integer(2).unwrap();
        assert_eq!(k_star(&two, &w(&[0, 0, 0])).unwrap(), 3);
        assert!(matches!(k_star(&g, &w(&[1, 1])), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn golden_lengths() {
        let g = golden();
        let c = cylinder(&g, &w(&[0, 1, 0])).unwrap();
        assert_eq!(c.fullness, Fullness::Full);
        assert_eq!(c.length.cmp_real(&Real::beta_pow(&g, -3)).unwrap(), Ordering::Equal);
        let c = cylinder(&g, &w(&[0, 1])).unwrap();
        assert_eq!(c.fullness, Fullness::NotFull);
        assert_eq!(c.length.cmp_real(&Real::beta_pow(&g, -3)).unwrap(), Ordering::Equal);
        // n = 1: lefts 0 and 1/β
        let p = partition_oracle(&g, 1, 16).unwrap();
        assert!(p[0].left.is_identically_zero());
        assert_eq!(p[0].length.cmp_real(&Real::beta_pow(&g, -1)).unwrap(), Ordering::Equal);
        let expect = Real::one(&g) - Real::beta_pow(&g, -1);
        assert_eq!(p[1].length.cmp_real(&expect).unwrap(), Ordering::Equal);
    }

    #[test]
    fn binary_partition() {
        let two = Beta::integer(2).unwrap();
        let p = partition_oracle(&two, 2, 16).unwrap();
        assert_eq!(p.len(), 4);
        for e in &p {
            assert_eq!(e.length.as_rational(), Some(BigRational::new(1.into(), 4.into())));
        }
    }

    #[test]
    fn laws_hold_for_golden_and_binary() {
        let eps = BigRational::new(1.into(), (1u64 << 60).into());
        for b in [golden(), Beta::integer(2).unwrap()] {
            let r = fullness_laws_check(&b, 5, 3, &eps).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
            assert_eq!(r.undecided, 0);
        }
    }

    #[test]
    fn wrong_k_star_is_caught() {
        let g = golden();
        let eps = BigRational::new(1.into(), (1u64 << 60).into());
        assert!(oracle_violations(&g, 4, &eps, 0).unwrap().is_empty());
        assert!(!oracle_violations(&g, 4, &eps, 1).unwrap().is_empty());
    }
}
