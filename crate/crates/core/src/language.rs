//! Admissible words of the β-shift.
//!
//! A word `w` of length `n` is admissible iff every suffix `σ^i w`,
//! `0 ≤ i < n`, is lexicographically at most the prefix of the expansion of
//! 1 of the same length. The `i = 0` case rejects words whose first digit
//! exceeds `ε*_1`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::beta::Beta;
use crate::error::{Error, Result};
use crate::exec;
use crate::expansion::expansion_of_one;
use crate::word::{lex_compare, Word};

pub const DEFAULT_ENUMERATION_CAP: usize = 16;

/// Admissibility of `w` against a known prefix `star` of the expansion of
/// 1 with `star.len() >= w.len()`.
pub(crate) fn admissible_against(w: &[u32], star: &[u32]) -> bool {
    let n = w.len();
    (0..n).all(|i| lex_compare(&w[i..], &star[..n - i]) != Ordering::Greater)
}

pub fn is_admissible(beta: &Beta, w: &Word) -> Result<bool> {
    w.check_alphabet(beta.alphabet_size())?;
    let star = expansion_of_one(beta, w.len())?;
    Ok(admissible_against(w.digits(), star.digits()))
}

/// `Ok(())` when admissible, `NotAdmissible` otherwise.
pub fn require_admissible(beta: &Beta, w: &Word) -> Result<()> {
    if is_admissible(beta, w)? {
        Ok(())
    } else {
        Err(Error::NotAdmissible { word: w.to_string() })
    }
}

/// `Σ_β^n`: all admissible words of length `n`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanguageSlice {
    pub n: usize,
    pub words: Vec<Word>,
    pub count: usize,
}

/// Depth-first generation. `tight` holds every `L` such that the last `L`
/// digits equal `ε*_1..ε*_L` (always including 0); the next digit may not
/// exceed `ε*_{L+1}` for any tight `L`.
fn grow(star: &[u32], n: usize, word: &mut Vec<u32>, tight: &[usize], out: &mut Vec<Word>) {
    if word.len() == n {
        out.push(Word::from(word.as_slice()));
        return;
    }
    let max = tight.iter().map(|&l| star[l]).min().unwrap();
    for a in 0..=max {
        let mut next = vec![0];
        next.extend(tight.iter().filter(|&&l| star[l] == a).map(|&l| l + 1));
        word.push(a);
        grow(star, n, word, &next, out);
        word.pop();
    }
}

pub fn enumerate_words(beta: &Beta, n: usize) -> Result<LanguageSlice> {
    enumerate_words_capped(beta, n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_words_capped(beta: &Beta, n: usize, cap: usize) -> Result<LanguageSlice> {
    if n == 0 {
        return Err(Error::DomainError("word length must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::BudgetExceeded {
            what: format!("enumeration of words of length {n}"),
            budget: cap,
        });
    }
    let star = expansion_of_one(beta, n)?.into_digits();
    let firsts: Vec<u32> = (0..=star[0]).collect();
    let parts = exec::map(&firsts, |&a| {
        let mut out = Vec::new();
        let tight: Vec<usize> = if a == star[0] { vec![0, 1] } else { vec![0] };
        let mut w = vec![a];
        grow(&star, n, &mut w, &tight, &mut out);
        out
    });
    let words: Vec<Word> = parts.into_iter().flatten().collect();
    Ok(LanguageSlice {
        n,
        count: words.len(),
        words,
    })
}
