use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite digit string. Words carry no base; admissibility is checked
/// against a [`crate::Beta`] where needed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(digits: Vec<u32>) -> Self {
        Word(digits)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut d = self.0.clone();
        d.extend_from_slice(&o.0);
        Word(d)
    }

    pub fn push(&mut self, d: u32) {
        self.0.push(d);
    }

    pub fn with_zeros(&self, k: usize) -> Word {
        let mut d = self.0.clone();
        d.resize(d.len() + k, 0);
        Word(d)
    }

    /// Checks every digit is below `alphabet`.
    pub fn check_alphabet(&self, alphabet: u32) -> Result<()> {
        match self.0.iter().position(|&d| d >= alphabet) {
            None => Ok(()),
            Some(i) => Err(Error::DigitOutOfRange {
                digit: self.0[i],
                position: i + 1,
                alphabet,
            }),
        }
    }
}

impl From<Vec<u32>> for Word {
    fn from(d: Vec<u32>) -> Self {
        Word(d)
    }
}

impl From<&[u32]> for Word {
    fn from(d: &[u32]) -> Self {
        Word(d.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Accepts `1,0,1`, or `101` when every digit is a single character.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let bad = || Error::DomainError(format!("malformed word {s:?}"));
        let digits = if s.contains(',') {
            s.split(',')
                .map(|t| t.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word(digits))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Lexicographic order on the common prefix of `a` and `b`: a word that is
/// a prefix of the other compares `Equal`.
pub fn lex_compare(a: &[u32], b: &[u32]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}
