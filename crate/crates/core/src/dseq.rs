//! Digit sequences that define an expansion of 1.
//!
//! File format: UTF-8 lines of comma-separated digits, optionally closed by
//! a footer line `repeat:<period>` (the last `<period>` listed digits repeat
//! forever) or `rule:doubling-runs` (the sequence `1 0 1 0^2 1 0^4 1 0^8 ...`,
//! of which the listed digits must be a prefix). Whitespace is ignored and
//! `#` starts a comment.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DigitSource {
    /// `prefix` followed by `period` repeated forever.
    Periodic { prefix: Vec<u32>, period: Vec<u32> },
    /// `1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, ...`: single ones separated by zero
    /// runs of length 1, 2, 4, 8, ...
    DoublingRuns,
    /// A finite list with no tail rule.
    Finite(Vec<u32>),
}

/// 1-based positions of the ones in the doubling-runs sequence.
fn doubling_one_positions() -> impl Iterator<Item = usize> {
    let mut pos = 1usize;
    let mut run = 1usize;
    std::iter::from_fn(move || {
        let here = pos;
        pos = pos.checked_add(run + 1)?;
        run = run.checked_mul(2)?;
        Some(here)
    })
}

impl DigitSource {
    pub fn periodic(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::DigitFile("repeat period must be at least 1".into()));
        }
        Ok(DigitSource::Periodic { prefix, period })
    }

    /// Digit at 1-based position `i`; `None` past the end of a finite list.
    pub fn digit(&self, i: usize) -> Option<u32> {
        assert!(i >= 1, "digit positions are 1-based");
        match self {
            DigitSource::Periodic { prefix, period } => Some(if i <= prefix.len() {
                prefix[i - 1]
            } else {
                period[(i - 1 - prefix.len()) % period.len()]
            }),
            DigitSource::DoublingRuns => {
                for p in doubling_one_positions() {
                    if p == i {
                        return Some(1);
                    }
                    if p > i {
                        break;
                    }
                }
                Some(0)
            }
            DigitSource::Finite(d) => d.get(i - 1).copied(),
        }
    }

    pub fn prefix(&self, n: usize) -> Option<Vec<u32>> {
        match self {
            DigitSource::DoublingRuns => {
                let mut out = vec![0; n];
                for p in doubling_one_positions().take_while(|&p| p <= n) {
                    out[p - 1] = 1;
                }
                Some(out)
            }
            _ => (1..=n).map(|i| self.digit(i)).collect(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, DigitSource::Finite(_))
    }

    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self, DigitSource::Periodic { .. })
    }

    /// Largest digit anywhere in the sequence.
    pub fn max_digit(&self) -> u32 {
        match self {
            DigitSource::Periodic { prefix, period } => prefix.iter().chain(period).copied().max().unwrap_or(0),
            DigitSource::DoublingRuns => 1,
            DigitSource::Finite(d) => d.iter().copied().max().unwrap_or(0),
        }
    }

    /// True when the sequence is `0^∞` from some point on.
    pub fn is_eventually_zero(&self) -> bool {
        match self {
            DigitSource::Periodic { period, .. } => period.iter().all(|&d| d == 0),
            DigitSource::DoublingRuns => false,
            DigitSource::Finite(_) => true,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut digits = Vec::new();
        let mut footer: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line: String = raw
                .split('#')
                .next()
                .unwrap()
                .chars()
                .filter(|c| !c.is_whitespace())
                .collect();
            if line.is_empty() {
                continue;
            }
            if footer.is_some() {
                return Err(Error::DigitFile(format!(
                    "line {}: content after the footer line",
                    lineno + 1
                )));
            }
            if line.starts_with("repeat:") || line.starts_with("rule:") {
                footer = Some(line);
                continue;
            }
            for tok in line.split(',').filter(|t| !t.is_empty()) {
                let d: u32 = tok
                    .parse()
                    .map_err(|_| Error::DigitFile(format!("line {}: bad digit {tok:?}", lineno + 1)))?;
                digits.push(d);
            }
        }
        match footer.as_deref() {
            None => Ok(DigitSource::Finite(digits)),
            Some("rule:doubling-runs") => {
                let canon = DigitSource::DoublingRuns.prefix(digits.len()).unwrap();
                if canon != digits {
                    return Err(Error::DigitFile(
                        "listed digits are not a prefix of the doubling-runs sequence".into(),
                    ));
                }
                Ok(DigitSource::DoublingRuns)
            }
            Some(f) if f.starts_with("rule:") => Err(Error::DigitFile(format!("unknown rule {:?}", &f[5..]))),
            Some(f) => {
                let p: usize = f[7..]
                    .parse()
                    .map_err(|_| Error::DigitFile(format!("bad repeat footer {f:?}")))?;
                if p == 0 || p > digits.len() {
                    return Err(Error::DigitFile(format!(
                        "repeat period {p} must be between 1 and the number of listed digits ({})",
                        digits.len()
                    )));
                }
                let period = digits.split_off(digits.len() - p);
                DigitSource::periodic(digits, period)
            }
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::DigitFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl fmt::Display for DigitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |d: &[u32]| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            DigitSource::Periodic { prefix, period } if prefix.is_empty() => {
                write!(f, "({})^inf", join(period))
            }
            DigitSource::Periodic { prefix, period } => {
                write!(f, "{},({})^inf", join(prefix), join(period))
            }
            DigitSource::DoublingRuns => write!(f, "doubling-runs"),
            DigitSource::Finite(d) => write!(f, "{}", join(d)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_runs_prefix() {
        let d = DigitSource::DoublingRuns.prefix(21).unwrap();
        let ones: Vec<usize> = (1..=21).filter(|&i| d[i - 1] == 1).collect();
        assert_eq!(ones, vec![1, 3, 6, 11, 20]);
        assert_eq!(DigitSource::DoublingRuns.digit(20), Some(1));
        assert_eq!(DigitSource::DoublingRuns.digit(21), Some(0));
    }

    #[test]
    fn parse_footers() {
        let s = DigitSource::parse("1, 0\nrepeat:2\n").unwrap();
        assert_eq!(
            s,
            DigitSource::Periodic {
                prefix: vec![],
                period: vec![1, 0]
            }
        );
        assert_eq!(s.digit(5), Some(1));
        let s = DigitSource::parse("1,0,1\n0,0\nrule:doubling-runs").unwrap();
        assert_eq!(s, DigitSource::DoublingRuns);
        assert_eq!(DigitSource::parse("1,1,0").unwrap(), DigitSource::Finite(vec![1, 1, 0]));
        assert!(DigitSource::parse("1,1\nrule:doubling-runs").is_err());
        assert!(DigitSource::parse("1,1\nrepeat:3").is_err());
        assert!(DigitSource::parse("1,x").is_err());
        assert!(DigitSource::parse("1\nrepeat:1\n1").is_err());
    }
}
