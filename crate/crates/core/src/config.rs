//! Run configuration: defaults, a flat `key = value` file, and overrides.
//!
//! ```text
//! # comments run to the end of the line
//! eps = 1/1000000
//! r = 4
//! format = json
//! ```

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::beta::{parse_rational, BetaOptions, DEFAULT_REFINE_BUDGET, DEFAULT_SELF_CHECK_DEPTH};
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Width of reported enclosures.
    pub eps: BigRational,
    pub refine_budget: usize,
    pub zero_run_budget: usize,
    pub self_check_depth: usize,
    pub enum_cap: usize,
    pub r: usize,
    pub k_blocks: usize,
    pub search_cap: usize,
    pub seed: Word,
    pub oracle_n: usize,
    pub bounds_n: usize,
    pub prefix_m: usize,
    pub laws_n: usize,
    pub laws_m: usize,
    pub round_trip_n: usize,
    pub gap_tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eps: BigRational::new(BigInt::one(), BigInt::one() << 64usize),
            refine_budget: DEFAULT_REFINE_BUDGET,
            zero_run_budget: crate::expansion::DEFAULT_ZERO_RUN_BUDGET,
            self_check_depth: DEFAULT_SELF_CHECK_DEPTH,
            enum_cap: crate::language::DEFAULT_ENUMERATION_CAP,
            r: crate::construct::DEFAULT_RATIO,
            k_blocks: crate::construct::DEFAULT_BLOCKS,
            search_cap: crate::construct::DEFAULT_SEARCH_CAP,
            seed: Word::from(vec![1]),
            oracle_n: 8,
            bounds_n: 10,
            prefix_m: 12,
            laws_n: crate::cylinder::DEFAULT_LAWS_N_MAX,
            laws_m: crate::cylinder::DEFAULT_LAWS_M_MAX,
            round_trip_n: 30,
            gap_tol: 0.2,
            format: Format::Csv,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn beta_options(&self) -> BetaOptions {
        BetaOptions {
            refine_budget: self.refine_budget,
            self_check_depth: self.self_check_depth,
        }
    }

    /// Sets one key from its textual value; the error is a bare message.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn count(v: &str) -> std::result::Result<usize, String> {
            match v.parse::<usize>() {
                Ok(0) => Err("must be positive".into()),
                Ok(n) => Ok(n),
                Err(_) => Err(format!("expected a positive integer, got {v:?}")),
            }
        }
        match key {
            "eps" => {
                let e = parse_rational(value).ok_or_else(|| format!("bad rational {value:?}"))?;
                if !e.is_positive() {
                    return Err("eps must be > 0".into());
                }
                self.eps = e;
            }
            "refine_budget" => self.refine_budget = count(value)?,
            "zero_run_budget" => self.zero_run_budget = count(value)?,
            "self_check_depth" => self.self_check_depth = count(value)?,
            "enum_cap" => self.enum_cap = count(value)?,
            "r" => self.r = count(value)?,
            "k" | "k_blocks" => self.k_blocks = count(value)?,
            "search_cap" => self.search_cap = count(value)?,
            "seed" => {
                let w: Word = value.parse().map_err(|e: Error| e.to_string())?;
                if w.is_empty() {
                    return Err("seed must be non-empty".into());
                }
                self.seed = w;
            }
            "oracle_n" => self.oracle_n = count(value)?,
            "bounds_n" => self.bounds_n = count(value)?,
            "prefix_m" => self.prefix_m = count(value)?,
            "laws_n" => self.laws_n = count(value)?,
            "laws_m" => self.laws_m = count(value)?,
            "round_trip_n" => self.round_trip_n = count(value)?,
            "gap_tol" => {
                let g: f64 = value.parse().map_err(|_| format!("bad number {value:?}"))?;
                if g.is_nan() || g <= 0.0 {
                    return Err("gap_tol must be > 0".into());
                }
                self.gap_tol = g;
            }
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::ConfigParse { line: i + 1, message };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            cfg.set(k.trim(), v.trim()).map_err(err)?;
        }
        Ok(cfg)
    }
}

/// Reads a configuration file; `None` gives the defaults.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut c = RunConfig::parse("# demo\nr = 4\n\nformat=json  # trailing\n").unwrap();
        assert_eq!(c.r, 4);
        assert_eq!(c.format, Format::Json);
        c.set("r", "8").unwrap();
        assert_eq!(c.r, 8);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            RunConfig::parse("r = 4\neps = 0\n"),
            Err(Error::ConfigParse {
                line: 2,
                message: "eps must be > 0".into()
            })
        );
        assert!(matches!(
            RunConfig::parse("bogus = 1"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("r 4"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert_eq!(load_config(None).unwrap(), RunConfig::default());
    }
}
