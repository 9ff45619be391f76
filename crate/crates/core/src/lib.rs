//! Certified β-expansions.
//!
//! The crate computes expansions under the map `T x = βx − ⌈βx⌉ + 1` on
//! `(0, 1]`, the admissible words of the β-shift, exact cylinder lengths, and
//! density diagnostics along orbits, including a constructive generator of
//! points whose upper density reaches `1 + λ(β)`.
//!
//! Every integer or order decision is certified: exact arithmetic in `Q(β)`
//! for rational and algebraic bases, adaptive interval evaluation for
//! series-defined bases, and an explicit error when a decision cannot be made
//! within budget.
//!
//! ```
//! use betashift::{Beta, Word, language};
//!
//! let golden = Beta::parse("poly:-1,-1,1@[1/1,2/1]").unwrap();
//! let slice = language::enumerate_words(&golden, 3).unwrap();
//! assert_eq!(slice.count, 5);
//! assert!(!language::is_admissible(&golden, &Word::from(vec![0, 1, 1])).unwrap());
//! ```

pub mod beta;
pub mod config;
pub mod construct;
pub mod cylinder;
pub mod density;
pub mod dseq;
pub mod error;
pub mod exec;
pub mod expansion;
pub mod language;
pub mod numeric;
pub mod output;
pub mod real;
pub mod verify;
pub mod word;

pub use beta::{parse_rational, Beta, BetaOptions, BetaSpec, RealEnclosure};
pub use cylinder::{CylinderInfo, Fullness};
pub use dseq::DigitSource;
pub use error::{Error, Result};
pub use real::Real;
pub use word::Word;

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;
