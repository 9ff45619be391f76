//! Exact and interval number plumbing.

pub mod float;
mod interval;
mod poly;

pub use interval::Dyadic;
pub use poly::Poly;
