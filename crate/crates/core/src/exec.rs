//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the helpers run on the rayon
//! pool unless the process-wide mode is switched to sequential. Results are
//! always returned in input order, so both modes give identical output.

use std::sync::atomic::{AtomicU8, Ordering};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

const SEQ: u8 = 0;
const PAR: u8 = 1;

static MODE: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { PAR } else { SEQ });

/// Selects the execution mode. `Parallel` is ignored (treated as
/// `Sequential`) when the crate is built without the `parallel` feature.
pub fn set_mode(mode: ExecMode) {
    let v = match mode {
        ExecMode::Parallel if cfg!(feature = "parallel") => PAR,
        _ => SEQ,
    };
    MODE.store(v, Ordering::Relaxed);
}

pub fn mode() -> ExecMode {
    if MODE.load(Ordering::Relaxed) == PAR {
        ExecMode::Parallel
    } else {
        ExecMode::Sequential
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == ExecMode::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving fallible map; the error reported is the one at the
/// smallest index, so it does not depend on scheduling.
pub fn try_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let v: Vec<u64> = (0..1000).collect();
        let out = map(&v, |x| x * x);
        assert_eq!(out, v.iter().map(|x| x * x).collect::<Vec<_>>());
        let r = try_map(&v, |&x| {
            if x % 100 == 7 {
                Err(crate::Error::DomainError(format!("{x}")))
            } else {
                Ok(x)
            }
        });
        assert_eq!(r, Err(crate::Error::DomainError("7".into())));
    }
}
