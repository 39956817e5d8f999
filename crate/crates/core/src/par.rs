//! Order-preserving map that runs on rayon when the `parallel` feature is
//! enabled and `parallel` is requested, and sequentially otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel && items.len() > 1 {
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Whether this build can run in parallel at all.
pub const AVAILABLE: bool = cfg!(feature = "parallel");
