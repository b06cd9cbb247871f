//! Index-ordered map over independent trials, parallel when `std` is on.

use alloc::vec::Vec;

use crate::error::Result;

/// `f(0), f(1), ..., f(count - 1)` collected in index order.
pub(crate) fn map_indexed<T, F>(count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "std"))]
    {
        (0..count).map(f).collect()
    }
}
