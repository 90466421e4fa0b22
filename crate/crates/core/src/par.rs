//! Thin switch between rayon and plain iterators.

macro_rules! if_rayon {
    ($rayon_value: expr, $else_value: expr) => {{
        #[cfg(feature = "parallel")]
        {
            ($rayon_value)
        }
        #[cfg(not(feature = "parallel"))]
        {
            ($else_value)
        }
    }};
}

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if_rayon!(
        items.par_iter().map(&f).collect(),
        items.iter().map(&f).collect()
    )
}

/// Order-preserving map over `0..n`.
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if_rayon!(
        (0..n).into_par_iter().map(&f).collect(),
        (0..n).map(&f).collect()
    )
}
