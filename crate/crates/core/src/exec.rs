//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers dispatch to rayon unless the
//! process-wide strategy has been switched to [`Strategy::Sequential`].
//! Without the feature everything runs on the calling thread.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

/// Strategy currently in effect.
pub fn strategy() -> Strategy {
    if cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed) {
        Strategy::Parallel
    } else {
        Strategy::Sequential
    }
}

/// Select the strategy for subsequent calls. Requesting `Parallel` without
/// the `parallel` feature is a no-op.
pub fn set_strategy(s: Strategy) {
    FORCE_SEQUENTIAL.store(s == Strategy::Sequential, Ordering::Relaxed);
}

/// Run `f` with the given strategy, restoring the previous one afterwards.
pub fn with_strategy<R>(s: Strategy, f: impl FnOnce() -> R) -> R {
    let prev = strategy();
    set_strategy(s);
    let out = f();
    set_strategy(prev);
    out
}

/// `(0..len).map(f).collect()`, possibly in parallel. Output order is preserved.
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Apply `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let par = map_range(100, |i| i * i);
        let seq = with_strategy(Strategy::Sequential, || map_range(100, |i| i * i));
        assert_eq!(par, seq);

        let mut a = vec![0usize; 37];
        for_each_chunk_mut(&mut a, 5, |ci, c| c.iter_mut().for_each(|x| *x = ci));
        assert_eq!(a[36], 7);
    }
}
