//! Deterministic fan-out over indexed work items.

use std::num::NonZeroUsize;
use std::thread;

/// Number of worker threads used when the caller does not choose one.
pub fn default_workers() -> usize {
    thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
        .min(16)
}

/// Maps `f` over `0..count` using up to `workers` threads. The output is in index
/// order and does not depend on the number of workers.
pub fn map_indexed<R, F>(count: usize, workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    if workers == 1 {
        return (0..count).map(&f).collect();
    }
    let per = count.div_ceil(workers);
    let f = &f;
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = (w * per).min(count);
                let hi = ((w + 1) * per).min(count);
                scope.spawn(move || (lo..hi).map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_workers() {
        let one = map_indexed(103, 1, |i| i * i);
        for w in [2, 3, 8, 200] {
            assert_eq!(map_indexed(103, w, |i| i * i), one);
        }
        assert!(map_indexed(0, 4, |i| i).is_empty());
    }
}
