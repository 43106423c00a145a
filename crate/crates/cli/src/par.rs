//! Bounded fork-join over slices, capped by the `LENS_THREADS` variable.
//!
//! The computational stages are pure per item (distance rows, per-point
//! classification, display mapping), so a chunked scoped-thread map is all
//! the parallelism the pipeline needs. Results keep input order, making
//! parallel and serial runs byte-identical downstream.

use std::env;
use std::num::NonZeroUsize;
use std::thread;

/// Worker cap: `LENS_THREADS` when set to a positive integer, otherwise the
/// machine's available parallelism (1 if that cannot be determined).
pub fn thread_cap() -> usize {
    if let Ok(v) = env::var("LENS_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

/// Map `f` over `items` in input order, using at most [`thread_cap`] workers.
pub fn pmap<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = thread_cap().min(items.len()).max(1);
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        let mut out = Vec::with_capacity(items.len());
        for h in handles {
            out.extend(h.join().expect("pmap worker panicked"));
        }
        out
    })
}
