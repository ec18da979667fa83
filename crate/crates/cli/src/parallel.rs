//! Deterministic fan-out over precomputed chunks: workers pull chunk indices
//! from an atomic counter, results land in their index slot, and the caller
//! consumes them in index order. Output is therefore identical for any
//! thread count, including 1 (which skips the thread pool entirely).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn run_chunks<C, T, F>(chunks: &[C], threads: usize, f: F) -> Vec<T>
where
    C: Sync,
    T: Send,
    F: Fn(&C) -> T + Sync,
{
    let n = chunks.len();
    let workers = threads.max(1).min(n.max(1));
    if workers <= 1 {
        return chunks.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let result = f(&chunks[i]);
                *slots[i].lock().expect("result slot poisoned") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("result slot poisoned")
                .expect("every chunk index was claimed")
        })
        .collect()
}

/// Worker count from `--threads`, the `HLC_THREADS` environment variable,
/// or 1.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    if let Some(t) = flag {
        return t.max(1);
    }
    std::env::var("HLC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|t| t.max(1))
        .unwrap_or(1)
}
