//! Small concurrency primitives shared by the local-moving and aggregation
//! engines: an f64 atomic built on `AtomicU64`, a write-only shared slice
//! for disjoint-index parallel writes, and dynamic chunked work loops.

use std::marker::PhantomData;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

/// `f64` with relaxed atomic load/store/add via bit-casting.
pub(crate) struct AtomicF64(AtomicU64);

impl AtomicF64 {
    pub fn new(value: f64) -> Self {
        AtomicF64(AtomicU64::new(value.to_bits()))
    }

    #[inline]
    pub fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub fn store(&self, value: f64) {
        self.0.store(value.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    pub fn fetch_add(&self, delta: f64) {
        let mut current = self.0.load(Ordering::Relaxed);
        loop {
            let next = (f64::from_bits(current) + delta).to_bits();
            match self
                .0
                .compare_exchange_weak(current, next, Ordering::Relaxed, Ordering::Relaxed)
            {
                Ok(_) => return,
                Err(seen) => current = seen,
            }
        }
    }
}

/// Shared mutable slice for parallel writes to disjoint indices.
///
/// Callers must guarantee that no index is written by two threads and that
/// nothing reads the slice while writes are in flight; stages are separated
/// by joins, so each stage sees the previous stage's writes.
#[derive(Clone, Copy)]
pub(crate) struct UnsafeSlice<'a, T> {
    ptr: *mut T,
    len: usize,
    _marker: PhantomData<&'a mut [T]>,
}

unsafe impl<T: Send> Send for UnsafeSlice<'_, T> {}
unsafe impl<T: Send> Sync for UnsafeSlice<'_, T> {}

impl<'a, T> UnsafeSlice<'a, T> {
    pub fn new(slice: &'a mut [T]) -> Self {
        UnsafeSlice {
            ptr: slice.as_mut_ptr(),
            len: slice.len(),
            _marker: PhantomData,
        }
    }

    /// # Safety
    /// `index` must be in bounds and written by at most one thread.
    #[inline]
    pub unsafe fn write(&self, index: usize, value: T) {
        debug_assert!(index < self.len);
        unsafe { *self.ptr.add(index) = value };
    }

    /// # Safety
    /// `index` must be in bounds and not concurrently written by another
    /// thread.
    #[inline]
    pub unsafe fn read(&self, index: usize) -> T
    where
        T: Copy,
    {
        debug_assert!(index < self.len);
        unsafe { *self.ptr.add(index) }
    }
}

/// Runs `body` over `0..n` in dynamically claimed chunks.
///
/// Threads pull `chunk`-sized ranges from a shared cursor, which balances
/// load under skewed degree distributions. With one state — or when the
/// range has no more than one chunk of work, where spawn overhead would
/// dwarf the stage — the loop runs inline on the caller thread in
/// ascending order, giving the deterministic sequential path.
pub(crate) fn par_for_with<S: Send>(
    n: usize,
    chunk: usize,
    states: &mut [S],
    body: impl Fn(&mut S, Range<usize>) + Sync,
) {
    let chunks = n.div_ceil(chunk.max(1));
    if states.len() == 1 || chunks <= 1 {
        body(&mut states[0], 0..n);
        return;
    }
    let workers = states.len().min(chunks);
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for state in states[..workers].iter_mut() {
            let cursor = &cursor;
            let body = &body;
            scope.spawn(move || loop {
                let start = cursor.fetch_add(chunk, Ordering::Relaxed);
                if start >= n {
                    break;
                }
                body(state, start..(start + chunk).min(n));
            });
        }
    });
}

/// Stateless variant of [`par_for_with`].
pub(crate) fn par_for(n: usize, chunk: usize, threads: usize, body: impl Fn(Range<usize>) + Sync) {
    let mut states = vec![(); threads.max(1)];
    par_for_with(n, chunk, &mut states, |_, range| body(range));
}

/// Ranges below this run inline: a cheap per-element stage over fewer
/// elements costs less than spawning a single thread.
const INLINE_BELOW: usize = 1 << 16;

/// Parallel loop for trivial per-element stages (stores, flag resets,
/// counter bumps). Runs inline unless the range is large enough for the
/// spawn overhead to amortize.
pub(crate) fn par_for_light(n: usize, threads: usize, body: impl Fn(Range<usize>) + Sync) {
    if n < INLINE_BELOW {
        body(0..n);
    } else {
        par_for(n, 16384, threads, body);
    }
}
