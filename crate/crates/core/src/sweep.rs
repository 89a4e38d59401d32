//! Chunked, resumable sweeps over all k-subsets of a small ground set.
//!
//! The colex rank space `[0, C(m, k))` is cut into fixed-length chunks.
//! Chunks are processed in batches by the rayon pool; each chunk folds into a
//! fresh tally and tallies are merged with a commutative reduction, so the
//! result does not depend on scheduling. After each batch the caller gets a
//! [`Checkpoint`] that can be persisted and later resumed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::{binomial, SubsetRange};

/// Per-sweep accumulator. `merge` must be commutative and associative.
pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub universe: u32,
    pub size: u32,
    pub total: u64,
    pub chunk_len: u64,
}

impl SweepPlan {
    pub const DEFAULT_CHUNK: u64 = 1 << 16;

    pub fn new(universe: u32, size: u32) -> Self {
        Self::with_chunk(universe, size, Self::DEFAULT_CHUNK)
    }

    pub fn with_chunk(universe: u32, size: u32, chunk_len: u64) -> Self {
        assert!(universe <= 64 && size <= universe && chunk_len > 0);
        let total = binomial(universe as u64, size as u64);
        assert!(total <= u64::MAX as u128);
        SweepPlan { universe, size, total: total as u64, chunk_len }
    }

    pub fn chunks(&self) -> u64 {
        self.total.div_ceil(self.chunk_len)
    }

    pub fn chunk_start(&self, chunk: u64) -> u64 {
        chunk * self.chunk_len
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint<T> {
    pub plan: SweepPlan,
    /// All chunks before this index are folded into `tally`.
    pub next_chunk: u64,
    pub tally: T,
}

impl<T: Default> Checkpoint<T> {
    pub fn start(plan: SweepPlan) -> Self {
        Checkpoint { plan, next_chunk: 0, tally: T::default() }
    }
}

impl<T> Checkpoint<T> {
    pub fn is_complete(&self) -> bool {
        self.next_chunk >= self.plan.chunks()
    }

    /// Number of subsets folded so far.
    pub fn visited(&self) -> u64 {
        (self.next_chunk * self.plan.chunk_len).min(self.plan.total)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepControl {
    pub batch_chunks: u64,
    /// Stop (incomplete) after this many batches; used to simulate
    /// interrupted campaigns.
    pub halt_after_batches: Option<u64>,
}

impl Default for SweepControl {
    fn default() -> Self {
        SweepControl { batch_chunks: 64, halt_after_batches: None }
    }
}

/// Continues `checkpoint` until complete (or halted), calling `visit` with
/// each subset's colex rank and mask, and `on_batch` after every batch.
pub fn run<T, V, B>(checkpoint: Checkpoint<T>, control: SweepControl, visit: V, on_batch: B) -> Checkpoint<T>
where
    T: Tally,
    V: Fn(&mut T, u64, u64) + Sync,
    B: FnMut(&Checkpoint<T>),
{
    run_until(checkpoint, control, visit, on_batch, |_| false)
}

/// Like [`run`], but also stops after the first batch whose merged tally
/// satisfies `stop`. Batches are taken in rank order, so a tally keeping its
/// lowest-ranked hit holds the global minimum when it stops on that hit.
pub fn run_until<T, V, B, S>(
    mut checkpoint: Checkpoint<T>,
    control: SweepControl,
    visit: V,
    mut on_batch: B,
    stop: S,
) -> Checkpoint<T>
where
    T: Tally,
    V: Fn(&mut T, u64, u64) + Sync,
    B: FnMut(&Checkpoint<T>),
    S: Fn(&T) -> bool,
{
    let plan = checkpoint.plan;
    let chunks = plan.chunks();
    let mut batches = 0;
    while checkpoint.next_chunk < chunks && !stop(&checkpoint.tally) {
        if control.halt_after_batches.is_some_and(|h| batches >= h) {
            break;
        }
        let end = (checkpoint.next_chunk + control.batch_chunks.max(1)).min(chunks);
        let tally = (checkpoint.next_chunk..end)
            .into_par_iter()
            .map(|chunk| {
                let mut t = T::default();
                let start = plan.chunk_start(chunk);
                for (i, mask) in SubsetRange::new(plan.universe, plan.size, start, plan.chunk_len).enumerate() {
                    visit(&mut t, start + i as u64, mask);
                }
                t
            })
            .reduce(T::default, |mut a, b| {
                a.merge(b);
                a
            });
        checkpoint.tally.merge(tally);
        checkpoint.next_chunk = end;
        batches += 1;
        on_batch(&checkpoint);
    }
    checkpoint
}

/// Runs a complete sweep from scratch.
pub fn run_to_completion<T, V>(plan: SweepPlan, visit: V) -> T
where
    T: Tally,
    V: Fn(&mut T, u64, u64) + Sync,
{
    run(Checkpoint::start(plan), SweepControl::default(), visit, |_| {}).tally
}

/// Keeps the lowest-ranked hit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstHit {
    pub hit: Option<(u64, u64)>,
    pub count: u64,
}

impl FirstHit {
    pub fn record(&mut self, rank: u64, mask: u64) {
        self.count += 1;
        if self.hit.is_none_or(|(r, _)| rank < r) {
            self.hit = Some((rank, mask));
        }
    }
}

impl Tally for FirstHit {
    fn merge(&mut self, other: Self) {
        self.count += other.count;
        if let Some((r, m)) = other.hit {
            if self.hit.is_none_or(|(mine, _)| r < mine) {
                self.hit = Some((r, m));
            }
        }
    }
}
