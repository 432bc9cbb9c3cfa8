//! Execution strategy for data-parallel loops.
//!
//! Every parallel entry point in the crate goes through [`Exec`], so results
//! never depend on the strategy: work is split by index and reduced in index
//! order. Without the `parallel` feature, `Exec::Parallel` runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Map `f` over `0..len`, returning results in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..len).map(f).collect(),
            Exec::Parallel => par_map(len, f),
        }
    }

    /// Map over `0..len` in fixed-size chunks; `f` receives the chunk range.
    pub fn map_chunks<T, F>(self, len: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = len.div_ceil(chunk);
        self.map(count, |c| {
            let lo = c * chunk;
            f(lo..(lo + chunk).min(len))
        })
    }

    /// Smallest key over `0..len`; ties resolve to the smallest index.
    pub fn argmin_by_key<K, F>(self, len: usize, f: F) -> Option<(usize, K)>
    where
        K: Ord + Send,
        F: Fn(usize) -> Option<K> + Sync + Send,
    {
        let keys = self.map(len, f);
        let mut best: Option<(usize, K)> = None;
        for (i, k) in keys.into_iter().enumerate() {
            if let Some(k) = k {
                match &best {
                    Some((_, b)) if *b <= k => {}
                    _ => best = Some((i, k)),
                }
            }
        }
        best
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}
