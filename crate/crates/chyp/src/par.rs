//! Execution control for grid sweeps.
//!
//! Every batched operation maps an index range through a pure function and
//! reduces with a fixed-shape pairwise tree, so results are bit-identical in
//! both modes and for any thread count.  The `parallel` feature picks the
//! default mode; both paths are always compiled.

use crate::C64;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Thread count: `CHYP_THREADS` if set and positive, otherwise rayon's
/// default for this machine.
pub fn threads() -> usize {
    match std::env::var("CHYP_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n > 0).unwrap_or_else(|| {
            rayon::current_num_threads()
        }),
        Err(_) => rayon::current_num_threads(),
    }
}

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var("CHYP_THREADS").ok()?.parse::<usize>().ok()?;
        if n == 0 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
    })
    .as_ref()
}

/// Map `0..n` through `f`, preserving index order in the output.
pub fn map_indexed<O, F>(n: usize, mode: ExecMode, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Send + Sync,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        ExecMode::Parallel => {
            use rayon::prelude::*;
            match pool() {
                Some(p) => p.install(|| (0..n).into_par_iter().map(f).collect()),
                None => (0..n).into_par_iter().map(f).collect(),
            }
        }
    }
}

/// Deterministic pairwise-tree sum; independent of chunking/thread count
/// because the tree shape depends only on the slice length.
pub fn tree_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n if n <= 32 => {
            let mut acc = C64::new(0.0, 0.0);
            for x in xs {
                acc += x;
            }
            acc
        }
        n => {
            let mid = n / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}

/// Real-valued tree sum.
pub fn tree_sum_re(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n if n <= 32 => xs.iter().sum(),
        n => {
            let mid = n / 2;
            tree_sum_re(&xs[..mid]) + tree_sum_re(&xs[mid..])
        }
    }
}
