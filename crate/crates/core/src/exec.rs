//! Task execution seam: experiments describe independent tasks, the caller
//! decides how to run them.

use alloc::vec::Vec;

use crate::rng;

/// Runs `count` independent tasks and returns their results in index order.
pub trait Executor: Sync {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs tasks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(task).collect()
    }
}

/// Seed of task `k` under a base seed. Independent of scheduling.
pub fn task_seed(base: u64, k: usize) -> u64 {
    rng::derive(base, k as u64)
}
