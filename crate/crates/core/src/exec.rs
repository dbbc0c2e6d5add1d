//! Work budgets and the chunk scheduler shared by every enumeration.

/// Default evaluation budget per enumeration.
pub const DEFAULT_BUDGET: u128 = 1 << 40;

/// Enumerations smaller than this always run on the calling thread.
const SEQUENTIAL_CUTOFF: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecConfig {
    /// Worker threads; 0 means all available cores.
    pub workers: usize,
    /// Maximum evaluation steps a single enumeration may take.
    pub budget: u128,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig { workers: 0, budget: DEFAULT_BUDGET }
    }
}

impl ExecConfig {
    pub fn sequential() -> Self {
        ExecConfig { workers: 1, ..Default::default() }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Runs `job` on every chunk index and returns the results in chunk order.
/// `work` is the total number of steps, used only to skip thread dispatch
/// for tiny jobs.
pub fn run_chunks<T, J>(exec: &ExecConfig, chunks: usize, work: u64, job: J) -> Vec<T>
where
    T: Send,
    J: Fn(usize) -> T + Sync + Send,
{
    if exec.workers == 1 || chunks <= 1 || work < SEQUENTIAL_CUTOFF {
        return (0..chunks).map(job).collect();
    }
    parallel::run(exec.workers, chunks, job)
}

#[cfg(feature = "parallel")]
mod parallel {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    use rayon::prelude::*;

    fn pool(workers: usize) -> Arc<rayon::ThreadPool> {
        static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
        let mut pools = POOLS.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap();
        pools
            .entry(workers)
            .or_insert_with(|| {
                Arc::new(rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool"))
            })
            .clone()
    }

    pub fn run<T, J>(workers: usize, chunks: usize, job: J) -> Vec<T>
    where
        T: Send,
        J: Fn(usize) -> T + Sync + Send,
    {
        pool(workers).install(|| (0..chunks).into_par_iter().map(&job).collect())
    }
}

#[cfg(not(feature = "parallel"))]
mod parallel {
    pub fn run<T, J>(_workers: usize, chunks: usize, job: J) -> Vec<T>
    where
        T: Send,
        J: Fn(usize) -> T + Sync + Send,
    {
        (0..chunks).map(job).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_in_chunk_order() {
        for workers in [0, 1, 3] {
            let exec = ExecConfig::default().with_workers(workers);
            let out = run_chunks(&exec, 50, 1 << 20, |i| i * i);
            assert_eq!(out, (0..50).map(|i| i * i).collect::<Vec<_>>());
        }
    }
}
