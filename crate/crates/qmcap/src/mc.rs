//! Parallel Monte Carlo and the worker pool.

use std::sync::OnceLock;

use qmcap_core::covariant::{chunk_plan, McEstimate, UcmInfoProblem, UcmSpec, Welford};
use qmcap_core::encode::Ensemble;
use rayon::prelude::*;

/// Shared pool sized by `QMCAP_THREADS` when set, else by rayon's default.
pub fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("QMCAP_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

/// Same samples and result as the serial estimator; chunks run concurrently
/// and are merged in chunk order.
pub fn mc_info_ucm(
    spec: &UcmSpec,
    ensemble: &Ensemble,
    samples: usize,
    seed: u64,
) -> qmcap_core::Result<McEstimate> {
    let problem = UcmInfoProblem::new(spec, ensemble)?;
    let plan = chunk_plan(samples);
    let parts: Vec<Welford> = pool().install(|| {
        plan.par_iter()
            .enumerate()
            .map(|(c, &count)| problem.chunk(seed, c as u64, count))
            .collect()
    });
    Ok(parts.iter().fold(Welford::default(), |a, b| a.merge(b)).into())
}
