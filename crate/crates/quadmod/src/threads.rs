//! Thread-count resolution and scoped pools.

use std::num::NonZeroUsize;

use crate::error::CliError;

pub const THREADS_ENV: &str = "QUADMOD_THREADS";

/// `--threads`, else `QUADMOD_THREADS`, else the machine's parallelism.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return positive(n);
    }
    if let Ok(text) = std::env::var(THREADS_ENV) {
        let n = text
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={text:?} is not a thread count")))?;
        return positive(n);
    }
    Ok(std::thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

fn positive(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    Ok(n)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction")
        .install(f)
}
