//! Config-driven experiment runner over the hyperbolic-filling library:
//! parses experiment configs, fans sweep cells out over a thread pool, and
//! writes deterministic JSON/CSV reports.

pub mod config;
pub mod experiments;
pub mod oracle;
pub mod report;

use std::sync::Once;

static THREAD_POOL: Once = Once::new();

/// Honors HYPERFILL_THREADS as a cap on sweep workers. Safe to call more
/// than once; only the first call configures the pool.
pub fn init_thread_pool() {
    THREAD_POOL.call_once(|| {
        if let Ok(raw) = std::env::var("HYPERFILL_THREADS") {
            if let Ok(n) = raw.parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}
