//! Finite-resolution models of tranched continua in the Hilbert cube.

pub mod curves;
pub mod decomposition;
pub mod depth;
pub mod dynamics;
pub mod error;
pub mod gallery;
pub mod hilbert;
pub mod mahavier;
pub mod scalar;
pub mod symbolic;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

pub type HPoint64 = hilbert::HPoint<f64>;
pub type Cloud64 = hilbert::Cloud<f64>;

/// Caps the global rayon pool from `TRANCHE_LAB_THREADS` when set.
/// Returns the thread count in effect.
pub fn init_thread_pool() -> usize {
    if let Some(n) = std::env::var("TRANCHE_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    rayon::current_num_threads()
}
