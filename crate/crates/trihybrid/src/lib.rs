//! Link-level simulator for tri-hybrid MIMO transmitters.
//!
//! A tri-hybrid transmitter splits precoding across three stages: a
//! frequency-selective digital precoder, a frequency-flat analog
//! phase-shifter network, and an electromagnetic stage realized here by
//! dynamic metasurface antennas (DMAs) whose per-slot weights obey a
//! Lorentzian constraint. The crate models that transmitter together with
//! six baseline architectures (DMA-only, DMA-digital, fully-analog,
//! partially/fully-connected hybrid, and fully-digital), a wideband
//! geometric channel, per-architecture component-loss/power models, and a
//! Monte Carlo sweep harness that compares spectral and energy efficiency
//! over an input-power grid.

pub mod analog;
pub mod arch;
pub mod channel;
pub mod config;
pub mod covariance;
pub mod digital;
pub mod dma;
pub mod error;
pub mod metrics;
pub mod power;
pub mod precoder;
pub mod sweep;
pub mod waterfill;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;
