//! Secrecy analysis of artificial-noise-aided directional modulation over
//! random frequency diverse arrays.
//!
//! * [`arraymodel`]: array geometry, phases and steering vectors.
//! * [`freqalloc`]: PA / LFDA / random frequency allocations and their MGFs.
//! * [`beamform`]: null-space artificial noise, Bob's SNR and Eve's SINR.
//! * [`secrecy`]: Monte Carlo ergodic secrecy, closed-form bounds, region averages.
//! * [`powalloc`]: optimal signal/AN power split.
//!
//! Monte Carlo loops run on rayon when the `parallel` feature is enabled
//! (the default); results are identical either way.

pub mod arraymodel;
pub mod beamform;
mod error;
pub mod freqalloc;
pub mod par;
pub mod powalloc;
pub mod secrecy;
pub mod stream;

pub use error::{Error, Result};
