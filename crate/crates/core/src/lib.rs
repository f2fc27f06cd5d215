//! Super-rectangular cover analysis and nonnegative space-time block codes
//! for intensity-modulation / direct-detection MIMO links over log-normal
//! fading.
//!
//! The crate is organised around five pieces:
//!
//! * [`cover`]: cover order, cover link, cover lengths and the coding gain
//!   of a positive semidefinite Gram matrix.
//! * [`codebook`]: repetition, optimal linear, zero-cover, collaborative,
//!   Golden and space-time repetition codes, plus Diophantine and PAM
//!   constellations.
//! * [`channel`]: log-normal channel sampling, ML and fast ML detection,
//!   Monte Carlo and semi-analytic error-rate curves.
//! * [`diversity`]: large-scale diversity, small-scale loss, PEP bounds,
//!   curve fitting and constellation energy reports.
//! * [`cli`]: TOML run configurations and artifact writing.

pub mod channel;
pub mod cli;
pub mod codebook;
pub mod cover;
pub mod diversity;
pub mod error;
mod fmt;
pub mod linalg;

pub use error::{Error, Result};
