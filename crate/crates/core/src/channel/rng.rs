//! Counter-based random streams.
//!
//! Every trial gets its own ChaCha8 stream, keyed by the 64-bit run seed
//! and selected by a 64-bit stream number:
//!
//! * channel stream `2^63 | trial`: the channel realisation and the
//!   transmitted codeword index, shared across SNR points;
//! * noise stream `2^62 | point·2^40 | trial`: the receiver noise of one
//!   trial at one SNR point.
//!
//! Results therefore depend only on `(seed, point, trial)` and not on how
//! trials are scheduled over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_TRIALS: u64 = 1 << 40;
pub const MAX_POINTS: usize = 1 << 20;

const CHANNEL_TAG: u64 = 1 << 63;
const NOISE_TAG: u64 = 1 << 62;

pub fn channel_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    debug_assert!(trial < MAX_TRIALS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CHANNEL_TAG | trial);
    rng
}

pub fn noise_rng(seed: u64, point: usize, trial: u64) -> ChaCha8Rng {
    debug_assert!(trial < MAX_TRIALS && point < MAX_POINTS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(NOISE_TAG | (point as u64) << 40 | trial);
    rng
}
