//! Deterministic RNG substreams.
//!
//! Every source of randomness in a drop gets its own ChaCha stream, derived
//! from the master seed, the drop index, and a stream kind. Two policies run
//! with the same master seed therefore see identical user placements and
//! identical blockage processes (common random numbers), and consuming a
//! variable number of draws from one stream can never perturb another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream carrying the uniform-in-disc user placement draws.
pub const STREAM_PLACEMENT: u64 = 0;
/// Stream consumed only when a scheduler breaks an exact priority tie.
pub const STREAM_TIEBREAK: u64 = 1;
/// Stream for the predictor's additive observation noise.
pub const STREAM_PREDICTION: u64 = 2;
/// First of the per-user blockage streams; user `u` draws from `3 + u`.
pub const STREAM_BLOCKAGE_BASE: u64 = 3;

/// RNG for stream `kind` of drop `drop_index` under `master_seed`.
///
/// The drop index occupies the high half of the ChaCha stream id and the
/// kind the low half, so drops never share a stream no matter how many
/// kinds a future scheduler adds (as long as kinds stay below 2^32).
pub fn stream_rng(master_seed: u64, drop_index: u32, kind: u64) -> ChaCha8Rng {
    debug_assert!(kind < (1 << 32), "stream kind must fit in 32 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((drop_index as u64) << 32) | kind);
    rng
}

/// Blockage stream for user `u` (convenience over [`stream_rng`]).
pub fn blockage_rng(master_seed: u64, drop_index: u32, user: usize) -> ChaCha8Rng {
    stream_rng(master_seed, drop_index, STREAM_BLOCKAGE_BASE + user as u64)
}
