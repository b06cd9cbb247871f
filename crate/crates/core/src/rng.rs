//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a ChaCha8 stream keyed by a
//! 64-bit seed plus a 64-bit stream id. ChaCha is counter based, so trial `i`
//! of a benchmark gets its own stream regardless of which worker runs it.

pub use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream 0 of `seed`.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for sub-task `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A uniformly random `n`-bit string, `n <= 64`.
pub fn uniform_bits<R: rand::RngCore + ?Sized>(rng: &mut R, n: usize) -> u64 {
    match n {
        0 => 0,
        64 => rng.next_u64(),
        _ => rng.next_u64() >> (64 - n),
    }
}

/// Uniform double in [0, 1) with 53 random bits.
pub fn unit_f64<R: rand::RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
