//! Substream derivation for reproducible parallel generation.
//!
//! Every random quantity draws from a ChaCha8 stream keyed by
//! `(master seed, domain tag, indices...)` through a splitmix64 chain.
//! Tap gains for antenna `m` of user `q` come from the stream tagged
//! `(TAP_GAINS, q, m)` in fixed tap order, so generation order across
//! users/antennas/trials never changes the result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DOMAIN_TAP_GAINS: u64 = 1;
pub const DOMAIN_HARDENED: u64 = 2;
pub const DOMAIN_TRIAL: u64 = 3;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent ChaCha8 stream from a master seed and a list
/// of tags identifying the substream.
pub fn derive_stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = seed;
    let _ = splitmix64(&mut state);
    for &tag in tags {
        let mut t = tag.wrapping_add(0x6a09_e667_f3bc_c909);
        state ^= splitmix64(&mut t);
        let _ = splitmix64(&mut state);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// One standard normal pair via Box-Muller.
pub fn standard_normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    use rand::Rng;
    let u1: f64 = loop {
        let u: f64 = rng.gen();
        if u > 1e-300 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}
