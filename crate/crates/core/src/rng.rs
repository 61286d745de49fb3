//! Seeded random streams.
//!
//! Every run draws from independent streams keyed by
//! `(master seed, replication, role)`. Roles separate environment noise,
//! adversary draws and algorithm tie-breaking so that changing how often one
//! consumer draws never shifts another consumer's sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Well-known role labels.
pub mod role {
    pub const ENV: &str = "env";
    pub const ADVERSARY: &str = "adv";
    pub const ALGORITHM: &str = "alg";
    pub const INSTANCE: &str = "instance";
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Deterministic stream for `(master_seed, replication, role)`.
pub fn rng_stream(master_seed: u64, replication: u64, role: &str) -> Stream {
    let key = splitmix64(splitmix64(master_seed) ^ splitmix64(replication.wrapping_add(0x5851_f42d)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(fnv1a(role));
    rng
}

/// The three streams a single simulated run consumes.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub env: Stream,
    pub adversary: Stream,
    pub algorithm: Stream,
}

impl RunStreams {
    pub fn new(master_seed: u64, replication: u64) -> Self {
        Self {
            env: rng_stream(master_seed, replication, role::ENV),
            adversary: rng_stream(master_seed, replication, role::ADVERSARY),
            algorithm: rng_stream(master_seed, replication, role::ALGORITHM),
        }
    }
}
