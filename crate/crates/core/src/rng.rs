//! Deterministic random streams and the replica runner.
//!
//! Every replica owns one ChaCha8 stream keyed by `(master_seed, replica)`:
//! the master seed fills the key and the replica index selects the 64-bit
//! stream id. ChaCha is counter based, so a replica's draws never depend on
//! which thread ran it or in which order replicas were scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The generator handed to every replica.
pub type ReplicaRng = ChaCha8Rng;

/// Identifies the stream a trajectory was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master: u64,
    pub replica: u64,
}

impl SeedRecord {
    pub fn rng(&self) -> ReplicaRng {
        replica_rng(self.master, self.replica)
    }
}

pub fn replica_rng(master_seed: u64, replica: u64) -> ReplicaRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}

/// Derives an independent master seed for a named sub-experiment.
///
/// Uses FNV-1a over the tag followed by a splitmix64 finaliser, so the
/// mapping is stable across platforms and releases.
pub fn derive_seed(master_seed: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master_seed ^ h)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `replicas` independent jobs in parallel and returns their outputs
/// ordered by replica index.
///
/// Each job receives its own [`ReplicaRng`]. The result is identical for any
/// thread count; aggregation should fold over the returned vector in order.
pub fn run_replicas<R, F>(master_seed: u64, replicas: usize, job: F) -> Vec<R>
where
    R: Send,
    F: Fn(SeedRecord, &mut ReplicaRng) -> R + Sync + Send,
{
    (0..replicas as u64)
        .into_par_iter()
        .map(|replica| {
            let seed = SeedRecord {
                master: master_seed,
                replica,
            };
            let mut rng = seed.rng();
            job(seed, &mut rng)
        })
        .collect()
}

/// Fallible variant of [`run_replicas`]; the error of the lowest failing
/// replica index is returned.
pub fn try_run_replicas<R, E, F>(master_seed: u64, replicas: usize, job: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(SeedRecord, &mut ReplicaRng) -> Result<R, E> + Sync + Send,
{
    run_replicas(master_seed, replicas, job)
        .into_iter()
        .collect()
}

/// Runs `f` on a dedicated pool with `threads` workers (`None` keeps the
/// global pool).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
