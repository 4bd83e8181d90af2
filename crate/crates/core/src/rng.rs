use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator keyed by `(seed, stream)`.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed `mix(master, sweep, trial)` built from chained splitmix64 rounds.
pub fn mix(master: u64, sweep_index: u64, trial_index: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ sweep_index.wrapping_mul(0xd1b5_4a32_d192_ed03));
    splitmix64(b ^ trial_index.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7))
}
