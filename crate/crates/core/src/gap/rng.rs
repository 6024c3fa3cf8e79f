use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step — the standard seed-expansion mixer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the per-trial sub-seed for trial `index` of a run keyed by
/// `master`. Counter-based, so trials are reproducible independently of
/// scheduling order.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut state = master ^ 0x5851_F42D_4C95_7F2D;
    let a = splitmix64(&mut state);
    let mut state2 = a ^ index.wrapping_mul(0xD605_1B49_95B8_F967);
    splitmix64(&mut state2)
}

/// Deterministic stream for one trial.
pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, index))
}
