//! Seedable, splittable randomness.
//!
//! Every experiment in the crate draws from a [`ChaCha8Rng`] derived from a
//! single `u64` seed plus a stream index. Sub-streams are independent, so
//! trials can run in parallel and still merge deterministically by index.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Returns the RNG for sub-stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform big integer in `[0, bound)` by rejection on the top limb.
pub fn random_biguint_below(rng: &mut impl Rng, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "bound must be positive");
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let top_mask: u8 = if bits.is_multiple_of(8) {
        0xff
    } else {
        (1u8 << (bits % 8)) - 1
    };
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill(&mut buf[..]);
        buf[bytes - 1] &= top_mask;
        let candidate = BigUint::from_bytes_le(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}
