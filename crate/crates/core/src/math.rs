//! Small numeric helpers shared across modules: exact binomials, base-2
//! logarithms of big integers, threshold flooring and seeded generators.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Absolute slack used when flooring real-valued thresholds such as `⌊dn⌋`.
///
/// Parameters arrive as decimal fractions (`d = 1/3`, `d = 0.21`) whose binary
/// representation can sit a few ulps below an integer product.
pub const FLOOR_TOLERANCE: f64 = 1e-9;

/// `⌊x · n⌋` for a non-negative real `x`, clamped at zero.
pub fn floor_scaled(x: f64, n: usize) -> usize {
    let v = x * n as f64 + FLOOR_TOLERANCE;
    if v <= 0.0 {
        0
    } else {
        v.floor() as usize
    }
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact factorial.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `log₂(x)` of a big integer; `-∞` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::log2).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64-bit head");
    (top as f64).log2() + shift as f64
}

/// Uniform draw from `[0, bound)` by rejection on the bit length of `bound`.
///
/// # Panics
/// Panics if `bound` is zero.
pub fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "random_below: empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (words as u64 - 1);
    let top_mask: u32 = if top_bits == 32 {
        u32::MAX
    } else {
        (1u32 << top_bits) - 1
    };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        if let Some(last) = digits.last_mut() {
            *last &= top_mask;
        }
        let candidate = BigUint::new(digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// The crate's portable generator: ChaCha20 seeded through
/// `SeedableRng::seed_from_u64`, with an optional stream selector for derived
/// sub-sequences (per-side sampling, per-index audits).
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Pulls one `u64` from a generator; used to derive child seeds.
pub fn derive_seed<R: RngCore>(rng: &mut R) -> u64 {
    rng.next_u64()
}
