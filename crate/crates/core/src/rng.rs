//! Reproducible random streams.
//!
//! Each stream is a ChaCha8 generator (rand_chacha 0.3). The 256-bit key is
//! four successive SplitMix64 outputs started from
//! `mix64(seed) ^ mix64(replica ^ 0x9E37_79B9_7F4A_7C15)`, and the ChaCha
//! stream id is the [`Role`] code. Streams for different replicas or roles
//! never share state, so replica loops can run in any order or in parallel.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose of a stream; used as the ChaCha stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Moduli = 1,
    Coefficients = 2,
    Test = 99,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    mix64(*state)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, replica: u64, role: Role) -> ChaCha8Rng {
    let mut state = mix64(seed) ^ mix64(replica ^ 0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(role as u64);
    rng
}

/// Uniform variate in the open interval `(0, 1)`: `((x >> 11) + 0.5) · 2^-53`.
/// Neither `u` nor `1 - u` can round to 0 or 1.
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 3, Role::Moduli).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let b = stream(7, 4, Role::Moduli).next_u64();
        let c = stream(7, 3, Role::Coefficients).next_u64();
        let d = stream(8, 3, Role::Moduli).next_u64();
        assert!(a[0] != b && a[0] != c && a[0] != d);
    }

    #[test]
    fn open_unit_stays_inside() {
        let mut r = stream(1, 0, Role::Test);
        for _ in 0..100_000 {
            let u = open_unit(&mut r);
            assert!(u > 0.0 && u < 1.0);
            assert!(1.0 - u > 0.0 && 1.0 - u < 1.0);
        }
    }
}
