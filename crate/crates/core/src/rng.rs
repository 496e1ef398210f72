//! Seeded random streams.
//!
//! Every replication at every grid point of every experiment draws from its
//! own ChaCha8 stream, selected by a [`StreamKey`]. Streams never depend on
//! evaluation order, so sweeps can run in parallel and still reproduce
//! bit-for-bit.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one independent stream under a master seed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub experiment: u64,
    pub replication: u64,
    pub point: u64,
}

impl StreamKey {
    pub fn new(experiment: u64, replication: u64, point: u64) -> Self {
        StreamKey {
            experiment,
            replication,
            point,
        }
    }

    pub fn rng(&self, master_seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(master_seed ^ mix64(self.experiment)));
        rng.set_stream(mix64(self.point.rotate_left(32) ^ mix64(self.replication)));
        rng
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit id for a name (FNV-1a); `std`'s hasher is not stable
/// across releases.
pub fn name_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A Bernoulli draw that always consumes exactly one `u64`, including for
/// `p = 0` and `p = 1`. Simulations rely on this to keep draw positions
/// aligned with slot indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bernoulli {
    threshold: u64,
    always: bool,
}

impl Bernoulli {
    /// `p` must lie in `[0, 1]`; values outside are clamped.
    pub fn new(p: f64) -> Self {
        let p = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
        if p >= 1.0 {
            Bernoulli {
                threshold: u64::MAX,
                always: true,
            }
        } else {
            // 2^64 * p, exact for dyadic p.
            Bernoulli {
                threshold: (p * 18_446_744_073_709_551_616.0) as u64,
                always: false,
            }
        }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> bool {
        let v = rng.next_u64();
        self.always || v < self.threshold
    }
}

/// One Bernoulli draw with success probability `prob`.
pub fn bernoulli<R: RngCore + ?Sized>(prob: f64, rng: &mut R) -> bool {
    Bernoulli::new(prob).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let mut rng = StreamKey::default().rng(1);
        assert!((0..10_000).all(|_| !bernoulli(0.0, &mut rng)));
        assert!((0..10_000).all(|_| bernoulli(1.0, &mut rng)));
    }

    #[test]
    fn law_of_large_numbers() {
        let mut rng = StreamKey::new(3, 0, 0).rng(42);
        let d = Bernoulli::new(0.3);
        let n = 1_000_000;
        let hits = (0..n).filter(|_| d.sample(&mut rng)).count();
        let mean = hits as f64 / n as f64;
        assert!((mean - 0.3).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn draws_consume_one_word_each() {
        let mut a = StreamKey::default().rng(7);
        let mut b = StreamKey::default().rng(7);
        bernoulli(1.0, &mut a);
        bernoulli(0.0, &mut a);
        b.next_u64();
        b.next_u64();
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn streams_are_keyed() {
        let first = |k: StreamKey, seed| k.rng(seed).next_u64();
        let base = StreamKey::new(1, 2, 3);
        assert_eq!(first(base, 9), first(base, 9));
        assert_ne!(first(base, 9), first(base, 10));
        assert_ne!(first(base, 9), first(StreamKey::new(1, 3, 2), 9));
        assert_ne!(first(base, 9), first(StreamKey::new(2, 2, 3), 9));
        assert_eq!(name_id("fig9"), name_id("fig9"));
        assert_ne!(name_id("fig9"), name_id("fig10"));
    }
}
