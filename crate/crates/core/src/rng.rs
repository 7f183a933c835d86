//! Counter-based random signs.
//!
//! Every random variable is a pure function of `(seed, index)`, hashed with
//! the SplitMix64 finaliser. Windows can therefore be extended or generated
//! in parallel without changing any value already drawn.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a seed and a lattice index of any dimension.
#[inline]
pub fn key(seed: u64, index: &[i64]) -> u64 {
    index
        .iter()
        .fold(splitmix64(seed), |h, &c| splitmix64(h ^ c as u64))
}

/// Uniform variate in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(seed: u64, index: &[i64]) -> f64 {
    (key(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `+1` with probability `p`, `-1` otherwise.
#[inline]
pub fn sign(seed: u64, p: f64, index: &[i64]) -> f64 {
    if uniform(seed, index) < p {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // first outputs of the SplitMix64 stream seeded with 0
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(GOLDEN), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn endpoints_are_deterministic() {
        for i in -50..50 {
            assert_eq!(sign(7, 1.0, &[i]), 1.0);
            assert_eq!(sign(7, 0.0, &[i]), -1.0);
        }
    }

    #[test]
    fn pure_function_of_seed_and_index() {
        assert_eq!(uniform(3, &[5, -2]), uniform(3, &[5, -2]));
        assert_ne!(uniform(3, &[5, -2]), uniform(3, &[-2, 5]));
        assert_ne!(uniform(3, &[5]), uniform(4, &[5]));
    }

    #[test]
    fn roughly_uniform() {
        let n = 200_000;
        let mean: f64 = (0..n).map(|i| uniform(11, &[i])).sum::<f64>() / n as f64;
        // sd of the mean is 1/sqrt(12 n) ~ 6.5e-4
        assert!((mean - 0.5).abs() < 3e-3, "{mean}");
    }
}
