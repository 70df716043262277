//! Concrete members of pattern classes.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pattern::{PatternMatrix, PatternSymbol};
use crate::rational::{int, RationalMatrix};

/// Magnitude bound of sampled values: entries are drawn from `[-10, 10]`.
pub const SAMPLE_BOUND: i64 = 10;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and an index:
/// `mix64(seed ^ mix64(index))`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index))
}

fn nonzero_value(rng: &mut impl Rng) -> i64 {
    let v = rng.random_range(1..=SAMPLE_BOUND);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Returns a deterministic member of `P(m)`.
///
/// `*` entries are uniform over the nonzero integers in `[-10, 10]`; `?` entries are
/// zero with probability 1/3 and otherwise drawn like `*` entries.
pub fn sample_instance(m: &PatternMatrix, seed: u64) -> RationalMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = RationalMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = match m.get(i, j) {
                PatternSymbol::FixedZero => continue,
                PatternSymbol::Nonzero => nonzero_value(&mut rng),
                PatternSymbol::Arbitrary => {
                    if rng.random_ratio(1, 3) {
                        continue;
                    }
                    nonzero_value(&mut rng)
                }
            };
            out.set(i, j, int(v));
        }
    }
    out
}

/// True iff `x` lies in `P(m)`.
pub fn is_member(x: &RationalMatrix, m: &PatternMatrix) -> Result<bool> {
    if x.dims() != m.dims() {
        return Err(Error::DimensionMismatch {
            expected: m.dims(),
            actual: x.dims(),
        });
    }
    Ok(x.entries().iter().zip(m.entries()).all(|(v, s)| match s {
        PatternSymbol::FixedZero => v.is_zero(),
        PatternSymbol::Nonzero => !v.is_zero(),
        PatternSymbol::Arbitrary => true,
    }))
}
