use num_traits::{One, Zero};

use super::forcing::ColorTrace;
use crate::error::{Error, Result};
use crate::instance::sample_instance;
use crate::pattern::{PatternMatrix, PatternSymbol};
use crate::rational::{int, Rational, RationalMatrix};

/// A member of `P(M)` together with a nonzero vector in its left null space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWitness {
    pub instance: RationalMatrix,
    pub left_null: Vec<Rational>,
}

/// Builds a rank-deficient member of `P(M)` from a stalled coloring.
///
/// Rows left white by `trace` get values whose column sums vanish; the remaining rows
/// are a seed-0 sample. The left null vector is the indicator of the white rows.
pub fn rank_deficiency_witness(m: &PatternMatrix, trace: &ColorTrace) -> Result<RankWitness> {
    let p = m.rows();
    let mut white = vec![true; p];
    for &v in &trace.final_black {
        if v >= 1 && v <= p {
            white[v - 1] = false;
        }
    }
    if !white.iter().any(|&w| w) {
        return Err(Error::WitnessUnavailable);
    }

    let mut instance = sample_instance(m, 0);
    for j in 0..m.cols() {
        let mut stars = Vec::new();
        let mut qmarks = Vec::new();
        for i in (0..p).filter(|&i| white[i]) {
            match m.get(i, j) {
                PatternSymbol::FixedZero => {}
                PatternSymbol::Nonzero => stars.push(i),
                PatternSymbol::Arbitrary => qmarks.push(i),
            }
        }
        for &i in &qmarks {
            instance.set(i, j, Rational::zero());
        }
        match (stars.len(), qmarks.first()) {
            (0, _) => {}
            (1, None) => {
                // a lone `*` in the white rows would have forced its row
                return Err(Error::WitnessUnavailable);
            }
            (k, None) => {
                for &i in &stars[..k - 1] {
                    instance.set(i, j, Rational::one());
                }
                instance.set(stars[k - 1], j, int(1 - k as i64));
            }
            (k, Some(&absorber)) => {
                for &i in &stars {
                    instance.set(i, j, Rational::one());
                }
                instance.set(absorber, j, int(-(k as i64)));
            }
        }
    }
    let left_null = white
        .iter()
        .map(|&w| if w { Rational::one() } else { Rational::zero() })
        .collect();
    Ok(RankWitness {
        instance,
        left_null,
    })
}
