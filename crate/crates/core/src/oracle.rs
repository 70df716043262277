//! Exact-arithmetic ground truth for pattern-level verdicts.
//!
//! Everything here works on concrete rational matrices: rank by fraction-free
//! elimination, the Kalman controllability test, Hautus certificates, and sampled or
//! enumerated members of a structured system's pattern class.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{find_first, Execution};
use crate::instance::{derive_seed, is_member, sample_instance};
use crate::pattern::{PatternMatrix, PatternSymbol, StructuredSystem};
use crate::rational::{int, Rational, RationalMatrix};

/// Largest number of free (`*` or `?`) entries `exhaustive_small` will enumerate.
pub const MAX_FREE_ENTRIES: usize = 12;

fn bareiss_rank_i128(mut a: Vec<i128>, rows: usize, cols: usize) -> Option<usize> {
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let piv = a[r * cols + c];
        for i in r + 1..rows {
            let f = a[i * cols + c];
            for j in c + 1..cols {
                let v = a[i * cols + j]
                    .checked_mul(piv)?
                    .checked_sub(f.checked_mul(a[r * cols + j])?)?;
                a[i * cols + j] = v / prev;
            }
            a[i * cols + c] = 0;
        }
        prev = piv;
        r += 1;
    }
    Some(r)
}

fn bareiss_rank_big(mut a: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let piv = a[r * cols + c].clone();
        for i in r + 1..rows {
            let f = a[i * cols + c].clone();
            for j in c + 1..cols {
                let v = &a[i * cols + j] * &piv - &f * &a[r * cols + j];
                a[i * cols + j] = v / &prev;
            }
            a[i * cols + c] = BigInt::zero();
        }
        prev = piv;
        r += 1;
    }
    r
}

/// Rank of an integer matrix given row-major; overflow in the fast path falls back to
/// big integers.
fn integer_rank(a: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    let small: Option<Vec<i128>> = a.iter().map(|v| v.to_i64().map(i128::from)).collect();
    if let Some(small) = small {
        if let Some(r) = bareiss_rank_i128(small, rows, cols) {
            return r;
        }
    }
    bareiss_rank_big(a, rows, cols)
}

/// Exact rank. Each row is scaled by the lcm of its denominators, then reduced with
/// fraction-free (Bareiss) elimination.
pub fn rank_exact(x: &RationalMatrix) -> usize {
    let (rows, cols) = x.dims();
    let mut ints = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let row = x.row(i);
        let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        ints.extend(row.iter().map(|v| v.numer() * (&lcm / v.denom())));
    }
    integer_rank(ints, rows, cols)
}

fn check_pair(a: &RationalMatrix, b: &RationalMatrix) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: (a.rows(), b.cols()),
            actual: b.dims(),
        });
    }
    Ok(())
}

fn to_i128(m: &RationalMatrix) -> Option<Vec<i128>> {
    if !m.is_integral() || !m.fits_i64() {
        return None;
    }
    m.entries()
        .iter()
        .map(|v| v.numer().to_i64().map(i128::from))
        .collect()
}

/// Kalman test on integer data; `None` on overflow.
fn kalman_i128(a: &[i128], b: &[i128], n: usize, m: usize) -> Option<bool> {
    let width = n * m;
    let mut ctrb = vec![0i128; n * width];
    let mut block = b.to_vec();
    for k in 0..n {
        for i in 0..n {
            for j in 0..m {
                ctrb[i * width + k * m + j] = block[i * m + j];
            }
        }
        if k + 1 == n {
            break;
        }
        let mut next = vec![0i128; n * m];
        for i in 0..n {
            for l in 0..n {
                let x = a[i * n + l];
                if x == 0 {
                    continue;
                }
                for j in 0..m {
                    next[i * m + j] =
                        next[i * m + j].checked_add(x.checked_mul(block[l * m + j])?)?;
                }
            }
        }
        block = next;
    }
    Some(bareiss_rank_i128(ctrb, n, width)? == n)
}

fn kalman_rational(a: &RationalMatrix, b: &RationalMatrix) -> bool {
    let n = a.rows();
    let mut ctrb = b.clone();
    let mut block = b.clone();
    for _ in 1..n {
        block = a.mul(&block).expect("dimensions checked");
        ctrb = ctrb.hconcat(&block).expect("row counts agree");
    }
    rank_exact(&ctrb) == n
}

/// `rank [B, AB, ..., A^(n-1) B] == n`.
pub fn kalman_controllable(a: &RationalMatrix, b: &RationalMatrix) -> Result<bool> {
    check_pair(a, b)?;
    let (n, m) = (a.rows(), b.cols());
    if let (Some(ai), Some(bi)) = (to_i128(a), to_i128(b)) {
        if let Some(v) = kalman_i128(&ai, &bi, n, m) {
            return Ok(v);
        }
    }
    Ok(kalman_rational(a, b))
}

/// True iff `xᵀ(A − λI) = 0` and `xᵀB = 0`, i.e. `x` certifies that `[A − λI  B]` loses
/// row rank.
pub fn hautus_check(
    a: &RationalMatrix,
    b: &RationalMatrix,
    lambda: &Rational,
    x: &[Rational],
) -> Result<bool> {
    check_pair(a, b)?;
    if x.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let shifted = a.shift_diagonal(lambda)?;
    Ok(shifted.left_mul_vec(x)?.iter().all(Zero::is_zero)
        && b.left_mul_vec(x)?.iter().all(Zero::is_zero))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    MonteCarlo,
    Exhaustive,
}

/// A concrete uncontrollable member of the pattern class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Trial index (Monte Carlo) or assignment index (exhaustive).
    pub index: u64,
    pub a: RationalMatrix,
    pub b: RationalMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub mode: OracleMode,
    pub trials: u64,
    pub counterexample: Option<Counterexample>,
    /// Counterexample presence matches the supplied verdict: none for "controllable",
    /// at least one for "not controllable".
    pub agrees: bool,
}

impl OracleVerdict {
    fn new(
        mode: OracleMode,
        trials: u64,
        counterexample: Option<Counterexample>,
        expected: bool,
    ) -> Self {
        let agrees = counterexample.is_none() == expected;
        Self {
            mode,
            trials,
            counterexample,
            agrees,
        }
    }

    /// Disagreement that no amount of further sampling could explain: a concrete
    /// uncontrollable member of a system judged controllable.
    pub fn contradicts_positive(&self, expected: bool) -> bool {
        expected && self.counterexample.is_some()
    }
}

/// Random members of `P(A) × P(B)` checked with the Kalman test.
#[derive(Debug, Clone)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    /// Pair used as trial 0 instead of a sample.
    pub inject: Option<(RationalMatrix, RationalMatrix)>,
    pub execution: Execution,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            inject: None,
            execution: Execution::default(),
        }
    }

    pub fn inject(mut self, a: RationalMatrix, b: RationalMatrix) -> Self {
        self.inject = Some((a, b));
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// The pair examined at `trial`. Trial `t` samples with
    /// `derive_seed(derive_seed(seed, t), 0)` for A and `..., 1)` for B.
    pub fn trial_pair(
        &self,
        sys: &StructuredSystem,
        trial: u64,
    ) -> (RationalMatrix, RationalMatrix) {
        if trial == 0 {
            if let Some((a, b)) = &self.inject {
                return (a.clone(), b.clone());
            }
        }
        let t = derive_seed(self.seed, trial);
        (
            sample_instance(sys.a(), derive_seed(t, 0)),
            sample_instance(sys.b(), derive_seed(t, 1)),
        )
    }

    /// Runs every trial; the lowest failing trial index is reported.
    pub fn run(&self, sys: &StructuredSystem, pattern_verdict: bool) -> Result<OracleVerdict> {
        if let Some((a, b)) = &self.inject {
            if !is_member(a, sys.a())? || !is_member(b, sys.b())? {
                return Err(Error::NotAMember);
            }
        }
        let hit = find_first(self.execution, self.trials, |t| {
            let (a, b) = self.trial_pair(sys, t);
            !kalman_controllable(&a, &b).expect("members have consistent shapes")
        });
        let counterexample = hit.map(|index| {
            let (a, b) = self.trial_pair(sys, index);
            Counterexample { index, a, b }
        });
        Ok(OracleVerdict::new(
            OracleMode::MonteCarlo,
            self.trials,
            counterexample,
            pattern_verdict,
        ))
    }
}

/// Monte Carlo check without injection.
pub fn monte_carlo_ssc(
    sys: &StructuredSystem,
    trials: u64,
    seed: u64,
    pattern_verdict: bool,
) -> OracleVerdict {
    MonteCarlo::new(trials, seed)
        .run(sys, pattern_verdict)
        .expect("no injected pair to validate")
}

/// Finite value sets for enumerating members: `*` entries range over `star`, `?`
/// entries over `qmark`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueGrid {
    pub star: Vec<Rational>,
    pub qmark: Vec<Rational>,
}

impl ValueGrid {
    /// `*` over the nonzero values of `values`, `?` over `values` plus zero.
    pub fn from_values(values: &[Rational]) -> Self {
        let mut star: Vec<Rational> = Vec::new();
        for v in values {
            if !v.is_zero() && !star.contains(v) {
                star.push(v.clone());
            }
        }
        let mut qmark = vec![Rational::zero()];
        qmark.extend(star.iter().cloned());
        Self { star, qmark }
    }

    fn for_symbol(&self, s: PatternSymbol) -> &[Rational] {
        match s {
            PatternSymbol::Nonzero => &self.star,
            _ => &self.qmark,
        }
    }
}

impl Default for ValueGrid {
    /// `*` ∈ {1, −1, 2, −2}, `?` ∈ {0, 1, −1}.
    fn default() -> Self {
        Self {
            star: vec![int(1), int(-1), int(2), int(-2)],
            qmark: vec![int(0), int(1), int(-1)],
        }
    }
}

/// Free positions of a list of patterns, enumerated in mixed radix with the first
/// position most significant.
struct Enumeration<'a> {
    patterns: Vec<&'a PatternMatrix>,
    positions: Vec<(usize, usize, usize)>,
    values: Vec<&'a [Rational]>,
    total: u64,
}

impl<'a> Enumeration<'a> {
    fn new(patterns: Vec<&'a PatternMatrix>, grid: &'a ValueGrid) -> Result<Self> {
        let mut positions = Vec::new();
        let mut values = Vec::new();
        for (k, p) in patterns.iter().enumerate() {
            for i in 0..p.rows() {
                for j in 0..p.cols() {
                    let s = p.get(i, j);
                    if !s.is_zero() {
                        positions.push((k, i, j));
                        values.push(grid.for_symbol(s));
                    }
                }
            }
        }
        if positions.len() > MAX_FREE_ENTRIES {
            return Err(Error::TooManyFreeEntries {
                count: positions.len(),
                limit: MAX_FREE_ENTRIES,
            });
        }
        let total = values.iter().map(|v| v.len() as u64).product();
        Ok(Self {
            patterns,
            positions,
            values,
            total,
        })
    }

    fn assignment(&self, mut index: u64) -> Vec<RationalMatrix> {
        let mut out: Vec<RationalMatrix> = self
            .patterns
            .iter()
            .map(|p| RationalMatrix::zeros(p.rows(), p.cols()))
            .collect();
        for (pos, vals) in self.positions.iter().zip(&self.values).rev() {
            let radix = vals.len() as u64;
            let v = &vals[(index % radix) as usize];
            index /= radix;
            out[pos.0].set(pos.1, pos.2, v.clone());
        }
        out
    }
}

/// Enumerates every member of `P(A) × P(B)` over `grid` and reports the first
/// uncontrollable one in lexicographic assignment order (free entries of `A` row-major,
/// then of `B`).
pub fn exhaustive_small(
    sys: &StructuredSystem,
    grid: &ValueGrid,
    pattern_verdict: bool,
    execution: Execution,
) -> Result<OracleVerdict> {
    let e = Enumeration::new(vec![sys.a(), sys.b()], grid)?;
    let hit = find_first(execution, e.total, |idx| {
        let mats = e.assignment(idx);
        !kalman_controllable(&mats[0], &mats[1]).expect("shapes follow the patterns")
    });
    let counterexample = hit.map(|index| {
        let mut mats = e.assignment(index);
        let b = mats.pop().expect("two matrices");
        let a = mats.pop().expect("two matrices");
        Counterexample { index, a, b }
    });
    Ok(OracleVerdict::new(
        OracleMode::Exhaustive,
        e.total,
        counterexample,
        pattern_verdict,
    ))
}

/// First member of `P(M)` over `grid` without full row rank, in lexicographic order.
pub fn exhaustive_rank_deficient(
    m: &PatternMatrix,
    grid: &ValueGrid,
    execution: Execution,
) -> Result<Option<RationalMatrix>> {
    let e = Enumeration::new(vec![m], grid)?;
    let full = m.rows();
    let hit = find_first(execution, e.total, |idx| {
        rank_exact(&e.assignment(idx)[0]) < full
    });
    Ok(hit.map(|idx| e.assignment(idx).pop().expect("one matrix")))
}

/// First of `samples` random members of `P(M)` without full row rank. Sample `k` uses
/// `sample_instance(m, derive_seed(seed, k))`.
pub fn sampled_rank_deficient(
    m: &PatternMatrix,
    samples: u64,
    seed: u64,
    execution: Execution,
) -> Option<RationalMatrix> {
    let full = m.rows();
    find_first(execution, samples, |k| {
        rank_exact(&sample_instance(m, derive_seed(seed, k))) < full
    })
    .map(|k| sample_instance(m, derive_seed(seed, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;
    use crate::rational::ratio;

    fn sys(a: &str, b: &str) -> StructuredSystem {
        StructuredSystem::new(parse_pattern(a).unwrap(), parse_pattern(b).unwrap()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_exact(&RationalMatrix::identity(3)), 3);
        assert_eq!(
            rank_exact(&RationalMatrix::from_i64(&[&[1, 1], &[2, 2]])),
            1
        );
        assert_eq!(
            rank_exact(&RationalMatrix::from_i64(&[&[0, 1, 1], &[0, 1, 1]])),
            1
        );
        assert_eq!(rank_exact(&RationalMatrix::zeros(2, 3)), 0);
        let frac = RationalMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(3, 2), int(1)],
        ])
        .unwrap();
        assert_eq!(rank_exact(&frac), 1);
    }

    #[test]
    fn rank_overflow_falls_back() {
        let big = i64::MAX / 3;
        let m = RationalMatrix::from_i64(&[
            &[big, big - 1, 7, 1],
            &[big - 5, big, 3, 2],
            &[big - 7, big - 2, big, 3],
            &[1, 2, 3, big],
        ]);
        let mut a: Vec<i128> = m
            .entries()
            .iter()
            .map(|v| v.numer().to_i128().unwrap())
            .collect();
        a.truncate(16);
        assert!(bareiss_rank_i128(a, 4, 4).is_none());
        assert_eq!(rank_exact(&m), 4);
    }

    #[test]
    fn kalman_examples() {
        let i2 = RationalMatrix::identity(2);
        assert!(kalman_controllable(&RationalMatrix::zeros(2, 2), &i2).unwrap());
        let ones = RationalMatrix::from_i64(&[&[1], &[1]]);
        assert!(!kalman_controllable(&i2, &ones).unwrap());
        assert!(kalman_controllable(&i2, &RationalMatrix::zeros(1, 1)).is_err());
        let shift = RationalMatrix::from_i64(&[&[0, 0], &[1, 0]]);
        let e1 = RationalMatrix::from_i64(&[&[1], &[0]]);
        assert!(kalman_controllable(&shift, &e1).unwrap());
        let half =
            RationalMatrix::from_rows(vec![vec![ratio(1, 2), int(0)], vec![int(1), ratio(1, 3)]])
                .unwrap();
        assert!(kalman_controllable(&half, &e1).unwrap());
    }

    #[test]
    fn hautus_examples() {
        let a0 = RationalMatrix::from_i64(&[&[0, 1], &[0, 1]]);
        let b0 = RationalMatrix::from_i64(&[&[1], &[1]]);
        let x = vec![int(1), int(-1)];
        assert!(!hautus_check(&a0, &b0, &int(1), &x).unwrap());
        assert!(hautus_check(&a0, &b0, &int(0), &x).unwrap());

        let one = |v| RationalMatrix::from_i64(&[&[v]]);
        assert!(hautus_check(&one(0), &one(0), &int(0), &[int(1)]).unwrap());
        assert!(!hautus_check(&one(1), &one(0), &int(0), &[int(1)]).unwrap());
        assert_eq!(
            hautus_check(&one(1), &one(0), &int(0), &[int(0)]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn monte_carlo_zero_b_fails_at_trial_zero() {
        let s = sys("* ?\n0 *", "0\n0");
        let v = monte_carlo_ssc(&s, 10, 7, false);
        assert_eq!(v.counterexample.as_ref().unwrap().index, 0);
        assert!(v.agrees);
    }

    #[test]
    fn monte_carlo_is_schedule_independent() {
        let s = sys("? ? 0\n* ? ?\n0 ? ?", "? 0\n0 0\n0 ?");
        let seq = MonteCarlo::new(300, 11)
            .execution(Execution::Sequential)
            .run(&s, false)
            .unwrap();
        let par = MonteCarlo::new(300, 11)
            .execution(Execution::Parallel)
            .run(&s, false)
            .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn exhaustive_examples() {
        let s = sys("*", "*");
        let v = exhaustive_small(
            &s,
            &ValueGrid::from_values(&[int(1), int(-1)]),
            true,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(v.trials, 4);
        assert!(v.counterexample.is_none() && v.agrees);

        let s = sys("* *\n0 0", "*\n*");
        let v = exhaustive_small(
            &s,
            &ValueGrid::from_values(&[int(1), int(-1)]),
            false,
            Execution::Parallel,
        )
        .unwrap();
        let c = v.counterexample.unwrap();
        assert!(!kalman_controllable(&c.a, &c.b).unwrap());

        let big = sys("* * * *\n* * * *\n* * * *\n* * * *", "*\n0\n0\n0");
        assert!(matches!(
            exhaustive_small(&big, &ValueGrid::default(), true, Execution::Sequential),
            Err(Error::TooManyFreeEntries {
                count: 17,
                limit: 12
            })
        ));
    }

    #[test]
    fn grid_from_values() {
        let g = ValueGrid::from_values(&[int(-1), int(0), int(1)]);
        assert_eq!(g.star, vec![int(-1), int(1)]);
        assert_eq!(g.qmark, vec![int(0), int(-1), int(1)]);
    }
}
