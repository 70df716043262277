//! Strong structural controllability and related decisions for structured systems.

use std::collections::VecDeque;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{colorability, rank_deficiency_witness, ColorTrace};
use crate::instance::is_member;
use crate::oracle::hautus_check;
use crate::pattern::{weak_relaxation, PatternMatrix, PatternSymbol, StructuredSystem};
use crate::rational::{int, rational_string, Rational, RationalMatrix};

/// Outcome of one colorability condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub holds: bool,
    /// `None` only when the condition was inferred rather than computed.
    pub trace: Option<ColorTrace>,
}

impl Condition {
    fn computed(m: &PatternMatrix) -> Self {
        let (holds, trace) = colorability(m).expect("[A B] is never wider than tall");
        Self {
            holds,
            trace: Some(trace),
        }
    }
}

/// Certificate that some member `(A0, B0)` is uncontrollable: `xᵀ[A0 − λI  B0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncontrollabilityWitness {
    pub a0: RationalMatrix,
    pub b0: RationalMatrix,
    pub lambda: Rational,
    pub x: Vec<Rational>,
}

impl UncontrollabilityWitness {
    /// Exact check: `x ≠ 0`, the Hautus products vanish, and `(A0, B0)` is a member of
    /// the system's pattern class.
    pub fn verify(&self, sys: &StructuredSystem) -> Result<bool> {
        if self.x.iter().all(Zero::is_zero) {
            return Ok(false);
        }
        Ok(is_member(&self.a0, sys.a())?
            && is_member(&self.b0, sys.b())?
            && hautus_check(&self.a0, &self.b0, &self.lambda, &self.x)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub verdict: bool,
    /// Colorability of `G([A B])`.
    pub condition1: Condition,
    /// Colorability of `G([Ā B])`.
    pub condition2: Condition,
    /// No diagonal entry of `A` is zero, so condition 1 follows from condition 2.
    pub shortcut_used: bool,
    pub witness: Option<UncontrollabilityWitness>,
}

#[derive(Serialize)]
struct WitnessMatrices<'a> {
    #[serde(rename = "A0")]
    a0: &'a RationalMatrix,
    #[serde(rename = "B0")]
    b0: &'a RationalMatrix,
}

#[derive(Serialize)]
struct ReportFields<'a> {
    verdict: bool,
    condition1: bool,
    condition2: bool,
    shortcut_used: bool,
    trace1: Option<&'a ColorTrace>,
    trace2: Option<&'a ColorTrace>,
    witness: Option<WitnessMatrices<'a>>,
    lambda: Option<String>,
    x: Option<Vec<String>>,
}

impl Serialize for AnalysisReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let w = self.witness.as_ref();
        ReportFields {
            verdict: self.verdict,
            condition1: self.condition1.holds,
            condition2: self.condition2.holds,
            shortcut_used: self.shortcut_used,
            trace1: self.condition1.trace.as_ref(),
            trace2: self.condition2.trace.as_ref(),
            witness: w.map(|w| WitnessMatrices {
                a0: &w.a0,
                b0: &w.b0,
            }),
            lambda: w.map(|w| rational_string(&w.lambda)),
            x: w.map(|w| w.x.iter().map(rational_string).collect()),
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Compute both traces even when the shortcut makes one unnecessary.
    pub full_traces: bool,
    /// Skip condition 1 when `A` has no zero diagonal entry and condition 2 holds.
    pub allow_shortcut: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            full_traces: false,
            allow_shortcut: true,
        }
    }
}

pub fn strong_controllability(sys: &StructuredSystem) -> AnalysisReport {
    strong_controllability_with(sys, AnalysisOptions::default())
}

pub fn strong_controllability_with(
    sys: &StructuredSystem,
    opts: AnalysisOptions,
) -> AnalysisReport {
    let a = sys.a();
    let no_zero_diagonal = (0..a.rows()).all(|i| !a.get(i, i).is_zero());
    let shortcut_used = opts.allow_shortcut && no_zero_diagonal;

    let condition2 = Condition::computed(&sys.modified_stacked());
    let condition1 = if shortcut_used && condition2.holds && !opts.full_traces {
        Condition {
            holds: true,
            trace: None,
        }
    } else {
        Condition::computed(&sys.stacked())
    };
    let verdict = condition1.holds && condition2.holds;
    let mut report = AnalysisReport {
        verdict,
        condition1,
        condition2,
        shortcut_used,
        witness: None,
    };
    if !verdict {
        report.witness = Some(
            uncontrollability_witness(sys, &report)
                .expect("negative verdicts always admit a witness"),
        );
    }
    report
}

/// Verdict only, without traces or witness.
pub fn is_strongly_controllable(sys: &StructuredSystem) -> bool {
    let a = sys.a();
    let no_zero_diagonal = (0..a.rows()).all(|i| !a.get(i, i).is_zero());
    let colorable = |m: &PatternMatrix| colorability(m).expect("tall pattern").0;
    colorable(&sys.modified_stacked()) && (no_zero_diagonal || colorable(&sys.stacked()))
}

/// Outcome of the strong stabilizability question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizabilityReport {
    pub verdict: bool,
    /// A member with a Hautus failure at a real `λ ≥ 0`, i.e. an uncontrollable mode
    /// that is not asymptotically stable.
    pub unstable_witness: Option<UncontrollabilityWitness>,
}

/// Every member is stabilizable iff every member is controllable. A Hautus failure at
/// `λ < 0` is moved to `−λ > 0` by negating the member, which stays in the class.
pub fn strong_stabilizability(sys: &StructuredSystem) -> StabilizabilityReport {
    let report = strong_controllability(sys);
    let unstable_witness = report.witness.map(|w| {
        if w.lambda >= Rational::zero() {
            w
        } else {
            UncontrollabilityWitness {
                a0: w.a0.neg(),
                b0: w.b0.neg(),
                lambda: -w.lambda,
                x: w.x,
            }
        }
    });
    StabilizabilityReport {
        verdict: report.verdict,
        unstable_witness,
    }
}

fn trace_or_recompute(cond: &Condition, m: &PatternMatrix) -> ColorTrace {
    match &cond.trace {
        Some(t) => t.clone(),
        None => colorability(m).expect("tall pattern").1,
    }
}

/// Builds a concrete uncontrollable member from a negative report.
///
/// A failure of condition 1 gives a Hautus failure at `λ = 0` directly. Otherwise the
/// rank witness of `[Ā B]` is rescaled into `A0 = Ā0·X − αI` with `λ = −α`.
pub fn uncontrollability_witness(
    sys: &StructuredSystem,
    report: &AnalysisReport,
) -> Result<UncontrollabilityWitness> {
    if report.verdict {
        return Err(Error::WitnessUnavailable);
    }
    let n = sys.states();
    if !report.condition1.holds {
        let stacked = sys.stacked();
        let w =
            rank_deficiency_witness(&stacked, &trace_or_recompute(&report.condition1, &stacked))?;
        let (a0, b0) = split_columns(&w.instance, n);
        return Ok(UncontrollabilityWitness {
            a0,
            b0,
            lambda: Rational::zero(),
            x: w.left_null,
        });
    }
    let modified = sys.modified_stacked();
    let w = rank_deficiency_witness(
        &modified,
        &trace_or_recompute(&report.condition2, &modified),
    )?;
    let (abar0, b0) = split_columns(&w.instance, n);
    Ok(witness_from_modified_member(
        sys.a(),
        &abar0,
        b0,
        w.left_null,
    ))
}

/// Turns `xᵀ[Ā0 B0] = 0` with `Ā0 ∈ P(Ā)` into a Hautus failure of a member of `P(A)`.
///
/// `α` is the smallest positive integer different from every `Ā0[i][i]` with
/// `A[i][i] = *`; `X` is diagonal with `X[i][i] = α / Ā0[i][i]` where `A[i][i] = 0` and
/// `1` elsewhere.
pub fn witness_from_modified_member(
    a: &PatternMatrix,
    abar0: &RationalMatrix,
    b0: RationalMatrix,
    x: Vec<Rational>,
) -> UncontrollabilityWitness {
    let n = a.rows();
    let excluded: Vec<&Rational> = (0..n)
        .filter(|&i| a.get(i, i) == PatternSymbol::Nonzero)
        .map(|i| abar0.get(i, i))
        .collect();
    let alpha = (1..)
        .map(int)
        .find(|c| !excluded.contains(&c))
        .expect("finitely many exclusions");
    let mut a0 = abar0.clone();
    for j in 0..n {
        if a.get(j, j).is_zero() {
            let scale = &alpha / abar0.get(j, j);
            for i in 0..n {
                let v = a0.get(i, j) * &scale;
                a0.set(i, j, v);
            }
        }
    }
    let a0 = a0.shift_diagonal(&alpha).expect("square");
    UncontrollabilityWitness {
        a0,
        b0,
        lambda: -alpha,
        x,
    }
}

fn split_columns(m: &RationalMatrix, left: usize) -> (RationalMatrix, RationalMatrix) {
    let rows = |range: std::ops::Range<usize>| {
        (0..m.rows())
            .map(|i| m.row(i)[range.clone()].to_vec())
            .collect::<Vec<_>>()
    };
    let a = RationalMatrix::from_rows(rows(0..left)).expect("rectangular");
    let b = if m.cols() == left {
        RationalMatrix::zeros(m.rows(), 0)
    } else {
        RationalMatrix::from_rows(rows(left..m.cols())).expect("rectangular")
    };
    (a, b)
}

/// Row and column orders bringing `M` into echelon form with `*` pivots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormThreeResult {
    pub is_form3: bool,
    /// `row_perm[k]` is the original (0-based) row placed at position `k`.
    pub row_perm: Vec<usize>,
    /// `col_perm[k]` is the original (0-based) column placed at position `k`.
    pub col_perm: Vec<usize>,
}

/// Greedy Form III decomposition: repeatedly take a column whose remaining entries are
/// a single `*` and zeros, and delete that pivot's row and column.
///
/// When successful, `M.permuted(row_perm, col_perm)` has its `k`-th row pivot at column
/// `q − p + k` with only zeros to the right of it.
pub fn form_three(m: &PatternMatrix) -> Result<FormThreeResult> {
    let (p, q) = m.dims();
    if p > q {
        return Err(Error::WideMatrixRequired { rows: p, cols: q });
    }
    let mut row_alive = vec![true; p];
    let mut col_alive = vec![true; q];
    let mut pivots = Vec::with_capacity(p);
    'search: while pivots.len() < p {
        for j in (0..q).filter(|&j| col_alive[j]) {
            let mut star_row = None;
            let mut clean = true;
            for i in (0..p).filter(|&i| row_alive[i]) {
                match m.get(i, j) {
                    PatternSymbol::FixedZero => {}
                    PatternSymbol::Nonzero if star_row.is_none() => star_row = Some(i),
                    _ => {
                        clean = false;
                        break;
                    }
                }
            }
            if let (true, Some(i)) = (clean, star_row) {
                row_alive[i] = false;
                col_alive[j] = false;
                pivots.push((i, j));
                continue 'search;
            }
        }
        break;
    }
    let is_form3 = pivots.len() == p;
    let mut row_perm: Vec<usize> = (0..p).filter(|&i| row_alive[i]).collect();
    row_perm.extend(pivots.iter().rev().map(|&(i, _)| i));
    let mut col_perm: Vec<usize> = (0..q).filter(|&j| col_alive[j]).collect();
    col_perm.extend(pivots.iter().rev().map(|&(_, j)| j));
    Ok(FormThreeResult {
        is_form3,
        row_perm,
        col_perm,
    })
}

/// Weak structural controllability: some member is controllable.
///
/// Decided on the `{0, ?}` relaxation by accessibility of every state from an input
/// and full term rank of `[A' B']`.
pub fn weak_controllability(sys: &StructuredSystem) -> bool {
    let relaxed = StructuredSystem::new(weak_relaxation(sys.a()), weak_relaxation(sys.b()))
        .expect("relaxation keeps shapes");
    let m = relaxed.stacked();
    all_states_reachable(&m, sys.states()) && term_rank(&m) == sys.states()
}

/// Every row node of `G(M)` is reachable from a node `> n` (an input).
fn all_states_reachable(m: &PatternMatrix, n: usize) -> bool {
    let q = m.cols();
    let mut seen = vec![false; q];
    let mut queue: VecDeque<usize> = (n..q).collect();
    for &u in &queue {
        seen[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for (i, s) in seen.iter_mut().enumerate().take(m.rows()) {
            if !m.get(i, u).is_zero() && !*s {
                *s = true;
                queue.push_back(i);
            }
        }
    }
    seen[..n].iter().all(|&s| s)
}

/// Maximum number of non-fixed-zero entries with no two in a row or column, via
/// augmenting paths.
pub fn term_rank(m: &PatternMatrix) -> usize {
    fn augment(
        m: &PatternMatrix,
        row: usize,
        visited: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for j in 0..m.cols() {
            if m.get(row, j).is_zero() || visited[j] {
                continue;
            }
            visited[j] = true;
            if col_match[j].is_none_or(|r| augment(m, r, visited, col_match)) {
                col_match[j] = Some(row);
                return true;
            }
        }
        false
    }
    let mut col_match = vec![None; m.cols()];
    (0..m.rows())
        .filter(|&i| augment(m, i, &mut vec![false; m.cols()], &mut col_match))
        .count()
}
