use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::sample::Index;

use ssc_core::analysis::{form_three, strong_controllability_with, AnalysisOptions};
use ssc_core::graph::{
    colorability_with_order, loopy_zero_forcing, ordinary_zero_forcing, ForcerOrder, ForcingGraph,
    ForcingRule,
};
use ssc_core::instance::{derive_seed, sample_instance};
use ssc_core::network::{td_conditions, LeaderNetwork};
use ssc_core::oracle::{exhaustive_rank_deficient, ValueGrid};
use ssc_core::{
    colorability, is_member, kalman_controllable, monte_carlo_ssc, rank_deficiency_witness,
    rank_exact, strong_controllability, strong_stabilizability, weak_controllability, Digraph,
    Execution, PatternMatrix, PatternSymbol, Rational, RationalMatrix, StructuredSystem,
};

const SYMBOLS: [PatternSymbol; 3] = [
    PatternSymbol::FixedZero,
    PatternSymbol::Nonzero,
    PatternSymbol::Arbitrary,
];

fn symbol() -> impl Strategy<Value = PatternSymbol> {
    prop::sample::select(SYMBOLS.to_vec())
}

fn pattern(rows: usize, cols: usize) -> impl Strategy<Value = PatternMatrix> {
    prop::collection::vec(symbol(), rows * cols)
        .prop_map(move |e| PatternMatrix::new(rows, cols, e).unwrap())
}

/// `p × q` with `1 ≤ p ≤ q`.
fn tall_pattern(max_p: usize, max_q: usize) -> impl Strategy<Value = PatternMatrix> {
    (1..=max_p)
        .prop_flat_map(move |p| (Just(p), p..=max_q.max(p)))
        .prop_flat_map(|(p, q)| pattern(p, q))
}

fn system(max_n: usize, max_m: usize) -> impl Strategy<Value = StructuredSystem> {
    (1..=max_n, 1..=max_m)
        .prop_flat_map(|(n, m)| (pattern(n, n), pattern(n, m)))
        .prop_map(|(a, b)| StructuredSystem::new(a, b).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn small_int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<Rational>> = v
            .chunks(cols.max(1))
            .take(rows)
            .map(|r| {
                r.iter()
                    .map(|&x| x.into())
                    .map(Rational::from_integer)
                    .collect()
            })
            .collect();
        RationalMatrix::from_rows(rows).unwrap()
    })
}

/// Textbook Gaussian elimination over the rationals.
fn naive_rank(m: &RationalMatrix) -> usize {
    let mut rows: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = &row[col] / &pivot[col];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn check_rank_witness(m: &PatternMatrix) {
    let (colorable, trace) = colorability(m).unwrap();
    trace
        .replay(&ForcingGraph::from_pattern(m), &ForcingRule::any_color())
        .unwrap();
    assert_eq!(form_three(m).unwrap().is_form3, colorable, "{m}");
    if colorable {
        return;
    }
    let w = rank_deficiency_witness(m, &trace).unwrap();
    assert!(is_member(&w.instance, m).unwrap(), "{m}");
    assert!(w.left_null.iter().any(|v| !v.is_zero()));
    assert!(
        w.instance
            .left_mul_vec(&w.left_null)
            .unwrap()
            .iter()
            .all(Zero::is_zero),
        "{m}"
    );
    assert!(rank_exact(&w.instance) < m.rows());
}

fn all_patterns(rows: usize, cols: usize) -> impl Iterator<Item = PatternMatrix> {
    let cells = rows * cols;
    (0..3usize.pow(cells as u32)).map(move |mut code| {
        let mut entries = Vec::with_capacity(cells);
        for _ in 0..cells {
            entries.push(SYMBOLS[code % 3]);
            code /= 3;
        }
        PatternMatrix::new(rows, cols, entries).unwrap()
    })
}

#[test]
fn witness_soundness_exhaustive_2x3() {
    all_patterns(2, 3).for_each(|m| check_rank_witness(&m));
}

#[test]
fn witness_soundness_exhaustive_3x4() {
    all_patterns(3, 4).for_each(|m| check_rank_witness(&m));
}

/// Every black set reachable by some order of legal changes.
fn reachable_all_black(h: &Digraph, leaders: &[usize], forbidden: &BTreeSet<usize>) -> bool {
    let n = h.node_count();
    let full = (1u32 << n) - 1;
    let start = leaders.iter().fold(0u32, |s, &w| s | 1 << (w - 1));
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        if state == full {
            return true;
        }
        for i in 1..=n {
            let white: Vec<usize> = (1..=n)
                .filter(|&j| h.has_edge(i, j) && state >> (j - 1) & 1 == 0)
                .collect();
            if let [j] = white[..] {
                if i == j && forbidden.contains(&i) {
                    continue;
                }
                let next = state | 1 << (j - 1);
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    false
}

fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (1..=n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len()).map(move |mask| {
        Digraph::new(
            n,
            pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e),
        )
        .unwrap()
    })
}

fn leader_sets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |mask| (1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect())
}

#[test]
fn greedy_zero_forcing_matches_order_search_up_to_four_nodes() {
    for n in 1..=4 {
        for h in all_digraphs(n) {
            let looped: BTreeSet<usize> = h.self_loops().collect();
            let star = h.with_all_loops();
            for leaders in leader_sets(n) {
                let net = LeaderNetwork::new(h.clone(), leaders.clone()).unwrap();
                let greedy = td_conditions(&net);
                assert_eq!(
                    greedy.loopy_forcing,
                    reachable_all_black(&h, &leaders, &BTreeSet::new())
                );
                assert_eq!(
                    greedy.no_forbidden_self_change,
                    reachable_all_black(&star, &leaders, &looped)
                );
            }
        }
    }
}

#[test]
fn ordinary_forcing_implies_loopy_forcing() {
    for n in 1..=3 {
        for h in all_digraphs(n).filter(|h| !h.has_self_loops()) {
            for leaders in leader_sets(n) {
                let s: BTreeSet<usize> = leaders.into_iter().collect();
                if ordinary_zero_forcing(&h, &s).unwrap().0 {
                    assert!(loopy_zero_forcing(&h, &s).unwrap().0);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn colorability_is_permutation_invariant(
        (m, rows, cols) in tall_pattern(5, 7).prop_flat_map(|m| {
            let (p, q) = m.dims();
            (Just(m), permutation(p), permutation(q))
        })
    ) {
        let permuted = m.permuted(&rows, &cols);
        prop_assert_eq!(colorability(&m).unwrap().0, colorability(&permuted).unwrap().0);
    }

    #[test]
    fn system_verdict_is_invariant_under_relabelling(
        (sys, states, inputs) in system(4, 2).prop_flat_map(|s| {
            let (n, m) = (s.states(), s.inputs());
            (Just(s), permutation(n), permutation(m))
        })
    ) {
        let relabelled = StructuredSystem::new(
            sys.a().permuted(&states, &states),
            sys.b().permuted(&states, &inputs),
        ).unwrap();
        prop_assert_eq!(strong_controllability(&sys).verdict, strong_controllability(&relabelled).verdict);
    }

    #[test]
    fn qmark_to_star_never_hurts(m in tall_pattern(5, 7), pick in any::<Index>()) {
        let qs: Vec<(usize, usize)> = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .filter(|&(i, j)| m.get(i, j) == PatternSymbol::Arbitrary)
            .collect();
        prop_assume!(!qs.is_empty());
        let (i, j) = qs[pick.index(qs.len())];
        let mut tightened = m.clone();
        tightened.set(i, j, PatternSymbol::Nonzero);
        if colorability(&m).unwrap().0 {
            prop_assert!(colorability(&tightened).unwrap().0);
        }
    }

    #[test]
    fn verdict_does_not_depend_on_scan_order(
        (m, orders) in tall_pattern(5, 7).prop_flat_map(|m| {
            let q = m.cols();
            (Just(m), prop::collection::vec(permutation(q), 20))
        })
    ) {
        let graph = ForcingGraph::from_pattern(&m);
        let (reference, canonical) = colorability(&m).unwrap();
        for rank in orders {
            let (ok, trace) = colorability_with_order(&m, &ForcerOrder::Ranked(rank)).unwrap();
            prop_assert_eq!(ok, reference);
            prop_assert_eq!(&trace.final_black, &canonical.final_black);
            prop_assert!(trace.replay(&graph, &ForcingRule::any_color()).is_ok());
        }
    }

    #[test]
    fn exact_rank_matches_textbook_elimination(m in (1usize..5, 1usize..6).prop_flat_map(|(r, c)| small_int_matrix(r, c))) {
        prop_assert_eq!(rank_exact(&m), naive_rank(&m));
    }

    #[test]
    fn appending_a_row_combination_keeps_rank(
        (m, coeffs) in (1usize..5, 1usize..6)
            .prop_flat_map(|(r, c)| (small_int_matrix(r, c), prop::collection::vec(-4i64..=4, r)))
    ) {
        let mut combo = vec![Rational::zero(); m.cols()];
        for (i, &k) in coeffs.iter().enumerate() {
            for (c, v) in combo.iter_mut().zip(m.row(i)) {
                *c += v * Rational::from_integer(k.into());
            }
        }
        let mut rows: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        rows.push(combo);
        prop_assert_eq!(rank_exact(&RationalMatrix::from_rows(rows).unwrap()), rank_exact(&m));
    }

    #[test]
    fn kalman_is_invariant_under_negating_a(sys in system(4, 2), seed in any::<u64>()) {
        let a = sample_instance(sys.a(), derive_seed(seed, 0));
        let b = sample_instance(sys.b(), derive_seed(seed, 1));
        prop_assert_eq!(kalman_controllable(&a, &b).unwrap(), kalman_controllable(&a.neg(), &b).unwrap());
    }

    #[test]
    fn reports_are_internally_consistent(sys in system(4, 2)) {
        let full = strong_controllability_with(&sys, AnalysisOptions { full_traces: true, allow_shortcut: false });
        let short = strong_controllability(&sys);
        prop_assert_eq!(full.verdict, short.verdict);
        prop_assert_eq!(full.verdict, full.condition1.holds && full.condition2.holds);
        prop_assert_eq!(short.verdict, strong_stabilizability(&sys).verdict);
        if short.shortcut_used {
            prop_assert_eq!(short.verdict, short.condition2.holds);
        }
        match &short.witness {
            Some(w) => prop_assert!(w.verify(&sys).unwrap()),
            None => {
                prop_assert!(weak_controllability(&sys));
                let mc = monte_carlo_ssc(&sys, 10, 1, true);
                prop_assert!(mc.counterexample.is_none(), "{:?}", mc.counterexample);
            }
        }
    }

    #[test]
    fn stabilizability_witness_has_nonnegative_mode(sys in system(4, 2)) {
        let stab = strong_stabilizability(&sys);
        prop_assert_eq!(stab.verdict, stab.unstable_witness.is_none());
        if let Some(w) = stab.unstable_witness {
            prop_assert!(!w.lambda.is_negative());
            prop_assert!(w.verify(&sys).unwrap());
        }
    }
}

/// Full row rank of both `[A B]` and `[Ā B]`, decided member by member rather than by
/// colorability: a verified rank witness refutes it, otherwise random members and (when
/// small enough) the whole value grid must have full row rank.
fn both_blocks_full_rank_by_members(sys: &StructuredSystem, seed: u64) -> bool {
    let grid = ValueGrid::default();
    [sys.stacked(), sys.modified_stacked()].iter().all(|m| {
        let (colorable, trace) = colorability(m).unwrap();
        if !colorable {
            let w = rank_deficiency_witness(m, &trace).unwrap();
            assert!(is_member(&w.instance, m).unwrap());
            return naive_rank(&w.instance) == m.rows();
        }
        let sampled_full =
            (0..10).all(|k| naive_rank(&sample_instance(m, derive_seed(seed, k))) == m.rows());
        let grid_full = m.free_entries() > 6
            || exhaustive_rank_deficient(m, &grid, Execution::Sequential)
                .unwrap()
                .is_none();
        sampled_full && grid_full
    })
}

#[test]
fn colorability_verdict_matches_member_rank_verdict() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for k in 0..10_000u64 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=2);
        let mut draw = |r, c| PatternMatrix::from_fn(r, c, |_, _| SYMBOLS[rng.random_range(0..3)]);
        let sys = StructuredSystem::new(draw(n, n), draw(n, m)).unwrap();
        assert_eq!(
            strong_controllability(&sys).verdict,
            both_blocks_full_rank_by_members(&sys, k),
            "A =\n{}B =\n{}",
            sys.a(),
            sys.b()
        );
    }
}
