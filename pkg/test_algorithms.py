"""Contraction algorithms and their branching policies."""

import math
from collections import Counter
from fractions import Fraction

import pytest

from core.errors import DisconnectedGraphError, GraphError, InvalidCutError, RecursionCapError, UsageError
from core.generators import cycle_graph, generate
from core.graph import Cut, build_graph, cut_value
from core.graph_io import parse_graph
from core.random_source import RandomSource
from services.algorithms import (
    ALGORITHMS,
    RunStats,
    fpz_v1,
    fpz_v2,
    karger_repeated,
    karger_single_run,
    karger_stein,
    optimal_variant,
    run_algorithm,
)
from services.branching import BranchingPolicy, p_n, p_n_exact, tuned_mixture
from services.oracle import brute_force_min_cut
from test_data import DISCONNECTED_4, PLANTED_6, random_instances


# ─── p_n and policies ───────────────────────────────────────────────────────

def test_p_n_examples():
    assert p_n(2) == 0
    assert p_n(4) == 0.5
    assert math.isclose(p_n(100), 0.98)
    assert p_n_exact(5) == Fraction(3, 5)
    with pytest.raises(GraphError):
        p_n(1)


@pytest.mark.parametrize(
    "n, calls, weight",
    [(3, 2, Fraction(0)), (4, 1, Fraction(0)), (5, 1, Fraction(1, 3)), (10, 1, Fraction(6, 8))],
)
def test_tuned_mixture(n, calls, weight):
    assert tuned_mixture(n) == (calls, weight)


@pytest.mark.parametrize("n", range(5, 40))
def test_tuned_mixture_matches_one_or_two_calls(n):
    k, lam = tuned_mixture(n)
    assert k == 1
    assert lam == Fraction(n - 4, n - 2)


@pytest.mark.parametrize("policy", [BranchingPolicy.geometric(), BranchingPolicy.tuned()])
@pytest.mark.parametrize("n", [3, 4, 5, 8, 50])
def test_tuned_policies_have_one_surviving_child_on_average(policy, n):
    assert math.isclose(policy.mean_offspring(n) * p_n(n), 1.0)


def test_offspring_distributions():
    geometric = BranchingPolicy.geometric().offspring_distribution(4, k_max=60)
    assert geometric[1] == 0.5
    assert geometric[2] == 0.25
    assert geometric[3] == 0.125
    assert math.isclose(sum(geometric.values()), 1.0)
    assert BranchingPolicy.tuned().offspring_distribution(4) == {2: 1.0}
    assert BranchingPolicy.tuned().offspring_distribution(3) == {3: 1.0}
    five = BranchingPolicy.tuned().offspring_distribution(5)
    assert math.isclose(five[1], 1 / 3)
    assert math.isclose(five[2], 2 / 3)
    assert BranchingPolicy.fixed(2).offspring_distribution(7) == {2: 1.0}


def test_pinned_mixture():
    policy = BranchingPolicy("lambda_mixture", base_calls=2, weight=0.25)
    assert policy.mixture(9) == (2, 0.25)
    assert math.isclose(policy.mean_offspring(9), 2.75)


@pytest.mark.parametrize("n", [2, 3, 4, 10, 200])
def test_expected_tree_sizes(n):
    assert BranchingPolicy.geometric().expected_calls(n) == pytest.approx((n - 1) ** 2)
    assert BranchingPolicy.tuned().expected_calls(n) == pytest.approx((n - 1) ** 2)
    assert BranchingPolicy.fixed(1).expected_calls(n) == n - 1


def test_observed_tree_sizes_match_the_expected_size():
    g = cycle_graph(8)
    trials = 4_000
    sizes = []
    for t in range(trials):
        stats = RunStats()
        fpz_v1(g, RandomSource(41, (t,)), stats)
        sizes.append(stats.recursive_calls)
    mean = sum(sizes) / trials
    std = math.sqrt(sum((s - mean) ** 2 for s in sizes) / (trials - 1))
    assert abs(mean - 49) <= 4 * std / math.sqrt(trials)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "binomial"},
        {"kind": "fixed"},
        {"kind": "fixed", "base_calls": 0},
        {"kind": "lambda_mixture", "base_calls": 1},
        {"kind": "lambda_mixture", "base_calls": 1, "weight": 1.5},
    ],
)
def test_policy_validation(kwargs):
    with pytest.raises(ValueError):
        BranchingPolicy(**kwargs)


def test_policy_draws_follow_the_mixture():
    rng = RandomSource(17)
    policy = BranchingPolicy.tuned()
    draws = Counter(policy.draw(6, rng) for _ in range(20_000))
    # n = 6: one call w.p. 1/2, two w.p. 1/2
    assert set(draws) == {1, 2}
    assert abs(draws[1] / 20_000 - 0.5) <= 4 * math.sqrt(0.25 / 20_000)


# ─── Karger ─────────────────────────────────────────────────────────────────

def test_karger_on_triangle_always_finds_a_minimum():
    g = cycle_graph(3)
    for seed in range(20):
        assert karger_single_run(g, RandomSource(seed)).value == 2


def test_karger_makes_exactly_n_minus_2_contractions():
    for g in random_instances(10, 4, 12, seed=5):
        stats = RunStats()
        karger_single_run(g, RandomSource(1), stats)
        assert stats.contractions == g.n_original - 2
        assert stats.leaves == 1


def test_two_vertex_graph_is_an_immediate_leaf():
    g = build_graph(2, [(0, 1, 5)])
    for algorithm in (karger_single_run, fpz_v1, fpz_v2, optimal_variant, karger_stein):
        stats = RunStats()
        cut = algorithm(g, RandomSource(0), stats)
        assert cut.value == 5
        assert cut.side == frozenset({0})
        assert stats.root_children == 0
        assert stats.contractions == 0
        assert stats.recursive_calls == 1


def test_karger_repeated_with_one_repetition_is_a_single_run():
    g = random_instances(1, 9, 9, seed=8)[0]
    assert karger_repeated(g, 1, RandomSource(4)) == karger_single_run(g, RandomSource(4))
    with pytest.raises(UsageError):
        karger_repeated(g, 0, RandomSource(4))


def test_karger_repeated_finds_the_cycle_minimum():
    assert karger_repeated(cycle_graph(10), 200, RandomSource(2)).value == 2


def test_karger_repeated_finds_the_planted_cut():
    g = parse_graph(PLANTED_6)
    cut = karger_repeated(g, 50, RandomSource(3))
    assert cut.value == brute_force_min_cut(g).value == 1
    assert cut.side == frozenset({0, 1, 2})


# ─── Karger–Stein ───────────────────────────────────────────────────────────

def test_karger_stein_exhaustive_base_case():
    stats = RunStats()
    cut = karger_stein(cycle_graph(6), RandomSource(0), stats)
    assert cut.value == 2
    assert stats.recursive_calls == 1
    assert stats.contractions == 0


def test_karger_stein_recursion_shape():
    stats = RunStats()
    cut = karger_stein(cycle_graph(32), RandomSource(5), stats)
    assert cut.value == 2
    assert stats.root_children == 2
    assert stats.leaves >= 2
    # 32 -> ceil(32/√2 + 1) = 24 on each of the two branches
    assert stats.contractions >= 2 * (32 - 24)


def test_karger_stein_finds_planted_cut():
    generated = generate("planted", 20, seed=1, sizes=(10, 10), intra=10, inter=1, crossing=2)
    assert karger_stein(generated.graph, RandomSource(9)).value == 2


# ─── FPZ and the tuned variant ──────────────────────────────────────────────

@pytest.mark.parametrize("tag", sorted(ALGORITHMS))
def test_returned_cuts_are_valid_and_never_below_the_minimum(tag):
    for i, g in enumerate(random_instances(200, 4, 10, seed=21)):
        stats = RunStats()
        cut = run_algorithm(tag, g, RandomSource(i), stats)
        assert cut.value == cut_value(g, cut.side)
        assert cut.value >= brute_force_min_cut(g).value
        assert stats.leaves <= stats.recursive_calls
        assert stats.survival_leaves == 0


@pytest.mark.parametrize("tag", ["fpz1", "fpz2", "optimal"])
def test_cycles_only_produce_value_two_leaves(tag):
    g = cycle_graph(9)
    for seed in range(30):
        assert run_algorithm(tag, g, RandomSource(seed)).value == 2


@pytest.mark.parametrize("tag", sorted(ALGORITHMS))
def test_same_seed_same_cut_and_stats(tag):
    g = random_instances(1, 12, 12, seed=13)[0]
    target = brute_force_min_cut(g)
    first, second = RunStats(), RunStats()
    a = run_algorithm(tag, g, RandomSource(77), first, target)
    b = run_algorithm(tag, g, RandomSource(77), second, target)
    assert a == b
    assert a.value == b.value
    assert first == second


def test_survival_counters_stay_consistent():
    g = cycle_graph(10)
    target = Cut(frozenset({0}), 2, 10)
    for seed in range(50):
        stats = RunStats()
        fpz_v1(g, RandomSource(seed), stats, target)
        assert stats.survival_leaves <= stats.leaves <= stats.recursive_calls
        assert stats.top_level_surviving_children <= stats.root_children
        assert stats.contractions == stats.recursive_calls - 1


def test_optimal_variant_branching_at_small_sizes():
    stats = RunStats()
    optimal_variant(cycle_graph(3), RandomSource(0), stats)
    assert stats.root_children == 3
    stats = RunStats()
    optimal_variant(cycle_graph(4), RandomSource(0), stats)
    assert stats.root_children == 2


@pytest.mark.parametrize("algorithm", [fpz_v1, fpz_v2])
def test_root_child_counts_are_geometric(algorithm):
    # n = 4: P[k] = (1/2)^k
    g = cycle_graph(4)
    trials = 8_000
    counts = Counter()
    for t in range(trials):
        stats = RunStats()
        algorithm(g, RandomSource(31, (t,)), stats)
        counts[stats.root_children] += 1
    for k in (1, 2, 3):
        p = 0.5**k
        assert abs(counts[k] / trials - p) <= 4 * math.sqrt(p * (1 - p) / trials)


def test_fpz_v2_repeat_cap():
    with pytest.raises(RecursionCapError):
        fpz_v2(cycle_graph(5), RandomSource(0), repeat_cap=0)


def test_deep_trees_do_not_hit_the_recursion_limit():
    stats = RunStats()
    cut = karger_single_run(cycle_graph(1500), RandomSource(3), stats)
    assert cut.value == 2
    assert stats.recursive_calls == 1499


# ─── Input validation ───────────────────────────────────────────────────────

@pytest.mark.parametrize("tag", sorted(ALGORITHMS))
def test_disconnected_graphs_are_rejected(tag):
    with pytest.raises(DisconnectedGraphError):
        run_algorithm(tag, parse_graph(DISCONNECTED_4), RandomSource(0))


def test_target_must_match_the_vertex_count():
    with pytest.raises(InvalidCutError):
        fpz_v1(cycle_graph(5), RandomSource(0), target=Cut(frozenset({0}), 2, 6))


def test_run_algorithm_rejects_unknown_tags_and_repetitions():
    with pytest.raises(UsageError):
        run_algorithm("gomory-hu", cycle_graph(4), RandomSource(0))
    with pytest.raises(UsageError):
        run_algorithm("fpz1", cycle_graph(4), RandomSource(0), repetitions=0)


def test_run_algorithm_accumulates_stats_over_repetitions():
    stats = RunStats()
    run_algorithm("karger", cycle_graph(7), RandomSource(0), stats, repetitions=4)
    assert stats.contractions == 4 * 5
    assert stats.leaves == 4


def test_run_stats_merge():
    a = RunStats(recursive_calls=3, contractions=2, leaves=1, survival_leaves=1)
    a.merge(RunStats(recursive_calls=1, leaves=1))
    assert a == RunStats(recursive_calls=4, contractions=2, leaves=2, survival_leaves=1)
    assert a.survived
