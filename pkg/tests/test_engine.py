"""Tests for the modular indistinguishability engine.

The operator kernels are checked against brute-force homomorphism
tensors, the closure against brute-force class oracles, and the two
integer-level wrappers (randomized primes, deterministic CRT prime set)
against worked examples whose expected values were derived from the
oracles first.
"""

import random

import numpy as np
import pytest

from homind.engine import (
    BlockOps,
    HomTensorPair,
    Verdict,
    apply_A,
    apply_J,
    format_verdict,
    homind_deterministic_crt,
    homind_randomized,
    modhomind,
    modhomind_pw,
    ones_pair,
    schur,
    term_block,
)
from homind.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    hom_count,
    is_isomorphic_small,
    path_graph,
    star_graph,
    walk_counts,
)
from homind.labelled import TApplyA, TApplyJ, TOne, enumerate_tw
from homind.modular import (
    Xoshiro256StarStar,
    bound_pw,
    bound_tw,
    smallest_primes_with_product_exceeding,
)
from homind.oracle import enumerate_graphs_up_to, hom_tensor, paths_oracle
from homind.recognizer import builtin, parse_automaton

from conftest import permuted_copy, random_graph

BIG_PRIME = (1 << 128) - 159

TWO_TRIANGLES = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


# === Operator kernels against brute-force tensors ===


def test_kernels_match_hom_tensors_small():
    """term_block drives a term through the A/J/schur kernels only; the
    result must equal the brute-force homomorphism tensor mod p."""
    bases = enumerate_graphs_up_to(3)
    for k in (1, 2):
        records = enumerate_tw(k, 4, 3)
        for g in bases:
            exact = {}
            for rec in records:
                exact[id(rec)] = hom_tensor(rec.value, g).ravel()
            for p in (2, 97):
                ops = BlockOps(g, k, p)
                for rec in records:
                    got = [int(x) for x in term_block(ops, rec.term)]
                    want = [int(x) % p for x in exact[id(rec)]]
                    assert got == want, (k, g, p, rec.term)


def test_kernels_big_prime_python_path():
    """Moduli at 128 bits leave numpy range and take the big-int path."""
    g = cycle_graph(4)
    ops = BlockOps(g, 2, BIG_PRIME)
    assert not ops.use_numpy
    for rec in enumerate_tw(2, 4, 3):
        got = term_block(ops, rec.term)
        want = [int(x) % BIG_PRIME for x in hom_tensor(rec.value, g).ravel()]
        assert list(got) == want


def test_apply_a_ones_is_adjacency_indicator():
    ops = BlockOps(complete_graph(2), 2, 97)
    masked = ops.apply_a(ops.ones(), 1, 2)
    # flat index x = 2*x_1 + x_2; the two mixed tuples are adjacent
    assert [int(x) for x in masked] == [0, 1, 1, 0]


def test_apply_a_is_idempotent():
    rng = random.Random(11)
    g = random_graph(rng, 5, 0.5)
    ops = BlockOps(g, 2, 101)
    v = ops.from_ints(rng.randrange(101) for _ in range(ops.length))
    once = ops.apply_a(v, 1, 2)
    assert list(ops.apply_a(once, 1, 2)) == list(once)


def test_apply_j_twice_scales_by_n():
    rng = random.Random(12)
    g = random_graph(rng, 5, 0.4)
    p = 103
    ops = BlockOps(g, 2, p)
    v = ops.from_ints(rng.randrange(p) for _ in range(ops.length))
    once = ops.apply_j(v, 2)
    twice = ops.apply_j(once, 2)
    assert list(twice) == [(g.n * int(x)) % p for x in once]


def test_apply_j_constant_result_on_degree_vector():
    """At k = 1, J applied to the degree vector broadcasts 2|E|."""
    g = cycle_graph(5)
    p = 97
    ops = BlockOps(g, 1, p)
    degrees = ops.from_ints(g.degree_sequence())
    out = ops.apply_j(degrees, 1)
    assert list(out) == [(2 * g.m) % p] * g.n


def test_schur_with_ones_is_identity():
    g = path_graph(4)
    ops = BlockOps(g, 2, 89)
    v = ops.from_ints(range(ops.length))
    assert list(ops.schur(v, ops.ones())) == [x % 89 for x in range(ops.length)]


def test_kernel_label_range_errors():
    ops = BlockOps(path_graph(3), 2, 7)
    with pytest.raises(ValueError):
        ops.apply_a(ops.ones(), 2, 1)
    with pytest.raises(ValueError):
        ops.apply_a(ops.ones(), 1, 3)
    with pytest.raises(ValueError):
        ops.apply_j(ops.ones(), 0)
    with pytest.raises(ValueError):
        term_block(ops, TOne(3))


def test_pair_index_spaces_are_exact():
    G, H = path_graph(3), cycle_graph(4)
    pair = ones_pair(G, H, 2, 13)
    assert len(pair.block_g) == 3**2
    assert len(pair.block_h) == 4**2
    with pytest.raises(ValueError):
        HomTensorPair(2, pair.block_g[:5], pair.block_h, 13, pair.ops_g, pair.ops_h)


def test_pair_ops_route_both_blocks():
    G, H = path_graph(3), star_graph(3)
    pair = apply_J(1, apply_A(1, 2, ones_pair(G, H, 2, 101)))
    og, oh = pair.ops_g, pair.ops_h
    assert og.total(pair.block_g) == (2 * G.m * G.n) % 101
    assert oh.total(pair.block_h) == (2 * H.m * H.n) % 101
    with pytest.raises(ValueError):
        schur(pair, ones_pair(G, H, 2, 103))


# === modhomind: closure + small stage ===


def test_isomorphic_pairs_accept_any_prime():
    rng = random.Random(2026)
    aut = builtin("tw-all", 2)
    for trial in range(8):
        g = random_graph(rng, rng.randrange(2, 7), 0.5)
        h = permuted_copy(rng, g)
        p = random.Random(trial).choice([2, 3, 97, 4294967291])
        verdict = modhomind(g, h, aut, p)
        assert verdict.accept, (g, h, p)
        assert verdict.mode == "single-prime"
        assert verdict.primes_used == [p]
        assert verdict.rejecting_prime is None


def test_forest_counts_do_not_separate_c6_from_two_triangles():
    """C_6 and K_3 + K_3 agree on homomorphism counts from every forest,
    so the arity-2 closure accepts them at any prime."""
    aut = builtin("tw-all", 2)
    rng = random.Random(5)
    for _ in range(6):
        p = 4294967291 if rng.random() < 0.3 else rng.choice([3, 5, 101, 65537])
        assert modhomind(cycle_graph(6), TWO_TRIANGLES, aut, p).accept


def test_triangle_counts_separate_c6_from_two_triangles():
    """At arity 3 the small stage compares hom(K_3, -): 0 against 12."""
    aut = builtin("tw-all", 3)
    for G, H in [(cycle_graph(6), TWO_TRIANGLES), (TWO_TRIANGLES, cycle_graph(6))]:
        verdict = modhomind(G, H, aut, 97)
        assert not verdict.accept
        assert verdict.rejecting_prime == 97
        assert verdict.small_stage_witness is not None
        assert is_isomorphic_small(verdict.small_stage_witness, complete_graph(3))
    assert hom_count(complete_graph(3), cycle_graph(6)) == 0
    assert hom_count(complete_graph(3), TWO_TRIANGLES) == 12


def test_small_stage_respects_none_policy():
    text = (
        "k 1\nstates 1\nstart 0\naccept 0\n"
        "glue 0 0 -> 0\nJ 1 0 -> 0\nsmall none\n"
    )
    aut = parse_automaton(text)
    g = path_graph(4)
    verdict = modhomind(g, permuted_copy(random.Random(3), g), aut, 13)
    assert verdict.accept
    assert "small stage skipped" in verdict.notes


def test_small_stage_enumeration_cap():
    aut = builtin("tw-all", 8)
    with pytest.raises(ValueError, match="capped at 7"):
        modhomind(path_graph(2), path_graph(2), aut, 5)


def test_composite_modulus_rejected():
    with pytest.raises(ValueError, match="not prime"):
        modhomind(path_graph(2), path_graph(2), builtin("tw-all", 1), 15)


def test_closure_dimension_bounded_and_counted():
    aut = builtin("tw-all", 2)
    G, H = cycle_graph(6), TWO_TRIANGLES
    stats = {}
    modhomind(G, H, aut, 101, stats=stats)
    assert stats["dim_total"] == stats["inserts"]
    assert stats["dim_total"] <= aut.states * (G.n**2 + H.n**2)


def test_closure_verdict_is_order_independent():
    """Randomizing the worklist pop order changes intermediate bases but
    never the verdict, and the closure span (hence dimension) is
    canonical."""
    fixtures = [
        (cycle_graph(6), TWO_TRIANGLES, builtin("tw-all", 2), 101, modhomind),
        (path_graph(4), star_graph(3), builtin("paths", 2), 10007, modhomind_pw),
    ]
    for G, H, aut, p, decide in fixtures:
        base_stats = {}
        expected = decide(G, H, aut, p, stats=base_stats).accept
        for seed in range(10):
            stats = {}
            rng = Xoshiro256StarStar(seed)
            verdict = decide(G, H, aut, p, order_rng=rng, stats=stats)
            assert verdict.accept == expected
            assert stats["dim_total"] == base_stats["dim_total"]


def test_engine_matches_bruteforce_oracle_on_random_pairs():
    """Arity-2 closure over all graphs == brute force over treewidth <= 1
    members (forests), one extra vertex of headroom on the oracle side."""
    from homind.oracle import homind_bruteforce

    rng = random.Random(99)
    aut = builtin("tw-all", 2)
    for _ in range(6):
        g = random_graph(rng, rng.randrange(2, 6), 0.5)
        h = random_graph(rng, rng.randrange(2, 6), 0.5)
        p = rng.choice([3, 97, 1009])
        want = homind_bruteforce(g, h, "tw<=1", 7, modulus=p).indistinguishable
        got = modhomind(g, h, aut, p).accept
        assert got == want, (g, h, p)


# === modhomind_pw ===


def test_pw_acceptance_implied_by_tw_acceptance():
    """Dropping the glue closure can only lose separating vectors."""
    rng = random.Random(17)
    aut = builtin("tw-all", 2)
    for _ in range(6):
        g = random_graph(rng, rng.randrange(2, 6), 0.5)
        h = random_graph(rng, rng.randrange(2, 6), 0.5)
        p = rng.choice([5, 101])
        if modhomind(g, h, aut, p).accept:
            assert modhomind_pw(g, h, aut, p).accept


def test_paths_engine_agrees_with_paths_oracle():
    aut = builtin("paths", 2)
    pairs = [
        (path_graph(4), star_graph(3)),
        (path_graph(5), cycle_graph(5)),
        (cycle_graph(6), TWO_TRIANGLES),
        (cycle_graph(4), Graph.from_edges(4, [(0, 1), (2, 3)])),
    ]
    rng = random.Random(31)
    for G, H in pairs:
        for _ in range(3):
            p = rng.choice([2, 3, 5, 10007, 4294967291])
            got = modhomind_pw(G, H, aut, p).accept
            want = paths_oracle(G, H, modulus=p)
            assert got == want, (G, H, p)


def test_paths_reject_matches_first_walk_disagreement():
    """P_4 and K_{1,3} first disagree at walks of length 2 (10 vs 12);
    the counts agree mod 2 everywhere but split mod 3."""
    P4, K13 = path_graph(4), star_graph(3)
    wp, wk = walk_counts(P4, 7), walk_counts(K13, 7)
    assert wp[2] == 10 and wk[2] == 12
    assert all(a % 2 == b % 2 for a, b in zip(wp, wk))
    aut = builtin("paths", 2)
    assert modhomind_pw(P4, K13, aut, 2).accept
    assert not modhomind_pw(P4, K13, aut, 3).accept


# === Randomized wrapper ===


def test_randomized_accepts_isomorphic_pairs():
    rng = random.Random(7)
    aut = builtin("tw-all", 1)
    for seed in range(4):
        g = random_graph(rng, 8, 0.5)
        h = permuted_copy(rng, g)
        verdict = homind_randomized(g, h, aut, "tw", seed=seed)
        assert verdict.accept
        assert verdict.mode == "randomized"
        bounds = bound_tw(8, 1, 1)
        for p in verdict.primes_used:
            assert bounds.L < p <= bounds.L**2


def test_randomized_rejects_at_first_prime_found():
    """P_3 vs K_3 differ on hom(K_2, -) = 4 vs 6, caught by the small
    stage at any odd prime; the wrapper must stop at its first prime."""
    aut = builtin("tw-all", 2)
    verdict = homind_randomized(path_graph(3), complete_graph(3), aut, "tw", seed=1)
    assert not verdict.accept
    assert verdict.rejecting_prime == verdict.primes_used[-1]
    assert len(verdict.primes_used) >= 1
    bounds = bound_tw(3, 2, 1)
    assert bounds.L < verdict.rejecting_prime <= bounds.L**2
    again = homind_randomized(path_graph(3), complete_graph(3), aut, "tw", seed=1)
    assert again.rejecting_prime == verdict.rejecting_prime
    assert again.primes_used == verdict.primes_used


def test_randomized_pw_variant_runs():
    g = path_graph(5)
    verdict = homind_randomized(g, permuted_copy(random.Random(2), g),
                                builtin("tw-all", 1), "pw", seed=3)
    assert verdict.accept


def test_randomized_unknown_variant():
    with pytest.raises(ValueError, match="variant"):
        homind_randomized(path_graph(2), path_graph(2), builtin("tw-all", 1), "qq")


# === Deterministic CRT wrapper ===


def test_crt_prime_set_for_worked_example():
    """n = 4, k = 2, one state: N = 33, counts below 4^33 = 2^66, and the
    minimal prime set is the 17 primes up to 59 (16 fall short)."""
    bounds = bound_pw(4, 2, 1)
    assert bounds.N == 33
    primes = smallest_primes_with_product_exceeding(4**33)
    assert len(primes) == 17
    assert primes[-1] == 59
    product = 1
    for p in primes:
        product *= p
    assert product > 4**33
    assert product // 59 <= 4**33


def test_crt_rejects_p4_vs_star():
    verdict = homind_deterministic_crt(path_graph(4), star_graph(3), builtin("paths", 2))
    assert not verdict.accept
    assert verdict.mode == "deterministic-crt"
    assert verdict.rejecting_prime == 3  # counts agree mod 2, split mod 3
    assert verdict.primes_used == [2, 3]


def test_crt_accepts_isomorphic_paths():
    g = path_graph(5)
    h = permuted_copy(random.Random(8), g)
    verdict = homind_deterministic_crt(g, h, builtin("paths", 2))
    assert verdict.accept
    n = 5
    bounds = bound_pw(n, 2, 13)
    primes = smallest_primes_with_product_exceeding(n**bounds.N)
    assert verdict.primes_used == primes


def test_crt_requires_pathwidth_variant():
    with pytest.raises(ValueError, match="pathwidth"):
        homind_deterministic_crt(path_graph(2), path_graph(2),
                                 builtin("tw-all", 1), variant="tw")


def test_crt_prime_budget_error_reports_required_count():
    with pytest.raises(ValueError, match=r"needs \d+ primes"):
        homind_deterministic_crt(path_graph(4), star_graph(3),
                                 builtin("paths", 2), prime_budget=1)


# === Verdict formatting ===


def test_format_verdict_lines():
    text = format_verdict(Verdict(True, "single-prime", [97]))
    assert text.splitlines() == ["verdict=accept", "mode=single-prime",
                                 "prime=97", "witness=none"]
    reject = Verdict(False, "randomized", [5, 11], rejecting_prime=11,
                     small_stage_witness=complete_graph(3))
    lines = format_verdict(reject).splitlines()
    assert lines[0] == "verdict=reject"
    assert "prime=5" in lines and "prime=11" in lines
    assert "rejecting_prime=11" in lines
    assert any(line.startswith("witness=n 3 m 3") for line in lines)
    assert bool(reject) is False
