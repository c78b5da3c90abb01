"""Acceptance checks, one test per criterion, each at its stated tolerance.

The terminal summary lists one PASS/FAIL line per criterion (see conftest.py).
Run just these with ``pytest tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import time

import numpy as np

import oracles
from martvar.constructions import binary_walk, theorem2_witness, weiss_doubling
from martvar.games import (
    cav_u_binary,
    certify_superadditivity,
    random_game,
    tensor_games,
    u,
    value_exact,
    value_recursive,
    value_recursive_tables,
    zamir_game,
)
from martvar.martingale import (
    bound_entropy,
    bound_logd,
    concat,
    random_tree,
    validate,
    variation,
)
from martvar.maxvar import maxvar_binary, maxvar_ratio, maxvar_tables, witness_tree
from martvar.prob_core import (
    INFINITE_DIVERGENCE,
    Distribution,
    kl_divergence,
    l1_distance,
    pinsker,
    pinsker_variant,
)

SEED = 20261015
WITNESS_FAMILY = [(8, 4), (16, 4), (16, 16), (32, 16), (64, 64)]


def sandwich(tree):
    v = variation(tree)
    return (
        v - (bound_entropy(tree.depth, tree.dist) + 1e-9),
        v - (bound_logd(tree.depth, tree.dist.d) + 1e-9),
    )


def test_variation_bounds_on_random_trees_and_constructions(criterion):
    with criterion(1, "variation <= sqrt(2kH) and sqrt(2k ln d)") as c:
        t0 = time.perf_counter()
        rng = np.random.default_rng(SEED)
        worst = -math.inf
        for _ in range(10_000):
            t = random_tree(rng, int(rng.integers(1, 9)), int(rng.integers(0, 7)))
            assert validate(t) == []
            worst = max(worst, *sandwich(t))
        constructions = [weiss_doubling(ell) for ell in range(1, 13)]
        constructions += [binary_walk(100, 0.5, 0.1), binary_walk(50, 0.3, 0.05), binary_walk(30, 0.5, 0.5)]
        constructions += [theorem2_witness(k, d) for k, d in WITNESS_FAMILY]
        constructions += [witness_tree(k, 0.5, 1e-2).tree for k in (1, 2, 8)]
        for m in constructions:
            worst = max(worst, *sandwich(m))
        took = time.perf_counter() - t0
        c.detail = f"worst excess {worst:.3g}, {len(constructions)} constructions"
        assert worst <= 0.0
        assert took <= 120.0, f"took {took:.0f}s"


def test_doubling_construction(criterion):
    with criterion(2, "doubling construction has variation ell") as c:
        worst = 0.0
        for ell in range(1, 13):
            t = weiss_doubling(ell)
            worst = max(worst, abs(variation(t) - ell))
            for node in t.nodes():
                for _, child in node.children:
                    assert abs(l1_distance(child.dist, node.dist) - 1.0) <= 1e-12
        c.detail = f"max |V - ell| = {worst:.2g}"
        assert worst <= 1e-9


def test_concatenation_additivity(criterion):
    with criterion(3, "concatenation adds variation") as c:
        rng = np.random.default_rng(SEED + 3)
        worst = 0.0
        for _ in range(1000):
            t1 = random_tree(rng, int(rng.integers(1, 5)), int(rng.integers(0, 4)))
            t2 = random_tree(rng, int(rng.integers(1, 5)), int(rng.integers(0, 4)))
            worst = max(worst, abs(variation(concat(t1, t2)) - variation(t1) - variation(t2)))
        c.detail = f"max error {worst:.2g}"
        assert worst <= 1e-9


def test_witness_floor(criterion):
    with criterion(4, "witness reaches 0.25 sqrt(k ln d)") as c:
        ratios = []
        for k, d in WITNESS_FAMILY:
            m = theorem2_witness(k, d)
            assert validate(m) == []
            ratios.append(variation(m) / math.sqrt(k * math.log(d)))
        c.detail = f"min ratio {min(ratios):.4f}"
        assert min(ratios) >= 0.25


def test_dp_small_k(criterion):
    with criterion(5, "grid DP exact at small k") as c:
        v1 = maxvar_binary(1, 1e-3).at(0.5)
        v2 = maxvar_binary(2, 1e-3).at(0.5)
        assert abs(v1 - 1.0) <= 1e-6
        assert abs(v2 - 1.25) <= 1e-3
        ref = oracles.brute_force_maxvar(2, 200)
        assert np.allclose(maxvar_tables(2, 200), np.array(ref), atol=1e-12)
        assert abs(ref[2][100] - v2) <= 1e-3 and abs(ref[1][100] - v1) <= 1e-6
        c.detail = f"V1={v1!r}, V2={v2!r}"


def test_ratio_limit(criterion):
    with criterion(6, "V(400)/sqrt(400) near sqrt(2/pi)") as c:
        t0 = time.perf_counter()
        r = maxvar_ratio(400, 1e-3)
        took = time.perf_counter() - t0
        c.detail = f"ratio {r:.6f}"
        assert abs(r - 0.797885) <= 0.03
        assert took <= 600.0


def test_zamir_facts(criterion):
    with criterion(7, "Zamir game u, cav u, v_1 and decay of v_k") as c:
        g = zamir_game()
        for q in np.linspace(0, 1, 101):
            assert abs(u(g, [q, 1 - q])) <= 1e-8
        assert np.all(np.abs(cav_u_binary(g).values) <= 1e-8)
        assert abs(value_exact(g, 1).value - 0.5) <= 1e-6
        assert abs(value_recursive(g, 1).at(0.5) - 0.5) <= 1e-6
        v = [t.at(0.5) for t in value_recursive_tables(g, 20)]
        for k, vk in enumerate(v, start=1):
            assert 0 < vk <= 3 * math.sqrt(2 * math.log(2) / k) + 1e-6, k
        steps = np.diff(v)
        assert np.all(steps < 0), f"not strictly decreasing at k={int(np.argmax(steps >= 0)) + 1}"
        c.detail = f"v_20={v[-1]:.5f}, smallest drop {-steps.max():.2g}"


def test_solver_agreement(criterion):
    with criterion(8, "exact LP vs recursion within 5e-3") as c:
        games = [zamir_game()] + [random_game(np.random.default_rng(seed)) for seed in range(10)]
        worst = 0.0
        for g in games:
            assert g.shape == (2, 2, 2)
            tables = value_recursive_tables(g, 3)
            for k, table in enumerate(tables, start=1):
                for p, rec in zip(table.grid, table.values):
                    ex = value_exact(g.with_prior([p, 1.0 - p]), k).value
                    worst = max(worst, abs(ex - rec))
        c.detail = f"max gap {worst:.3g} over {len(games)} games"
        assert worst <= 5e-3


def test_superadditivity(criterion):
    with criterion(9, "v_2(Z x Z) >= (v_1 + v_1) / 2") as c:
        z = zamir_game()
        v1 = value_exact(z, 1).value
        v2 = value_exact(tensor_games(z, z), 2).value
        cert = certify_superadditivity(z, z)
        c.detail = f"v_2={v2!r}, mean v_1={v1!r}"
        assert v2 >= (v1 + v1) / 2 - 1e-8
        assert cert.slack >= -1e-8


def test_pinsker_suites(criterion):
    with criterion(10, "Pinsker inequality and the martingale variant") as c:
        rng = np.random.default_rng(SEED + 10)
        n = 0
        while n < 10_000:
            d = int(rng.integers(2, 9))
            p = Distribution.from_probs(rng.dirichlet(np.full(d, 0.5)))
            q = Distribution.from_probs(rng.dirichlet(np.full(d, 0.5)))
            if kl_divergence(p, q) == INFINITE_DIVERGENCE:
                continue
            assert pinsker(p, q).holds
            n += 1
        for _ in range(10_000):
            m = int(rng.integers(1, 17))
            z = rng.exponential(size=m) * rng.integers(0, 2, size=m)
            assert pinsker_variant(z, rng.dirichlet(np.ones(m))).holds
        c.detail = "2 x 10^4 instances"


def test_verify_all_reproducible(criterion, tmp_path):
    with criterion(11, "verify-all --quick is fast and reproducible") as c:
        texts, took = [], []
        for run in ("a", "b"):
            t0 = time.perf_counter()
            proc = subprocess.run(
                [sys.executable, "-m", "martvar.cli", "--results-dir", str(tmp_path / "results"),
                 "verify-all", "--quick", "--seed", str(SEED), "--out", str(tmp_path / run)],
                capture_output=True,
                text=True,
            )
            took.append(time.perf_counter() - t0)
            assert proc.returncode == 0, proc.stderr
            texts.append(sorted((p.name, p.read_bytes()) for p in (tmp_path / run).glob("*.csv")))
        c.detail = f"runs {took[0]:.0f}s and {took[1]:.0f}s"
        assert texts[0] and texts[0] == texts[1]
        assert max(took) <= 300.0
