import math

import numpy as np
import pytest

from martvar.errors import UnsupportedError
from martvar.games import (
    IncompleteInfoGame,
    certify_error_term,
    certify_superadditivity,
    error_term_table,
    random_game,
    zamir_game,
)
from martvar.maxvar import entropy_slack, maxvar_binary


def certs_by_kind(report):
    out = {}
    for c in report.certificates:
        out.setdefault(c.name.split("[")[0].rstrip("~"), []).append(c)
    return out


class TestErrorTerm:
    def test_zamir_one_stage(self):
        report = certify_error_term(zamir_game(), 1)
        (row,) = report.rows
        assert not report.approximate and report.method == "exact"
        assert row.v_k == pytest.approx(0.5, abs=1e-8) and row.cav_u == pytest.approx(0.0, abs=1e-9)
        assert row.error_term == pytest.approx(0.5, abs=1e-8)
        assert row.bound_eq4 == pytest.approx(3 * math.sqrt(2 * math.log(2)), abs=1e-12)
        assert row.bound_eq3 == pytest.approx(3 * (1.0 + entropy_slack(1e-2, 1)), abs=1e-9)
        assert all(c.holds for c in report.certificates)
        assert set(certs_by_kind(report)) == {"variation", "logd", "cav_u"}

    def test_information_worthless(self):
        m = [[3.0, 1.0], [0.0, 2.0]]
        g = IncompleteInfoGame.from_matrices([m, m], [0.4, 0.6])
        report = certify_error_term(g, 2, priors=[0.1, 0.4, 0.9])
        for row in report.rows:
            assert abs(row.error_term) <= 1e-8
        assert all(c.holds for c in report.certificates)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_games_hold(self, seed):
        g = random_game(np.random.default_rng(seed), 2, 2, 2)
        report = certify_error_term(g, 2, priors=np.linspace(0, 1, 6))
        bad = [c for c in report.certificates if not c.holds]
        assert bad == []

    def test_over_budget_is_flagged(self):
        report = certify_error_term(zamir_game(), 6, budget=1000)
        assert report.approximate and report.method == "recursive"
        assert all(c.name.split("[")[0].endswith("~") for c in report.certificates)
        assert all(c.holds for c in report.certificates)

    def test_table_uses_grid_bound(self):
        rep = error_term_table(zamir_game(), 3, priors=[0.5])
        want = 3 * (maxvar_binary(3, 1e-2).at(0.5) + entropy_slack(1e-2, 3)) / 3
        assert rep.rows[0].bound_eq3 == pytest.approx(want, abs=1e-12)

    def test_binary_only(self):
        with pytest.raises(UnsupportedError):
            certify_error_term(random_game(np.random.default_rng(0), 3), 1)


class TestSuperadditivity:
    def test_zamir_pair(self):
        c = certify_superadditivity(zamir_game(), zamir_game())
        assert c.lhs == pytest.approx(0.5, abs=1e-8)
        assert c.slack >= -1e-8 and c.holds

    @pytest.mark.parametrize("seed", range(4))
    def test_random_pairs(self, seed):
        rng = np.random.default_rng(40 + seed)
        c = certify_superadditivity(random_game(rng), random_game(rng))
        assert c.slack >= -1e-8
