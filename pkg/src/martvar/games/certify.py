"""Error-term and superadditivity certificates for repeated games."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BudgetError, UnsupportedError
from ..maxvar import entropy_slack, maxvar_binary
from ..prob_core import BoundCertificate
from .model import IncompleteInfoGame, game_norm, tensor_games
from .values import (
    DEFAULT_BUDGET,
    cav_u_binary,
    value_exact,
    value_recursive,
)


@dataclass
class ErrorTermRow:
    p: float
    v_k: float
    cav_u: float
    bound_eq3: float
    bound_eq4: float

    @property
    def error_term(self) -> float:
        return self.v_k - self.cav_u


@dataclass
class ErrorTermReport:
    game: IncompleteInfoGame
    k: int
    method: str
    approximate: bool
    rows: list = field(default_factory=list)
    certificates: list = field(default_factory=list)


def _require_binary(game: IncompleteInfoGame) -> None:
    if len(game.states) != 2:
        raise UnsupportedError("error-term certificates need exactly two states")


def bound_variation(game, k: int, p: float, h: float = 1e-2) -> float:
    """||G|| (V(k, p) + grid allowance) / k with V from the grid table."""
    table = maxvar_binary(k, h)
    return game_norm(game) * (float(table.interp(p)) + entropy_slack(h, k)) / k


def bound_logd(game, k: int) -> float:
    return game_norm(game) * math.sqrt(2.0 * math.log(len(game.states)) / k)


def _values(game, k, priors, method, budget, p_grid):
    """v_k at each prior; returns (values, method used, approximate?)."""
    if method == "exact":
        try:
            vals = [value_exact(game.with_prior([p, 1.0 - p]), k, budget).value for p in priors]
            return np.array(vals), "exact", False
        except BudgetError:
            method = "recursive"
    table = value_recursive(game, k, p_grid=p_grid)
    return table.interp(priors), "recursive", True


def error_term_table(
    game: IncompleteInfoGame,
    k: int,
    priors=None,
    method: str = "exact",
    budget: int = DEFAULT_BUDGET,
    h: float = 1e-2,
    p_grid: float = 1e-2,
) -> ErrorTermReport:
    """v_k - cav u next to the variation and log-d bounds on a set of priors.

    The recursion is always flagged approximate; exact values fall back to it
    when the tree exceeds ``budget``.
    """
    _require_binary(game)
    priors = np.asarray([game.prior.probs[0]] if priors is None else priors, dtype=float)
    vals, used, approx = _values(game, k, priors, method, budget, p_grid)
    cav = cav_u_binary(game, p_grid).interp(priors)
    table = maxvar_binary(k, h)
    norm = game_norm(game)
    eq4 = bound_logd(game, k)
    report = ErrorTermReport(game, k, used, approx)
    for p, v, c in zip(priors, vals, cav):
        eq3 = norm * (float(table.interp(p)) + entropy_slack(h, k)) / k
        report.rows.append(ErrorTermRow(float(p), float(v), float(c), eq3, eq4))
    return report


def certify_error_term(
    game: IncompleteInfoGame,
    k: int,
    budget: int = DEFAULT_BUDGET,
    h: float = 1e-2,
    priors=None,
) -> ErrorTermReport:
    """Upper bounds on v_k - cav u and the lower bound v_k >= cav u at each prior."""
    report = error_term_table(game, k, priors, "exact", budget, h)
    tag = "~" if report.approximate else ""
    for row in report.rows:
        at = f"{tag}[p={row.p:.6g}]"
        report.certificates += [
            BoundCertificate("variation" + at, row.error_term, row.bound_eq3),
            BoundCertificate("logd" + at, row.error_term, row.bound_eq4),
            BoundCertificate("cav_u" + at, row.cav_u, row.v_k),
        ]
    return report


def certify_superadditivity(
    g1: IncompleteInfoGame,
    g2: IncompleteInfoGame,
    k1: int = 1,
    k2: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> BoundCertificate:
    """(k1 v1_{k1} + k2 v2_{k2}) / (k1 + k2) <= v_{k1+k2} of the product game.

    Uses the guarantees rather than midpoints: each factor's value is replaced
    by what P2 can hold it to, the product's by what P1 can secure.
    """
    r1 = value_exact(g1, k1, budget)
    r2 = value_exact(g2, k2, budget)
    prod = value_exact(tensor_games(g1, g2), k1 + k2, budget)
    lhs = (k1 * r1.info["p2_guarantee"] + k2 * r2.info["p2_guarantee"]) / (k1 + k2)
    return BoundCertificate(f"superadditivity[{k1},{k2}]", lhs, prod.info["p1_guarantee"])
