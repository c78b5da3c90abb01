"""Zero-sum matrix games and repeated games with one informed player."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ..errors import DomainError
from ..prob_core import Distribution, _freeze_label, product_labels, tensor


@dataclass(frozen=True, eq=False)
class MatrixGame:
    """Payoffs from the column player (P2) to the row player (P1)."""

    payoffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.payoffs, dtype=float)
        if a.ndim != 2 or 0 in a.shape:
            raise DomainError("payoff matrix must be a non-empty 2-D array")
        if not np.all(np.isfinite(a)):
            raise DomainError("payoffs must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "payoffs", a)

    @property
    def rows(self) -> int:
        return self.payoffs.shape[0]

    @property
    def cols(self) -> int:
        return self.payoffs.shape[1]


@dataclass(frozen=True, eq=False)
class IncompleteInfoGame:
    """States, a prior known to both players, and one stage game per state.

    ``payoffs[x, i, j]`` is the stage payoff in state ``states[x]``.
    """

    states: tuple
    prior: Distribution
    payoffs: np.ndarray
    row_labels: tuple = field(default=None)
    col_labels: tuple = field(default=None)

    def __post_init__(self):
        states = tuple(self.states)
        g = np.array(self.payoffs, dtype=float)
        if g.ndim != 3 or g.shape[0] != len(states):
            raise DomainError("payoffs must have shape (states, rows, cols)")
        if not np.all(np.isfinite(g)):
            raise DomainError("payoffs must be finite")
        if self.prior.labels != states:
            raise DomainError("prior must be a distribution over the game's states")
        g.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "payoffs", g)
        rows = tuple(range(g.shape[1])) if self.row_labels is None else tuple(self.row_labels)
        cols = tuple(range(g.shape[2])) if self.col_labels is None else tuple(self.col_labels)
        if len(rows) != g.shape[1] or len(cols) != g.shape[2]:
            raise DomainError("action labels do not match the payoff shape")
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)

    @classmethod
    def from_matrices(cls, matrices, prior, states=None) -> "IncompleteInfoGame":
        g = np.array(matrices, dtype=float)
        states = tuple(range(g.shape[0])) if states is None else tuple(states)
        if not isinstance(prior, Distribution):
            prior = Distribution(states, prior)
        return cls(states, prior, g)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.payoffs.shape

    @property
    def stage_games(self) -> list[MatrixGame]:
        return [MatrixGame(g) for g in self.payoffs]

    def with_prior(self, prior) -> "IncompleteInfoGame":
        if not isinstance(prior, Distribution):
            prior = Distribution(self.states, prior)
        return IncompleteInfoGame(self.states, prior, self.payoffs, self.row_labels, self.col_labels)

    def average(self, q) -> MatrixGame:
        """The one-shot game sum_x q(x) G^x."""
        probs = q.probs if isinstance(q, Distribution) else np.asarray(q, dtype=float)
        if isinstance(q, Distribution) and q.labels != self.states:
            raise DomainError("q is not a distribution over the game's states")
        if probs.shape != (len(self.states),):
            raise DomainError("q has the wrong number of states")
        return MatrixGame(np.tensordot(probs, self.payoffs, axes=1))

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "prior": [float(v) for v in self.prior.probs],
            "payoffs": self.payoffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IncompleteInfoGame":
        states = tuple(_freeze_label(s) for s in data["states"])
        prior = data["prior"]
        if isinstance(prior, dict):
            prior = prior["probs"]
        return cls(states, Distribution(states, prior), data["payoffs"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "IncompleteInfoGame":
        return cls.from_dict(json.loads(text))


def game_norm(game) -> float:
    """Largest absolute stage payoff."""
    return float(np.max(np.abs(game.payoffs)))


def zamir_game() -> IncompleteInfoGame:
    """Two states, 2x2 stage games, uniform prior; u is identically zero."""
    g0 = [[3.0, -1.0], [-3.0, 1.0]]
    g1 = [[2.0, -2.0], [-2.0, 2.0]]
    return IncompleteInfoGame.from_matrices([g0, g1], [0.5, 0.5])


def tensor_games(g1: IncompleteInfoGame, g2: IncompleteInfoGame) -> IncompleteInfoGame:
    """Product game where P1 also picks which factor sets the stage payoff.

    P1's actions are the disjoint union of the factors' rows, labelled
    ``(1, i)`` and ``(2, i)``; P2's actions are pairs ``(j1, j2)``.
    """
    n1x, n1i, n1j = g1.shape
    n2x, n2i, n2j = g2.shape
    out = np.empty((n1x * n2x, n1i + n2i, n1j * n2j))
    for x1 in range(n1x):
        for x2 in range(n2x):
            x = x1 * n2x + x2
            # rows of factor 1 ignore j2, rows of factor 2 ignore j1
            out[x, :n1i] = np.repeat(g1.payoffs[x1], n2j, axis=1)
            out[x, n1i:] = np.tile(g2.payoffs[x2], (1, n1j))
    states = product_labels(g1.states, g2.states)
    rows = tuple((1, i) for i in g1.row_labels) + tuple((2, i) for i in g2.row_labels)
    cols = product_labels(g1.col_labels, g2.col_labels)
    return IncompleteInfoGame(states, tensor(g1.prior, g2.prior, states), out, rows, cols)


def tensor_power(game: IncompleteInfoGame, ell: int) -> IncompleteInfoGame:
    if ell < 1:
        raise DomainError("ell must be >= 1")
    return reduce(tensor_games, [game] * ell)


def random_game(rng: np.random.Generator, n_states=2, rows=2, cols=2, scale=5.0) -> IncompleteInfoGame:
    g = rng.uniform(-scale, scale, size=(n_states, rows, cols))
    return IncompleteInfoGame.from_matrices(g, rng.dirichlet(np.ones(n_states)))
