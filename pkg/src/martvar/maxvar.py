"""Maximal variation V(k, p) on a two-point support by grid concavification.

With ``q`` the probability of the first label, one splitting step gives

    V_t(p) = cav_q [ 2|q - p| + V_{t-1}(q) ] evaluated at p,

and posteriors are restricted to a uniform grid, so every table is a lower
bound on the true supremum. The entropy bound is the matching upper
certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .errors import ConfigError, DomainError
from .martingale import SplittingTree
from .prob_core import Distribution

SUPPORTED_STEPS = (1e-2, 1e-3, 5e-4)
LIMIT_RATIO = math.sqrt(2.0 / math.pi)
BINARY_LABELS = (0, 1)


@dataclass(frozen=True, eq=False)
class ValueTable:
    """Function values on a strictly increasing grid of [0, 1]."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape or grid.ndim != 1:
            raise DomainError("grid and values must be 1-D of equal length")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def index(self, p: float) -> int:
        """Index of the grid point nearest to p."""
        return int(np.argmin(np.abs(self.grid - p)))

    def at(self, p: float) -> float:
        """Value at the nearest grid point."""
        return float(self.values[self.index(p)])

    def interp(self, p) -> np.ndarray:
        return np.interp(p, self.grid, self.values)


@dataclass(frozen=True, eq=False)
class Envelope:
    x: np.ndarray
    values: np.ndarray
    vertices: np.ndarray  # indices of the hull vertices, increasing


def _upper_hull(x: np.ndarray, y: np.ndarray) -> list:
    hull: list = []
    for j in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or below the chord a -> j
            if (x[b] - x[a]) * (y[j] - y[a]) - (y[b] - y[a]) * (x[j] - x[a]) >= 0:
                hull.pop()
            else:
                break
        hull.append(j)
    return hull


def concave_envelope(points: Sequence, y: Sequence | None = None) -> Envelope:
    """Least concave majorant of sampled points, evaluated on the same x.

    Accepts either a sequence of ``(x, y)`` pairs or two arrays.
    """
    if y is None:
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("expected a sequence of (x, y) pairs")
        xs, ys = arr[:, 0], arr[:, 1]
    else:
        xs, ys = np.asarray(points, dtype=float), np.asarray(y, dtype=float)
    if len(xs) < 2:
        raise DomainError("need at least two points")
    if np.any(np.diff(xs) <= 0):
        raise DomainError("x-values must be sorted and distinct")
    hull = np.array(_upper_hull(xs, ys))
    return Envelope(xs, np.interp(xs, xs[hull], ys[hull]), hull)


@numba.njit(cache=True)
def _dp_stage(grid, prev, out):  # pragma: no cover - compiled
    n = grid.shape[0]
    hull = np.empty(n, np.int64)
    f = np.empty(n)
    for ip in range(n):
        p = grid[ip]
        for j in range(n):
            f[j] = 2.0 * abs(grid[j] - p) + prev[j]
        m = 0
        for j in range(n):
            while m >= 2:
                a = hull[m - 2]
                b = hull[m - 1]
                cross = (grid[b] - grid[a]) * (f[j] - f[a]) - (f[b] - f[a]) * (grid[j] - grid[a])
                if cross >= 0:
                    m -= 1
                else:
                    break
            hull[m] = j
            m += 1
        best = f[ip]
        for s in range(m - 1):
            a = hull[s]
            b = hull[s + 1]
            if grid[a] <= p <= grid[b]:
                lam = (grid[b] - p) / (grid[b] - grid[a])
                v = lam * f[a] + (1.0 - lam) * f[b]
                if v > best:
                    best = v
                break
        out[ip] = best


def uniform_grid(cells: int) -> np.ndarray:
    return np.arange(cells + 1) / cells


def maxvar_tables(k: int, cells: int) -> np.ndarray:
    """All stages ``V_0..V_k`` on the grid ``i / cells``; shape (k + 1, cells + 1).

    No restriction on ``cells``: this is the engine behind :func:`maxvar_binary`
    and is also used directly on coarse grids.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if cells < 1:
        raise DomainError("cells must be >= 1")
    grid = uniform_grid(cells)
    tables = np.zeros((k + 1, cells + 1))
    for t in range(1, k + 1):
        _dp_stage(grid, tables[t - 1], tables[t])
    return tables


def _cells_for(h: float) -> int:
    for step in SUPPORTED_STEPS:
        if math.isclose(h, step, rel_tol=1e-9):
            return int(round(1.0 / step))
    raise ConfigError(f"grid step h={h} unsupported; choose one of {SUPPORTED_STEPS}")


def maxvar_binary(k: int, h: float) -> ValueTable:
    """Grid lower bound on V(k, (p, 1-p)) for every grid p."""
    cells = _cells_for(h)
    tables = maxvar_tables(k, cells)
    return ValueTable(uniform_grid(cells), tables[k])


def maxvar_ratio(k: int, h: float) -> float:
    """V(k, (1/2, 1/2)) / sqrt(k) from the grid table."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return maxvar_binary(k, h).at(0.5) / math.sqrt(k)


def entropy_slack(h: float, k: int) -> float:
    """Allowance added to the entropy bound when comparing against grid tables."""
    return 10.0 * h * k


@dataclass(frozen=True, eq=False)
class Witness:
    tree: SplittingTree
    p: float  # grid point actually used
    snapped: bool
    value: float  # table value at p


def _hull_pair(grid: np.ndarray, f: np.ndarray, ip: int) -> tuple[int, int]:
    """Hull vertices (a, b) with grid[a] <= grid[ip] <= grid[b]; leftmost on ties."""
    hull = _upper_hull(grid, f)
    for a, b in zip(hull, hull[1:]):
        if a <= ip <= b:
            return a, b
    return ip, ip


def witness_tree(k: int, p: float, h: float) -> Witness:
    """A depth-k splitting tree whose variation equals the table value at p.

    Each node splits onto the (at most two) hull vertices supporting the
    envelope at its posterior. Subtrees are shared by (grid index, horizon).
    """
    cells = _cells_for(h)
    if not 0.0 <= p <= 1.0:
        raise DomainError("p must lie in [0, 1]")
    grid = uniform_grid(cells)
    tables = maxvar_tables(k, cells)
    ip = int(np.argmin(np.abs(grid - p)))
    snapped = not math.isclose(grid[ip], p, abs_tol=1e-12)
    memo: dict = {}

    def dist(i: int) -> Distribution:
        return Distribution(BINARY_LABELS, np.array([grid[i], 1.0 - grid[i]]))

    def node(i: int, t: int) -> SplittingTree:
        if (i, t) in memo:
            return memo[(i, t)]
        if t == 0:
            out = SplittingTree(dist(i))
        else:
            f = 2.0 * np.abs(grid - grid[i]) + tables[t - 1]
            a, b = _hull_pair(grid, f, i)
            if a == b:
                out = SplittingTree(dist(i), ((1.0, node(i, t - 1)),))
            else:
                lam = (grid[b] - grid[i]) / (grid[b] - grid[a])
                out = SplittingTree(
                    dist(i), ((lam, node(a, t - 1)), (1.0 - lam, node(b, t - 1)))
                )
        memo[(i, t)] = out
        return out

    return Witness(node(ip, k), float(grid[ip]), snapped, float(tables[k][ip]))
