"""Values of matrix games and of k-stage repeated games with one informed player."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any

import numba
import numpy as np
from scipy import sparse
from scipy.optimize import linprog as highs

from ..errors import BudgetError, DomainError, SolverError, UnsupportedError
from ..maxvar import ValueTable, concave_envelope, uniform_grid
from ..prob_core import Distribution
from . import simplex
from .model import IncompleteInfoGame, MatrixGame

# the TBB build shipped on some systems is too old for numba and only warns;
# skip it unless the user picked a layer
if not any(v in os.environ for v in ("NUMBA_THREADING_LAYER", "NUMBA_THREADING_LAYER_PRIORITY")):
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

GAP_TOL = 1e-8
DEFAULT_BUDGET = 10**6
# dense tableau cells above which value_exact switches to the sparse HiGHS backend
DENSE_LIMIT = 5_000_000
# continuation grid of the recursion, relative to the returned grid
OVERSAMPLE = 10


@dataclass
class GameValueResult:
    value: float
    p1_strategy: Any
    p2_strategy: Any
    gap: float
    method: str = "lp"
    approximate: bool = False
    info: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.gap <= GAP_TOL


def _matrix_lp(a: np.ndarray, exact: bool):
    # shift to strictly positive payoffs; then max 1.y s.t. A y <= 1 is P2's
    # normalized strategy and the duals give P1's
    shift = 1.0 - float(a.min())
    pos = a + shift
    res = simplex.linprog(-np.ones(a.shape[1]), pos, np.ones(a.shape[0]), exact=exact)
    total = -res.objective
    y = np.clip(res.x, 0.0, None)
    x = np.clip(-res.duals_ub, 0.0, None)
    return x / x.sum(), y / y.sum(), 1.0 / total - shift


def matrix_value(g, exact: bool = False) -> GameValueResult:
    """Value and optimal mixed strategies, certified by best responses."""
    a = g.payoffs if isinstance(g, MatrixGame) else MatrixGame(g).payoffs
    modes = [True] if exact else [False, True]
    gap = math.inf
    for mode in modes:
        x, y, v = _matrix_lp(a, mode)
        lo = float(np.min(x @ a))
        hi = float(np.max(a @ y))
        gap = hi - lo
        if gap <= GAP_TOL and lo >= v - GAP_TOL and hi <= v + GAP_TOL:
            return GameValueResult(v, x, y, max(gap, 0.0), method="exact-lp" if mode else "lp")
    raise SolverError(f"matrix game duality gap {gap:.3g} exceeds {GAP_TOL}")


def u(game: IncompleteInfoGame, q) -> float:
    """Value of the average game sum_x q(x) G^x (the non-revealing value)."""
    return matrix_value(game.average(q)).value


def _binary_check(game: IncompleteInfoGame) -> None:
    if len(game.states) != 2:
        raise UnsupportedError("only two-state games are supported here")


def u_table(game: IncompleteInfoGame, h: float = 1e-2) -> ValueTable:
    """u on the grid of first-state probabilities."""
    _binary_check(game)
    grid = uniform_grid(_cells(h))
    return ValueTable(grid, np.array([u(game, [q, 1.0 - q]) for q in grid]))


def cav_u_binary(game: IncompleteInfoGame, h: float = 1e-2) -> ValueTable:
    """Concave envelope of u sampled on the grid."""
    ut = u_table(game, h)
    return ValueTable(ut.grid, concave_envelope(ut.grid, ut.values).values)


def _cells(h: float) -> int:
    cells = int(round(1.0 / h))
    if cells < 1 or not math.isclose(cells * h, 1.0, rel_tol=1e-9):
        raise DomainError(f"1/h must be an integer, got h={h}")
    return cells


# -- exact k-stage value: sequence-form LP --------------------------------------


class _Triplets:
    """COO accumulator; duplicate entries are summed."""

    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, rows, cols, val):
        rows, cols = np.broadcast_arrays(np.asarray(rows), np.asarray(cols))
        self.rows.append(rows.ravel())
        self.cols.append(cols.ravel())
        self.vals.append(np.broadcast_to(val, rows.shape).ravel())

    def matrix(self, n_rows, n_cols) -> sparse.csr_matrix:
        return sparse.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(n_rows, n_cols),
        ).tocsr()


class _SequenceForm:
    """Index bookkeeping for the k-stage game tree with public actions.

    A public history of length t is an integer ``h < m**t`` (m = |I||J|);
    appending (i, j) gives ``h*m + i*|J| + j``. P1's sequences are
    ``(x, t, h, i)``, P2's are ``(t, h, j)``.
    """

    def __init__(self, game: IncompleteInfoGame, k: int):
        self.nx, self.ni, self.nj = game.shape
        self.k = k
        self.m = self.ni * self.nj
        self.H = [self.m**t for t in range(k)]
        self.off1 = np.cumsum([0] + [self.nx * H * self.ni for H in self.H])
        self.off2 = np.cumsum([0] + [H * self.nj for H in self.H])
        self.offI1 = np.cumsum([0] + [self.nx * H for H in self.H])
        self.offI2 = np.cumsum([0] + list(self.H))
        self.n1, self.n2 = int(self.off1[-1]), int(self.off2[-1])
        self.nI1, self.nI2 = int(self.offI1[-1]), int(self.offI2[-1])
        # coef[x, i, j] = p(x) G^x_ij / k
        self.coef = game.prior.probs[:, None, None] * game.payoffs / k

    def seq1(self, t, x, h, i):
        return self.off1[t] + (x * self.H[t] + h) * self.ni + i

    def seq2(self, t, h, j):
        return self.off2[t] + h * self.nj + j

    def level1(self, r1, t):
        return r1[self.off1[t] : self.off1[t + 1]].reshape(self.nx, self.H[t], self.ni)

    def level2(self, r2, t):
        return r2[self.off2[t] : self.off2[t + 1]].reshape(self.H[t], self.nj)

    def p1_lp(self):
        """max w_root over (r1 >= 0, w free): P2 best-responds via the duals w."""
        n = self.n1 + self.nI2
        c = np.zeros(n)
        c[self.n1] = -1.0
        ub = _Triplets()
        for t in range(self.k):
            H = np.arange(self.H[t])
            for j in range(self.nj):
                rows = self.seq2(t, H, j)
                ub.add(rows, self.n1 + self.offI2[t] + H, 1.0)
                if t + 1 < self.k:
                    for i in range(self.ni):
                        child = H * self.m + i * self.nj + j
                        ub.add(rows, self.n1 + self.offI2[t + 1] + child, -1.0)
                for x in range(self.nx):
                    for i in range(self.ni):
                        ub.add(rows, self.seq1(t, x, H, i), -self.coef[x, i, j])
        eq = _Triplets()
        b_eq = np.zeros(self.nI1)
        for t in range(self.k):
            H = np.arange(self.H[t])
            for x in range(self.nx):
                rows = self.offI1[t] + x * self.H[t] + H
                for i in range(self.ni):
                    eq.add(rows, self.seq1(t, x, H, i), 1.0)
                if t == 0:
                    b_eq[rows] = 1.0
                else:
                    ph, rest = np.divmod(H, self.m)
                    eq.add(rows, self.seq1(t - 1, x, ph, rest // self.nj), -1.0)
        free = np.zeros(n, dtype=bool)
        free[self.n1 :] = True
        return c, ub.matrix(self.n2, n), np.zeros(self.n2), eq.matrix(self.nI1, n), b_eq, free

    def p2_lp(self):
        """min sum_x z_(x,root) over (r2 >= 0, z free): P1 best-responds via z."""
        n = self.n2 + self.nI1
        c = np.zeros(n)
        c[self.n2 + self.offI1[0] + np.arange(self.nx)] = 1.0
        ub = _Triplets()
        for t in range(self.k):
            H = np.arange(self.H[t])
            for x in range(self.nx):
                for i in range(self.ni):
                    rows = self.seq1(t, x, H, i)
                    ub.add(rows, self.n2 + self.offI1[t] + x * self.H[t] + H, -1.0)
                    for j in range(self.nj):
                        ub.add(rows, self.seq2(t, H, j), self.coef[x, i, j])
                        if t + 1 < self.k:
                            child = H * self.m + i * self.nj + j
                            ub.add(rows, self.n2 + self.offI1[t + 1] + x * self.H[t + 1] + child, 1.0)
        eq = _Triplets()
        b_eq = np.zeros(self.nI2)
        for t in range(self.k):
            H = np.arange(self.H[t])
            rows = self.offI2[t] + H
            for j in range(self.nj):
                eq.add(rows, self.seq2(t, H, j), 1.0)
            if t == 0:
                b_eq[rows] = 1.0
            else:
                ph, rest = np.divmod(H, self.m)
                eq.add(rows, self.seq2(t - 1, ph, rest % self.nj), -1.0)
        free = np.zeros(n, dtype=bool)
        free[self.n2 :] = True
        return c, ub.matrix(self.n1, n), np.zeros(self.n1), eq.matrix(self.nI2, n), b_eq, free

    def p1_guarantee(self, r1) -> float:
        """Payoff P1's plan secures against every P2 strategy (backward induction)."""
        W = np.zeros(0)
        for t in range(self.k - 1, -1, -1):
            cost = np.einsum("xhi,xij->hj", self.level1(r1, t), self.coef)
            if t + 1 < self.k:
                cost = cost + W.reshape(self.H[t], self.ni, self.nj).sum(axis=1)
            W = cost.min(axis=1)
        return float(W[0])

    def p2_guarantee(self, r2) -> float:
        Z = np.zeros(0)
        for t in range(self.k - 1, -1, -1):
            gain = np.einsum("xij,hj->xhi", self.coef, self.level2(r2, t))
            if t + 1 < self.k:
                gain = gain + Z.reshape(self.nx, self.H[t], self.ni, self.nj).sum(axis=3)
            Z = gain.max(axis=2)
        return float(Z[:, 0].sum())


def _solve_lp(c, A_ub, b_ub, A_eq, b_eq, free, backend):
    if backend == "simplex":
        res = simplex.linprog(c, A_ub.toarray(), b_ub, A_eq.toarray(), b_eq, free=free)
        return res.x
    bounds = [(None, None) if f else (0, None) for f in free]
    res = highs(c, A_ub, b_ub, A_eq, b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"HiGHS failed: {res.message}")
    return res.x


def _solve_sequence_form(sf: _SequenceForm, backend: str):
    z1 = _solve_lp(*sf.p1_lp(), backend)
    z2 = _solve_lp(*sf.p2_lp(), backend)
    r1 = np.clip(z1[: sf.n1], 0.0, None)
    r2 = np.clip(z2[: sf.n2], 0.0, None)
    lo, hi = sf.p1_guarantee(r1), sf.p2_guarantee(r2)
    if hi - lo > GAP_TOL:
        raise SolverError(f"sequence-form duality gap {hi - lo:.3g} exceeds {GAP_TOL}")
    return r1, r2, lo, hi


def exact_size(game: IncompleteInfoGame, k: int) -> int:
    nx, ni, nj = game.shape
    return nx * (ni * nj) ** k


def value_exact(
    game: IncompleteInfoGame, k: int, budget: int = DEFAULT_BUDGET, backend: str = "auto"
) -> GameValueResult:
    """Normalized value v_k(p) from the sequence-form LPs of both players."""
    if k < 1:
        raise DomainError("k must be >= 1")
    size = exact_size(game, k)
    if size > budget:
        raise BudgetError(f"|X|(|I||J|)^k = {size} exceeds the budget {budget}")
    sf = _SequenceForm(game, k)
    if backend not in ("auto", "simplex", "highs"):
        raise DomainError(f"unknown backend {backend!r}")
    if backend == "auto":
        cells = (sf.n1 + sf.nI1) * (sf.n1 + sf.n2 + 3 * sf.nI2)
        order = ["simplex", "highs"] if cells <= DENSE_LIMIT else ["highs"]
    else:
        order = [backend]
    failures = []
    for name in order:
        try:
            r1, r2, lo, hi = _solve_sequence_form(sf, name)
        except SolverError as err:
            failures.append(f"{name}: {err}")
            continue
        backend = name
        break
    else:
        raise SolverError("; ".join(failures))
    gap = hi - lo
    return GameValueResult(
        0.5 * (lo + hi),
        r1,
        r2,
        max(gap, 0.0),
        method=f"sequence-form/{backend}",
        info={"p1_guarantee": lo, "p2_guarantee": hi, "failed_backends": failures},
    )


# -- approximate k-stage values: recursion on the prior ---------------------------


@numba.njit(cache=True)
def _objective(p, s, t, G, cont, stages_left):
    """k-stage average payoff when P1 plays row 0 w.p. s in state 0, t in state 1.

    ``cont`` holds v_{k-1} on a uniform grid (ignored for a single stage).
    """
    q = 1.0 - p
    stage = np.inf
    for j in range(G.shape[2]):
        pay = p * (s * G[0, 0, j] + (1.0 - s) * G[0, 1, j]) + q * (t * G[1, 0, j] + (1.0 - t) * G[1, 1, j])
        stage = min(stage, pay)
    if stages_left == 1:
        return stage
    prob0 = p * s + q * t
    prob1 = 1.0 - prob0
    # posterior at a zero-probability action is the prior; its weight is 0 anyway
    post0 = p * s / prob0 if prob0 > 0.0 else p
    post1 = p * (1.0 - s) / prob1 if prob1 > 0.0 else p
    future = prob0 * _interp(cont, post0) + prob1 * _interp(cont, post1)
    return (stage + (stages_left - 1) * future) / stages_left


@numba.njit(cache=True)
def _interp(vals, x):
    cells = vals.shape[0] - 1
    x = min(max(x, 0.0), 1.0) * cells
    i = min(int(x), cells - 1)
    f = x - i
    return (1.0 - f) * vals[i] + f * vals[i + 1]


GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_STEPS = 60


@numba.njit(cache=True)
def _best_t(p, s, G, cont, stages_left):
    # golden-section search; exact for the concave objective
    lo, hi = 0.0, 1.0
    best = max(_objective(p, s, 0.0, G, cont, stages_left), _objective(p, s, 1.0, G, cont, stages_left))
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = _objective(p, s, x1, G, cont, stages_left)
    f2 = _objective(p, s, x2, G, cont, stages_left)
    for _ in range(GOLDEN_STEPS):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = _objective(p, s, x2, G, cont, stages_left)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = _objective(p, s, x1, G, cont, stages_left)
        best = max(best, f1, f2)
    return best


@numba.njit(cache=True)
def _golden(p, G, cont, stages_left):
    """max over (s, t) by nested golden sections: s outside, t inside.

    With a concave continuation, each term P(i) v(posterior) is a perspective
    of a concave function, so the objective is jointly concave in (s, t) and
    its partial maximum over t is concave in s. Both searches are then exact
    up to the bracket width, ridges included.
    """
    lo, hi = 0.0, 1.0
    best = max(_best_t(p, 0.0, G, cont, stages_left), _best_t(p, 1.0, G, cont, stages_left))
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = _best_t(p, x1, G, cont, stages_left)
    f2 = _best_t(p, x2, G, cont, stages_left)
    for _ in range(GOLDEN_STEPS):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = _best_t(p, x2, G, cont, stages_left)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = _best_t(p, x1, G, cont, stages_left)
        best = max(best, f1, f2)
    return best


@numba.njit(cache=True, parallel=True)
def _stage_values(grid, G, cont, stages_left, n, rounds):
    """max over (s, t) at every prior.

    A full n x n scan, then boxes 10x smaller around the incumbent per round;
    the box search alone can stall on a ridge, so the nested golden search
    runs as well and the larger value wins. Every candidate is a feasible
    behaviour, so taking the max never overshoots.
    """
    out = np.empty(grid.shape[0])
    for a in numba.prange(grid.shape[0]):
        p = grid[a]
        best, bs, bt = -np.inf, 0.0, 0.0
        for u in range(n):
            for w in range(n):
                s, t = u / (n - 1), w / (n - 1)
                v = _objective(p, s, t, G, cont, stages_left)
                if v > best:
                    best, bs, bt = v, s, t
        width = 1.0
        for _ in range(rounds):
            width /= 10.0
            cs, ct = bs, bt
            for u in range(n):
                s = min(max(cs + width * (u / (n - 1) - 0.5), 0.0), 1.0)
                for w in range(n):
                    t = min(max(ct + width * (w / (n - 1) - 0.5), 0.0), 1.0)
                    v = _objective(p, s, t, G, cont, stages_left)
                    if v > best:
                        best, bs, bt = v, s, t
        out[a] = max(best, _golden(p, G, cont, stages_left))
    return out


def value_recursive_tables(
    game: IncompleteInfoGame,
    k: int,
    p_grid: float = 1e-2,
    sigma_grid: float = 1e-2,
    refine_rounds: int = 3,
    oversample: int = OVERSAMPLE,
) -> list[ValueTable]:
    """Approximate v_1..v_k on a grid of priors (first-state probability).

    k v_k(p) = max over one-stage behaviour of
    [min_j stage payoff + (k-1) sum_i P(i) v_{k-1}(posterior after i)],
    with v_{k-1} linearly interpolated between priors. The continuation lives
    on a grid ``oversample`` times finer than the returned tables: posteriors
    rarely land on grid points and v_{k-1} has kinks between them, which a
    coarse interpolant cuts off. The maximization scans a coarse grid over
    (s, t), then refines in boxes ten times smaller around the incumbent.
    At p in {0, 1} the value is the known-state matrix value, computed exactly.
    """
    _binary_check(game)
    if game.shape[1] != 2:
        raise UnsupportedError("the recursion supports two informed-player actions")
    if k < 1:
        raise DomainError("k must be >= 1")
    if oversample < 1:
        raise DomainError("oversample must be >= 1")
    cells = _cells(p_grid)
    fine = uniform_grid(cells * oversample)
    n = _cells(sigma_grid) + 1
    G = np.ascontiguousarray(game.payoffs)
    ends = (matrix_value(G[1]).value, matrix_value(G[0]).value)
    grid = uniform_grid(cells)
    tables = []
    cont = np.zeros(2)
    for stage in range(1, k + 1):
        cont = _stage_values(fine, G, cont, stage, n, refine_rounds)
        cont[0], cont[-1] = ends
        # v_k is concave in p; the envelope only removes rounding noise and keeps
        # the next stage's objective concave in (s, t)
        cont = concave_envelope(fine, cont).values
        tables.append(ValueTable(grid, cont[::oversample].copy()))
    return tables


def value_recursive(
    game: IncompleteInfoGame,
    k: int,
    p_grid: float = 1e-2,
    sigma_grid: float = 1e-2,
    refine_rounds: int = 3,
    oversample: int = OVERSAMPLE,
) -> ValueTable:
    return value_recursive_tables(game, k, p_grid, sigma_grid, refine_rounds, oversample)[-1]
