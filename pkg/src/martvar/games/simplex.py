"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq``,
``x >= 0`` except for columns flagged free. The same code runs on floats or,
with ``exact=True``, on :class:`fractions.Fraction` entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import SolverError


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    duals_ub: np.ndarray  # d(objective)/d(b_ub), <= 0 for a min problem
    duals_eq: np.ndarray
    pivots: int


class _Infeasible(Exception):
    pass


class _Unbounded(Exception):
    pass


class _Stalled(Exception):
    # float round-off can defeat Bland's rule on degenerate vertices
    pass


def _to_exact(a):
    return np.array([[Fraction(v) for v in row] for row in np.atleast_2d(a)], dtype=object)


def _pivot(T, row, col):
    T[row] = T[row] / T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0
    T -= np.outer(factors, T[row])


REFACTOR_EVERY = 50


class _Refresher:
    """Rebuilds a float tableau as B^{-1} T0 from the untouched initial rows."""

    def __init__(self, T, raw_costs):
        self.T0 = T[:-2].copy()
        self.raw = raw_costs  # {cost row index: unreduced cost vector}

    def __call__(self, T, basis):
        m = len(basis)
        try:
            binv = np.linalg.inv(self.T0[:, basis])
        except np.linalg.LinAlgError:
            return
        T[:m] = binv @ self.T0
        for r, cost in self.raw.items():
            T[r] = cost - cost[basis] @ T[:m]


def _run(T, basis, cost_row, n_allowed, eps, max_pivots, pivots, refresh=None):
    """Minimize with the reduced costs in ``T[cost_row]``; Bland's rule.

    Only the first ``n_allowed`` columns may enter the basis. With ``refresh``
    the tableau is rebuilt every few pivots and before any final verdict.
    """
    m = len(basis)
    basis_arr = np.array(basis)
    fresh = True
    while True:
        cand = np.flatnonzero(T[cost_row, :n_allowed] < -eps)
        if len(cand) == 0:
            if refresh is None or fresh:
                return pivots
            refresh(T, basis)
            fresh = True
            continue
        col = int(cand[0])
        colv = T[:m, col]
        rows = np.flatnonzero(colv > eps)
        if len(rows) == 0:
            if refresh is None or fresh:
                raise _Unbounded()
            refresh(T, basis)
            fresh = True
            continue
        ratios = T[rows, -1] / colv[rows]
        best = ratios.min()
        ties = rows[ratios <= best + eps]
        if len(ties) > 1 and eps:
            # skip near-zero pivots among tied rows; round-off grows from them
            piv = colv[ties]
            ties = ties[piv >= 1e-3 * piv.max()]
        row = int(ties[np.argmin(basis_arr[ties])])
        _pivot(T, row, col)
        basis[row] = col
        basis_arr[row] = col
        pivots += 1
        fresh = False
        if refresh is not None and pivots % REFACTOR_EVERY == 0:
            refresh(T, basis)
            fresh = True
        if pivots > max_pivots:
            raise _Stalled()


def _solve_once(c, A_ub, b_ub, A_eq, b_eq, exact, eps, max_pivots):
    n = len(c)
    blocks, rhs, kinds = [], [], []
    if A_ub is not None and len(b_ub):
        blocks.append(A_ub)
        rhs.append(b_ub)
        kinds += ["ub"] * len(b_ub)
    if A_eq is not None and len(b_eq):
        blocks.append(A_eq)
        rhs.append(b_eq)
        kinds += ["eq"] * len(b_eq)
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    m = A.shape[0]
    n_slack = kinds.count("ub")
    # columns: structural | slack | one unit column per row (artificial or slack)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    T = np.full((m + 2, n + n_slack + m + 1), zero, dtype=object if exact else float)
    T[:m, :n] = A
    T[:m, -1] = b
    slack_of = {}
    s = 0
    for r, kind in enumerate(kinds):
        if kind == "ub":
            T[r, n + s] = one
            slack_of[r] = n + s
            s += 1
    sign = np.ones(m, dtype=int)
    for r in range(m):
        if T[r, -1] < 0:
            T[r] = -T[r]
            sign[r] = -1
    unit = n + n_slack
    # unit columns start as the identity, so they hold B^{-1} throughout; a
    # slack row with b >= 0 starts with its slack basic, the rest need an
    # artificial
    basis = []
    T[m, :n] = c
    for r in range(m):
        T[r, unit + r] = one
        if r in slack_of and sign[r] > 0:
            basis.append(slack_of[r])
        else:
            basis.append(unit + r)
            T[m + 1, unit + r] = one
            T[m + 1] = T[m + 1] - T[r]
    # row m: phase-2 cost, row m+1: phase-1 cost (sum of artificials)
    refresh = None
    if not exact:
        raw1 = np.zeros(T.shape[1])
        raw1[[j for j in basis if j >= unit]] = 1.0
        refresh = _Refresher(T, {m: T[m].copy(), m + 1: raw1})
    pivots = _run(T, basis, m + 1, unit, eps, max_pivots, 0, refresh)
    if -T[m + 1, -1] > max(eps, 1e-9) * max(1.0, float(np.max(np.abs(b.astype(float))))):
        raise _Infeasible()
    # drive remaining artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= unit:
            for j in range(unit):
                if abs(T[r, j]) > eps:
                    _pivot(T, r, j)
                    basis[r] = j
                    pivots += 1
                    break
    pivots = _run(T, basis, m, unit, eps, max_pivots, pivots, refresh)
    x = np.full(n + n_slack, zero, dtype=object if exact else float)
    for r, j in enumerate(basis):
        if j < unit:
            x[j] = T[r, -1]
    # B^{-1} sits in the unit columns; y = c_B B^{-1}, undo row sign flips
    costs = np.concatenate([np.asarray(c, dtype=object if exact else float),
                            np.full(n_slack + m, zero, dtype=object if exact else float)])
    cB = np.array([costs[j] for j in basis], dtype=object if exact else float)
    Binv = T[:m, unit : unit + m]
    y = cB @ Binv * sign
    obj = costs[:n] @ x[:n]
    kinds_arr = np.array(kinds)
    return x[:n], obj, y[kinds_arr == "ub"], y[kinds_arr == "eq"], pivots


def linprog(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    free=None,
    exact: bool = False,
    eps: float = 1e-9,
    max_pivots: int | None = None,
    retries: int = 3,
    seed: int = 0,
) -> LPResult:
    """Minimize ``c @ x``. Raises SolverError on infeasibility or unboundedness.

    ``max_pivots`` caps each attempt (default ``20 (m + n) + 1000``); a stalled
    float attempt is restarted with slightly relaxed inequalities.
    """
    c = np.asarray(c, dtype=float)
    n = len(c)
    free = np.zeros(n, dtype=bool) if free is None else np.asarray(free, dtype=bool)

    def split(a):
        if a is None:
            return None
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return np.hstack([a, -a[:, free]])

    cs = np.concatenate([c, -c[free]])
    Aub, Aeq = split(A_ub), split(A_eq)
    bub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    beq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    if exact:
        cs, Aub, Aeq = _to_exact([cs])[0], _to_exact(Aub) if Aub is not None else None, (
            _to_exact(Aeq) if Aeq is not None else None
        )
        bub, beq = _to_exact([bub])[0] if len(bub) else bub, _to_exact([beq])[0] if len(beq) else beq
        eps = 0
    if max_pivots is None:
        max_pivots = 20 * (len(bub) + len(beq) + len(cs)) + 1000
    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(retries + 1):
        pb_ub, pb_eq = bub, beq
        if attempt and not exact:
            # perturbed restart: relax inequalities by a tiny random amount
            pb_ub = bub + rng.uniform(0, 1e-10, size=len(bub)) * (1 + np.abs(bub))
        try:
            x, obj, y_ub, y_eq, pivots = _solve_once(cs, Aub, pb_ub, Aeq, pb_eq, exact, eps, max_pivots)
        except _Unbounded:
            raise SolverError("linear program is unbounded")
        except (_Infeasible, _Stalled, FloatingPointError, ZeroDivisionError) as err:
            last = err
            continue
        if exact:
            x = np.array([float(v) for v in x])
            obj = float(obj)
            y_ub = np.array([float(v) for v in y_ub])
            y_eq = np.array([float(v) for v in y_eq])
        xs = x[:n].astype(float)
        xs[free] -= x[n:]
        return LPResult(xs, float(obj), np.asarray(y_ub, float), np.asarray(y_eq, float), pivots)
    raise SolverError(f"linear program infeasible after {retries + 1} attempts ({last!r})")
