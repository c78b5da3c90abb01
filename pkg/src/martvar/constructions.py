"""Explicit martingales with large variation (lower-bound witnesses)."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SizeError
from .martingale import ChainedMartingale, SplittingTree
from .prob_core import Distribution

MAX_WEISS_ELL = 24


def weiss_doubling(ell: int) -> SplittingTree:
    """Depth-``ell`` martingale on ``2**ell`` labels with variation ``ell``.

    Starts uniform; at each step the current support is cut into its first
    and second half (label order), one half is zeroed and the other doubled,
    each with probability 1/2. Every edge moves exactly 1 in L1.
    """
    if not 1 <= ell <= MAX_WEISS_ELL:
        raise SizeError(f"ell must be in 1..{MAX_WEISS_ELL}, got {ell}")
    d = 2**ell
    labels = tuple(range(d))

    def block(lo: int, size: int) -> Distribution:
        probs = np.zeros(d)
        probs[lo : lo + size] = 1.0 / size
        return Distribution(labels, probs)

    # build bottom-up: level t has 2**t blocks of size 2**(ell - t)
    level = [SplittingTree(block(lo, 1)) for lo in range(d)]
    for t in range(ell - 1, -1, -1):
        size = 2 ** (ell - t)
        level = [
            SplittingTree(block(n * size, size), ((0.5, level[2 * n]), (0.5, level[2 * n + 1])))
            for n in range(2**t)
        ]
    return level[0]


def binary_walk(k: int, p0: float, delta: float) -> SplittingTree:
    """Symmetric +-delta walk on the first coordinate, absorbed at 0 and 1.

    Near the boundary the step shrinks to ``min(delta, a, 1 - a)`` so the
    walk lands exactly on the boundary. Subtrees with the same position and
    remaining horizon are shared.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if not 0.0 < p0 < 1.0:
        raise DomainError("p0 must lie in (0, 1)")
    if not delta > 0:
        raise DomainError("delta must be positive")
    labels = (0, 1)
    memo: dict = {}

    def node(a: float, remaining: int) -> SplittingTree:
        # snap so that 0.1 + 0.2 - 0.3 style drift cannot leave the boundary
        a = round(a, 12)
        key = (a, remaining)
        if key in memo:
            return memo[key]
        dist = Distribution(labels, np.array([a, 1.0 - a]))
        if remaining == 0:
            out = SplittingTree(dist)
        else:
            step = min(delta, a, 1.0 - a)
            if step <= 0:
                out = SplittingTree(dist, ((1.0, node(a, remaining - 1)),))
            else:
                up = 1.0 if step == 1.0 - a else a + step
                down = 0.0 if step == a else a - step
                out = SplittingTree(
                    dist, ((0.5, node(up, remaining - 1)), (0.5, node(down, remaining - 1)))
                )
        memo[key] = out
        return out

    return node(float(p0), k)


def theorem2_witness(k: int, d: int) -> ChainedMartingale:
    """Depth-k martingale on at most d labels with variation of order sqrt(k log d).

    With ``ell = floor(log2 d)`` and ``k1`` the largest multiple of ell in
    ``(k/2, k]``, chains ell independent binary walks of length ``k1/ell``
    (step ``1/sqrt(k1/ell)``) and pads with trivial steps. When ``k < 2 ell``
    the doubling martingale on ``2**ell`` labels is used instead.
    """
    if d < 2:
        raise DomainError("d must be >= 2")
    if k < 1 or d > 2**k:
        raise DomainError(f"need d <= 2**k, got k={k}, d={d}")
    ell = d.bit_length() - 1
    if k < 2 * ell:
        return ChainedMartingale((weiss_doubling(ell),), trailing=k - ell)
    k1 = (k // ell) * ell
    steps = k1 // ell
    walk = binary_walk(steps, 0.5, 1.0 / math.sqrt(steps))
    return ChainedMartingale((walk,) * ell, trailing=k - k1)
