"""Finite-support distributions and the information-theoretic primitives.

All logarithms are natural. ``0 log 0`` is taken to be 0 everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import numpy as np

from .errors import DomainError, ValidationError

SUM_TOL = 1e-12
CERT_TOL = 1e-9

# Returned by kl_divergence when p is not absolutely continuous w.r.t. q.
INFINITE_DIVERGENCE = math.inf


def _freeze_label(label: Any) -> Hashable:
    # JSON turns product-label tuples into lists
    if isinstance(label, list):
        return tuple(_freeze_label(v) for v in label)
    return label


_checked_labels: dict = {}


def _labels_checked(labels: tuple) -> bool:
    # trees share one label tuple across thousands of nodes; check it once
    if _checked_labels.get(id(labels)) is labels:
        return True
    if len(set(labels)) != len(labels):
        return False
    if len(_checked_labels) > 4096:
        _checked_labels.clear()
    _checked_labels[id(labels)] = labels
    return True


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over an ordered tuple of distinct labels."""

    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or len(probs) != len(labels):
            raise ValidationError(
                f"labels ({len(labels)}) and probs ({probs.shape}) do not match"
            )
        if len(labels) == 0:
            raise ValidationError("empty support")
        if not _labels_checked(labels):
            raise ValidationError("labels are not distinct")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValidationError(f"negative or non-finite probability in {probs}")
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_probs(cls, probs: Sequence[float], labels: Sequence | None = None):
        """Build with labels ``0..d-1`` unless labels are given."""
        if labels is None:
            labels = range(len(probs))
        return cls(tuple(labels), np.asarray(probs, dtype=float))

    @classmethod
    def uniform(cls, d: int, labels: Sequence | None = None):
        return cls.from_probs(np.full(d, 1.0 / d), labels)

    @classmethod
    def point_mass(cls, d: int, index: int, labels: Sequence | None = None):
        probs = np.zeros(d)
        probs[index] = 1.0
        return cls.from_probs(probs, labels)

    @classmethod
    def renormalized(cls, weights: Sequence[float], labels: Sequence | None = None):
        """Explicit opt-in normalization of nonnegative weights."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValidationError("weights must be nonnegative with positive sum")
        return cls.from_probs(w / w.sum(), labels)

    @property
    def d(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    def support(self) -> tuple:
        return tuple(x for x, px in zip(self.labels, self.probs) if px > 0)

    def with_probs(self, probs) -> "Distribution":
        """Same label tuple (shared, not copied), new probabilities."""
        return Distribution(self.labels, probs)

    def allclose(self, other: "Distribution", atol: float = 1e-12) -> bool:
        return self.labels == other.labels and bool(
            np.allclose(self.probs, other.probs, rtol=0.0, atol=atol)
        )

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "probs": [float(v) for v in self.probs]}

    @classmethod
    def from_dict(cls, data: dict) -> "Distribution":
        return cls(tuple(_freeze_label(x) for x in data["labels"]), data["probs"])

    def to_json(self) -> str:
        # repr of a float round-trips exactly (at most 17 significant digits)
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Distribution":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"Distribution(labels={self.labels!r}, probs={self.probs.tolist()!r})"


@dataclass(frozen=True)
class BoundCertificate:
    """A checked inequality instance ``lhs <= rhs``."""

    name: str
    lhs: float
    rhs: float
    slack: float = field(init=False)
    holds: bool = field(init=False)

    def __post_init__(self):
        slack = float(self.rhs) - float(self.lhs)
        object.__setattr__(self, "slack", slack)
        object.__setattr__(self, "holds", bool(slack >= -CERT_TOL))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
        }


def _xlogx(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v, dtype=float)
    pos = v > 0
    out[pos] = v[pos] * np.log(v[pos])
    return out


def entropy(p: Distribution) -> float:
    """Shannon entropy in nats."""
    return max(0.0, -float(_xlogx(p.probs).sum()))


def _check_same_support(p: Distribution, q: Distribution) -> None:
    if p.labels != q.labels:
        raise DomainError("distributions are over different label sets")


def l1_distance(p: Distribution, q: Distribution) -> float:
    _check_same_support(p, q)
    return float(np.abs(p.probs - q.probs).sum())


def kl_divergence(p: Distribution, q: Distribution) -> float:
    """D(p||q) in nats, or ``INFINITE_DIVERGENCE`` when q(x)=0 < p(x)."""
    _check_same_support(p, q)
    pp, qq = p.probs, q.probs
    if np.any((qq == 0) & (pp > 0)):
        return INFINITE_DIVERGENCE
    pos = pp > 0
    return max(0.0, float(np.sum(pp[pos] * np.log(pp[pos] / qq[pos]))))


def product_labels(a: Sequence, b: Sequence) -> tuple:
    return tuple((x, y) for x in a for y in b)


def tensor(p: Distribution, q: Distribution, labels: tuple | None = None) -> Distribution:
    """Product distribution on pairs ``(x, y)``, row-major in p's order.

    ``labels`` lets callers reuse a precomputed product label tuple.
    """
    if labels is None:
        labels = product_labels(p.labels, q.labels)
    return Distribution(labels, np.outer(p.probs, q.probs).ravel())


def pinsker(p: Distribution, q: Distribution) -> BoundCertificate:
    """``||p - q||_1 <= sqrt(2 D(p||q))``."""
    return BoundCertificate(
        "pinsker", l1_distance(p, q), math.sqrt(2.0 * kl_divergence(p, q))
    )


def pinsker_variant(z: Sequence[float], weights: Sequence[float]) -> BoundCertificate:
    """The martingale form of Pinsker's inequality for Y constant.

    Z is a nonnegative random variable given by its values ``z`` on atoms with
    probabilities ``weights``; Y is the constant EZ. Checks
    ``E|Z-Y| <= sqrt(2 EZ) sqrt(E Z log Z - E Y log Y)``.
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(weights, dtype=float)
    if np.any(z < 0) or np.any(w < 0):
        raise DomainError("Z and the atom weights must be nonnegative")
    ez = float(np.dot(w, z))
    lhs = float(np.dot(w, np.abs(z - ez)))
    gap = float(np.dot(w, _xlogx(z))) - float(_xlogx(np.array([ez]))[0])
    # Jensen makes the gap nonnegative; clip rounding noise
    rhs = math.sqrt(2.0 * ez) * math.sqrt(max(gap, 0.0))
    return BoundCertificate("pinsker_variant", lhs, rhs)
