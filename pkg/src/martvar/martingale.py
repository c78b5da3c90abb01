"""Martingales of probabilities as splitting trees.

A :class:`SplittingTree` node holds the current posterior and a list of
``(weight, child)`` branches. Nodes are immutable, so identical subtrees may
be shared; a recombining walk is then a DAG whose size is polynomial in the
depth while every traversal below still sees the full tree semantics
(each shared node is counted once per path through it).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterator, Union

import numpy as np

from .errors import DomainError, SizeError, ValidationError
from .prob_core import (
    BoundCertificate,
    Distribution,
    entropy,
    l1_distance,
    product_labels,
    tensor,
)

WEIGHT_TOL = 1e-12
BAYES_TOL = 1e-9
MAX_JSON_NODES = 200_000


@dataclass(frozen=True, eq=False)
class SplittingTree:
    dist: Distribution
    children: tuple = ()

    def __post_init__(self):
        # zero-weight branches would carry undefined posteriors
        kids = tuple((float(w), c) for w, c in self.children if w != 0)
        object.__setattr__(self, "children", kids)

    @classmethod
    def split(cls, dist: Distribution, branches) -> "SplittingTree":
        return cls(dist, tuple(branches))

    @classmethod
    def constant(cls, dist: Distribution, depth: int = 0) -> "SplittingTree":
        """A chain of ``depth`` trivial splittings."""
        node = cls(dist)
        for _ in range(depth):
            node = cls(dist, ((1.0, node),))
        return node

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @cached_property
    def depth(self) -> int:
        height = {}
        for node in _postorder(self):
            height[id(node)] = (
                1 + max(height[id(c)] for _, c in node.children) if node.children else 0
            )
        return height[id(self)]

    @property
    def labels(self) -> tuple:
        return self.dist.labels

    def nodes(self) -> Iterator["SplittingTree"]:
        """Distinct nodes, children before parents."""
        return iter(_postorder(self))

    @cached_property
    def expanded_size(self) -> int:
        """Node count of the tree with all shared subtrees copied out."""
        size = {}
        for node in _postorder(self):
            size[id(node)] = 1 + sum(size[id(c)] for _, c in node.children)
        return size[id(self)]


def _postorder(root: SplittingTree) -> list:
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for _, child in reversed(node.children):
            if id(child) not in seen:
                stack.append((child, False))
    return order


def _edge_l1(child: Distribution, parent: Distribution) -> float:
    if child.labels is parent.labels:
        return float(np.abs(child.probs - parent.probs).sum())
    return l1_distance(child, parent)


# -- validation ---------------------------------------------------------------


def validate(m) -> list:
    """Every broken invariant, as ``"path: message"`` strings. Never raises."""
    if isinstance(m, ChainedMartingale):
        out = []
        for b, f in enumerate(m.factors):
            out.extend(f"factor[{b}]{v}" for v in validate(f))
        if m.trailing < 0:
            out.append("trailing: negative padding")
        return out
    violations = []
    labels = m.labels
    # first-seen path of every distinct node, for messages
    paths = {id(m): "root"}
    queue = [m]
    for node in queue:
        for n, (_, child) in enumerate(node.children):
            if id(child) not in paths:
                paths[id(child)] = f"{paths[id(node)]}/{n}"
                queue.append(child)
    height = {}
    for node in _postorder(m):
        path = paths[id(node)]
        hs = {height[id(c)] for _, c in node.children}
        height[id(node)] = 1 + max(hs) if hs else 0
        if len(hs) > 1:
            violations.append(f"{path}: subtrees have unequal depths {sorted(hs)}")
        if node.labels is not labels and node.labels != labels:
            violations.append(f"{path}: label set differs from the root's")
            continue
        if not node.children:
            continue
        weights = np.array([w for w, _ in node.children])
        if np.any(weights <= 0) or np.any(weights > 1 + WEIGHT_TOL):
            violations.append(f"{path}: branch weight outside (0, 1]: {weights.tolist()}")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
            violations.append(f"{path}: branch weights sum to {math.fsum(weights)!r}")
        if any(c.labels is not labels and c.labels != labels for _, c in node.children):
            continue
        mean = sum(w * c.dist.probs for w, c in node.children)
        err = float(np.max(np.abs(mean - node.dist.probs)))
        if err > BAYES_TOL:
            violations.append(f"{path}: Bayes consistency off by {err:.3g}")
    return violations


def _require_valid(m) -> None:
    problems = validate(m)
    if problems:
        raise ValidationError("invalid martingale: " + "; ".join(problems[:5]))


# -- variation ---------------------------------------------------------------


def _tree_variation(tree: SplittingTree) -> float:
    var = {}
    for node in _postorder(tree):
        var[id(node)] = math.fsum(
            w * (_edge_l1(c.dist, node.dist) + var[id(c)]) for w, c in node.children
        )
    return var[id(tree)]


def variation(m) -> float:
    """Exact expected total L1 variation."""
    _require_valid(m)
    if isinstance(m, ChainedMartingale):
        # sequential concatenation adds variations
        return math.fsum(_tree_variation(f) for f in m.factors)
    return _tree_variation(m)


def variation_monte_carlo(m, trials: int, seed: int) -> tuple[float, float]:
    """Sample ``trials`` paths; return (mean, standard error) of path variation."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    _require_valid(m)
    rng = np.random.default_rng(seed)
    if isinstance(m, ChainedMartingale):
        totals = _chained_path_variations(m, trials, rng)
    else:
        totals = _tree_path_variations(m, trials, rng)
    mean = float(totals.mean())
    if trials == 1:
        return mean, 0.0
    return mean, float(totals.std(ddof=1) / math.sqrt(trials))


def _tree_path_variations(tree, trials, rng) -> np.ndarray:
    totals = np.zeros(trials)
    groups = {id(tree): (tree, np.arange(trials))}
    while groups:
        nxt = {}
        for node, idx in groups.values():
            if not node.children:
                continue
            if len(node.children) == 1:
                choice = np.zeros(len(idx), dtype=int)
            else:
                w = np.array([w for w, _ in node.children])
                choice = rng.choice(len(w), size=len(idx), p=w / w.sum())
            for c, (_, child) in enumerate(node.children):
                sel = idx[choice == c]
                if len(sel) == 0:
                    continue
                totals[sel] += _edge_l1(child.dist, node.dist)
                if id(child) in nxt:
                    nxt[id(child)] = (child, np.concatenate([nxt[id(child)][1], sel]))
                else:
                    nxt[id(child)] = (child, sel)
        groups = nxt
    return totals


def _sample_paths(tree: SplittingTree, trials: int, rng) -> np.ndarray:
    """Posterior arrays along sampled paths, shape (trials, depth + 1, d)."""
    k, d = tree.depth, tree.dist.d
    out = np.empty((trials, k + 1, d))
    groups = {id(tree): (tree, np.arange(trials))}
    for t in range(k + 1):
        nxt = {}
        for node, idx in groups.values():
            out[idx, t] = node.dist.probs
            if not node.children:
                continue
            w = np.array([w for w, _ in node.children])
            choice = rng.choice(len(w), size=len(idx), p=w / w.sum())
            for c, (_, child) in enumerate(node.children):
                sel = idx[choice == c]
                if len(sel):
                    prev = nxt.get(id(child))
                    nxt[id(child)] = (child, sel if prev is None else np.concatenate([prev[1], sel]))
        groups = nxt
    return out


# -- composition ---------------------------------------------------------------


def concat(tree1: SplittingTree, tree2: SplittingTree) -> SplittingTree:
    """Run ``tree1`` with ``tree2``'s root held fixed, then ``tree2``.

    The result lives on the product labels ``(x1, x2)`` and its variation is
    the sum of the two variations.
    """
    _require_valid(tree1)
    _require_valid(tree2)
    labels = product_labels(tree1.labels, tree2.labels)
    lift1: dict = {}
    lift2: dict = {}

    def second(node2, leaf1):
        key = (id(leaf1), id(node2))
        if key not in lift2:
            kids = tuple((w, second(c, leaf1)) for w, c in node2.children)
            lift2[key] = SplittingTree(tensor(leaf1.dist, node2.dist, labels), kids)
        return lift2[key]

    for node in _postorder(tree1):
        if node.is_leaf:
            lift1[id(node)] = second(tree2, node)
        else:
            kids = tuple((w, lift1[id(c)]) for w, c in node.children)
            lift1[id(node)] = SplittingTree(tensor(node.dist, tree2.dist, labels), kids)
    return lift1[id(tree1)]


def pad(tree: SplittingTree, steps: int = 1, at: int | None = None) -> SplittingTree:
    """Insert ``steps`` trivial splittings below depth ``at`` (default: at the leaves)."""
    if steps < 0:
        raise DomainError("steps must be >= 0")
    if steps == 0:
        return tree
    target = tree.depth if at is None else at
    if not 0 <= target <= tree.depth:
        raise DomainError(f"padding depth {target} outside 0..{tree.depth}")
    memo = {}

    def go(node, depth):
        if depth == target:
            out = node
            for _ in range(steps):
                out = SplittingTree(node.dist, ((1.0, out),))
            return out
        if id(node) not in memo:
            kids = tuple((w, go(c, depth + 1)) for w, c in node.children)
            memo[id(node)] = SplittingTree(node.dist, kids)
        return memo[id(node)]

    return go(tree, 0)


def pad_to(tree: SplittingTree, k: int) -> SplittingTree:
    return pad(tree, k - tree.depth)


@dataclass(frozen=True, eq=False)
class ChainedMartingale:
    """Sequential concatenation of factor trees, kept factored.

    Equivalent to ``reduce(concat, factors)`` followed by ``trailing`` trivial
    steps, but stored without the product blow-up. Labels are left-nested
    pairs, as ``concat`` would produce.
    """

    factors: tuple
    trailing: int = 0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise DomainError("at least one factor is required")

    @cached_property
    def labels(self) -> tuple:
        return reduce(product_labels, (f.labels for f in self.factors))

    @cached_property
    def dist(self) -> Distribution:
        probs = reduce(np.kron, (f.dist.probs for f in self.factors))
        return Distribution(self.labels, probs)

    @property
    def depth(self) -> int:
        return sum(f.depth for f in self.factors) + self.trailing

    def to_tree(self, max_nodes: int = 2_000_000) -> SplittingTree:
        estimate = 1
        for f in self.factors:
            estimate *= f.expanded_size
        if estimate > max_nodes:
            raise SizeError(f"materialized tree would have ~{estimate} nodes (> {max_nodes})")
        tree = reduce(concat, self.factors)
        return pad(tree, self.trailing) if self.trailing else tree


Martingale = Union[SplittingTree, ChainedMartingale]


def _chained_path_variations(m: ChainedMartingale, trials: int, rng) -> np.ndarray:
    paths = [_sample_paths(f, trials, rng) for f in m.factors]
    current = [p[:, 0] for p in paths]

    def joint():
        out = current[0]
        for c in current[1:]:
            out = (out[:, :, None] * c[:, None, :]).reshape(trials, -1)
        return out

    totals = np.zeros(trials)
    prev = joint()
    for b, p in enumerate(paths):
        for s in range(1, p.shape[1]):
            current[b] = p[:, s]
            now = joint()
            totals += np.abs(now - prev).sum(axis=1)
            prev = now
    return totals


# -- bounds --------------------------------------------------------------------


def bound_entropy(k: int, p: Distribution) -> float:
    if k < 0:
        raise DomainError("k must be >= 0")
    return math.sqrt(2.0 * k * entropy(p))


def bound_logd(k: int, d: int) -> float:
    if k < 0 or d < 1:
        raise DomainError("need k >= 0 and d >= 1")
    return math.sqrt(2.0 * k * math.log(d))


def bound_classical(k: int, d: int) -> float:
    if k < 0 or d < 1:
        raise DomainError("need k >= 0 and d >= 1")
    return math.sqrt(k * (d - 1))


def bound_trivial(k: int) -> float:
    if k < 0:
        raise DomainError("k must be >= 0")
    return 2.0 * k


def bound_per_coordinate(k: int, p: Distribution) -> float:
    if k < 0:
        raise DomainError("k must be >= 0")
    return math.fsum(np.sqrt(k * p.probs * (1.0 - p.probs)))


def certify(m) -> list[BoundCertificate]:
    """Check the variation against all five upper bounds."""
    v = variation(m)
    k, p, d = m.depth, m.dist, m.dist.d
    return [
        BoundCertificate("entropy", v, bound_entropy(k, p)),
        BoundCertificate("logd", v, bound_logd(k, d)),
        BoundCertificate("classical", v, bound_classical(k, d)),
        BoundCertificate("trivial", v, bound_trivial(k)),
        BoundCertificate("per_coordinate", v, bound_per_coordinate(k, p)),
    ]


# -- random generation -----------------------------------------------------------


def _random_split(rng, p: Distribution, max_children: int):
    """Posteriors ``p + s * (r_i - sum_j w_j r_j)`` with Dirichlet r_i.

    The weighted mean of the directions is zero, so any s keeps Bayes
    consistency; s is drawn below the largest value keeping q_i >= 0.
    """
    supp = np.flatnonzero(p.probs > 0)
    m = int(rng.integers(2, max_children + 1))
    w = rng.dirichlet(np.ones(m))
    r = np.zeros((m, p.d))
    r[:, supp] = rng.dirichlet(np.ones(len(supp)), size=m)
    dirs = r - w @ r
    neg = dirs < -1e-15
    if not neg.any():
        return None
    rows, cols = np.nonzero(neg)
    s_max = float(np.min(p.probs[cols] / -dirs[rows, cols]))
    s = s_max if rng.random() < 0.25 else s_max * rng.uniform(0.1, 1.0)
    q = np.clip(p.probs + s * dirs, 0.0, None)
    q /= q.sum(axis=1, keepdims=True)
    return [(float(wi), p.with_probs(qi)) for wi, qi in zip(w, q)]


def random_tree(
    rng: np.random.Generator,
    d: int,
    k: int,
    max_children: int = 3,
    root: Distribution | None = None,
) -> SplittingTree:
    """Random valid depth-k tree on d labels; half the splittings are trivial."""
    if root is None:
        alpha = 1.0 if rng.random() < 0.5 else 0.3
        root = Distribution.from_probs(rng.dirichlet(np.full(d, alpha)))

    def grow(p: Distribution, remaining: int) -> SplittingTree:
        if remaining == 0:
            return SplittingTree(p)
        branches = None
        if np.count_nonzero(p.probs) >= 2 and rng.random() >= 0.5:
            branches = _random_split(rng, p, max_children)
        if branches is None:
            return SplittingTree(p, ((1.0, grow(p, remaining - 1)),))
        return SplittingTree(p, tuple((w, grow(q, remaining - 1)) for w, q in branches))

    return grow(root, k)


# -- serialization -----------------------------------------------------------------


def tree_to_dict(tree: SplittingTree, max_nodes: int = MAX_JSON_NODES) -> dict:
    if tree.expanded_size > max_nodes:
        raise SizeError(
            f"tree expands to {tree.expanded_size} nodes; nested JSON is capped at {max_nodes}"
        )

    def enc(node):
        return {
            "dist": node.dist.to_dict(),
            "children": [{"w": w, "node": enc(c)} for w, c in node.children],
        }

    return enc(tree)


def tree_from_dict(data: dict) -> SplittingTree:
    labels_cache: dict = {}

    def dec(obj):
        dist = Distribution.from_dict(obj["dist"])
        shared = labels_cache.setdefault(dist.labels, dist.labels)
        if shared is not dist.labels:
            dist = Distribution(shared, dist.probs)
        return SplittingTree(dist, tuple((c["w"], dec(c["node"])) for c in obj.get("children", [])))

    return dec(data)


def tree_to_json(tree: SplittingTree, **kw) -> str:
    return json.dumps(tree_to_dict(tree, **kw))


def tree_from_json(text: str) -> SplittingTree:
    return tree_from_dict(json.loads(text))
