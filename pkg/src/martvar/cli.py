"""Command-line entry point: ``martvar <command> ...``.

Every run writes its tables (CSV) and summary (JSON) atomically under the
results directory, then appends one record to ``index.ndjson`` there. The
directory defaults to ``./results`` and can be moved with ``MARTVAR_RESULTS``
or ``--results-dir``. Exit codes: 0 every certificate holds, 2 a certificate
failed, 1 an operational or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
from filelock import FileLock, Timeout

from . import __version__
from .constructions import MAX_WEISS_ELL, binary_walk, theorem2_witness, weiss_doubling
from .errors import MartvarError, UsageError
from .games import (
    IncompleteInfoGame,
    cav_u_binary,
    certify_error_term,
    certify_superadditivity,
    error_term_table,
    exact_size,
    game_norm,
    random_game,
    tensor_games,
    tensor_power,
    u,
    u_table,
    value_exact,
    value_recursive,
    zamir_game,
)
from .games.values import DEFAULT_BUDGET, value_recursive_tables
from .martingale import (
    ChainedMartingale,
    bound_classical,
    bound_entropy,
    bound_logd,
    bound_per_coordinate,
    bound_trivial,
    certify,
    concat,
    random_tree,
    tree_to_dict,
    variation,
    variation_monte_carlo,
)
from .maxvar import SUPPORTED_STEPS, entropy_slack, maxvar_tables, _cells_for, uniform_grid, witness_tree
from .prob_core import BoundCertificate, Distribution, entropy, pinsker, pinsker_variant

RESULTS_ENV = "MARTVAR_RESULTS"
INDEX_NAME = "index.ndjson"
LOCK_NAME = ".lock"

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

# families for the variation-vs-log-d ratio table; nothing is asserted on it
THEOREM2_FAMILY = ((8, 4), (16, 4), (16, 16), (32, 16), (64, 64))
WITNESS_FLOOR = 0.25
AGREEMENT_TOL = 5e-3


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int | None = None
    results_dir: str = "results"
    out: str | None = None

    def output_dir(self) -> Path:
        if self.out:
            return Path(self.out)
        return Path(self.results_dir) / self.command.replace(" ", "-")


@dataclass
class RunRecord:
    config: dict
    version: str
    duration: float
    outputs: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    approximate: bool = False
    exit_code: int = EXIT_OK

    @property
    def violations(self) -> list:
        return [c for c in self.certificates if not c["holds"]]


# -- output plumbing -------------------------------------------------------------


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    return v


def csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class Run:
    """Collects outputs and certificates for one command invocation."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.dir = config.output_dir()
        self.outputs: list[str] = []
        self.certificates: list[BoundCertificate] = []
        self.approximate = False
        self.summary: dict = {}

    def write_csv(self, name: str, header: list, rows: list) -> Path:
        path = self.dir / f"{name}.csv"
        atomic_write(path, csv_text(header, rows))
        self.outputs.append(str(path))
        return path

    def write_json(self, name: str, data, indent: int | None = 1) -> Path:
        path = self.dir / f"{name}.json"
        atomic_write(path, json.dumps(_jsonable(data), indent=indent) + "\n")
        self.outputs.append(str(path))
        return path

    def add(self, certs) -> None:
        self.certificates.extend(certs)


# -- commands ------------------------------------------------------------------------


def _bounds_for(k: int, p: Distribution) -> dict:
    return {
        "entropy": bound_entropy(k, p),
        "logd": bound_logd(k, p.d),
        "classical": bound_classical(k, p.d),
        "trivial": bound_trivial(k),
        "per_coordinate": bound_per_coordinate(k, p),
    }


def cmd_bounds(run: Run, a) -> None:
    if a.p is not None:
        p = Distribution.from_probs([float(v) for v in a.p.split(",")])
    else:
        p = Distribution.uniform(a.d)
    b = _bounds_for(a.k, p)
    run.write_csv(f"bounds_k{a.k}_d{p.d}", ["bound", "value"], list(b.items()))
    run.summary = {"k": a.k, "d": p.d, "p": p.probs.tolist(), "entropy_nats": entropy(p), "bounds": b}
    print(json.dumps(_jsonable(run.summary)))


def _construct_summary(m, name: str) -> dict:
    p = m.dist
    var = variation(m)
    certs = certify(m)
    return {
        "construction": name,
        "k": m.depth,
        "d": p.d,
        "variation": var,
        "bounds": {c.name: c.rhs for c in certs},
        "slack": {c.name: c.slack for c in certs},
    }, certs


def cmd_construct(run: Run, a) -> None:
    if a.theorem2_family:
        rows = []
        for k, d in THEOREM2_FAMILY:
            v = variation(theorem2_witness(k, d))
            scale = math.sqrt(k * math.log(d))
            rows.append([k, d, v, scale, v / scale])
        run.write_csv("theorem2_family", ["k", "d", "variation", "sqrt_k_ln_d", "ratio"], rows)
        run.summary = {"rows": len(rows)}
        print(csv_text(["k", "d", "variation", "sqrt_k_ln_d", "ratio"], rows), end="")
        return
    if a.weiss is not None:
        m, name = weiss_doubling(a.weiss), f"weiss_{a.weiss}"
    elif a.walk is not None:
        delta = a.delta if a.delta is not None else 1.0 / math.sqrt(a.walk)
        m, name = binary_walk(a.walk, a.p0, delta), f"walk_{a.walk}_{a.p0!r}_{delta!r}"
    elif a.theorem2 is not None:
        k, d = a.theorem2
        m, name = theorem2_witness(k, d), f"theorem2_{k}_{d}"
    else:
        m = random_tree(np.random.default_rng(a.seed), a.d, a.k)
        name = f"random_d{a.d}_k{a.k}_seed{a.seed}"
    summary, certs = _construct_summary(m, name)
    if a.mc:
        mean, se = variation_monte_carlo(m, a.mc, a.seed)
        summary["monte_carlo"] = {"trials": a.mc, "mean": mean, "stderr": se}
    if isinstance(m, ChainedMartingale):
        data = {"chain": [tree_to_dict(f) for f in m.factors], "trailing": m.trailing}
    else:
        data = tree_to_dict(m)
    # indenting a deep nested tree is slow and adds nothing
    run.write_json(name, data, indent=None)
    run.add(certs)
    run.summary = summary
    print(json.dumps(_jsonable(summary)))


def cmd_maxvar(run: Run, a) -> None:
    cells = _cells_for(a.h)
    t0 = time.perf_counter()
    tables = maxvar_tables(a.k, cells)
    runtime = time.perf_counter() - t0
    grid = uniform_grid(cells)
    vk = tables[a.k]
    rows, certs = [], []
    for p, v in zip(grid, vk):
        dist = Distribution((0, 1), [p, 1.0 - p])
        eb = bound_entropy(a.k, dist)
        cb = bound_classical(a.k, 2)
        rows.append([p, v, eb, cb, eb - v, cb - v])
        certs.append(BoundCertificate(f"entropy[p={p!r}]", v, eb + entropy_slack(a.h, a.k)))
        certs.append(BoundCertificate(f"classical[p={p!r}]", v, cb))
    if a.witness is not None:
        w = witness_tree(a.k, a.witness, a.h)
        certs.append(BoundCertificate("witness", w.value, variation(w.tree) + 1e-6))
    stem = f"maxvar_k{a.k}_h{a.h!r}"
    run.write_csv(stem, ["p", "V_k", "entropy_bound", "classical_bound", "slack_entropy", "slack_classical"], rows)
    half = float(vk[cells // 2])
    run.summary = {
        "k": a.k,
        "h": a.h,
        "V_k(1/2)": half,
        "ratio": half / math.sqrt(a.k) if a.k else None,
        "runtime": runtime,
    }
    run.write_json(stem + "_summary", run.summary)
    run.add(certs)
    print(json.dumps(_jsonable(run.summary)))


def _load_game(a) -> IncompleteInfoGame:
    if a.game:
        return IncompleteInfoGame.from_json(Path(a.game).read_text())
    game = zamir_game()
    if a.prior is not None:
        game = game.with_prior([a.prior, 1.0 - a.prior])
    return game


def _priors(step: float) -> np.ndarray:
    n = int(round(1.0 / step))
    if n < 1 or not math.isclose(n * step, 1.0, rel_tol=1e-9):
        raise UsageError("--p-step must divide 1")
    return np.arange(n + 1) / n


GAME_HEADER = ["p", "v_k", "cav_u", "error_term", "bound_eq3", "bound_eq4"]


def _game_rows(report) -> list:
    return [[r.p, r.v_k, r.cav_u, r.error_term, r.bound_eq3, r.bound_eq4] for r in report.rows]


def cmd_game(run: Run, a) -> None:
    game = _load_game(a)
    action = a.action
    if action == "value":
        method = a.method
        if method == "exact" and exact_size(game, a.k) > a.budget:
            method = "recursive"
        report = error_term_table(game, a.k, _priors(a.p_step), method, a.budget, a.h)
        run.approximate = report.approximate
        run.write_csv(f"value_k{a.k}_{report.method}", GAME_HEADER, _game_rows(report))
        run.summary = {
            "k": a.k,
            "method": report.method,
            "requested_method": a.method,
            "approximate": report.approximate,
            "norm": game_norm(game),
        }
    elif action == "cavu":
        ut = u_table(game, a.p_step)
        cav = cav_u_binary(game, a.p_step)
        rows = [[p, x, y] for p, x, y in zip(ut.grid, ut.values, cav.values)]
        run.write_csv("cavu", ["p", "u", "cav_u"], rows)
        run.add(BoundCertificate(f"cav_ge_u[p={p!r}]", x, y) for p, x, y in zip(ut.grid, ut.values, cav.values))
        run.summary = {"max_u": float(ut.values.max()), "max_cav_u": float(cav.values.max())}
    elif action == "certify":
        report = certify_error_term(game, a.k, a.budget, a.h, _priors(a.p_step))
        run.approximate = report.approximate
        run.write_csv(f"certify_k{a.k}", GAME_HEADER, _game_rows(report))
        run.add(report.certificates)
        run.summary = {"k": a.k, "method": report.method, "approximate": report.approximate}
    elif action == "zamir":
        game = zamir_game()
        tables = value_recursive_tables(game, a.k)
        rows = []
        for k, table in enumerate(tables, start=1):
            v = table.at(0.5)
            rows.append([k, v, math.sqrt(k) * v, 3.0 * math.sqrt(2.0 * math.log(2.0) / k)])
            run.add([BoundCertificate(f"logd[k={k}]", v, rows[-1][3]), BoundCertificate(f"positive[k={k}]", 0.0, v)])
        run.approximate = True
        run.write_csv(f"zamir_k{a.k}", ["k", "v_k", "sqrt_k_v_k", "bound_eq4"], rows)
        run.summary = {"k": a.k, "method": "recursive", "approximate": True}
    elif action == "tensor":
        base = zamir_game()
        prod = tensor_power(base, a.times)
        nx, ni, nj = prod.shape
        size = exact_size(prod, a.k)
        row = [a.times, nx, ni, nj, a.k, size]
        summary = {"times": a.times, "states": nx, "rows": ni, "cols": nj, "norm": game_norm(prod)}
        summary["u_at_prior"] = u(prod, prod.prior.probs)
        if size <= a.budget:
            summary["v_k"] = value_exact(prod, a.k, a.budget).value
            if a.times >= 2 and a.k >= 2:
                left = tensor_power(base, a.times - 1)
                cert = certify_superadditivity(left, base, a.k - 1, 1, a.budget)
                run.add([cert])
                summary["superadditivity"] = cert.to_dict()
        else:
            summary["v_k"] = None
            summary["skipped"] = f"tree size {size} exceeds budget {a.budget}"
        run.write_csv(
            f"tensor_x{a.times}_k{a.k}",
            ["times", "states", "rows", "cols", "k", "tree_size", "v_k"],
            [row + [summary["v_k"]]],
        )
        run.summary = summary
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown game action {action!r}")
    run.write_json(f"{action}_summary", run.summary)
    print(json.dumps(_jsonable(run.summary)))


# -- verify-all ------------------------------------------------------------------------


def _worst(family: str, check: str, certs: list) -> list:
    worst = min(certs, key=lambda c: c.slack)
    return [family, check, len(certs), worst.lhs, worst.rhs, worst.slack, all(c.holds for c in certs)]


def verify_all(seed: int, quick: bool) -> tuple[list, list]:
    """Every certificate family at small sizes; returns (csv rows, certificates)."""
    rng = np.random.default_rng(seed)
    rows, every = [], []

    def record(family, check, certs):
        certs = list(certs)
        every.extend(certs)
        rows.append(_worst(family, check, certs))

    # bounds on random trees
    n_trees = 1000 if quick else 10_000
    by_name: dict = {}
    for _ in range(n_trees):
        tree = random_tree(rng, int(rng.integers(1, 9)), int(rng.integers(0, 7)))
        for c in certify(tree):
            by_name.setdefault(c.name, []).append(c)
    for name, certs in by_name.items():
        record("bounds_random", name, certs)

    # bounds on constructions
    constructed = [weiss_doubling(ell) for ell in range(1, (8 if quick else 12) + 1)]
    constructed += [binary_walk(100, 0.5, 0.1)]
    constructed += [theorem2_witness(k, d) for k, d in THEOREM2_FAMILY]
    by_name = {}
    for m in constructed:
        for c in certify(m):
            by_name.setdefault(c.name, []).append(c)
    for name, certs in by_name.items():
        record("bounds_constructions", name, certs)

    # additivity under concatenation
    certs = []
    for _ in range(100 if quick else 1000):
        t1 = random_tree(rng, int(rng.integers(1, 5)), int(rng.integers(0, 4)))
        t2 = random_tree(rng, int(rng.integers(1, 5)), int(rng.integers(0, 4)))
        diff = abs(variation(concat(t1, t2)) - variation(t1) - variation(t2))
        certs.append(BoundCertificate("additivity", diff, 1e-9))
    record("additivity", "concat", certs)

    # witness floor
    record(
        "witness_floor",
        f"{WITNESS_FLOOR}*sqrt(k ln d)",
        [
            BoundCertificate(f"floor[{k},{d}]", WITNESS_FLOOR * math.sqrt(k * math.log(d)), variation(theorem2_witness(k, d)))
            for k, d in THEOREM2_FAMILY
        ],
    )

    # Pinsker, classical and martingale forms
    n_pairs = 2000 if quick else 10_000
    certs, certs8 = [], []
    for _ in range(n_pairs):
        d = int(rng.integers(2, 9))
        p = Distribution.from_probs(rng.dirichlet(np.ones(d)))
        q = Distribution.from_probs(rng.dirichlet(np.ones(d)))
        certs.append(pinsker(p, q))
        n = int(rng.integers(1, 9))
        certs8.append(pinsker_variant(rng.exponential(size=n), rng.dirichlet(np.ones(n))))
    record("pinsker", "classical", certs)
    record("pinsker", "martingale_variant", certs8)

    # DP sandwich on a coarse grid
    tables = maxvar_tables(20, 100)
    grid = uniform_grid(100)
    certs = []
    for k in range(1, 21):
        for p, v in zip(grid, tables[k]):
            dist = Distribution((0, 1), [p, 1.0 - p])
            certs.append(BoundCertificate("dp_entropy", v, bound_entropy(k, dist)))
    record("maxvar", "entropy_sandwich", certs)

    # game error terms
    zamir = zamir_game()
    priors = [0.25, 0.5, 0.75] if quick else list(np.arange(11) / 10)
    for k in (1, 2, 3):
        report = certify_error_term(zamir, k, priors=priors)
        for kind in ("variation", "logd", "cav_u"):
            record("game_error_term", f"zamir_{kind}_k{k}", [c for c in report.certificates if c.name.startswith(kind)])
    record("superadditivity", "zamir_x_zamir_1_1", [certify_superadditivity(zamir, zamir, 1, 1)])

    # solver cross-agreement
    games = [zamir] + [random_game(rng) for _ in range(3 if quick else 10)]
    certs = []
    for g in games:
        for k in (1, 2, 3):
            table = value_recursive(g, k)
            for p in priors:
                ex = value_exact(g.with_prior([p, 1.0 - p]), k).value
                certs.append(BoundCertificate("agreement", abs(ex - table.at(p)), AGREEMENT_TOL))
    record("cross_agreement", "exact_vs_recursive", certs)
    return rows, every


def cmd_verify_all(run: Run, a) -> None:
    rows, certs = verify_all(a.seed, a.quick)
    header = ["family", "check", "n", "worst_lhs", "worst_rhs", "worst_slack", "holds"]
    run.write_csv("verify_all_quick" if a.quick else "verify_all", header, rows)
    run.add(certs)
    run.summary = {"families": len(rows), "certificates": len(certs), "quick": a.quick}
    print(csv_text(header, rows), end="")


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"usage: {message}")


def _positive(name: str, lo: int = 1, hi: int | None = None) -> Callable:
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if v < lo or (hi is not None and v > hi):
            rng = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"{name} must be in {rng}, got {v}")
        return v

    return parse


def _step(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"step must be in (0, 1], got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    # accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--results-dir", default=argparse.SUPPRESS, help=f"results directory (env {RESULTS_ENV}, default ./results)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write this run's files here instead")
    ap = _Parser(prog="martvar", description=__doc__.splitlines()[0], parents=[common])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", parents=[common], help="closed-form variation bounds")
    p.add_argument("--k", type=_positive("k", 0), required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--d", type=_positive("d"))
    g.add_argument("--p", help="comma-separated prior")

    p = sub.add_parser("construct", parents=[common], help="build a lower-bound martingale and certify it")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--weiss", type=_positive("ell", 1, MAX_WEISS_ELL), metavar="ELL")
    g.add_argument("--walk", type=_positive("k", 1, 400), metavar="K")
    g.add_argument("--theorem2", type=_positive("k/d", 1), nargs=2, metavar=("K", "D"))
    g.add_argument("--random", action="store_true", help="random splitting tree (needs --seed)")
    g.add_argument("--theorem2-family", action="store_true", help="variation / sqrt(k ln d) table")
    p.add_argument("--p0", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--d", type=_positive("d", 1, 8), default=3)
    p.add_argument("--k", type=_positive("k", 0, 6), default=4)
    p.add_argument("--mc", type=_positive("trials"), default=0, help="also estimate by simulation (needs --seed)")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("maxvar", parents=[common], help="V(k, p) on two labels by grid concavification (d > 2 unsupported)")
    p.add_argument("--k", type=_positive("k", 0, 2000), required=True)
    p.add_argument("--h", type=float, default=1e-3, help=f"grid step, one of {SUPPORTED_STEPS}")
    p.add_argument("--witness", type=float, default=None, metavar="P", help="also extract and check the witness tree at P")

    p = sub.add_parser("game", parents=[common], help="repeated games with one informed player")
    p.add_argument("action", choices=["value", "cavu", "certify", "zamir", "tensor"])
    p.add_argument("--k", type=_positive("k", 1, 200), default=1)
    p.add_argument("--method", choices=["exact", "recursive"], default="exact")
    p.add_argument("--game", help="game JSON file (default: the Zamir game)")
    p.add_argument("--prior", type=float, default=None, help="first-state prior for the default game")
    p.add_argument("--p-step", type=_step, default=0.1)
    p.add_argument("--h", type=float, default=1e-2, help="maxvar grid step for the variation bound")
    p.add_argument("--budget", type=_positive("budget"), default=DEFAULT_BUDGET)
    p.add_argument("--times", type=_positive("times", 1, 4), default=2)

    p = sub.add_parser("verify-all", parents=[common], help="every certificate family")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int)
    return ap


COMMANDS = {
    "bounds": cmd_bounds,
    "construct": cmd_construct,
    "maxvar": cmd_maxvar,
    "game": cmd_game,
    "verify-all": cmd_verify_all,
}


def _needs_seed(a) -> bool:
    if a.command == "verify-all":
        return True
    return a.command == "construct" and (a.random or a.mc > 0)


def config_from_args(a) -> RunConfig:
    if _needs_seed(a) and a.seed is None:
        raise UsageError(f"usage: --seed is required for {a.command}")
    params = {k: v for k, v in vars(a).items() if k not in ("command", "seed", "results_dir", "out")}
    name = a.command if a.command != "game" else f"game {a.action}"
    results = getattr(a, "results_dir", None) or os.environ.get(RESULTS_ENV) or "results"
    return RunConfig(name, params, getattr(a, "seed", None), results, getattr(a, "out", None))


def run(config: RunConfig, args) -> RunRecord:
    """Execute one command under the results-directory lock."""
    root = Path(config.results_dir)
    root.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(root / LOCK_NAME))
    try:
        lock.acquire(timeout=0)
    except Timeout:
        raise UsageError(f"another run holds the lock on {root}")
    try:
        t0 = time.perf_counter()
        r = Run(config)
        COMMANDS[args.command](r, args)
        record = RunRecord(
            config=asdict(config),
            version=__version__,
            duration=time.perf_counter() - t0,
            outputs=r.outputs,
            certificates=[c.to_dict() for c in r.certificates],
            approximate=r.approximate,
        )
        if record.violations:
            record.exit_code = EXIT_VIOLATION
        with open(root / INDEX_NAME, "a") as fh:
            fh.write(json.dumps(_jsonable(asdict(record))) + "\n")
        return record
    finally:
        lock.release()


def _origin(err: MartvarError) -> str:
    """Component that raised; shared error types report their innermost package frame."""
    if err.module != MartvarError.module:
        return err.module
    for frame in reversed(traceback.extract_tb(err.__traceback__)):
        path = Path(frame.filename)
        if "martvar" in path.parts:
            return path.stem
    return err.module


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        record = run(config_from_args(args), args)
    except MartvarError as err:
        print(f"error [{_origin(err)}]: {err}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as err:
        print(f"error [io]: {err}", file=sys.stderr)
        return EXIT_ERROR
    for c in record.violations:
        print("certificate violated: " + json.dumps(_jsonable(c)), file=sys.stderr)
    if record.approximate:
        print("note: values are approximate (recursive solver)", file=sys.stderr)
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
