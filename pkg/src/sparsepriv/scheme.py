"""Two-cluster task assignment with cyclically shifted layers, and the decoder.

The untrusted cluster holds row blocks of ``A + R`` and the partly trusted
cluster holds row blocks of ``R``.  Worker ``i`` (0-indexed) computes layer ``j``
(0-indexed) on block ``(i - j) mod N``: layer 0 is the identity assignment and
each later layer is the previous one shifted by one worker.

Worker and layer indices are 0-based in code and 1-based in text dumps.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from typing import Iterable

import numpy as np

from .gf import Field
from .matrix import DenseMatrix, SparseMatrix, split_rows

__all__ = [
    "UNTRUSTED",
    "TRUSTED",
    "SchemeConfig",
    "TaskPlan",
    "Response",
    "ResponseSet",
    "Incomplete",
    "IntegrityError",
    "cyclic_grid",
    "build_plan",
    "unique_tasks_seen",
    "recovery_threshold",
    "recovery_thresholds",
    "covered_blocks",
    "decode",
    "format_plan",
]

UNTRUSTED = "untrusted"
TRUSTED = "trusted"
CLUSTERS = (UNTRUSTED, TRUSTED)


class IntegrityError(RuntimeError):
    """Two responses for the same block disagree."""


@dataclass(frozen=True)
class SchemeConfig:
    N1: int
    N2: int
    alpha_u: int = 1
    alpha_t: int = 1
    z: int = 1
    field: Field | None = None

    def __post_init__(self):
        if self.N1 < 1 or self.N2 < 1:
            raise ValueError("cluster sizes must be positive")
        if not 1 <= self.alpha_u <= self.N1:
            raise ValueError(f"alpha_u={self.alpha_u} must lie in [1, N1={self.N1}]")
        if not 1 <= self.alpha_t <= self.N2:
            raise ValueError(f"alpha_t={self.alpha_t} must lie in [1, N2={self.N2}]")
        if not 1 <= self.z <= self.N2:
            raise ValueError(f"z={self.z} must lie in [1, N2={self.N2}]")

    def size(self, cluster: str) -> int:
        return self.N1 if cluster == UNTRUSTED else self.N2

    def layers(self, cluster: str) -> int:
        return self.alpha_u if cluster == UNTRUSTED else self.alpha_t

    def grid(self, cluster: str) -> np.ndarray:
        return cyclic_grid(self.size(cluster), self.layers(cluster))


def cyclic_grid(N: int, alpha: int) -> np.ndarray:
    """``grid[worker, layer]`` = block index, shape (N, alpha)."""
    w = np.arange(N)[:, None]
    j = np.arange(alpha)[None, :]
    return (w - j) % N


@dataclass
class TaskPlan:
    config: SchemeConfig
    untrusted: np.ndarray  # (N1, alpha_u) block indices into the A + R split
    trusted: np.ndarray  # (N2, alpha_t) block indices into the R split
    untrusted_blocks: list[SparseMatrix]
    trusted_blocks: list[SparseMatrix]
    original_m: int

    def grid(self, cluster: str) -> np.ndarray:
        return self.untrusted if cluster == UNTRUSTED else self.trusted

    def blocks(self, cluster: str) -> list[SparseMatrix]:
        return self.untrusted_blocks if cluster == UNTRUSTED else self.trusted_blocks

    def task(self, cluster: str, worker: int, layer: int) -> SparseMatrix:
        return self.blocks(cluster)[int(self.grid(cluster)[worker, layer])]

    def worker_blocks(self, cluster: str, worker: int) -> list[int]:
        return [int(b) for b in self.grid(cluster)[worker]]


def build_plan(B1: SparseMatrix, B2: SparseMatrix, cfg: SchemeConfig) -> TaskPlan:
    """Split ``B2 = A + R`` over the untrusted and ``B1 = R`` over the trusted cluster."""
    if B1.shape != B2.shape:
        raise ValueError(f"B1 {B1.shape} and B2 {B2.shape} differ in shape")
    if cfg.field is not None and (B1.field != cfg.field or B2.field != cfg.field):
        raise ValueError("matrices are not over the configured field")
    return TaskPlan(
        config=cfg,
        untrusted=cfg.grid(UNTRUSTED),
        trusted=cfg.grid(TRUSTED),
        untrusted_blocks=split_rows(B2, cfg.N1),
        trusted_blocks=split_rows(B1, cfg.N2),
        original_m=B1.rows,
    )


def unique_tasks_seen(plan: TaskPlan | np.ndarray, workers: Iterable[int]) -> int:
    """Distinct R blocks held by the given (0-indexed) trusted workers."""
    grid = plan.trusted if isinstance(plan, TaskPlan) else np.asarray(plan)
    workers = list(workers)
    if not workers:
        return 0
    return int(np.unique(grid[workers]).size)


def recovery_threshold(N: int, alpha: int) -> int:
    """Responses that always suffice under sequential per-worker layers."""
    return (-alpha * alpha + alpha * (2 * N - 1)) // 2 + 1


def recovery_thresholds(cfg: SchemeConfig) -> tuple[int, int]:
    return recovery_threshold(cfg.N1, cfg.alpha_u), recovery_threshold(cfg.N2, cfg.alpha_t)


def covered_blocks(grid: np.ndarray, completed) -> set[int]:
    """Blocks covered when worker ``w`` has finished its first ``completed[w]`` layers."""
    out: set[int] = set()
    for w, c in enumerate(completed):
        out.update(int(b) for b in grid[w, :c])
    return out


@dataclass(frozen=True)
class Response:
    cluster: str
    worker: int
    layer: int
    result: DenseMatrix
    time: float = 0.0

    @property
    def sort_key(self):
        return (self.time, self.cluster, self.worker, self.layer)


class ResponseSet:
    """Responses keyed by (cluster, worker, layer); appends are thread-safe."""

    def __init__(self, responses: Iterable[Response] = ()):
        self._lock = threading.Lock()
        self._items: dict[tuple[str, int, int], Response] = {}
        for r in responses:
            self.add(r)

    def add(self, response: Response) -> None:
        if response.cluster not in CLUSTERS:
            raise ValueError(f"unknown cluster {response.cluster!r}")
        key = (response.cluster, response.worker, response.layer)
        with self._lock:
            if key in self._items:
                raise ValueError(f"duplicate response for {key}")
            self._items[key] = response

    def ordered(self) -> list[Response]:
        with self._lock:
            return sorted(self._items.values(), key=lambda r: r.sort_key)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self.ordered())

    def count(self, cluster: str) -> int:
        return sum(1 for k in self._items if k[0] == cluster)


@dataclass(frozen=True)
class Incomplete:
    """Decode could not finish; lists uncovered 0-indexed block indices."""

    missing_untrusted: frozenset[int] = dc_field(default_factory=frozenset)
    missing_trusted: frozenset[int] = dc_field(default_factory=frozenset)

    def __bool__(self) -> bool:
        return False

    def describe(self) -> str:
        parts = []
        if self.missing_untrusted:
            parts.append("untrusted blocks " + ",".join(str(b + 1) for b in sorted(self.missing_untrusted)))
        if self.missing_trusted:
            parts.append("trusted blocks " + ",".join(str(b + 1) for b in sorted(self.missing_trusted)))
        return "missing " + "; ".join(parts)


def _collect(responses: Iterable[Response], cluster: str, grid: np.ndarray) -> dict[int, DenseMatrix]:
    got: dict[int, DenseMatrix] = {}
    for r in responses:
        if r.cluster != cluster:
            continue
        block = int(grid[r.worker, r.layer])
        prev = got.get(block)
        if prev is None:
            got[block] = r.result
        elif prev != r.result:
            raise IntegrityError(
                f"{cluster} block {block + 1}: worker {r.worker + 1} layer {r.layer + 1} disagrees"
            )
    return got


def decode(responses: ResponseSet | Iterable[Response], cfg: SchemeConfig,
           x_cols: int, original_m: int) -> DenseMatrix | Incomplete:
    """Reassemble ``y = (A + R) x - R x`` once every block product is present.

    Redundant responses are compared for equality, then discarded.
    """
    responses = list(responses)
    got = {c: _collect(responses, c, cfg.grid(c)) for c in CLUSTERS}
    missing = {c: frozenset(set(range(cfg.size(c))) - set(got[c])) for c in CLUSTERS}
    if missing[UNTRUSTED] or missing[TRUSTED]:
        return Incomplete(missing[UNTRUSTED], missing[TRUSTED])
    stacked = {}
    for c in CLUSTERS:
        parts = [got[c][b].data for b in range(cfg.size(c))]
        full = np.vstack(parts)
        if full.shape[1] != x_cols or full.shape[0] < original_m:
            raise ValueError(f"{c} results have shape {full.shape}, expected >= ({original_m}, {x_cols})")
        stacked[c] = full[:original_m]
    fld = got[UNTRUSTED][0].field
    return DenseMatrix(fld, fld.sub(stacked[UNTRUSTED], stacked[TRUSTED]))


def format_plan(plan: TaskPlan) -> str:
    """One ``cluster worker layer block`` line per task, 1-indexed."""
    lines = ["cluster worker layer block"]
    for c in CLUSTERS:
        grid = plan.grid(c)
        for w in range(grid.shape[0]):
            for j in range(grid.shape[1]):
                lines.append(f"{c} {w + 1} {j + 1} {int(grid[w, j]) + 1}")
    return "\n".join(lines) + "\n"
