"""Deterministic event-driven simulation of the chief and the two clusters.

A task costs ``base_cost_per_nnz * nnz(task) * k`` time units, multiplied by
``straggler_slowdown`` on partial stragglers, plus optional shifted-exponential
jitter.  Each worker runs its layers back to back; full stragglers never
respond.  The chief checks coverage after every response.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field as dc_field

import numpy as np

from .analysis import LeakageBudget, PadStats, pad_stats, solve_p_star
from .matrix import DenseMatrix, SparseMatrix, matvec, measure_sparsity
from .pad import PadParams, encode
from .scheme import (
    CLUSTERS,
    TRUSTED,
    UNTRUSTED,
    Incomplete,
    Response,
    SchemeConfig,
    build_plan,
    decode,
    recovery_thresholds,
)

__all__ = [
    "TimingModel",
    "Event",
    "SimReport",
    "UndecodableError",
    "run_simulation",
    "SweepRow",
    "SweepResult",
    "sweep_sparsity_vs_time",
]

Worker = tuple[str, int]  # (cluster, 0-indexed worker)


class UndecodableError(RuntimeError):
    def __init__(self, missing: Incomplete):
        super().__init__(f"computation cannot complete: {missing.describe()}")
        self.missing = missing


@dataclass(frozen=True)
class TimingModel:
    base_cost_per_nnz: float = 1.0
    straggler_slowdown: float = 1.0
    partial_stragglers: frozenset[Worker] = frozenset()
    full_stragglers: frozenset[Worker] = frozenset()
    jitter_rate: float | None = None  # None disables jitter
    jitter_shift: float = 0.0

    def __post_init__(self):
        if self.base_cost_per_nnz <= 0:
            raise ValueError("base_cost_per_nnz must be positive")
        if self.straggler_slowdown < 1:
            raise ValueError("straggler_slowdown must be >= 1")
        if self.jitter_rate is not None and self.jitter_rate <= 0:
            raise ValueError("jitter_rate must be positive")
        if self.jitter_shift < 0:
            raise ValueError("jitter_shift must be >= 0")
        object.__setattr__(self, "partial_stragglers", frozenset(self.partial_stragglers))
        object.__setattr__(self, "full_stragglers", frozenset(self.full_stragglers))

    def full_count(self, cluster: str) -> int:
        return sum(1 for c, _ in self.full_stragglers if c == cluster)


@dataclass(frozen=True)
class Event:
    order: int  # position in the chief's receive order
    cluster: str
    worker: int
    layer: int
    block: int
    nnz: int
    start: float
    finish: float
    new_block: bool
    counted: bool  # False once the cluster had already been decoded


@dataclass
class SimReport:
    events: list[Event]
    decode_time: float
    cluster_decode_time: dict[str, float]
    consumed: dict[str, int]
    thresholds: dict[str, int]
    total_tasks: dict[str, int]
    y: DenseMatrix
    verified: bool
    empirical: dict[str, float]
    analytic: PadStats | None
    params: PadParams

    def summary(self) -> dict[str, object]:
        out: dict[str, object] = {
            "decode_time": self.decode_time,
            "decode_time_untrusted": self.cluster_decode_time[UNTRUSTED],
            "decode_time_trusted": self.cluster_decode_time[TRUSTED],
            "consumed_untrusted": self.consumed[UNTRUSTED],
            "consumed_trusted": self.consumed[TRUSTED],
            "K_u": self.thresholds[UNTRUSTED],
            "K_t": self.thresholds[TRUSTED],
            "tasks_untrusted": self.total_tasks[UNTRUSTED],
            "tasks_trusted": self.total_tasks[TRUSTED],
            "p_z0": self.params.p_z0,
            "p_nz0": self.params.p_nz0,
            "S_R_empirical": self.empirical["S_R"],
            "S_ApR_empirical": self.empirical["S_ApR"],
            "verified": self.verified,
        }
        if self.analytic is not None:
            out["S_R_analytic"] = self.analytic.s_pad
            out["S_ApR_analytic"] = self.analytic.s_padded
            out["eps2"] = self.analytic.eps2
        return out

    def to_csv(self) -> str:
        """Event rows, a blank line, then ``key,value`` summary rows."""
        buf = io.StringIO()
        buf.write("order,cluster,worker,layer,block,nnz,start,finish,new_block,counted\n")
        for e in self.events:
            buf.write(f"{e.order},{e.cluster},{e.worker + 1},{e.layer + 1},{e.block + 1},"
                      f"{e.nnz},{_fmt(e.start)},{_fmt(e.finish)},{int(e.new_block)},"
                      f"{int(e.counted)}\n")
        buf.write("\nkey,value\n")
        for k, v in self.summary().items():
            buf.write(f"{k},{_fmt(v)}\n")
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _task_times(plan, k: int, timing: TimingModel, rng: np.random.Generator):
    """Per-task (start, finish) for every worker, drawn in fixed order."""
    times = {}
    for cluster in CLUSTERS:
        grid = plan.grid(cluster)
        for w in range(grid.shape[0]):
            t = 0.0
            slow = timing.straggler_slowdown if (cluster, w) in timing.partial_stragglers else 1.0
            for j in range(grid.shape[1]):
                cost = timing.base_cost_per_nnz * plan.task(cluster, w, j).nnz * k * slow
                if timing.jitter_rate is not None:
                    cost += timing.jitter_shift + rng.exponential(1.0 / timing.jitter_rate)
                times[(cluster, w, j)] = (t, t + cost)
                t += cost
    return times


def run_simulation(A: SparseMatrix, x: DenseMatrix, params: PadParams, cfg: SchemeConfig,
                   timing: TimingModel, rng: np.random.Generator) -> SimReport:
    """Encode ``A``, distribute the tasks and replay completions in time order.

    Raises :class:`UndecodableError` if the responsive workers cannot cover
    every block of some cluster.
    """
    for c, w in timing.full_stragglers:
        if c not in CLUSTERS or not 0 <= w < cfg.size(c):
            raise ValueError(f"unknown worker {(c, w)}")
    B1, B2 = encode(A, params, rng)
    plan = build_plan(B1, B2, cfg)
    k = x.cols
    times = _task_times(plan, k, timing, rng)

    # (finish, cluster, worker, layer) is the chief's deterministic receive order
    pending = sorted(
        (times[key][1], *key) for key in times if key[:2] not in timing.full_stragglers
    )

    need = {c: cfg.size(c) for c in CLUSTERS}
    seen: dict[str, set[int]] = {c: set() for c in CLUSTERS}
    done_at: dict[str, float] = {}
    consumed = {c: 0 for c in CLUSTERS}
    used: list[Response] = []
    events: list[Event] = []
    for finish, c, w, j in pending:
        if len(done_at) == len(CLUSTERS):
            break
        block = int(plan.grid(c)[w, j])
        task = plan.task(c, w, j)
        counted = c not in done_at
        events.append(Event(len(events) + 1, c, w, j, block, task.nnz, times[(c, w, j)][0],
                            finish, counted and block not in seen[c], counted))
        if not counted:
            continue
        consumed[c] += 1
        used.append(Response(c, w, j, matvec(task, x), finish))
        seen[c].add(block)
        if len(seen[c]) == need[c]:
            done_at[c] = finish

    if len(done_at) < len(CLUSTERS):
        missing = {c: frozenset(set(range(need[c])) - seen[c]) for c in CLUSTERS}
        raise UndecodableError(Incomplete(missing[UNTRUSTED], missing[TRUSTED]))

    y = decode(used, cfg, k, A.rows)
    assert not isinstance(y, Incomplete)
    verified = y == matvec(A, x)

    s_hat = measure_sparsity(A)
    analytic = pad_stats(s_hat, params) if s_hat > 1.0 / A.field.q else None
    K_u, K_t = recovery_thresholds(cfg)
    return SimReport(
        events=events,
        decode_time=max(done_at.values()),
        cluster_decode_time=dict(done_at),
        consumed=consumed,
        thresholds={UNTRUSTED: K_u, TRUSTED: K_t},
        total_tasks={UNTRUSTED: cfg.N1 * cfg.alpha_u, TRUSTED: cfg.N2 * cfg.alpha_t},
        y=y,
        verified=bool(verified),
        empirical={"S_R": measure_sparsity(B1), "S_ApR": measure_sparsity(B2), "S_A": s_hat},
        analytic=analytic,
        params=params,
    )


@dataclass(frozen=True)
class SweepRow:
    eps_rel: float
    z: int
    p_star: float
    S_R: float
    S_ApR: float
    S_R_empirical: float
    S_ApR_empirical: float
    eps2: float
    decode_time: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = dc_field(default_factory=list)

    @property
    def trend_ok(self) -> bool:
        """Decode time never increases as p* grows."""
        ordered = sorted(self.rows, key=lambda r: (r.p_star, r.eps_rel))
        return all(b.decode_time <= a.decode_time for a, b in zip(ordered, ordered[1:]))

    def to_csv(self) -> str:
        head = "eps_rel,z,p_star,S_R,S_ApR,S_R_empirical,S_ApR_empirical,eps2_at_pstar,decode_time\n"
        body = "".join(
            ",".join([_fmt(r.eps_rel), str(r.z), _fmt(r.p_star), _fmt(r.S_R), _fmt(r.S_ApR),
                      _fmt(r.S_R_empirical), _fmt(r.S_ApR_empirical), _fmt(r.eps2),
                      _fmt(r.decode_time)]) + "\n"
            for r in self.rows
        )
        return head + body


def sweep_sparsity_vs_time(A: SparseMatrix, x: DenseMatrix, cfg: SchemeConfig,
                           budgets: list[LeakageBudget], timing: TimingModel,
                           rng: np.random.Generator) -> SweepResult:
    """Solve p* for each budget and simulate the resulting scheme.

    Every budget reuses one child seed, so pads at different p share their
    underlying variates and the timings are directly comparable.
    """
    if any(nxt.eps_rel < cur.eps_rel for cur, nxt in zip(budgets, budgets[1:])):
        raise ValueError("budgets must be sorted by eps_rel")
    field = A.field
    s_hat = measure_sparsity(A)
    seed = int(rng.integers(2**63))
    result = SweepResult()
    for budget in budgets:
        p = solve_p_star(s_hat, field, budget)
        params = PadParams.symmetric(p, field)
        rep = run_simulation(A, x, params, cfg, timing, np.random.default_rng(seed))
        stats = pad_stats(s_hat, params)
        result.rows.append(SweepRow(
            eps_rel=budget.eps_rel, z=budget.z, p_star=p,
            S_R=stats.s_pad, S_ApR=stats.s_padded,
            S_R_empirical=rep.empirical["S_R"], S_ApR_empirical=rep.empirical["S_ApR"],
            eps2=stats.eps2, decode_time=rep.decode_time,
        ))
    return result
