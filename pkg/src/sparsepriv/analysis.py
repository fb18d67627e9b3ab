"""Sparsity and leakage of the dependent pad, in q-ary units.

Closed forms assume an i.i.d. source with ``Pr[A_ij = 0] = s`` and equiprobable
nonzero symbols.  Every PMF that shows up has one "special" mass and ``q - 1``
equal masses, so its entropy only depends on the special mass and ``q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .gf import Field
from .pad import PadParams, SourceModel

__all__ = [
    "Pmf",
    "PadStats",
    "LeakageBudget",
    "MonotonicityReport",
    "entropy_q",
    "special_entropy",
    "source_entropy",
    "sparsity_padded",
    "sparsity_pad",
    "pad_stats",
    "joint_pmf",
    "mi_bruteforce",
    "collusion_fraction",
    "collusion_leakage",
    "per_entry_bound",
    "eps2_symmetric",
    "solve_p_star",
    "grid_p_star",
    "check_monotonicity",
]

# rounding slack for nonnegativity and budget comparisons
NEG_TOL = 1e-12
P_STAR_TOL = 1e-9


@dataclass(frozen=True)
class Pmf:
    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size < 2:
            raise ValueError("a PMF needs at least two masses")
        if np.any(m < 0) or abs(m.sum() - 1.0) > 1e-12:
            raise ValueError("masses must be nonnegative and sum to 1")
        object.__setattr__(self, "masses", m)

    @property
    def q(self) -> int:
        return self.masses.size

    @classmethod
    def special(cls, mass: float, q: int, position: int = 0) -> "Pmf":
        out = np.full(q, (1.0 - mass) / (q - 1))
        out[position] = mass
        return cls(out)


@dataclass(frozen=True)
class PadStats:
    s_padded: float  # S(A + R)
    s_pad: float  # S(R)
    eps1: float  # per-entry I_q(A + R; A)
    eps2: float  # per-entry I_q(R; A)


@dataclass(frozen=True)
class LeakageBudget:
    eps_rel: float
    z: int
    N2: int
    alpha: int = 1

    def __post_init__(self):
        if not 0.0 <= self.eps_rel <= 1.0:
            raise ValueError(f"eps_rel={self.eps_rel} must lie in [0, 1]")
        if not 1 <= self.z <= self.N2:
            raise ValueError(f"z={self.z} must lie in [1, N2={self.N2}]")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")


def entropy_q(p, q: int | None = None) -> float:
    """q-ary entropy with 0 log 0 = 0; ``q`` defaults to the number of masses."""
    masses = p.masses if isinstance(p, Pmf) else Pmf(p).masses
    q = masses.size if q is None else q
    nz = masses[masses > 0]
    return float(-(nz * np.log(nz)).sum() / math.log(q))


def special_entropy(mass: float, q: int) -> float:
    """H_q of [mass, (1-mass)/(q-1), ..., (1-mass)/(q-1)]."""
    h = 0.0
    if mass > 0:
        h -= mass * math.log(mass)
    rest = 1.0 - mass
    if rest > 0:
        h -= rest * math.log(rest / (q - 1))
    return h / math.log(q)


def source_entropy(s: float, q: int) -> float:
    return special_entropy(s, q)


def _nonneg(value: float, what: str) -> float:
    if value < -NEG_TOL:
        raise ArithmeticError(f"{what} evaluated to {value} < 0")
    return max(value, 0.0)


def _check_s(s: float, q: int) -> None:
    if not 1.0 / q < s <= 1.0:
        raise ValueError(f"s={s} must lie in (1/q, 1] for q={q}")


def sparsity_padded(s: float, p_z0: float, p_nz0: float) -> float:
    return (p_z0 - p_nz0) * s + p_nz0


def sparsity_pad(s: float, p_z0: float, p_nz0: float, q: int) -> float:
    return p_z0 * s + (1.0 - p_nz0) * (1.0 - s) / (q - 1)


def pad_stats(s: float, params: PadParams) -> PadStats:
    q = params.field.q
    _check_s(s, q)
    pz, pnz = params.p_z0, params.p_nz0
    s_padded = sparsity_padded(s, pz, pnz)
    s_pad = sparsity_pad(s, pz, pnz, q)
    cond = s * special_entropy(pz, q) + (1.0 - s) * special_entropy(pnz, q)
    eps1 = 0.0 if pz == pnz else _nonneg(special_entropy(s_padded, q) - cond, "eps1")
    eps2 = _nonneg(special_entropy(s_pad, q) - cond, "eps2")
    return PadStats(s_padded, s_pad, eps1, eps2)


def joint_pmf(s: float, params: PadParams, which: str = "pad") -> np.ndarray:
    """Joint PMF of (A_ij, R_ij) (``which='pad'``) or (A_ij, A_ij + R_ij).

    Rows are indexed by the value of A, columns by the observed symbol; built
    by direct enumeration of the conditional PMFs with field arithmetic.
    """
    fld: Field = params.field
    q = fld.q
    p_a = SourceModel(s, fld).pmf()
    values = np.arange(q, dtype=np.int64)
    joint = np.zeros((q, q))
    for a in range(q):
        special, p_special = (0, params.p_z0) if a == 0 else (int(fld.neg(a)), params.p_nz0)
        cond = np.where(values == special, p_special, (1.0 - p_special) / (q - 1))
        if which == "pad":
            cols = values
        elif which == "padded":
            cols = fld.add(a, values)
        else:
            raise ValueError(f"which must be 'pad' or 'padded', not {which!r}")
        joint[a, cols] += p_a[a] * cond
    return joint


def mi_bruteforce(s: float, params: PadParams, which: str = "pad") -> float:
    """Exact I_q between A_ij and the observed symbol, summed over all q*q cells."""
    q = params.field.q
    if q > 1 << 10:
        raise ValueError(f"q={q} too large to enumerate")
    _check_s(s, q)
    joint = joint_pmf(s, params, which)
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    ratio = joint[mask] / (pa * pb)[mask]
    mi = float((joint[mask] * np.log(ratio)).sum() / math.log(q))
    return _nonneg(mi, "brute-force MI")


def collusion_fraction(budget: LeakageBudget) -> float:
    return min(budget.alpha * budget.z / budget.N2, 1.0)


def collusion_leakage(budget: LeakageBudget, m: int, n: int, stats: PadStats) -> float:
    """Worst-case leakage to ``z`` colluding trusted workers."""
    return collusion_fraction(budget) * m * n * stats.eps2


def per_entry_bound(s: float, q: int, budget: LeakageBudget) -> float:
    """Largest admissible per-entry pad leakage for the relative budget."""
    return budget.eps_rel * source_entropy(s, q) / collusion_fraction(budget)


def eps2_symmetric(p: float, s: float, q: int) -> float:
    cond = special_entropy(p, q)
    s_pad = sparsity_pad(s, p, p, q)
    return _nonneg(special_entropy(s_pad, q) - cond, "eps2")


def _feasible(eps: float, bound: float) -> bool:
    return eps <= bound + NEG_TOL * max(1.0, bound)


def solve_p_star(s: float, field: Field, budget: LeakageBudget, tol: float = P_STAR_TOL) -> float:
    """Largest p in [1/q, 1] (with p_z0 = p_nz0 = p) meeting the leakage budget.

    Bisection; relies on the pad leakage increasing in p above 1/q.
    """
    q = field.q
    _check_s(s, q)
    bound = per_entry_bound(s, q, budget)
    lo = 1.0 / q
    # leakage vanishes only at p = 1/q
    if bound <= 0.0:
        return lo
    if _feasible(eps2_symmetric(1.0, s, q), bound):
        return 1.0
    hi = 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _feasible(eps2_symmetric(mid, s, q), bound):
            lo = mid
        else:
            hi = mid
    return lo


def grid_p_star(s: float, field: Field, budget: LeakageBudget, step: float = 1e-4) -> float:
    """Grid-scan counterpart of :func:`solve_p_star` (no monotonicity assumed)."""
    q = field.q
    bound = per_entry_bound(s, q, budget)
    grid = np.append(np.arange(1.0 / q, 1.0, step), 1.0)
    best = 1.0 / q
    for p in grid:
        if _feasible(eps2_symmetric(float(p), s, q), bound):
            best = float(p)
    return best


@dataclass
class MonotonicityReport:
    s: float
    q: int
    slope: float  # d S(R) / dp
    intercept: float
    sparsity_increasing: bool
    leakage_nondecreasing: bool
    min_leakage_at_uniform: bool
    violations: list[tuple[float, float]] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.sparsity_increasing and self.leakage_nondecreasing and self.min_leakage_at_uniform


def check_monotonicity(s: float, field: Field, grid: int = 1000, tol: float = 1e-14) -> MonotonicityReport:
    """Evaluate S(R) and the pad leakage on ``grid`` points of [1/q, 1]."""
    q = field.q
    _check_s(s, q)
    ps = np.linspace(1.0 / q, 1.0, grid)
    slope = (s * q - 1.0) / (q - 1)
    intercept = (1.0 - s) / (q - 1)
    s_pad = np.array([sparsity_pad(s, p, p, q) for p in ps])
    eps = np.array([eps2_symmetric(float(p), s, q) for p in ps])
    violations = []
    for i in np.flatnonzero(np.diff(s_pad) <= 0):
        violations.append((float(ps[i]), float(ps[i + 1])))
    sparsity_ok = not violations and np.allclose(s_pad, slope * ps + intercept, rtol=0, atol=1e-14)
    bad_eps = np.flatnonzero(np.diff(eps) < -tol)
    violations.extend((float(ps[i]), float(ps[i + 1])) for i in bad_eps)
    return MonotonicityReport(
        s=s, q=q, slope=slope, intercept=intercept,
        sparsity_increasing=bool(sparsity_ok),
        leakage_nondecreasing=bad_eps.size == 0,
        min_leakage_at_uniform=bool(eps[0] <= tol and np.all(eps >= eps[0] - tol)),
        violations=violations,
    )
