"""Exhaustive and brute-force checks of the closed forms.

The oracles here rebuild the layer assignment by unrolling the shift
recurrence one worker at a time, rather than reusing :func:`cyclic_grid`, and
compute leakage from full joint PMFs rather than the closed forms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .analysis import mi_bruteforce, pad_stats
from .gf import get_field
from .pad import PadParams
from .scheme import recovery_threshold

__all__ = [
    "SuiteResult",
    "recurrence_grid",
    "threshold_oracle",
    "max_collusion_oracle",
    "straggler_oracle",
    "random_leakage_grid",
    "suite_mi",
    "suite_padded_leakage",
    "suite_thresholds",
    "suite_collusion",
    "suite_stragglers",
    "run_all",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" {self.detail}" if self.detail else ""
        return f"{self.name}: {status} ({self.checked} checks){extra}"


def recurrence_grid(N: int, alpha: int) -> list[list[int]]:
    """Layer assignment by direct unrolling: worker (i mod N)+1 at layer j
    gets what worker i had at layer j-1 (1-indexed workers and blocks)."""
    plan = {(i, 1): i for i in range(1, N + 1)}
    for j in range(2, alpha + 1):
        for i in range(1, N + 1):
            plan[(i % N) + 1, j] = plan[i, j - 1]
    return [[plan[i, j] for j in range(1, alpha + 1)] for i in range(1, N + 1)]


def _held_layer(grid: list[list[int]], N: int) -> np.ndarray:
    """held[w, b] = 1-based layer at which worker w holds block b, else a large value."""
    held = np.full((N, N), N + 10, dtype=np.int64)
    for w, row in enumerate(grid):
        for j, b in enumerate(row, start=1):
            held[w, b - 1] = j
    return held


def threshold_oracle(N: int, alpha: int) -> tuple[int, int]:
    """(smallest K s.t. every K-response prefix decodes, largest undecodable prefix).

    A prefix of a sequential completion order is a vector of completed-layer
    counts, one per worker; all such vectors are enumerated.
    """
    held = _held_layer(recurrence_grid(N, alpha), N)
    counts = np.array(list(itertools.product(range(alpha + 1), repeat=N)), dtype=np.int64)
    # covered[v, b]: some worker w has completed layer held[w, b]
    covered = (counts[:, :, None] >= held[None, :, :]).any(axis=1).all(axis=1)
    sums = counts.sum(axis=1)
    worst = int(sums[~covered].max()) if np.any(~covered) else -1
    return worst + 1, worst


def _block_masks(grid: list[list[int]]) -> list[int]:
    return [sum(1 << (b - 1) for b in row) for row in grid]


def max_collusion_oracle(N: int, alpha: int, z: int) -> int:
    masks = _block_masks(recurrence_grid(N, alpha))
    best = 0
    for subset in itertools.combinations(range(N), z):
        u = 0
        for w in subset:
            u |= masks[w]
        best = max(best, bin(u).count("1"))
    return best


def straggler_oracle(N: int, alpha: int, removed: int) -> tuple[bool, bool]:
    """(all removals of ``removed`` workers keep coverage, some removal keeps it)."""
    masks = _block_masks(recurrence_grid(N, alpha))
    full = (1 << N) - 1
    outcomes = []
    for gone in itertools.combinations(range(N), removed):
        u = 0
        for w in range(N):
            if w not in gone:
                u |= masks[w]
        outcomes.append(u == full)
    return all(outcomes), any(outcomes)


def random_leakage_grid(n_points: int, qs=(2, 3, 7, 256), seed: int = 0, symmetric: bool = False):
    """Random (q, s, p_z0, p_nz0) points with s in (1/q, 1]."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_points):
        q = qs[i % len(qs)]
        s = float(1.0 / q + (1.0 - 1.0 / q) * (1.0 - rng.random()))
        if symmetric:
            p = float(rng.uniform(1.0 / q, 1.0))
            out.append((q, s, p, p))
        else:
            out.append((q, s, float(rng.random()), float(rng.random())))
    return out


def suite_mi(n_points: int = 200, qs=(2, 3, 7, 256), tol: float = 1e-10, seed: int = 0) -> SuiteResult:
    worst = 0.0
    for q, s, pz, pnz in random_leakage_grid(n_points, qs, seed):
        params = PadParams(pz, pnz, get_field(q))
        st = pad_stats(s, params)
        worst = max(worst,
                    abs(st.eps2 - mi_bruteforce(s, params, "pad")),
                    abs(st.eps1 - mi_bruteforce(s, params, "padded")))
    return SuiteResult("mi_closed_form_vs_bruteforce", worst <= tol, 2 * n_points, f"max_err={worst:.3g}")


def suite_padded_leakage(n_points: int = 200, qs=(2, 3, 7, 256), tol: float = 1e-10, seed: int = 1) -> SuiteResult:
    worst = 0.0
    for q, s, pz, pnz in random_leakage_grid(n_points, qs, seed, symmetric=True):
        params = PadParams(pz, pnz, get_field(q))
        worst = max(worst, pad_stats(s, params).eps1, mi_bruteforce(s, params, "padded"))
    return SuiteResult("padded_matrix_zero_leakage", worst <= tol, 2 * n_points, f"max={worst:.3g}")


def suite_thresholds(max_n: int = 6) -> SuiteResult:
    bad, checked = [], 0
    for N in range(1, max_n + 1):
        for alpha in range(1, N + 1):
            k_oracle, _ = threshold_oracle(N, alpha)
            checked += 1
            if k_oracle != recovery_threshold(N, alpha):
                bad.append((N, alpha, k_oracle, recovery_threshold(N, alpha)))
    return SuiteResult("recovery_threshold_tightness", not bad, checked, f"mismatches={bad}" if bad else "")


def suite_collusion(max_n: int = 12) -> SuiteResult:
    bad, checked = [], 0
    for N in range(1, max_n + 1):
        for alpha in range(1, N + 1):
            for z in range(1, N + 1):
                checked += 1
                got = max_collusion_oracle(N, alpha, z)
                if got != min(alpha * z, N):
                    bad.append((N, alpha, z, got))
    return SuiteResult("collusion_unique_blocks", not bad, checked, f"mismatches={bad[:5]}" if bad else "")


def suite_stragglers(max_n: int = 8, max_alpha: int = 4) -> SuiteResult:
    bad, checked = [], 0
    for N in range(1, max_n + 1):
        for alpha in range(1, min(max_alpha, N) + 1):
            checked += 1
            tolerate, _ = straggler_oracle(N, alpha, alpha - 1)
            always_covered, _ = straggler_oracle(N, alpha, alpha)
            # removing alpha workers must break coverage for at least one choice
            if not tolerate or always_covered:
                bad.append((N, alpha))
    return SuiteResult("full_straggler_tolerance", not bad, checked, f"failures={bad}" if bad else "")


def run_all(quick: bool = False) -> list[SuiteResult]:
    n = 50 if quick else 200
    return [
        suite_padded_leakage(n),
        suite_mi(n),
        suite_thresholds(5 if quick else 6),
        suite_collusion(8 if quick else 12),
        suite_stragglers(),
    ]
