"""Dependent sparse one-time pad.

Each pad entry ``R[i, j]`` depends only on ``A[i, j]``: it hits a "special"
value (0 when ``A[i, j] == 0``, ``-A[i, j]`` otherwise) with probability
``p_z0`` / ``p_nz0`` and is uniform over the remaining ``q - 1`` values
otherwise.  The encoded pair is ``(B1, B2) = (R, A + R)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import Field
from .matrix import SparseMatrix, add_entrywise

__all__ = [
    "PadParams",
    "SourceModel",
    "sample_source",
    "generate_pad",
    "encode",
    "decode_pair",
]


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value} must lie in [0, 1]")


@dataclass(frozen=True)
class PadParams:
    p_z0: float
    p_nz0: float
    field: Field

    def __post_init__(self):
        _check_prob("p_z0", self.p_z0)
        _check_prob("p_nz0", self.p_nz0)

    @classmethod
    def symmetric(cls, p: float, field: Field) -> "PadParams":
        return cls(p, p, field)

    @property
    def is_symmetric(self) -> bool:
        return self.p_z0 == self.p_nz0


@dataclass(frozen=True)
class SourceModel:
    """i.i.d. source: 0 with probability ``s``, each nonzero with (1-s)/(q-1)."""

    s: float
    field: Field

    def __post_init__(self):
        if not 1.0 / self.field.q < self.s <= 1.0:
            raise ValueError(f"sparsity s={self.s} must lie in (1/q, 1] for q={self.field.q}")

    def pmf(self) -> np.ndarray:
        q = self.field.q
        out = np.full(q, (1.0 - self.s) / (q - 1))
        out[0] = self.s
        return out


def _draw_other(special: np.ndarray, index: np.ndarray) -> np.ndarray:
    # index in 0..q-2 enumerates GF(q) minus {special}
    return index + (index >= special)


def sample_source(model: SourceModel, m: int, n: int, rng: np.random.Generator) -> SparseMatrix:
    field = model.field
    zero = rng.random((m, n)) < model.s
    vals = rng.integers(1, field.q, size=(m, n), dtype=np.int64)
    vals[zero] = 0
    return SparseMatrix.from_dense(vals, field)


def generate_pad(A: SparseMatrix, params: PadParams, rng: np.random.Generator) -> SparseMatrix:
    """Draw R entry-wise from the two conditional PMFs.

    Two variates are drawn per entry in a fixed order regardless of the
    parameters, so one seed couples pads drawn at different ``p``.
    """
    field = params.field
    if A.field != field:
        raise ValueError(f"A is over GF({A.field.q}) but params over GF({field.q})")
    m, n = A.shape
    u = rng.random((m, n))
    idx = rng.integers(0, field.q - 1, size=(m, n), dtype=np.int64)
    a = A.to_dense()
    nonzero = a != 0
    special = np.where(nonzero, field.neg(a), 0)
    hit = u < np.where(nonzero, params.p_nz0, params.p_z0)
    r = np.where(hit, special, _draw_other(special, idx))
    return SparseMatrix.from_dense(r, field)


def encode(A: SparseMatrix, params: PadParams, rng: np.random.Generator) -> tuple[SparseMatrix, SparseMatrix]:
    """Return ``(B1, B2) = (R, A + R)``."""
    R = generate_pad(A, params, rng)
    return R, add_entrywise(A, R)


def decode_pair(B1: SparseMatrix, B2: SparseMatrix) -> SparseMatrix:
    """Recover ``A = B2 - B1``."""
    if B1.shape != B2.shape:
        raise ValueError(f"shape mismatch: {B1.shape} vs {B2.shape}")
    return add_entrywise(B2, B1.neg())
