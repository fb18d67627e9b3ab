"""Arithmetic over GF(q) for prime q and for q = 256.

Elements are encoded as integers ``0..q-1``.  For GF(256) the encoding is the
polynomial basis byte over x^8 + x^4 + x^3 + x + 1 (the AES polynomial).
All array-level operations accept Python ints or integer numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Field",
    "FieldElement",
    "FieldMismatchError",
    "get_field",
    "add",
    "neg",
    "sample_uniform",
]

AES_POLY = 0x11B
_GF256_GENERATOR = 0x03
# products of two residues must fit in int64
_MAX_PRIME = 2**31


class FieldMismatchError(ValueError):
    """Raised when elements of different fields are combined."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _gf256_tables() -> tuple[np.ndarray, np.ndarray]:
    exp = np.zeros(510, dtype=np.int64)
    log = np.zeros(256, dtype=np.int64)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        # multiply by the generator 0x03: x*2 xor x, reduced mod the AES polynomial
        x2 = x << 1
        if x2 & 0x100:
            x2 ^= AES_POLY
        x = x2 ^ x
    exp[255:510] = exp[0:255]
    return exp, log


class Field:
    """The finite field GF(q), q prime or q = 256."""

    def __init__(self, q: int):
        q = int(q)
        if q == 256:
            self.kind = "binary-extension-2^8"
            self._exp, self._log = _gf256_tables()
        elif _is_prime(q):
            if q >= _MAX_PRIME:
                raise ValueError(f"prime q={q} too large (must be < 2**31)")
            self.kind = "prime"
        else:
            raise ValueError(f"unsupported field size q={q}: need a prime or 256")
        self.q = q
        self._inv_table: np.ndarray | None = None

    def __repr__(self) -> str:
        return f"Field(q={self.q})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("Field", self.q))

    @property
    def is_binary(self) -> bool:
        return self.q == 256

    @property
    def characteristic(self) -> int:
        return 2 if self.is_binary else self.q

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, int(value))

    def validate(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise ValueError(f"values outside 0..{self.q - 1}")
        return arr

    # -- arithmetic (ints or int64 arrays) -------------------------------

    def add(self, a, b):
        if self.is_binary:
            return np.bitwise_xor(a, b)
        return np.mod(np.add(a, b), self.q)

    def neg(self, a):
        if self.is_binary:
            return a
        return np.mod(np.negative(a), self.q)

    def sub(self, a, b):
        if self.is_binary:
            return np.bitwise_xor(a, b)
        return np.mod(np.subtract(a, b), self.q)

    def mul(self, a, b):
        if not self.is_binary:
            return np.mod(np.multiply(a, b, dtype=np.int64), self.q)
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        out = np.where((a == 0) | (b == 0), 0, out)
        return out if out.ndim else int(out)

    def inv(self, a):
        a_arr = np.asarray(a, dtype=np.int64)
        if np.any(a_arr == 0):
            raise ZeroDivisionError("0 has no multiplicative inverse")
        if self.is_binary:
            out = self._exp[(255 - self._log[a_arr]) % 255]
        elif self.q <= 1 << 16:
            if self._inv_table is None:
                table = np.zeros(self.q, dtype=np.int64)
                for v in range(1, self.q):
                    table[v] = pow(v, self.q - 2, self.q)
                self._inv_table = table
            out = self._inv_table[a_arr]
        else:
            flat = [pow(int(v), self.q - 2, self.q) for v in a_arr.ravel()]
            out = np.array(flat, dtype=np.int64).reshape(a_arr.shape)
        return out if out.ndim else int(out)

    def power(self, a: int, e: int) -> int:
        """Square-and-multiply exponentiation of a single element."""
        result, base = 1, int(a)
        e = int(e)
        if e < 0:
            base, e = self.inv(base), -e
        while e:
            if e & 1:
                result = int(self.mul(result, base))
            base = int(self.mul(base, base))
            e >>= 1
        return result

    # -- sampling ---------------------------------------------------------

    def sample(self, rng: np.random.Generator, size=None, exclude_zero: bool = False):
        """Uniform draws over GF(q), or over the nonzero elements."""
        if exclude_zero:
            out = rng.integers(1, self.q, size=size, dtype=np.int64)
        else:
            out = rng.integers(0, self.q, size=size, dtype=np.int64)
        return int(out) if size is None else out


@lru_cache(maxsize=None)
def get_field(q: int) -> Field:
    """Cached field instance for ``q``."""
    return Field(q)


@dataclass(frozen=True)
class FieldElement:
    field: Field
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not an element of GF({self.field.q})")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(
                f"cannot combine GF({self.field.q}) and GF({other.field.q}) elements"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, int(self.field.add(self.value, other.value)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, int(self.field.sub(self.value, other.value)))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, int(self.field.mul(self.value, other.value)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.neg(self.value)))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.inv(self.value)))

    def __int__(self) -> int:
        return self.value


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def neg(a: FieldElement) -> FieldElement:
    return -a


def sample_uniform(
    field: Field, exclude_zero: bool, rng: np.random.Generator
) -> FieldElement:
    return FieldElement(field, field.sample(rng, exclude_zero=exclude_zero))
