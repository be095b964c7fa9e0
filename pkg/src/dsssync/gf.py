"""Prime-field arithmetic.

Scalars are :class:`FieldElement` values; vectors, matrices and tensors are
plain ``int64`` numpy arrays whose entries are canonical representatives in
``[0, q)``.  The array helpers here are the only place that reduces products,
so overflow handling lives in one spot.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import MixedFields, NonPrimeModulus, ZeroInverse

# Keeps a single product of two representatives below 2**62.
MAX_MODULUS = 2**31
_INT64_LIMIT = 2**63 - 1


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    for f in range(3, math.isqrt(q) + 1, 2):
        if q % f == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_q.  Build with :func:`make_field`."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or not is_prime(int(self.q)):
            raise NonPrimeModulus(f"q={self.q} is not prime")
        if self.q >= MAX_MODULUS:
            raise ValueError(f"q={self.q} exceeds the supported bound {MAX_MODULUS}")
        object.__setattr__(self, "q", int(self.q))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    @property
    def bits(self) -> int:
        """Bits needed to send one symbol, ceil(log2 q)."""
        return ceil_log2(self.q)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        return pow(a, -1, self.q)

    def array(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.int64) % self.q

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix (or vector-matrix) product reduced mod q."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        inner = a.shape[-1] if a.ndim else 1
        if inner * (self.q - 1) ** 2 <= _INT64_LIMIT:
            return (a @ b) % self.q
        out = (a.astype(object) @ b.astype(object)) % self.q
        return np.asarray(out, dtype=np.int64)

    def scale(self, c: int, v: np.ndarray) -> np.ndarray:
        return (int(c) % self.q * np.asarray(v, dtype=np.int64)) % self.q


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    if q < 2:
        raise NonPrimeModulus(f"q={q} must be at least 2")
    return FieldSpec(q)


def ceil_log2(x: int) -> int:
    """Integer ceil(log2 x) for x >= 1; ceil_log2(1) == 0."""
    if x < 1:
        raise ValueError("ceil_log2 needs x >= 1")
    return (int(x) - 1).bit_length()


@dataclass(frozen=True)
class FieldElement:
    value: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.spec.q:
            raise ValueError(f"{self.value} not in [0, {self.spec.q})")

    def _other(self, b) -> int:
        if isinstance(b, FieldElement):
            if b.spec != self.spec:
                raise MixedFields(f"F_{self.spec.q} vs F_{b.spec.q}")
            return b.value
        return int(b) % self.spec.q

    def __add__(self, b):
        return self.spec(self.value + self._other(b))

    __radd__ = __add__

    def __sub__(self, b):
        return self.spec(self.value - self._other(b))

    def __rsub__(self, b):
        return self.spec(self._other(b) - self.value)

    def __mul__(self, b):
        return self.spec(self.value * self._other(b))

    __rmul__ = __mul__

    def __neg__(self):
        return self.spec(-self.value)

    def __truediv__(self, b):
        return self * self.spec.inv(self._other(b))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self.spec(pow(self.value, e, self.spec.q))

    def inverse(self) -> "FieldElement":
        return self.spec(self.spec.inv(self.value))

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.spec.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.spec.q))

    def __repr__(self):
        return f"{self.value} (mod {self.spec.q})"


def arith(op: str, a: FieldElement, b: FieldElement | int | None = None) -> FieldElement:
    """Dispatch one of add, sub, mul, inv, pow on field elements.

    ``b`` is ignored for ``inv``; for ``pow`` it is an integer exponent.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown field op {op!r}")
