"""Structured matrices over F_q.

A :class:`StructuredMatrix` carries a kind tag next to its entries so that
row/column deletions can keep the structure (a Vandermonde matrix minus a
row and its trailing column is still Vandermonde).  Permutation matrices are
kept as a row->column map and only materialized when someone asks for
``entries``.

Indices are 0-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateNodes,
    FieldTooSmall,
    IndexOutOfRange,
    RankDeficient,
    Singular,
)
from .gf import FieldSpec


@dataclass(frozen=True)
class PermutationCompact:
    """``map[i]`` is the column holding the 1 in row ``i``."""

    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(c) for c in self.map))
        if sorted(self.map) != list(range(len(self.map))):
            raise ValueError(f"{self.map} is not a permutation")

    def __len__(self):
        return len(self.map)

    def move_row(self, src: int, dst: int) -> "PermutationCompact":
        m = list(self.map)
        m.insert(dst, m.pop(src))
        return PermutationCompact(tuple(m))

    def materialize(self) -> np.ndarray:
        n = len(self.map)
        out = np.zeros((n, n), dtype=np.int64)
        out[np.arange(n), list(self.map)] = 1
        return out


# Kind tags ---------------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Permutation:
    perm: PermutationCompact


@dataclass(frozen=True)
class Vandermonde:
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class Cauchy:
    a: tuple[int, ...]
    b: tuple[int, ...]


@dataclass(frozen=True)
class BlockDiag:
    top: "StructuredMatrix"
    bottom: "StructuredMatrix"


@dataclass(frozen=True)
class General:
    pass


Kind = Identity | Permutation | Vandermonde | Cauchy | BlockDiag | General


@dataclass(frozen=True, eq=False)
class StructuredMatrix:
    field: FieldSpec
    rows: int
    cols: int
    kind: Kind
    _entries: np.ndarray | None = dc_field(default=None, repr=False)

    @cached_property
    def entries(self) -> np.ndarray:
        if self._entries is not None:
            out = self._entries
        else:
            out = _materialize(self)
        out = np.array(out, dtype=np.int64)
        out.setflags(write=False)
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def kind_name(self) -> str:
        return type(self.kind).__name__

    @cached_property
    def inverse_or_right_inverse(self) -> "StructuredMatrix":
        # cached per matrix instance; matrices are immutable
        if self.rows == self.cols:
            return inverse(self)
        return right_inverse(self)

    def row(self, i: int) -> np.ndarray:
        if isinstance(self.kind, Permutation):
            out = np.zeros(self.cols, dtype=np.int64)
            out[self.kind.perm.map[i]] = 1
            return out
        return self.entries[i]

    def __eq__(self, other):
        if not isinstance(other, StructuredMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and np.array_equal(self.entries, other.entries))

    __hash__ = None

    def tolist(self) -> list[list[int]]:
        return self.entries.tolist()

    def __repr__(self):
        return f"StructuredMatrix({self.kind_name}, {self.rows}x{self.cols}, {self.tolist()})"


def _materialize(m: StructuredMatrix) -> np.ndarray:
    q = m.field.q
    k = m.kind
    if isinstance(k, Identity):
        return np.eye(m.rows, m.cols, dtype=np.int64)
    if isinstance(k, Permutation):
        return k.perm.materialize()
    if isinstance(k, Vandermonde):
        out = np.empty((m.rows, m.cols), dtype=np.int64)
        for i, a in enumerate(k.nodes):
            out[i] = [pow(a, j, q) for j in range(m.cols)]
        return out
    if isinstance(k, Cauchy):
        return np.array([[m.field.inv(a - b) for b in k.b] for a in k.a], dtype=np.int64)
    if isinstance(k, BlockDiag):
        out = np.zeros((m.rows, m.cols), dtype=np.int64)
        t, b = k.top, k.bottom
        out[:t.rows, :t.cols] = t.entries
        out[t.rows:, t.cols:] = b.entries
        return out
    raise TypeError(f"{k!r} has no implicit entries")


# Constructors ------------------------------------------------------------

def make_general(field: FieldSpec, entries) -> StructuredMatrix:
    e = field.array(entries)
    if e.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {e.shape}")
    return StructuredMatrix(field, e.shape[0], e.shape[1], General(), e)


def make_identity(field: FieldSpec, ell: int) -> StructuredMatrix:
    return StructuredMatrix(field, ell, ell, Identity())


def make_permutation(field: FieldSpec, perm) -> StructuredMatrix:
    if not isinstance(perm, PermutationCompact):
        perm = PermutationCompact(tuple(perm))
    n = len(perm)
    return StructuredMatrix(field, n, n, Permutation(perm))


def make_vandermonde(field: FieldSpec, nodes, cols: int) -> StructuredMatrix:
    """Row ``i`` is ``(a_i**0, ..., a_i**(cols-1))``, so the first column is all ones."""
    nodes = tuple(int(a) % field.q for a in nodes)
    if len(set(nodes)) != len(nodes):
        raise DuplicateNodes(f"Vandermonde nodes {nodes} are not distinct")
    if len(nodes) > field.q:
        raise FieldTooSmall(f"{len(nodes)} distinct nodes do not fit in F_{field.q}")
    return StructuredMatrix(field, len(nodes), cols, Vandermonde(nodes))


def default_vandermonde_nodes(field: FieldSpec, ell: int) -> tuple[int, ...]:
    """Nodes 1, 2, ..., ell reduced mod q (so ell == q uses node 0 last)."""
    if ell > field.q:
        raise FieldTooSmall(f"Vandermonde of order {ell} needs q >= {ell}, got {field.q}")
    return tuple(i % field.q for i in range(1, ell + 1))


def make_cauchy(field: FieldSpec, a, b) -> StructuredMatrix:
    a = tuple(int(x) % field.q for x in a)
    b = tuple(int(x) % field.q for x in b)
    if len(a) + len(b) > field.q:
        raise FieldTooSmall(f"Cauchy {len(a)}x{len(b)} needs q >= {len(a) + len(b)}")
    if len(set(a + b)) != len(a) + len(b):
        raise DuplicateNodes(f"Cauchy parameters {a}, {b} are not pairwise distinct")
    return StructuredMatrix(field, len(a), len(b), Cauchy(a, b))


def make_blockdiag(top: StructuredMatrix, bottom: StructuredMatrix) -> StructuredMatrix:
    if top.field != bottom.field:
        raise DimensionMismatch("blocks live in different fields")
    return StructuredMatrix(top.field, top.rows + bottom.rows, top.cols + bottom.cols,
                            BlockDiag(top, bottom))


# Elimination -------------------------------------------------------------

def rref(field: FieldSpec, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns, first-nonzero pivoting."""
    q = field.q
    a = np.array(m, dtype=np.int64) % q
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = (a[r] * field.inv(int(a[r, c]))) % q
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % q
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: StructuredMatrix | np.ndarray, field: FieldSpec | None = None) -> int:
    if isinstance(m, StructuredMatrix):
        field, m = m.field, m.entries
    return len(rref(field, m)[1])


def _inverse_array(field: FieldSpec, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a % field.q, np.eye(n, dtype=np.int64)], axis=1)
    red, piv = rref(field, aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise Singular(f"{n}x{n} matrix is singular over F_{field.q}")
    return red[:, n:]


def inverse(m: StructuredMatrix) -> StructuredMatrix:
    if m.rows != m.cols:
        raise DimensionMismatch(f"inverse needs a square matrix, got {m.shape}")
    k = m.kind
    if isinstance(k, Identity):
        return m
    if isinstance(k, Permutation):
        inv = [0] * m.rows
        for r, c in enumerate(k.perm.map):
            inv[c] = r
        return make_permutation(m.field, inv)
    return make_general(m.field, _inverse_array(m.field, m.entries))


def right_inverse(m: StructuredMatrix) -> StructuredMatrix:
    """A cols x rows matrix R with ``m @ R == I_rows``.

    R is zero except on the pivot columns of ``m``, where it holds the
    inverse of the square pivot submatrix.
    """
    if m.rows > m.cols:
        raise RankDeficient(f"{m.shape} matrix cannot have a right inverse")
    if m.rows == m.cols:
        return inverse(m)
    _, piv = rref(m.field, m.entries)
    if len(piv) < m.rows:
        raise RankDeficient(f"rank {len(piv)} < {m.rows} rows")
    sub = m.entries[:, piv]
    out = np.zeros((m.cols, m.rows), dtype=np.int64)
    out[piv, :] = _inverse_array(m.field, sub)
    return make_general(m.field, out)


# Structural edits --------------------------------------------------------

def _check_index(i: int, n: int, what: str):
    if not 0 <= i < n:
        raise IndexOutOfRange(f"{what} index {i} outside [0, {n})")


def delete_row(m: StructuredMatrix, i: int) -> StructuredMatrix:
    _check_index(i, m.rows, "row")
    k = m.kind
    if isinstance(k, Vandermonde):
        return StructuredMatrix(m.field, m.rows - 1, m.cols,
                                Vandermonde(k.nodes[:i] + k.nodes[i + 1:]))
    if isinstance(k, Cauchy):
        return StructuredMatrix(m.field, m.rows - 1, m.cols, Cauchy(k.a[:i] + k.a[i + 1:], k.b))
    if isinstance(k, BlockDiag):
        if i < k.top.rows:
            return make_blockdiag(delete_row(k.top, i), k.bottom)
        return make_blockdiag(k.top, delete_row(k.bottom, i - k.top.rows))
    return make_general(m.field, np.delete(m.entries, i, axis=0))


def delete_col(m: StructuredMatrix, j: int) -> StructuredMatrix:
    _check_index(j, m.cols, "column")
    k = m.kind
    if isinstance(k, Vandermonde) and j == m.cols - 1:
        return StructuredMatrix(m.field, m.rows, m.cols - 1, k)
    if isinstance(k, Cauchy):
        return StructuredMatrix(m.field, m.rows, m.cols - 1, Cauchy(k.a, k.b[:j] + k.b[j + 1:]))
    if isinstance(k, BlockDiag):
        if j < k.top.cols:
            return make_blockdiag(delete_col(k.top, j), k.bottom)
        return make_blockdiag(k.top, delete_col(k.bottom, j - k.top.cols))
    return make_general(m.field, np.delete(m.entries, j, axis=1))


def delete_trailing_cols(m: StructuredMatrix, count: int) -> StructuredMatrix:
    for _ in range(count):
        m = delete_col(m, m.cols - 1)
    return m


def delete_row_col(m: StructuredMatrix, i: int, j: int) -> StructuredMatrix:
    """Drop row ``i`` and column ``j``; an identity minus a diagonal cross stays identity."""
    if isinstance(m.kind, Identity) and i == j:
        _check_index(i, m.rows, "row")
        return make_identity(m.field, m.rows - 1)
    return delete_col(delete_row(m, i), j)


def move_row(m: StructuredMatrix, src: int, dst: int) -> StructuredMatrix:
    """Remove row ``src`` and reinsert it so that it ends up at index ``dst``."""
    _check_index(src, m.rows, "row")
    _check_index(dst, m.rows, "row")
    k = m.kind
    if isinstance(k, Identity):
        k = Permutation(PermutationCompact(tuple(range(m.rows))))
    if isinstance(k, Permutation):
        return make_permutation(m.field, k.perm.move_row(src, dst))
    e = list(m.entries)
    e.insert(dst, e.pop(src))
    return make_general(m.field, np.array(e))


def mat_mul(a: StructuredMatrix, b: StructuredMatrix) -> StructuredMatrix:
    if a.field != b.field:
        raise DimensionMismatch("matrices live in different fields")
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return make_general(a.field, a.field.matmul(a.entries, b.entries))


def vec_mat_mul(x, m: StructuredMatrix) -> np.ndarray:
    x = m.field.array(x)
    if x.shape[-1] != m.rows:
        raise DimensionMismatch(f"vector of length {x.shape[-1]} vs {m.shape} matrix")
    if isinstance(m.kind, Identity):
        return x.copy()
    if isinstance(m.kind, Permutation):
        out = np.zeros(x.shape[:-1] + (m.cols,), dtype=np.int64)
        out[..., list(m.kind.perm.map)] = x
        return out
    return m.field.matmul(x, m.entries)
