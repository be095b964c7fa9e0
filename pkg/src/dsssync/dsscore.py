"""Base (n, k, d, alpha, B) storage codes and their block extension.

A code is described by a generator of shape ``B x (n * alpha)``: column
``t * alpha + a`` gives the ``a``-th symbol stored at node ``t`` as a linear
form in the B data units.  Extending to blocks of length ``ell`` applies the
same map to every coordinate independently, so the stored data is an
``n x alpha x ell`` tensor.

Only MDS instances (alpha = 1, B = d = k) are built here, but encode,
reconstruct and repair work off the generator alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb

import numpy as np

from .errors import BadSubsetSize, FieldTooSmall, LengthMismatch, Singular
from .gf import FieldSpec, make_field
from .matlib import _inverse_array, make_general, rank, right_inverse


@dataclass(frozen=True, eq=False)
class CodeSpec:
    n: int
    k: int
    d: int
    alpha: int
    B: int
    field: FieldSpec
    generator: np.ndarray
    _solve_cache: dict = dc_field(default_factory=dict, repr=False)
    _conn_cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        g = self.field.array(self.generator)
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        if g.shape != (self.B, self.n * self.alpha):
            raise ValueError(f"generator shape {g.shape} != ({self.B}, {self.n * self.alpha})")
        if not (self.k <= self.n and self.d <= self.n - 1):
            raise ValueError(f"need k <= n and d <= n-1, got n={self.n} k={self.k} d={self.d}")

    @property
    def q(self) -> int:
        return self.field.q

    def node_columns(self, nodes) -> list[int]:
        a = self.alpha
        return [t * a + j for t in nodes for j in range(a)]

    def solver(self, nodes: tuple[int, ...]) -> np.ndarray:
        """Matrix S with ``data = S @ stacked_node_contents`` for this node set."""
        nodes = tuple(int(t) for t in nodes)
        hit = self._solve_cache.get(nodes)
        if hit is not None:
            return hit
        gt = self.generator[:, self.node_columns(nodes)]
        if gt.shape[0] == gt.shape[1]:
            try:
                s = _inverse_array(self.field, gt.T)
            except Singular:
                raise Singular(f"nodes {nodes} do not form an information set") from None
        else:
            # B x (|T| alpha) of full row rank: transpose of a right inverse
            s = right_inverse(make_general(self.field, gt)).entries.T.copy()
        s.setflags(write=False)
        self._solve_cache[nodes] = s
        return s

    @property
    def systematic_nodes(self) -> tuple[int, ...]:
        """Nodes whose contents equal raw data units (alpha = 1 codes only)."""
        if self.alpha != 1:
            return ()
        out = []
        g = self.generator
        for t in range(self.n):
            col = g[:, t]
            nz = np.nonzero(col)[0]
            if nz.size == 1 and col[nz[0]] == 1 and nz[0] == t:
                out.append(t)
        return tuple(out)


@dataclass
class StorageTensor:
    C: np.ndarray

    @property
    def ell(self) -> int:
        return self.C.shape[2]

    @property
    def matrix(self) -> np.ndarray:
        """``n x ell`` view for alpha = 1 codes, as the worked examples print it."""
        if self.C.shape[1] != 1:
            raise ValueError("matrix view needs alpha == 1")
        return self.C[:, 0, :]

    def node(self, t: int) -> np.ndarray:
        return self.C[t]

    def copy(self) -> "StorageTensor":
        return StorageTensor(self.C.copy())

    def __eq__(self, other):
        if isinstance(other, StorageTensor):
            return np.array_equal(self.C, other.C)
        return NotImplemented


def is_mds(spec: CodeSpec) -> bool:
    for cols in combinations(range(spec.n), spec.k):
        if rank(spec.generator[:, list(cols)], spec.field) < spec.k:
            return False
    return True


def make_single_parity(k: int, q: int) -> CodeSpec:
    """[k+1, k] code storing the k data units and their sum."""
    f = make_field(q)
    g = np.concatenate([np.eye(k, dtype=np.int64), np.ones((k, 1), dtype=np.int64)], axis=1)
    return CodeSpec(n=k + 1, k=k, d=k, alpha=1, B=k, field=f, generator=g)


def make_rs_systematic(n: int, k: int, q: int) -> CodeSpec:
    """Systematic Reed-Solomon [n, k] code over F_q.

    Evaluates message polynomials at the points 0, 1, ..., n-1 and then
    left-multiplies by the inverse of the first k columns so the generator
    starts with I_k.
    """
    f = make_field(q)
    if n > q:
        raise FieldTooSmall(f"RS code of length {n} needs q >= {n}, got {q}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k} n={n}")
    pts = np.arange(n, dtype=np.int64)
    g0 = np.array([[pow(int(a), i, q) for a in pts] for i in range(k)], dtype=np.int64)
    g = f.matmul(_inverse_array(f, g0[:, :k]), g0)
    spec = CodeSpec(n=n, k=k, d=k, alpha=1, B=k, field=f, generator=g)
    if comb(n, k) <= 5000:
        assert is_mds(spec)
    return spec


def _stack_blocks(spec: CodeSpec, blocks) -> np.ndarray:
    if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
        x = blocks
    else:
        lengths = {len(b) for b in blocks}
        if len(lengths) > 1:
            raise LengthMismatch(f"blocks have different lengths {sorted(lengths)}")
        x = np.array([np.asarray(b, dtype=np.int64) for b in blocks], dtype=np.int64)
        if x.ndim == 1:
            x = x.reshape(len(blocks), 0)
    if x.shape[0] != spec.B:
        raise LengthMismatch(f"expected {spec.B} blocks, got {x.shape[0]}")
    return x % spec.q


def encode_block(spec: CodeSpec, blocks) -> StorageTensor:
    x = _stack_blocks(spec, blocks)
    c = spec.field.matmul(spec.generator.T, x)
    return StorageTensor(c.reshape(spec.n, spec.alpha, x.shape[1]))


def _as_slices(spec: CodeSpec, slices, count: int) -> np.ndarray:
    s = np.asarray(slices, dtype=np.int64)
    if s.ndim == 2 and spec.alpha == 1:
        s = s[:, None, :]
    if s.ndim != 3 or s.shape[0] != count or s.shape[1] != spec.alpha:
        raise LengthMismatch(f"slices of shape {s.shape} do not match {count} nodes")
    return s


def _solve(spec: CodeSpec, T, slices) -> np.ndarray:
    T = tuple(int(t) for t in T)
    s = _as_slices(spec, slices, len(T))
    stacked = s.reshape(len(T) * spec.alpha, s.shape[2])
    return spec.field.matmul(spec.solver(T), stacked)


def reconstruct_block(spec: CodeSpec, T, slices) -> np.ndarray:
    """Recover the ``B x ell`` data from the contents of the k nodes in ``T``."""
    if len(set(T)) != spec.k or len(T) != spec.k:
        raise BadSubsetSize(f"reconstruction needs {spec.k} distinct nodes, got {list(T)}")
    return _solve(spec, T, slices)


def repair_node(spec: CodeSpec, t: int, T, slices) -> np.ndarray:
    """Regenerate the ``alpha x ell`` contents of node ``t`` from the d nodes in ``T``."""
    if len(set(T)) != spec.d or len(T) != spec.d or t in T:
        raise BadSubsetSize(f"repair of node {t} needs {spec.d} other nodes, got {list(T)}")
    x = _solve(spec, T, slices)
    g = spec.generator[:, spec.node_columns([t])]
    return spec.field.matmul(g.T, x)


def connected_nodes(spec: CodeSpec, s: int) -> frozenset[int]:
    """Nodes whose contents depend on data unit ``s``."""
    hit = spec._conn_cache.get(s)
    if hit is None:
        a = spec.alpha
        row = spec.generator[s]
        hit = frozenset(t for t in range(spec.n) if np.any(row[t * a:(t + 1) * a]))
        spec._conn_cache[s] = hit
    return hit
