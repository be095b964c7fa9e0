"""Recovering a single unknown deletion from a stored VT syndrome.

The syndrome of ``x`` (length ``ell``) is the pair

* ``nu1 = sum(x) mod q``
* ``nu2 = sum(i * [x_i <= x_{i+1}] for i = 1..ell-1) mod ell``

with comparisons on integer representatives.  This is the q-ary
Tenengolts construction, which corrects one deletion.  Instead of an
analytic decoder we try every (position, value) insertion, which is exact
and cheap at the sizes used here.

With an [n, k] systematic MDS code the syndromes of the k users can be
protected by n - k coded shares held at the check nodes, so up to n - k
users with an unknown deletion can each recover their own syndrome.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsscore import CodeSpec, encode_block, reconstruct_block
from .errors import AmbiguousRecovery, NoCandidate, TooManyAffected


@dataclass(frozen=True)
class VtSyndrome:
    nu1: int
    nu2: int
    ell: int

    def __post_init__(self):
        if not 0 <= self.nu2 < self.ell:
            raise ValueError(f"nu2={self.nu2} outside [0, {self.ell})")


def vt_syndrome(x, q: int) -> VtSyndrome:
    x = [int(v) % q for v in x]
    ell = len(x)
    if ell == 0:
        raise ValueError("syndrome of an empty string")
    nu2 = sum(i for i in range(1, ell) if x[i - 1] <= x[i]) % ell
    return VtSyndrome(sum(x) % q, nu2, ell)


@dataclass(frozen=True)
class Recovery:
    string: tuple[int, ...]
    position: int       # leftmost 0-based index at which the value fits back in
    value: int


def vt_recover(shortened, syndrome: VtSyndrome, q: int) -> Recovery:
    """Undo one deletion by trying every insertion; identical completions are merged."""
    y = [int(v) % q for v in shortened]
    if len(y) != syndrome.ell - 1:
        raise ValueError(f"expected length {syndrome.ell - 1}, got {len(y)}")
    # nu1 pins the deleted value
    value = (syndrome.nu1 - sum(y)) % q
    found: dict[tuple[int, ...], int] = {}
    for pos in range(syndrome.ell):
        cand = tuple(y[:pos] + [value] + y[pos:])
        if cand in found:
            continue
        if vt_syndrome(cand, q) == syndrome:
            found[cand] = pos
    if not found:
        raise NoCandidate("no single insertion matches the syndrome")
    if len(found) > 1:
        raise AmbiguousRecovery(f"{len(found)} distinct strings match the syndrome")
    (string, pos), = found.items()
    return Recovery(string, pos, value)


def encode_syndrome_shares(spec: CodeSpec, syndromes) -> np.ndarray:
    """Coded syndromes: row t is the (nu1, nu2) pair held by node t.

    Rows of systematic nodes equal the users' own syndromes; the remaining
    n - k rows are the extra values stored at the check nodes.
    """
    syndromes = list(syndromes)
    if len(syndromes) != spec.k or spec.B != spec.k or spec.alpha != 1:
        raise ValueError("shares need an [n, k] MDS code and one syndrome per user")
    if spec.n - spec.k >= spec.k:
        raise ValueError(f"shares need n - k < k, got n={spec.n} k={spec.k}")
    for s in syndromes:
        if s.ell != spec.q:
            raise ValueError(f"coded shares assume ell == q, got ell={s.ell} q={spec.q}")
    pairs = np.array([[s.nu1, s.nu2] for s in syndromes], dtype=np.int64)
    return encode_block(spec, pairs).matrix.copy()


def share_storage_bits(spec: CodeSpec) -> int:
    return 2 * (spec.n - spec.k) * spec.field.bits


def recover_own_syndrome(spec: CodeSpec, user: int, values: dict[int, tuple[int, int]]) -> VtSyndrome:
    """Syndrome of ``user`` from the coded pairs of any k nodes.

    ``values`` maps node index to the pair it supplies: an unaffected user's
    own syndrome for a systematic node, a stored share for a check node.
    """
    if len(values) < spec.k:
        raise TooManyAffected(f"need {spec.k} values, only {len(values)} available")
    T = sorted(values)[:spec.k]
    slices = np.array([[values[t]] for t in T], dtype=np.int64).reshape(spec.k, 1, 2)
    data = reconstruct_block(spec, T, slices)
    return VtSyndrome(int(data[user, 0]), int(data[user, 1]), spec.q)
