"""Synchronization protocols between users and storage nodes.

Every protocol mutates a :class:`StorageState` in place (blocks, matrices,
node tensor) and returns a :class:`RoundReport` whose ``messages`` are the
ledger entries produced by that call.  Positions are 0-based.

Bit accounting uses integer ceilings: ``ceil(log2 ell)`` per position,
``ceil(log2 q)`` per symbol, one bit per edit-type flag.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
import math

import numpy as np

from . import analysis
from .dsscore import CodeSpec, StorageTensor, connected_nodes, encode_block
from .errors import (
    EditMismatch,
    FieldTooSmall,
    IndexOutOfRange,
    InfeasibleBudget,
    MissingValue,
    NonUniformEdits,
    NoPadSlack,
)
from .gf import ceil_log2
from .intermediary import IntermediaryConfig, encode_star, reconstruct_star, repair_star
from .matlib import (
    BlockDiag,
    Cauchy,
    Identity,
    Permutation,
    StructuredMatrix,
    delete_col,
    delete_row,
    delete_row_col,
    delete_trailing_cols,
    make_identity,
    move_row,
)


class EditKind(str, Enum):
    DELETION = "deletion"
    INSERTION = "insertion"


@dataclass(frozen=True)
class EditEvent:
    user: int
    kind: EditKind
    position: int
    value: int | None = None


def deletion(user: int, position: int, value: int | None = None) -> EditEvent:
    return EditEvent(user, EditKind.DELETION, position, value)


def insertion(user: int, position: int, value: int) -> EditEvent:
    return EditEvent(user, EditKind.INSERTION, position, value)


class MsgKind(str, Enum):
    POSITION = "position"
    VALUE = "value"
    TYPE_BIT = "type_bit"
    SYMBOL_SPAN = "symbol_span"
    SYNDROME_SHARE = "syndrome_share"
    # Scheme T traffic with the central node; kept apart from user->node cost
    COORDINATION = "coordination"


@dataclass(frozen=True)
class SyncMessage:
    src: str            # "user" or "coordinator"
    src_id: int
    dst: str            # "node", "user" or "coordinator"
    dst_id: int
    kind: MsgKind
    payload_symbols: int
    bits: int
    round: int = 0


@dataclass
class CostLedger:
    entries: list[SyncMessage] = field(default_factory=list)
    round: int = 0

    def extend(self, msgs):
        self.entries.extend(msgs)

    def total_bits(self, kind: MsgKind | None = None) -> int:
        return sum(m.bits for m in self.entries if kind is None or m.kind == kind)

    def pair_bits(self, messages=None) -> dict[tuple[int, int], int]:
        """Bits sent from each user to each node, coordination excluded."""
        return pair_bits(self.entries if messages is None else messages)


def pair_bits(messages) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = defaultdict(int)
    for m in messages:
        if m.src == "user" and m.dst == "node" and m.kind != MsgKind.COORDINATION:
            out[(m.src_id, m.dst_id)] += m.bits
    return dict(out)


@dataclass
class StorageState:
    """Everything the users and nodes hold between rounds.

    ``blocks[s]`` always has length ``config.matrices[s].rows``; schemes that
    pad with zeros (P, H, multi-deletion T) track the unpadded length in
    ``lengths``.
    """

    spec: CodeSpec
    config: IntermediaryConfig
    blocks: list[np.ndarray]
    tensor: StorageTensor
    lengths: list[int]
    ledger: CostLedger = field(default_factory=CostLedger)
    ell_star: int | None = None

    @classmethod
    def create(cls, spec: CodeSpec, config: IntermediaryConfig, blocks, lengths=None,
               ell_star=None) -> "StorageState":
        blocks = [spec.field.array(b) for b in blocks]
        if lengths is None:
            lengths = [len(b) for b in blocks]
        return cls(spec, config, blocks, encode_star(spec, config, blocks), list(lengths),
                   ell_star=ell_star)

    @property
    def ell(self) -> int:
        return self.config.ell

    @property
    def field(self):
        return self.spec.field

    def logical_blocks(self) -> list[np.ndarray]:
        return [b[:n] for b, n in zip(self.blocks, self.lengths)]


@dataclass
class RoundReport:
    messages: list[SyncMessage]
    D: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def pair_bits(self) -> dict[tuple[int, int], int]:
        return pair_bits(self.messages)


class _Round:
    """Collects the messages of one protocol round."""

    def __init__(self, state: StorageState):
        self.state = state
        state.ledger.round += 1
        self.round = state.ledger.round
        self.messages: list[SyncMessage] = []

    def send(self, src, src_id, dst, dst_id, kind, symbols, bits):
        self.messages.append(SyncMessage(src, src_id, dst, dst_id, kind, symbols, bits, self.round))

    def to_nodes(self, s: int, kind: MsgKind, symbols: int, bits: int, nodes=None):
        if nodes is None:
            nodes = sorted(connected_nodes(self.state.spec, s))
        for t in nodes:
            self.send("user", s, "node", t, kind, symbols, bits)

    def close(self, **kw) -> RoundReport:
        self.state.ledger.extend(self.messages)
        return RoundReport(self.messages, **kw)


def _unit_encode(spec: CodeSpec, s: int, vec: np.ndarray) -> np.ndarray:
    u = np.zeros((spec.B, len(vec)), dtype=np.int64)
    u[s] = vec
    return encode_block(spec, u).C


def _check_deletion(state: StorageState, e: EditEvent) -> int:
    s, i = e.user, e.position
    if e.kind != EditKind.DELETION:
        raise ValueError(f"expected a deletion, got {e.kind.value}")
    if not 0 <= i < state.lengths[s]:
        raise IndexOutOfRange(f"user {s}: position {i} outside [0, {state.lengths[s]})")
    actual = int(state.blocks[s][i])
    if e.value is not None and int(e.value) % state.spec.q != actual:
        raise EditMismatch(f"user {s}: position {i} holds {actual}, edit says {e.value}")
    return actual


def _group(edits) -> dict[int, list[EditEvent]]:
    g: dict[int, list[EditEvent]] = defaultdict(list)
    for e in edits:
        g[e.user].append(e)
    return g


# Scheme T ----------------------------------------------------------------

def _require_identity(state: StorageState):
    for m in state.config.matrices:
        if not isinstance(m.kind, Identity):
            raise ValueError("Scheme T runs on the traditional (identity) encoding")


def _span_update(state: StorageState, rnd: _Round, new_blocks, lo: int, hi: int, new_ell: int):
    """Rebuild node coordinates [lo, hi) from spans received from connected users."""
    spec = state.spec
    old = state.tensor.C
    new = np.empty((spec.n, spec.alpha, new_ell), dtype=np.int64)
    new[:, :, :lo] = old[:, :, :lo]
    span = hi - lo
    if hi < new_ell:
        new[:, :, hi:] = old[:, :, hi + 1:hi + 1 + new_ell - hi]
    conn = [connected_nodes(spec, s) for s in range(spec.B)]
    if span:
        for s in range(spec.B):
            rnd.to_nodes(s, MsgKind.SYMBOL_SPAN, span, span * spec.field.bits, sorted(conn[s]))
        # Node t only reads spans of users in N^-1(t), and the code maps the
        # other users to zero at t, so one joint encoding serves every node.
        spans = np.array([b[lo:hi] for b in new_blocks], dtype=np.int64)
        new[:, :, lo:hi] = encode_block(spec, spans).C
    state.tensor = StorageTensor(new)


def scheme_t_round(state: StorageState, edits) -> RoundReport:
    """One deletion per user, traditional encoding, span update."""
    _require_identity(state)
    spec, ell = state.spec, state.ell
    by_user = _group(edits)
    if sorted(by_user) != list(range(spec.B)) or any(len(v) != 1 for v in by_user.values()):
        raise NonUniformEdits("Scheme T needs exactly one deletion per user")
    rnd = _Round(state)
    pos = {}
    for s, (e,) in by_user.items():
        _check_deletion(state, e)
        pos[s] = e.position
    pb = ceil_log2(ell)
    for s in range(spec.B):
        rnd.send("user", s, "coordinator", -1, MsgKind.COORDINATION, 0, pb)
        rnd.send("coordinator", -1, "user", s, MsgKind.COORDINATION, 0, 2 * pb)
    lo, hi = min(pos.values()), max(pos.values())
    new_blocks = [np.delete(state.blocks[s], pos[s]) for s in range(spec.B)]
    _span_update(state, rnd, new_blocks, lo, hi, ell - 1)
    state.blocks = new_blocks
    state.lengths = [n - 1 for n in state.lengths]
    state.config = IntermediaryConfig(tuple(make_identity(spec.field, ell - 1) for _ in range(spec.B)))
    return rnd.close(info={"i_min": lo, "i_max": hi, "span": hi - lo})


def scheme_t_round_multi(state: StorageState, edits) -> RoundReport:
    """Any number of deletions per user; coordinates from the first deletion on are resent.

    The new length is ``ell - min_s d_s``; shorter blocks are padded with zeros.
    """
    _require_identity(state)
    spec, ell = state.spec, state.ell
    by_user = _group(edits)
    rnd = _Round(state)
    if not by_user:
        return rnd.close(info={"i_min": None, "span": 0})
    dels = {}
    for s, evs in by_user.items():
        for e in evs:
            _check_deletion(state, e)
        ps = sorted({e.position for e in evs})
        if len(ps) != len(evs):
            raise ValueError(f"user {s} deletes the same position twice")
        dels[s] = ps
    counts = [len(dels.get(s, ())) for s in range(spec.B)]
    new_ell = ell - min(counts)
    pb = ceil_log2(ell)
    for s in range(spec.B):
        rnd.send("user", s, "coordinator", -1, MsgKind.COORDINATION, 0, 2 * pb)
        rnd.send("coordinator", -1, "user", s, MsgKind.COORDINATION, 0, 2 * pb)
    lo = min(p for ps in dels.values() for p in ps)
    new_blocks = []
    for s in range(spec.B):
        b = np.delete(state.blocks[s], dels.get(s, []))
        new_blocks.append(np.concatenate([b, np.zeros(new_ell - len(b), dtype=np.int64)]))
    _span_update(state, rnd, new_blocks, lo, new_ell, new_ell)
    state.blocks = new_blocks
    state.lengths = [n - c for n, c in zip(state.lengths, counts)]
    state.config = IntermediaryConfig(tuple(make_identity(spec.field, new_ell) for _ in range(spec.B)))
    return rnd.close(info={"i_min": lo, "span": new_ell - lo})


# Scheme P ----------------------------------------------------------------

def p_update(a: StructuredMatrix, kind: EditKind, i: int) -> tuple[StructuredMatrix, int]:
    """Matrix update of Scheme P; returns the new matrix and the touched coordinate j."""
    if isinstance(a.kind, Identity):
        perm = tuple(range(a.rows))
    elif isinstance(a.kind, Permutation):
        perm = a.kind.perm.map
    else:
        raise ValueError(f"Scheme P needs a permutation matrix, got {a.kind_name}")
    last = a.rows - 1
    if kind == EditKind.DELETION:
        return move_row(a, i, last), perm[i]
    return move_row(a, last, i), perm[last]


def scheme_p_apply_edit(state: StorageState, edit: EditEvent) -> RoundReport:
    spec, ell = state.spec, state.ell
    s, i = edit.user, edit.position
    x = state.blocks[s]
    n = state.lengths[s]
    if edit.kind == EditKind.DELETION:
        value = _check_deletion(state, edit)
        new_x = np.append(np.delete(x, i), 0)
        n -= 1
    else:
        if n >= ell:
            raise NoPadSlack(f"user {s}: block is full ({n} of {ell}), no room to insert")
        if not 0 <= i <= n:
            raise IndexOutOfRange(f"user {s}: insertion point {i} outside [0, {n}]")
        if edit.value is None:
            raise MissingValue("an insertion needs its value")
        value = int(edit.value) % spec.q
        new_x = np.insert(x, i, value)[:-1]
        n += 1
    a_new, j = p_update(state.config.matrices[s], edit.kind, i)

    rnd = _Round(state)
    nodes = sorted(connected_nodes(spec, s))
    rnd.to_nodes(s, MsgKind.VALUE, 1, spec.field.bits, nodes)
    rnd.to_nodes(s, MsgKind.TYPE_BIT, 0, 1, nodes)
    rnd.to_nodes(s, MsgKind.POSITION, 0, ceil_log2(ell), nodes)

    unit = np.zeros(ell, dtype=np.int64)
    unit[j] = value
    D = _unit_encode(spec, s, unit)
    sign = -1 if edit.kind == EditKind.DELETION else 1
    for t in nodes:
        state.tensor.C[t] = (state.tensor.C[t] + sign * D[t]) % spec.q

    state.blocks[s] = new_x
    state.lengths[s] = n
    state.config = state.config.replace(s, a_new)
    return rnd.close(D=D, info={"j": j, "value": value})


# Scheme V ----------------------------------------------------------------

def v_update(a: StructuredMatrix, rows, new_cols: int) -> StructuredMatrix:
    """Drop the given rows and keep only the first ``new_cols`` columns."""
    for r in sorted(rows, reverse=True):
        a = delete_row(a, r)
    return delete_trailing_cols(a, a.cols - new_cols)


def _v_round(state: StorageState, edits, send_values: bool = True) -> RoundReport:
    spec, ell = state.spec, state.ell
    by_user = _group(edits)
    rnd = _Round(state)
    if not by_user:
        return rnd.close(info={"new_ell": ell})
    dels: dict[int, list[tuple[int, int]]] = {}
    for s, evs in by_user.items():
        for e in evs:
            if e.value is None and send_values:
                raise MissingValue(f"user {s}: deleted value at {e.position} is unknown")
        pairs = sorted((e.position, _check_deletion(state, e)) for e in evs)
        if len({p for p, _ in pairs}) != len(pairs):
            raise ValueError(f"user {s} deletes the same position twice")
        dels[s] = pairs
    counts = [len(dels.get(s, ())) for s in range(spec.B)]
    new_ell = ell - min(counts)

    pb, vb = ceil_log2(ell), spec.field.bits
    d_rows = np.zeros((spec.B, ell), dtype=np.int64)
    for s, pairs in dels.items():
        a = state.config.matrices[s]
        for p, v in pairs:
            d_rows[s] = (d_rows[s] + v * a.row(p)) % spec.q
            if send_values:
                rnd.to_nodes(s, MsgKind.VALUE, 1, vb)
            rnd.to_nodes(s, MsgKind.POSITION, 0, pb)
    D = encode_block(spec, d_rows).C
    state.tensor = StorageTensor(((state.tensor.C - D) % spec.q)[:, :, :new_ell].copy())

    mats = list(state.config.matrices)
    for s in range(spec.B):
        ps = [p for p, _ in dels.get(s, ())]
        mats[s] = v_update(mats[s], ps, new_ell)
        if ps:
            state.blocks[s] = np.delete(state.blocks[s], ps)
            state.lengths[s] -= len(ps)
    state.config = IntermediaryConfig(tuple(mats), state.config.systematic)
    return rnd.close(D=D, info={"new_ell": new_ell, "d_rows": d_rows})


def scheme_v_round(state: StorageState, edits) -> RoundReport:
    """One deletion per user, Vandermonde intermediary matrices."""
    by_user = _group(edits)
    if sorted(by_user) != list(range(state.spec.B)) or any(len(v) != 1 for v in by_user.values()):
        raise NonUniformEdits("Scheme V round needs exactly one deletion per user")
    return _v_round(state, edits)


def scheme_v_round_nonuniform(state: StorageState, edits) -> RoundReport:
    """Each user deletes any number of symbols; positions refer to the pre-round block."""
    return _v_round(state, edits)


# Scheme C ----------------------------------------------------------------

def scheme_c_round(state: StorageState, edits) -> RoundReport:
    """Scheme V variant where user 0 keeps A = I and sends only its position.

    Every node drops the coordinate user 0 deleted, so user 0's position goes
    to all nodes; the other users' Cauchy matrices lose that column too.
    """
    spec, ell = state.spec, state.ell
    if 2 * ell > spec.q:
        raise FieldTooSmall(f"Cauchy variant needs 2*ell <= q, got ell={ell}, q={spec.q}")
    mats = state.config.matrices
    if not isinstance(mats[0].kind, Identity) or not all(isinstance(m.kind, Cauchy) for m in mats[1:]):
        raise ValueError("Scheme C needs A_0 = I and Cauchy matrices for the other users")
    by_user = _group(edits)
    if sorted(by_user) != list(range(spec.B)) or any(len(v) != 1 for v in by_user.values()):
        raise NonUniformEdits("Scheme C round needs exactly one deletion per user")
    rnd = _Round(state)
    pb, vb = ceil_log2(ell), spec.field.bits
    e0 = by_user[0][0]
    _check_deletion(state, e0)
    i1 = e0.position
    rnd.to_nodes(0, MsgKind.POSITION, 0, pb, range(spec.n))
    d_rows = np.zeros((spec.B, ell), dtype=np.int64)
    for s in range(1, spec.B):
        e = by_user[s][0]
        if e.value is None:
            raise MissingValue(f"user {s}: deleted value at {e.position} is unknown")
        v = _check_deletion(state, e)
        d_rows[s] = v * mats[s].row(e.position) % spec.q
        rnd.to_nodes(s, MsgKind.VALUE, 1, vb)
        rnd.to_nodes(s, MsgKind.POSITION, 0, pb)
    D = encode_block(spec, d_rows).C
    state.tensor = StorageTensor(np.delete((state.tensor.C - D) % spec.q, i1, axis=2))
    new = [delete_row_col(mats[0], i1, i1)]
    for s in range(1, spec.B):
        new.append(delete_col(delete_row(mats[s], by_user[s][0].position), i1))
    for s in range(spec.B):
        state.blocks[s] = np.delete(state.blocks[s], by_user[s][0].position)
        state.lengths[s] -= 1
    state.config = IntermediaryConfig(tuple(new), state.config.systematic)
    return rnd.close(D=D, info={"dropped_column": i1})


# Scheme H ----------------------------------------------------------------

def scheme_h_apply_edit(state: StorageState, edit: EditEvent) -> RoundReport:
    """Hybrid scheme: Vandermonde head, identity tail of length ``ell_star``.

    A head deletion is a Scheme V update without the column drop; a tail
    deletion ships the whole tail difference and pads the block with a zero.
    """
    spec, ell = state.spec, state.ell
    s, i = edit.user, edit.position
    a = state.config.matrices[s]
    if not isinstance(a.kind, BlockDiag):
        raise ValueError(f"Scheme H needs a block-diagonal matrix, got {a.kind_name}")
    value = _check_deletion(state, edit)
    head = a.kind.top.rows
    head_width = a.kind.top.cols
    x = state.blocks[s]
    rnd = _Round(state)
    if i < head:
        if edit.value is None:
            raise MissingValue(f"user {s}: deleted value at {i} is unknown")
        coded = value * a.row(i) % spec.q
        rnd.to_nodes(s, MsgKind.VALUE, 1, spec.field.bits)
        rnd.to_nodes(s, MsgKind.POSITION, 0, ceil_log2(max(head_width, 1)))
        state.config = state.config.replace(s, delete_row(a, i))
        state.blocks[s] = np.delete(x, i)
        branch = "head"
    else:
        tail = x[head:]
        new_tail = np.append(np.delete(tail, i - head), 0)
        d = (tail - new_tail) % spec.q
        coded = np.concatenate([np.zeros(head_width, dtype=np.int64), d])
        rnd.to_nodes(s, MsgKind.SYMBOL_SPAN, len(d), len(d) * spec.field.bits)
        state.blocks[s] = np.concatenate([x[:head], new_tail])
        branch = "tail"
    D = _unit_encode(spec, s, coded)
    state.tensor.C[:] = (state.tensor.C - D) % spec.q
    state.lengths[s] -= 1
    return rnd.close(D=D, info={"branch": branch})


# Hybrid tuning and assignment ---------------------------------------------

@dataclass(frozen=True)
class GammaChoice:
    gamma: float
    balance_root: float
    cap: float
    cap_active: bool
    lambert_statement: float      # W(q**(ell-1) ln q) / (ell ln q)
    lambert_proof: float          # same with q**(ell+1)
    comm_bits: float
    storage_bits: float


def hybrid_costs(ell: int, q: int, gamma: float) -> tuple[float, float]:
    """Worst-case (communication, storage overhead) bits of the hybrid scheme."""
    lq = math.log2(q)
    head = math.log2(gamma * ell)
    return max(head + lq, (1 - gamma) * ell * lq), max(head, 0.0)


def balance_residual(ell: int, q: int, gamma: float) -> float:
    lq = math.log2(q)
    return math.log2(gamma * ell) + lq - (1 - gamma) * ell * lq


def choose_gamma(ell: int, q: int, budget: float) -> GammaChoice:
    """Split fraction minimizing the hybrid worst case under a storage budget.

    The unconstrained optimum is where the two branch costs balance; it is
    found by bisection.  The budget caps ``log2(gamma * ell)``.
    """
    if budget <= 0:
        raise InfeasibleBudget(f"storage budget must be positive, got {budget}")
    lo, hi = 0.0, 1.0
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if mid == 0.0 or balance_residual(ell, q, mid) < 0:
            lo = mid
        else:
            hi = mid
    root = lo if abs(balance_residual(ell, q, lo)) <= abs(balance_residual(ell, q, hi)) else hi
    # gamma <= 1 anyway, so budgets beyond log2(ell) + 1 never bind
    cap = 2.0 ** min(budget, math.log2(ell) + 1) / ell
    gamma = min(root, cap)
    lnq = math.log(q)
    stmt = analysis.lambert_w_of_log((ell - 1) * lnq + math.log(lnq)) / (ell * lnq)
    proof = analysis.lambert_w_of_log((ell + 1) * lnq + math.log(lnq)) / (ell * lnq)
    comm, storage = hybrid_costs(ell, q, gamma)
    return GammaChoice(gamma, root, cap, cap < root, stmt, proof, comm, storage)


def aggregate_cost(ell: int, q: int, theta: float, probs, chosen) -> float:
    p = sum(probs[s] for s in chosen)
    le, lq = math.log2(ell), math.log2(q)
    return le + p * lq + (1 - p) * ell * lq + theta * p * le


def aggregate_assignment(ell: int, q: int, theta: float, probs) -> tuple[frozenset[int], float]:
    """Users to run Scheme P/V (all or none) and the resulting aggregate cost."""
    threshold = (ell - 1) * math.log2(q) / math.log2(ell)
    chosen = frozenset(range(len(probs))) if theta <= threshold else frozenset()
    return chosen, aggregate_cost(ell, q, theta, probs, chosen)


# Deduplication -----------------------------------------------------------

def find_pattern(block, pattern) -> int | None:
    e = len(pattern)
    pat = list(pattern)
    b = list(block)
    for i in range(len(b) - e + 1):
        if b[i:i + e] == pat:
            return i
    return None


def dedup_round(state: StorageState, pattern) -> RoundReport:
    """Remove the leftmost occurrence of ``pattern`` from every block holding it."""
    spec = state.spec
    pattern = [int(v) % spec.q for v in pattern]
    e = len(pattern)
    rnd = _Round(state)
    bits = e * spec.field.bits
    for s in range(spec.B):
        rnd.send("coordinator", -1, "user", s, MsgKind.SYMBOL_SPAN, e, bits)
    for t in range(spec.n):
        rnd.send("coordinator", -1, "node", t, MsgKind.SYMBOL_SPAN, e, bits)
    report = rnd.close()
    hits = {}
    for s, b in enumerate(state.logical_blocks()):
        i = find_pattern(b, pattern)
        if i is not None:
            hits[s] = i
    report.info["matches"] = hits
    if not e:
        return report
    for k in range(e):
        if not hits:
            break
        edits = [deletion(s, i, pattern[k]) for s, i in hits.items()]
        sub = _v_round(state, edits, send_values=False)
        report.messages.extend(sub.messages)
    return report


# Post-round checks -------------------------------------------------------

def consistency_failures(state: StorageState, max_subsets: int = 64,
                         rng: np.random.Generator | None = None) -> list[str]:
    """Reconstruct from every k-subset (or a sample) and repair every node."""
    spec = state.spec
    out = []
    expected = encode_star(spec, state.config, state.blocks)
    if not np.array_equal(expected.C, state.tensor.C):
        out.append("tensor differs from a fresh encoding of the blocks")
    subsets = list(combinations(range(spec.n), spec.k))
    if len(subsets) > max_subsets:
        rng = rng or np.random.default_rng(0)
        idx = rng.choice(len(subsets), size=max_subsets, replace=False)
        subsets = [subsets[i] for i in sorted(idx)]
    C = state.tensor.C
    for T in subsets:
        got = reconstruct_star(spec, state.config, T, C[list(T)])
        for s, (g, b) in enumerate(zip(got, state.blocks)):
            if not np.array_equal(g, b):
                out.append(f"reconstruction from {T} disagrees on user {s}")
    for t in range(spec.n):
        T = [u for u in range(spec.n) if u != t][:spec.d]
        if not np.array_equal(repair_star(spec, state.config, t, T, C[T]), C[t]):
            out.append(f"repair of node {t} from {T} is wrong")
    return out
