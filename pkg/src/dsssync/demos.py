"""Worked examples replayed step by step and checked against reference values.

Each demo returns the transcript lines and raises :class:`DemoMismatch` on
the first value that differs.  Positions in transcripts are 1-based; the
library calls use 0-based positions.
"""
from __future__ import annotations

import numpy as np

from . import schemes as sch
from .dsscore import make_single_parity
from .errors import DemoMismatch
from .intermediary import IntermediaryConfig, encode_star, reconstruct_star
from .matlib import (
    default_vandermonde_nodes,
    make_blockdiag,
    make_identity,
    make_vandermonde,
)
from .vtsync import encode_syndrome_shares, recover_own_syndrome, vt_recover, vt_syndrome


def _rows(a) -> str:
    a = np.asarray(a)
    if a.ndim == 1:
        return "(" + ",".join(str(int(v)) for v in a) + ")"
    return " ".join(_rows(r) for r in a)


class _Transcript:
    def __init__(self, title: str):
        self.lines = [title]

    def check(self, label: str, got, want):
        got_a = np.asarray(got, dtype=np.int64)
        want_a = np.asarray(want, dtype=np.int64)
        ok = got_a.shape == want_a.shape and np.array_equal(got_a, want_a)
        self.lines.append(f"  {label}: {_rows(got_a)}" + ("" if ok else f"   expected {_rows(want_a)}"))
        if not ok:
            raise DemoMismatch(f"{label}: got {_rows(got_a)}, expected {_rows(want_a)}")

    def note(self, text: str):
        self.lines.append(text)


# Scheme P ----------------------------------------------------------------

P_STEPS = [
    # (description, edit, D rows, tensor rows, A1 rows as positions of the 1 in each row)
    ("deletion at position 2", sch.deletion(0, 1, 2),
     [[0, 2, 0, 0, 0], [0, 0, 0, 0, 0], [0, 2, 0, 0, 0]],
     [[1, 0, 3, 4, 4], [1, 1, 1, 1, 1], [2, 1, 4, 0, 0]],
     [0, 2, 3, 4, 1], [1, 3, 4, 4, 0]),
    ("deletion at position 3", sch.deletion(0, 2, 4),
     [[0, 0, 0, 4, 0], [0, 0, 0, 0, 0], [0, 0, 0, 4, 0]],
     [[1, 0, 3, 0, 4], [1, 1, 1, 1, 1], [2, 1, 4, 1, 0]],
     [0, 2, 4, 1, 3], [1, 3, 4, 0, 0]),
    ("insertion of 4 at position 2", sch.insertion(0, 1, 4),
     [[0, 0, 0, 4, 0], [0, 0, 0, 0, 0], [0, 0, 0, 4, 0]],
     [[1, 0, 3, 4, 4], [1, 1, 1, 1, 1], [2, 1, 4, 0, 0]],
     [0, 3, 2, 4, 1], [1, 4, 3, 4, 0]),
]


def demo_scheme_p() -> list[str]:
    spec = make_single_parity(2, 5)
    f = spec.field
    tr = _Transcript("Scheme P, [3,2] single parity over F_5, ell = 5")
    st = sch.StorageState.create(spec, IntermediaryConfig((make_identity(f, 5),) * 2),
                                 [[1, 2, 3, 4, 4], [1, 1, 1, 1, 1]])
    tr.check("initial tensor", st.tensor.matrix, [[1, 2, 3, 4, 4], [1, 1, 1, 1, 1], [2, 3, 4, 0, 0]])
    eye = np.eye(5, dtype=np.int64)
    for desc, edit, D, rows, perm, u1 in P_STEPS:
        tr.note(f"edit: {desc} of u1")
        rep = sch.scheme_p_apply_edit(st, edit)
        tr.check("u1", st.blocks[0], u1)
        tr.check("D", rep.D[:, 0, :], D)
        tr.check("tensor", st.tensor.matrix, rows)
        tr.check("A1", st.config.matrices[0].entries, eye[perm])
        tr.check("A2", st.config.matrices[1].entries, eye)
    out = reconstruct_star(spec, st.config, [0, 2], st.tensor.C[[0, 2]])
    tr.note("reconstruction from nodes 1 and 3")
    tr.check("u1", out[0], [1, 4, 3, 4, 0])
    tr.check("u2", out[1], [1, 1, 1, 1, 1])
    return tr.lines


# Scheme V ----------------------------------------------------------------

V4 = [[1, 1, 1, 1], [1, 2, 4, 3], [1, 3, 4, 2], [1, 4, 1, 4]]


def demo_scheme_v() -> list[str]:
    spec = make_single_parity(2, 5)
    f = spec.field
    tr = _Transcript("Scheme V, [3,2] single parity over F_5, ell = 4")
    v = make_vandermonde(f, default_vandermonde_nodes(f, 4), 4)
    st = sch.StorageState.create(spec, IntermediaryConfig((v, v)), [[0, 1, 0, 1], [1, 0, 1, 0]])
    tr.check("A1", v.entries, V4)
    tr.check("initial tensor", st.tensor.matrix, [[2, 1, 0, 2], [2, 4, 0, 3], [4, 0, 0, 0]])
    tr.note("edit: u1 deletes position 4 (value 1), u2 deletes position 1 (value 1)")
    rep = sch.scheme_v_round(st, [sch.deletion(0, 3, 1), sch.deletion(1, 0, 1)])
    tr.check("D", rep.D[:, 0, :], [[1, 4, 1, 4], [1, 1, 1, 1], [2, 0, 2, 0]])
    tr.check("tensor", st.tensor.matrix, [[1, 2, 4], [1, 3, 4], [2, 0, 3]])
    tr.check("A1", st.config.matrices[0].entries, [[1, 1, 1], [1, 2, 4], [1, 3, 4]])
    tr.check("A2", st.config.matrices[1].entries, [[1, 2, 4], [1, 3, 4], [1, 4, 1]])
    out = reconstruct_star(spec, st.config, [0, 2], st.tensor.C[[0, 2]])
    tr.note("reconstruction from nodes 1 and 3")
    tr.check("u1", out[0], [0, 1, 0])
    tr.check("u2", out[1], [0, 1, 0])
    return tr.lines


# Scheme H ----------------------------------------------------------------

H_HEAD = [[1, 1, 1, 1], [1, 2, 4, 3], [1, 3, 4, 2], [1, 4, 1, 4]]


def _hmat(head_rows):
    m = np.zeros((len(head_rows) + 3, 7), dtype=np.int64)
    m[:len(head_rows), :4] = head_rows
    m[len(head_rows):, 4:] = np.eye(3, dtype=np.int64)
    return m


H_STEPS = [
    ("u1 deletes position 3", sch.deletion(0, 2, 1),
     [[1, 3, 4, 2, 0, 0, 0], [0, 0, 0, 0, 0, 0, 0], [1, 3, 4, 2, 0, 0, 0]],
     [[3, 2, 1, 3, 1, 1, 1], [0, 0, 0, 4, 3, 2, 1], [3, 2, 1, 2, 4, 3, 2]],
     [0, 1, 3], [0, 1, 2, 3]),
    ("u2 deletes position 5", sch.deletion(1, 4, 3),
     [[0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 1, 1], [0, 0, 0, 0, 1, 1, 1]],
     [[3, 2, 1, 3, 1, 1, 1], [0, 0, 0, 4, 2, 1, 0], [3, 2, 1, 2, 3, 2, 1]],
     [0, 1, 3], [0, 1, 2, 3]),
    ("u2 deletes position 1", sch.deletion(1, 0, 1),
     [[0, 0, 0, 0, 0, 0, 0], [1, 1, 1, 1, 0, 0, 0], [1, 1, 1, 1, 0, 0, 0]],
     [[3, 2, 1, 3, 1, 1, 1], [4, 4, 4, 3, 2, 1, 0], [2, 1, 0, 1, 3, 2, 1]],
     [0, 1, 3], [1, 2, 3]),
]


def demo_scheme_h() -> list[str]:
    spec = make_single_parity(2, 5)
    f = spec.field
    tr = _Transcript("Scheme H, [3,2] single parity over F_5, ell = 7, tail length 3")
    head = make_vandermonde(f, default_vandermonde_nodes(f, 4), 4)
    a = make_blockdiag(head, make_identity(f, 3))
    st = sch.StorageState.create(spec, IntermediaryConfig((a, a)),
                                 [[1] * 7, [1, 2, 3, 4, 3, 2, 1]], ell_star=3)
    tr.check("A1", a.entries, _hmat(H_HEAD))
    tr.check("initial tensor", st.tensor.matrix,
             [[4, 0, 0, 0, 1, 1, 1], [0, 0, 0, 4, 3, 2, 1], [4, 0, 0, 4, 4, 3, 2]])
    for desc, edit, D, rows, h1, h2 in H_STEPS:
        tr.note(f"edit: {desc}")
        rep = sch.scheme_h_apply_edit(st, edit)
        tr.check("D", rep.D[:, 0, :], D)
        tr.check("tensor", st.tensor.matrix, rows)
        tr.check("A1", st.config.matrices[0].entries, _hmat([H_HEAD[i] for i in h1]))
        tr.check("A2", st.config.matrices[1].entries, _hmat([H_HEAD[i] for i in h2]))
    out = reconstruct_star(spec, st.config, [0, 2], st.tensor.C[[0, 2]])
    tr.note("reconstruction from nodes 1 and 3")
    tr.check("u1", out[0], [1, 1, 1, 1, 1, 1])
    tr.check("u2", out[1], [2, 3, 4, 2, 1, 0])
    return tr.lines


# Unknown deletion --------------------------------------------------------

def demo_vt() -> list[str]:
    tr = _Transcript("Unknown single deletion over F_5, x = (1,2,3,4,4)")
    x = [1, 2, 3, 4, 4]
    syn = vt_syndrome(x, 5)
    tr.check("syndrome (nu1, nu2)", [syn.nu1, syn.nu2], [4, 0])
    for i in range(5):
        short = x[:i] + x[i + 1:]
        rec = vt_recover(short, syn, 5)
        tr.check(f"recovered after deleting position {i + 1}", rec.string, x)
    spec = make_single_parity(2, 5)
    y = [3, 0, 1, 4, 2]
    sy = vt_syndrome(y, 5)
    shares = encode_syndrome_shares(spec, [syn, sy])
    tr.check("check-node share", shares[2], [(syn.nu1 + sy.nu1) % 5, (syn.nu2 + sy.nu2) % 5])
    got = recover_own_syndrome(spec, 0, {1: tuple(shares[1]), 2: tuple(shares[2])})
    tr.check("user 1 syndrome from user 2 and the share", [got.nu1, got.nu2], [syn.nu1, syn.nu2])
    return tr.lines


# Deduplication -----------------------------------------------------------

def demo_dedup() -> list[str]:
    spec = make_single_parity(2, 5)
    f = spec.field
    tr = _Transcript("Deduplication of pattern (2,3) under Scheme V, ell = 5 over F_5")
    v = make_vandermonde(f, default_vandermonde_nodes(f, 5), 5)
    st = sch.StorageState.create(spec, IntermediaryConfig((v, v)), [[1, 2, 3, 4, 4], [4, 4, 2, 3, 1]])
    rep = sch.dedup_round(st, [2, 3])
    tr.check("match positions", [rep.info["matches"][0] + 1, rep.info["matches"][1] + 1], [2, 3])
    tr.check("u1", st.blocks[0], [1, 4, 4])
    tr.check("u2", st.blocks[1], [4, 4, 1])
    tr.check("tensor vs fresh encoding", st.tensor.matrix, encode_star(spec, st.config, st.blocks).matrix)
    out = reconstruct_star(spec, st.config, [1, 2], st.tensor.C[[1, 2]])
    tr.check("u1 from nodes 2 and 3", out[0], [1, 4, 4])
    tr.check("u2 from nodes 2 and 3", out[1], [4, 4, 1])
    return tr.lines


DEMOS = {
    "scheme-p": demo_scheme_p,
    "scheme-v": demo_scheme_v,
    "scheme-h": demo_scheme_h,
    "vt": demo_vt,
    "dedup": demo_dedup,
}
