from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsssync.dsscore import encode_block, make_rs_systematic, make_single_parity
from dsssync.errors import DimensionMismatch
from dsssync.gf import make_field
from dsssync.intermediary import (
    IntermediaryConfig, encode_star, identity_config, reconstruct_star, repair_star, transform_blocks,
)
from dsssync.matlib import (
    default_vandermonde_nodes, delete_row, make_cauchy, make_identity, make_vandermonde,
)


def test_vandermonde_example(parity32):
    f = parity32.field
    v = make_vandermonde(f, default_vandermonde_nodes(f, 4), 4)
    cfg = IntermediaryConfig((v, v))
    blocks = [[0, 1, 0, 1], [1, 0, 1, 0]]
    assert transform_blocks(cfg, blocks).tolist() == [[2, 1, 0, 2], [2, 4, 0, 3]]
    assert encode_star(parity32, cfg, blocks).matrix.tolist() == [[2, 1, 0, 2], [2, 4, 0, 3], [4, 0, 0, 0]]


def test_identity_config_matches_plain_encoding(parity32):
    blocks = [[1, 2, 3], [4, 0, 1]]
    cfg = identity_config(parity32, 3)
    assert encode_star(parity32, cfg, blocks) == encode_block(parity32, blocks)


def _configs(f, ell):
    v = make_vandermonde(f, default_vandermonde_nodes(f, ell), ell)
    c = make_cauchy(f, range(ell), range(ell, 2 * ell))
    short = delete_row(v, 1)
    return {
        "vandermonde": (v, v, v),
        "identity+cauchy": (make_identity(f, ell), c, c),
        "unequal lengths": (short, v, delete_row(short, 0)),
    }


@pytest.mark.parametrize("name", ["vandermonde", "identity+cauchy", "unequal lengths"])
def test_reconstruct_and_repair_every_subset(name):
    spec = make_rs_systematic(5, 3, 13)
    cfg = IntermediaryConfig(_configs(spec.field, 4)[name])
    rng = np.random.default_rng(7)
    blocks = [rng.integers(0, 13, size=m.rows) for m in cfg.matrices]
    C = encode_star(spec, cfg, blocks).C
    for T in combinations(range(5), 3):
        out = reconstruct_star(spec, cfg, T, C[list(T)])
        assert [o.tolist() for o in out] == [b.tolist() for b in blocks]
    for t in range(5):
        T = [u for u in range(5) if u != t][:3]
        assert repair_star(spec, cfg, t, T, C[T]).tolist() == C[t].tolist()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_systematic_mode_keeps_raw_blocks(seed, ell):
    spec = make_single_parity(2, 7)
    f = spec.field
    v = make_vandermonde(f, default_vandermonde_nodes(f, ell), ell)
    cfg = IntermediaryConfig((v, v), systematic=True)
    rng = np.random.default_rng(seed)
    blocks = rng.integers(0, 7, size=(2, ell))
    C = encode_star(spec, cfg, blocks).C
    assert C[0, 0].tolist() == blocks[0].tolist()
    assert C[1, 0].tolist() == blocks[1].tolist()
    for T in combinations(range(3), 2):
        assert [o.tolist() for o in reconstruct_star(spec, cfg, T, C[list(T)])] == blocks.tolist()
    for t in range(3):
        T = [u for u in range(3) if u != t]
        assert repair_star(spec, cfg, t, T, C[T]).tolist() == C[t].tolist()


def test_config_validation():
    f = make_field(5)
    with pytest.raises(DimensionMismatch):
        IntermediaryConfig((make_identity(f, 3), make_identity(f, 4)))
    tall = make_vandermonde(f, [1, 2, 3], 2)
    with pytest.raises(DimensionMismatch):
        IntermediaryConfig((tall,))
    v = make_vandermonde(f, [1, 2], 3)
    with pytest.raises(DimensionMismatch):
        IntermediaryConfig((v, v), systematic=True)
    cfg = IntermediaryConfig((make_identity(f, 3),) * 2)
    assert cfg.ell == 3 and cfg.lengths == (3, 3)
    assert cfg.replace(1, v).lengths == (3, 2)
    with pytest.raises(DimensionMismatch):
        transform_blocks(cfg, [[1, 2, 3], [1, 2]])
