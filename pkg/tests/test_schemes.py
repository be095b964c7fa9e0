import math
from itertools import chain, combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsssync import schemes as sch
from dsssync.demos import DEMOS
from dsssync.dsscore import make_rs_systematic, make_single_parity
from dsssync.errors import (
    EditMismatch, FieldTooSmall, IndexOutOfRange, InfeasibleBudget, MissingValue, NonUniformEdits, NoPadSlack,
)
from dsssync.gf import ceil_log2, make_field
from dsssync.intermediary import IntermediaryConfig
from dsssync.matlib import (
    default_vandermonde_nodes, make_blockdiag, make_cauchy, make_identity, make_permutation, make_vandermonde,
)


def identity_state(spec, blocks, lengths=None):
    ell = len(blocks[0])
    cfg = IntermediaryConfig((make_identity(spec.field, ell),) * spec.B)
    return sch.StorageState.create(spec, cfg, blocks, lengths=lengths)


def vandermonde_state(spec, blocks):
    f = spec.field
    ell = len(blocks[0])
    v = make_vandermonde(f, default_vandermonde_nodes(f, ell), ell)
    return sch.StorageState.create(spec, IntermediaryConfig((v,) * spec.B), blocks)


def per_node_bits(report, user):
    bits = {t: b for (s, t), b in report.pair_bits().items() if s == user}
    assert len(set(bits.values())) == 1
    return next(iter(bits.values()))


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demos_reproduce_examples(name):
    lines = DEMOS[name]()
    assert len(lines) > 2
    assert not any("expected" in line for line in lines)


# Scheme T ----------------------------------------------------------------

def test_scheme_t_span_and_result():
    spec = make_single_parity(2, 5)
    st_ = identity_state(spec, [[1, 2, 3, 4, 0, 1], [4, 3, 2, 1, 0, 4]])
    rep = sch.scheme_t_round(st_, [sch.deletion(0, 1, 2), sch.deletion(1, 4, 0)])
    assert rep.info["span"] == 3
    assert [b.tolist() for b in st_.blocks] == [[1, 3, 4, 0, 1], [4, 3, 2, 1, 4]]
    assert sch.consistency_failures(st_) == []
    # each user ships 3 symbols to both of its connected nodes
    assert rep.pair_bits() == {(0, 0): 9, (0, 2): 9, (1, 1): 9, (1, 2): 9}
    coord = [m for m in rep.messages if m.kind == sch.MsgKind.COORDINATION]
    assert sum(m.bits for m in coord) == 2 * 3 * ceil_log2(6)


def test_scheme_t_same_position_sends_nothing():
    spec = make_single_parity(2, 5)
    st_ = identity_state(spec, [[1, 2, 3], [4, 0, 1]])
    rep = sch.scheme_t_round(st_, [sch.deletion(0, 2), sch.deletion(1, 2)])
    assert rep.info["span"] == 0 and rep.pair_bits() == {}
    assert sch.consistency_failures(st_) == []


def test_scheme_t_requires_one_deletion_per_user():
    spec = make_single_parity(2, 5)
    st_ = identity_state(spec, [[1, 2, 3], [4, 0, 1]])
    with pytest.raises(NonUniformEdits):
        sch.scheme_t_round(st_, [sch.deletion(0, 1)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scheme_t_multi_random(seed):
    rng = np.random.default_rng(seed)
    spec = make_rs_systematic(5, 3, 7)
    ell = int(rng.integers(3, 12))
    blocks = rng.integers(0, 7, size=(3, ell))
    st_ = identity_state(spec, blocks)
    edits = []
    for s in range(3):
        for p in rng.choice(ell, size=int(rng.integers(0, 3)), replace=False):
            edits.append(sch.deletion(s, int(p)))
    before = [b.copy() for b in blocks]
    sch.scheme_t_round_multi(st_, edits)
    assert sch.consistency_failures(st_) == []
    for s in range(3):
        ps = [e.position for e in edits if e.user == s]
        assert st_.logical_blocks()[s].tolist() == np.delete(before[s], ps).tolist()


# Scheme P ----------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.permutations(range(7)), st.lists(st.integers(0, 12), min_size=7, max_size=7),
       st.integers(0, 6), st.integers(0, 12))
def test_scheme_p_claim(perm, x, i, value):
    """x A - x' A' is the edited value at coordinate j, zero elsewhere."""
    f = make_field(13)
    a = make_permutation(f, perm)
    n = 5                      # logical length, two zero pad slots
    x = np.array(x[:n] + [0, 0])
    i = i % n
    a_del, j = sch.p_update(a, sch.EditKind.DELETION, i)
    x_del = np.append(np.delete(x, i), 0)
    diff = (x @ a.entries - x_del @ a_del.entries) % 13
    want = np.zeros(7, dtype=int)
    want[j] = x[i]
    assert diff.tolist() == want.tolist()
    a_ins, j = sch.p_update(a, sch.EditKind.INSERTION, i)
    x_ins = np.insert(x, i, value)[:-1]
    diff = (x_ins @ a_ins.entries - x @ a.entries) % 13
    want = np.zeros(7, dtype=int)
    want[j] = value
    assert diff.tolist() == want.tolist()


@pytest.mark.parametrize("ell,q", [(2, 3), (5, 5), (16, 17), (100, 101), (256, 257)])
def test_scheme_p_bits_per_node(ell, q):
    spec = make_single_parity(2, q)
    blocks = np.arange(2 * ell).reshape(2, ell) % q
    st_ = identity_state(spec, blocks)
    rep = sch.scheme_p_apply_edit(st_, sch.deletion(0, ell // 2))
    assert per_node_bits(rep, 0) == ceil_log2(ell) + ceil_log2(q) + 1


def test_scheme_p_insert_then_delete_restores_state():
    spec = make_single_parity(2, 7)
    st_ = identity_state(spec, [[1, 2, 3, 0], [4, 5, 6, 0]], lengths=[3, 3])
    before = st_.tensor.C.copy()
    sch.scheme_p_apply_edit(st_, sch.insertion(0, 1, 6))
    assert st_.logical_blocks()[0].tolist() == [1, 6, 2, 3]
    assert sch.consistency_failures(st_) == []
    sch.scheme_p_apply_edit(st_, sch.deletion(0, 1, 6))
    assert st_.tensor.C.tolist() == before.tolist()
    assert st_.config.matrices[0].entries.tolist() == np.eye(4, dtype=int).tolist()


def test_scheme_p_errors():
    spec = make_single_parity(2, 7)
    st_ = identity_state(spec, [[1, 2, 3], [4, 5, 6]])
    with pytest.raises(NoPadSlack):
        sch.scheme_p_apply_edit(st_, sch.insertion(0, 0, 1))
    with pytest.raises(EditMismatch):
        sch.scheme_p_apply_edit(st_, sch.deletion(0, 0, 5))
    with pytest.raises(IndexOutOfRange):
        sch.scheme_p_apply_edit(st_, sch.deletion(0, 3))
    sch.scheme_p_apply_edit(st_, sch.deletion(0, 0))
    with pytest.raises(MissingValue):
        sch.scheme_p_apply_edit(st_, sch.EditEvent(0, sch.EditKind.INSERTION, 0, None))


# Scheme V ----------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_scheme_v_claim(ell, seed):
    """x A - v A_p = x' A' on the surviving coordinates."""
    f = make_field(13)
    rng = np.random.default_rng(seed)
    a = make_vandermonde(f, default_vandermonde_nodes(f, ell), ell)
    x = rng.integers(0, 13, size=ell)
    p = int(rng.integers(0, ell))
    lhs = ((x @ a.entries - x[p] * a.entries[p]) % 13)[:ell - 1]
    a_new = sch.v_update(a, [p], ell - 1)
    assert lhs.tolist() == (np.delete(x, p) @ a_new.entries % 13).tolist()


@pytest.mark.parametrize("ell,q", [(2, 3), (4, 5), (16, 17), (64, 67), (256, 257)])
def test_scheme_v_bits_per_node(ell, q):
    spec = make_single_parity(2, q)
    rng = np.random.default_rng(ell)
    st_ = vandermonde_state(spec, rng.integers(0, q, size=(2, ell)))
    rep = sch.scheme_v_round(st_, [sch.deletion(s, int(st_.blocks[s][0]) % ell, int(st_.blocks[s][int(st_.blocks[s][0]) % ell]))
                                  for s in range(2)])
    assert per_node_bits(rep, 0) == per_node_bits(rep, 1) == ceil_log2(ell) + ceil_log2(q)


def test_scheme_v_several_rounds_stay_consistent():
    spec = make_rs_systematic(5, 3, 13)
    rng = np.random.default_rng(4)
    st_ = vandermonde_state(spec, rng.integers(0, 13, size=(3, 10)))
    for _ in range(5):
        edits = [sch.deletion(s, int(rng.integers(0, st_.lengths[s])), None) for s in range(3)]
        edits = [sch.deletion(e.user, e.position, int(st_.blocks[e.user][e.position])) for e in edits]
        sch.scheme_v_round(st_, edits)
        assert sch.consistency_failures(st_) == []
    assert st_.ell == 5


def test_scheme_v_nonuniform_shrinks_by_fewest_deletions():
    spec = make_single_parity(2, 11)
    rng = np.random.default_rng(5)
    blocks = rng.integers(0, 11, size=(2, 8))
    st_ = vandermonde_state(spec, blocks)
    edits = [sch.deletion(0, p, int(blocks[0][p])) for p in (1, 4, 6)] + [sch.deletion(1, 2, int(blocks[1][2]))]
    rep = sch.scheme_v_round_nonuniform(st_, edits)
    assert rep.info["new_ell"] == 7
    assert st_.lengths == [5, 7]
    assert st_.blocks[0].tolist() == np.delete(blocks[0], [1, 4, 6]).tolist()
    assert sch.consistency_failures(st_) == []
    with pytest.raises(NonUniformEdits):
        sch.scheme_v_round(st_, [sch.deletion(0, 0, int(st_.blocks[0][0]))])
    with pytest.raises(MissingValue):
        sch.scheme_v_round_nonuniform(st_, [sch.deletion(0, 0)])


# Scheme C ----------------------------------------------------------------

def cauchy_state(spec, blocks):
    f = spec.field
    ell = len(blocks[0])
    c = make_cauchy(f, range(ell), range(ell, 2 * ell))
    cfg = IntermediaryConfig((make_identity(f, ell),) + (c,) * (spec.B - 1))
    return sch.StorageState.create(spec, cfg, blocks)


def test_scheme_c_round_costs_and_consistency():
    spec = make_rs_systematic(5, 3, 17)
    rng = np.random.default_rng(6)
    st_ = cauchy_state(spec, rng.integers(0, 17, size=(3, 8)))
    for r in range(4):
        edits = []
        for s in range(3):
            p = int(rng.integers(0, st_.lengths[s]))
            edits.append(sch.deletion(s, p, int(st_.blocks[s][p])))
        ell = st_.ell
        rep = sch.scheme_c_round(st_, edits)
        assert sch.consistency_failures(st_) == []
        bits = rep.pair_bits()
        # user 0 sends only its position, to every node
        assert {t for (s, t) in bits if s == 0} == set(range(5))
        assert all(b == ceil_log2(ell) for (s, _), b in bits.items() if s == 0)
        assert per_node_bits(rep, 1) == ceil_log2(ell) + ceil_log2(17)
    assert st_.ell == 4


def test_scheme_c_needs_large_field():
    spec = make_single_parity(2, 7)
    with pytest.raises(FieldTooSmall):
        make_cauchy(spec.field, range(4), range(4, 8))
    st_ = cauchy_state(make_single_parity(2, 7), [[1, 2, 3], [4, 5, 6]])
    sch.scheme_c_round(st_, [sch.deletion(0, 0), sch.deletion(1, 1, 5)])
    assert sch.consistency_failures(st_) == []


# Scheme H ----------------------------------------------------------------

def hybrid_state(spec, blocks, tail):
    f = spec.field
    ell = len(blocks[0])
    head = make_vandermonde(f, default_vandermonde_nodes(f, ell - tail), ell - tail)
    a = make_blockdiag(head, make_identity(f, tail))
    return sch.StorageState.create(spec, IntermediaryConfig((a,) * spec.B), blocks, ell_star=tail)


def test_scheme_h_branch_costs():
    spec = make_single_parity(2, 11)
    st_ = hybrid_state(spec, [[1, 2, 3, 4, 5, 6, 7, 8], [8, 7, 6, 5, 4, 3, 2, 1]], tail=3)
    rep = sch.scheme_h_apply_edit(st_, sch.deletion(0, 2, 3))
    assert rep.info["branch"] == "head"
    assert per_node_bits(rep, 0) == ceil_log2(5) + ceil_log2(11)
    rep = sch.scheme_h_apply_edit(st_, sch.deletion(1, 6, 2))
    assert rep.info["branch"] == "tail"
    assert per_node_bits(rep, 1) == 3 * ceil_log2(11)
    assert sch.consistency_failures(st_) == []
    assert st_.logical_blocks()[1].tolist() == [8, 7, 6, 5, 4, 3, 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scheme_h_random_histories(seed):
    rng = np.random.default_rng(seed)
    spec = make_rs_systematic(4, 2, 13)
    ell = int(rng.integers(4, 12))
    tail = int(rng.integers(0, ell))
    blocks = rng.integers(0, 13, size=(2, ell))
    st_ = hybrid_state(spec, blocks, tail)
    logical = [list(b) for b in blocks]
    for _ in range(int(rng.integers(1, 5))):
        s = int(rng.integers(0, 2))
        if st_.lengths[s] == 0:
            continue
        p = int(rng.integers(0, st_.lengths[s]))
        sch.scheme_h_apply_edit(st_, sch.deletion(s, p, int(st_.blocks[s][p])))
        del logical[s][p]
    assert sch.consistency_failures(st_) == []
    assert [b.tolist() for b in st_.logical_blocks()] == [[int(v) for v in b] for b in logical]


# Hybrid tuning -----------------------------------------------------------

@pytest.mark.parametrize("ell,q", [(4, 5), (16, 17), (64, 5), (256, 257), (1024, 2)])
def test_choose_gamma_balances_when_budget_is_slack(ell, q):
    g = sch.choose_gamma(ell, q, budget=1e6)
    assert not g.cap_active
    lq = math.log2(q)
    assert abs(math.log2(g.gamma * ell) + lq - (1 - g.gamma) * ell * lq) <= 1e-9
    # the balance point solves u e^u = q^(ell-1) ln q with u = gamma ell ln q
    assert g.lambert_statement == pytest.approx(g.gamma, rel=1e-9)
    assert g.lambert_proof >= g.lambert_statement


def test_choose_gamma_cap():
    g = sch.choose_gamma(64, 5, budget=1.0)
    assert g.cap_active and g.gamma == pytest.approx(2 / 64)
    assert g.storage_bits == pytest.approx(1.0)
    with pytest.raises(InfeasibleBudget):
        sch.choose_gamma(64, 5, budget=0)


@pytest.mark.parametrize("ell,q", [(8, 3), (64, 5), (200, 257)])
def test_balance_point_minimizes_worst_case_on_a_grid(ell, q):
    g = sch.choose_gamma(ell, q, budget=1e6)
    grid = min(sch.hybrid_costs(ell, q, k / 20000)[0] for k in range(1, 20001))
    assert g.comm_bits <= grid + 1e-9
    assert g.comm_bits <= ell * math.log2(q)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(2, 256), st.sampled_from([2, 3, 5, 257]),
       st.floats(0, 1000), st.lists(st.floats(0, 1), min_size=4, max_size=4))
def test_aggregate_assignment_matches_exhaustive(B, ell, q, theta, raw):
    probs = raw[:B]
    chosen, cost = sch.aggregate_assignment(ell, q, theta, probs)
    subsets = chain.from_iterable(combinations(range(B), r) for r in range(B + 1))
    best = min(sch.aggregate_cost(ell, q, theta, probs, c) for c in subsets)
    assert cost == pytest.approx(best, rel=1e-12, abs=1e-9)


# Deduplication -----------------------------------------------------------

def test_find_pattern():
    assert sch.find_pattern([1, 2, 3, 2, 3], [2, 3]) == 1
    assert sch.find_pattern([1, 2], [2, 3]) is None
    assert sch.find_pattern([1, 2], []) == 0


def test_dedup_only_touches_matching_blocks():
    spec = make_rs_systematic(5, 3, 11)
    blocks = [[1, 2, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1], [0, 4, 5, 4, 5, 0]]
    st_ = vandermonde_state(spec, blocks)
    rep = sch.dedup_round(st_, [4, 5])
    assert rep.info["matches"] == {0: 3, 2: 1}
    assert [b.tolist() for b in st_.logical_blocks()] == [[1, 2, 3, 6], [6, 5, 4, 3, 2, 1], [0, 4, 5, 0]]
    assert sch.consistency_failures(st_) == []
    # only positions go from users to nodes; the values are the broadcast pattern
    assert all(m.kind == sch.MsgKind.POSITION for m in rep.messages if m.src == "user")


def test_consistency_failures_detects_corruption(parity32):
    st_ = identity_state(parity32, [[1, 2, 3], [4, 0, 1]])
    st_.tensor.C[2, 0, 1] += 1
    fails = sch.consistency_failures(st_)
    assert any("fresh encoding" in f for f in fails)
    assert any("repair" in f for f in fails)
