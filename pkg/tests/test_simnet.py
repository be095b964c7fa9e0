import numpy as np
import pytest

from dsssync import schemes as sch
from dsssync.analysis import EditModel, expected_imin, expected_span, expected_span_implemented
from dsssync.gf import ceil_log2
from dsssync.simnet import (
    SCHEMES, SchemeConfig, build_system, ell_star_for, monte_carlo, monte_carlo_imin, run_round,
    sample_edits, sample_positions, trial_rng,
)


def test_trial_rng_is_counter_based():
    a = trial_rng(7, 3).integers(0, 2**31, size=4)
    b = trial_rng(7, 3).integers(0, 2**31, size=4)
    c = trial_rng(7, 4).integers(0, 2**31, size=4)
    assert a.tolist() == b.tolist() != c.tolist()


def test_sample_positions_shapes():
    rng = trial_rng(0, 0)
    ud = sample_positions(EditModel.ud(10, 3), rng)
    assert sorted(ud) == [0, 1, 2] and all(len(v) == 1 and 0 <= v[0] < 10 for v in ud.values())
    cnd = sample_positions(EditModel.cnd(10, 3, 7), rng)
    assert sum(len(v) for v in cnd.values()) == 7
    assert all(len(set(v)) == len(v) for v in cnd.values())
    assert sample_positions(EditModel.pnd(10, 3, 0.0), rng) == {}
    full = sample_positions(EditModel.pnd(4, 2, 1.0), rng)
    assert full == {0: [0, 1, 2, 3], 1: [0, 1, 2, 3]}


def test_sample_edits_carry_values():
    sysm = build_system("V", 3, 2, 2, 8, 11, seed=1)
    for e in sample_edits(EditModel.cnd(8, 2, 5), trial_rng(1, 0), sysm.blocks):
        assert e.value == sysm.blocks[e.user][e.position]


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("n,k", [(3, 2), (5, 3)])
def test_one_round_per_scheme_is_consistent(scheme, n, k):
    system = build_system(scheme, n, k, None, 8, 17, seed=3, gamma=0.5)
    edits = sample_edits(EditModel.ud(8, k), trial_rng(3, 0), system.blocks)
    r = run_round(system, edits)
    assert r.consistent, r.failures
    assert system.round == 1


@pytest.mark.parametrize("scheme", ["T", "V", "P", "H"])
def test_multi_deletion_rounds(scheme):
    system = build_system(scheme, 4, 2, None, 10, 13, seed=5, gamma=0.6)
    for trial in range(3):
        edits = sample_edits(EditModel.cnd(system.storage.lengths[0], 2, 3), trial_rng(5, trial),
                             system.storage.logical_blocks())
        edits = [e for e in edits if e.position < system.storage.lengths[e.user]]
        r = run_round(system, edits)
        assert r.consistent, r.failures


def test_scheme_p_with_pad_handles_insertions():
    system = build_system("P", 3, 2, None, 6, 7, seed=2, pad=2)
    r = run_round(system, [sch.insertion(0, 1, 5), sch.insertion(1, 0, 3)])
    assert r.consistent
    assert system.storage.lengths == [5, 5]
    assert system.storage.logical_blocks()[0][1] == 5


def test_build_system_validation():
    with pytest.raises(ValueError):
        build_system("V", 3, 2, 3, 8, 11)
    with pytest.raises(ValueError):
        build_system("X", 3, 2, None, 8, 11)
    with pytest.raises(ValueError):
        build_system("H", 3, 2, None, 8, 11, ell_star=9)
    with pytest.raises(ValueError):
        ell_star_for(8, 1.5)
    assert ell_star_for(8, 0.25) == 6


def test_monte_carlo_v_cost_is_deterministic():
    s = monte_carlo(SchemeConfig("V", 3, 2, 32, 37), EditModel.ud(32, 2), trials=50, seed=1)
    assert s.mean_bits == ceil_log2(32) + ceil_log2(37)
    assert s.stderr_bits == 0 and s.errors == 0 and s.inconsistent == 0


def test_monte_carlo_p_cost():
    s = monte_carlo(SchemeConfig("P", 5, 3, 16, 7), EditModel.ud(16, 3), trials=30, seed=2)
    assert s.mean_bits == ceil_log2(16) + ceil_log2(7) + 1


def test_monte_carlo_t_span_matches_expectation():
    model = EditModel.ud(64, 2)
    s = monte_carlo(SchemeConfig("T", 3, 2, 64, 5), model, trials=2000, seed=3, check_every=200)
    assert abs(s.mean_span_fraction - expected_span(model) / 64) <= 4 * s.stderr_span_fraction


def test_monte_carlo_independent_of_worker_split():
    cfg, model = SchemeConfig("T", 3, 2, 32, 5), EditModel.ud(32, 2)
    a = monte_carlo(cfg, model, trials=40, seed=9, check_every=0, workers=1)
    b = monte_carlo(cfg, model, trials=40, seed=9, check_every=0, workers=2)
    assert a == b


def test_monte_carlo_model_mismatch():
    with pytest.raises(ValueError):
        monte_carlo(SchemeConfig("V", 3, 2, 32, 17), EditModel.ud(16, 2), trials=1)


@pytest.mark.parametrize("model", [EditModel.ud(20, 2), EditModel.cnd(20, 2, 3), EditModel.pnd(20, 2, 0.05)])
def test_monte_carlo_imin(model):
    mean, se = monte_carlo_imin(model, 3000, seed=4)
    assert abs(mean - expected_imin(model)) <= 4 * se


def test_monte_carlo_counts_failed_trials():
    # Vandermonde of order 32 does not exist over F_17
    s = monte_carlo(SchemeConfig("V", 3, 2, 32, 17), EditModel.ud(32, 2), trials=5)
    assert s.errors == 5


@pytest.mark.parametrize("model", [EditModel.cnd(32, 2, 3), EditModel.pnd(32, 3, 1 / 32)])
def test_monte_carlo_t_multi_deletion_span(model):
    s = monte_carlo(SchemeConfig("T", model.B + 1, model.B, 32, 5), model, trials=2000, seed=8,
                    check_every=100)
    assert s.inconsistent == 0
    assert abs(s.mean_span_fraction - expected_span_implemented(model) / 32) <= 4 * s.stderr_span_fraction
