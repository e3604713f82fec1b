import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardy_lab.hardy import (
    GOLDEN_ANGLE,
    P_MAX,
    HardyVariant,
    MeasurementSetup,
    check_conditions,
    construct_state,
    hardy_conditions,
    make_report,
)
from hardy_lab.nonlocality import (
    BLOCK_SIZE,
    OUTCOMES,
    SETTINGS,
    InsufficientSamples,
    LhvStrategy,
    NotAHardyState,
    SampleStats,
    all_strategies,
    chi2_pvalues,
    enumerate_consistent,
    estimate_report,
    lhv_bound,
    logic_chain,
    outcome_table,
    sample,
)

import oracles

GOLDEN_SETUP = MeasurementSetup.from_relative(GOLDEN_ANGLE, GOLDEN_ANGLE)


def _events(variant):
    c = hardy_conditions(variant)
    return [(x.primed_a, x.primed_b, x.out_a, x.out_b) for x in c[:3]], \
        (c[3].primed_a, c[3].primed_b, c[3].out_a, c[3].out_b)


def test_sixteen_distinct_strategies():
    s = all_strategies()
    assert len(s) == 16 and len(set(s)) == 16


@pytest.mark.parametrize("variant", list(HardyVariant))
def test_five_consistent_none_reaching_target(variant):
    found = enumerate_consistent(variant)
    assert len(found) == 5
    target = hardy_conditions(variant)[3]
    assert not any(s.satisfies(target) for s in found)


def test_flip_both_excludes_plus_plus():
    found = enumerate_consistent(HardyVariant.FLIP_BOTH)
    assert all((s.a_prime, s.b_prime) != (1, 1) for s in found)


@pytest.mark.parametrize("variant", list(HardyVariant))
def test_variant_covariance(variant):
    sa, sb = variant.value
    relabeled = {LhvStrategy(sa * s.a, sa * s.a_prime, sb * s.b, sb * s.b_prime)
                 for s in enumerate_consistent(HardyVariant.ORIGINAL)}
    assert relabeled == set(enumerate_consistent(variant))


@pytest.mark.parametrize("variant", list(HardyVariant))
def test_lhv_bound_zero_matches_linear_program(variant):
    zeros, target = _events(variant)
    assert lhv_bound(variant) == 0.0
    assert oracles.lp_lhv_max(zeros, target) == pytest.approx(0.0, abs=1e-12)


def test_linear_program_without_constraints_reaches_one():
    _, target = _events(HardyVariant.ORIGINAL)
    assert oracles.lp_lhv_max([], target) == pytest.approx(1.0)


def test_logic_chain_golden():
    state = construct_state(GOLDEN_SETUP)
    trace = logic_chain(check_conditions(state, GOLDEN_SETUP))
    assert [s.condition for s in trace.steps] == ["1d", "1c", "1b", "1a"]
    assert trace.magnitude == pytest.approx(0.090169, abs=1e-6)
    assert trace.steps[0].probability == trace.magnitude
    assert all(s.probability <= 1e-12 for s in trace.steps[1:])
    d = trace.to_dict()
    assert d["contradiction_magnitude"] == trace.magnitude


def test_logic_chain_right_angles():
    setup = MeasurementSetup.from_relative(math.pi / 2, math.pi / 2)
    trace = logic_chain(check_conditions(construct_state(setup), setup))
    assert trace.magnitude == pytest.approx(1 / 12, abs=1e-14)


@pytest.mark.parametrize("variant", list(HardyVariant))
def test_logic_chain_names_variant_outcomes(variant):
    state = construct_state(GOLDEN_SETUP, variant=variant)
    trace = logic_chain(check_conditions(state, GOLDEN_SETUP, variant))
    c1d = hardy_conditions(variant)[3]
    assert f"S(theta_a')={c1d.out_a:+d}" in trace.steps[0].statement
    assert trace.magnitude == pytest.approx(P_MAX, abs=1e-12)


def test_logic_chain_rejects_non_hardy():
    report = make_report((0.0, 0.0, 0.0, 0.0), 1e-10, HardyVariant.ORIGINAL)
    with pytest.raises(NotAHardyState):
        logic_chain(report)


def test_outcome_table_rows_sum_to_one():
    t = outcome_table(construct_state(GOLDEN_SETUP), GOLDEN_SETUP)
    np.testing.assert_allclose(t.sum(axis=1), 1.0, atol=1e-14)
    assert t[SETTINGS.index((False, False)), OUTCOMES.index((1, 1))] == 0.0


def test_sample_deterministic_and_worker_independent():
    state = construct_state(GOLDEN_SETUP)
    n = 3 * BLOCK_SIZE + 17
    a = sample(state, GOLDEN_SETUP, n, seed=7)
    b = sample(state, GOLDEN_SETUP, n, seed=7)
    c = sample(state, GOLDEN_SETUP, n, seed=7, workers=4)
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_array_equal(a.counts, c.counts)
    assert a.counts.sum() == n
    other = sample(state, GOLDEN_SETUP, n, seed=8)
    assert not np.array_equal(a.counts, other.counts)


def test_sample_validates_inputs():
    state = construct_state(GOLDEN_SETUP)
    with pytest.raises(ValueError):
        sample(state, GOLDEN_SETUP, 0, seed=1)
    with pytest.raises(ValueError):
        sample(state, GOLDEN_SETUP, 10, seed=-1)


def test_sample_stats_rejects_inconsistent_total():
    with pytest.raises(ValueError):
        SampleStats(np.ones((4, 4), dtype=np.int64), 15, 0)


@pytest.fixture(scope="module")
def golden_million():
    state = construct_state(GOLDEN_SETUP)
    return state, sample(state, GOLDEN_SETUP, 10 ** 6, seed=20240101)


def test_forbidden_cells_never_drawn(golden_million):
    state, stats = golden_million
    table = outcome_table(state, GOLDEN_SETUP)
    assert np.all(stats.counts[table == 0.0] == 0)
    assert stats.counts[SETTINGS.index((False, False)), OUTCOMES.index((1, 1))] == 0


def test_frequencies_within_four_sigma(golden_million):
    state, stats = golden_million
    table = outcome_table(state, GOLDEN_SETUP)
    freq = stats.frequencies()
    n = stats.trials()[:, None]
    sigma = np.sqrt(table * (1 - table) / n)
    assert np.all(np.abs(freq - table) <= 4 * sigma + 1e-15)
    i = SETTINGS.index((True, True))
    j = OUTCOMES.index((-1, -1))
    assert abs(freq[i, j] - 0.090169) <= 4 * sigma[i, j]


def test_chi_square_passes(golden_million):
    state, stats = golden_million
    p = chi2_pvalues(stats, state, GOLDEN_SETUP)
    assert np.all(p > 1e-3)


def test_chi_square_flags_forbidden_counts():
    state = construct_state(GOLDEN_SETUP)
    counts = np.full((4, 4), 100, dtype=np.int64)
    stats = SampleStats(counts, 1600, 0)
    assert chi2_pvalues(stats, state, GOLDEN_SETUP)[0] == 0.0


def test_estimate_report_holds(golden_million):
    _, stats = golden_million
    r = estimate_report(stats)
    assert r.holds and not r.low_confidence
    assert r.p1a == r.p1b == r.p1c == 0.0
    assert r.zero_tol == pytest.approx(5 * 0.5 / math.sqrt(stats.trials().min()))


def test_estimate_report_missing_setting():
    counts = np.zeros((4, 4), dtype=np.int64)
    counts[0, 1] = counts[1, 1] = counts[2, 1] = 3
    with pytest.raises(InsufficientSamples):
        estimate_report(SampleStats(counts, 9, 0))


def test_estimate_report_tiny_sample_is_low_confidence():
    counts = np.zeros((4, 4), dtype=np.int64)
    counts[0, 1] = counts[1, 0] = counts[2, 1] = counts[3, 3] = 1
    r = estimate_report(SampleStats(counts, 4, 0))
    assert r.low_confidence
    assert r.zero_tol == pytest.approx(2.5)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, math.pi - 0.1), st.floats(0.1, math.pi - 0.1), st.integers(0, 2 ** 32))
def test_small_samples_never_hit_zero_cells(t1, t2, seed):
    setup = MeasurementSetup.from_relative(t1, t2)
    state = construct_state(setup)
    stats = sample(state, setup, 5000, seed=seed)
    for c in hardy_conditions()[:3]:
        i = SETTINGS.index((c.primed_a, c.primed_b))
        j = OUTCOMES.index((c.out_a, c.out_b))
        assert stats.counts[i, j] == 0
