import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacegof import _pykernels
from spacegof.errors import NotScaled, TooFewSpacings
from spacegof.kernels import ScalarKernel, constant_kernel, greenwood, make_gini, make_power_scalar, symmetrize
from spacegof.sampling import AlternativeModel, RngSpec, draw_rows, sample_uniform
from spacegof.spacings import Sample, Scheme, SpacingsVector, equally_spaced_sample, scaled_spacings
from spacegof.statistics import (
    StatisticKind,
    batch_gini,
    batch_statistic,
    evaluate,
    gini_statistic,
    u_stat_fast,
    u_stat_naive,
    v_stat,
)

try:
    from spacegof import _core
except ImportError:  # pragma: no cover - extension not built
    _core = None


def vec(values, n=None, m=1, scaled=True):
    values = np.asarray(values, dtype=float)
    return SpacingsVector(values, m, Scheme.OVERLAPPING, n if n is not None else len(values), scaled)


def pair_oracle(values, f):
    """Independent reference: average of ``f`` over all index pairs i < j."""
    pairs = list(itertools.combinations(list(map(float, values)), 2))
    return math.fsum(f(a, b) for a, b in pairs) / len(pairs)


V4 = vec([0.8, 1.2, 1.6, 0.4], n=4)


def test_naive_gini2_example():
    expected = pair_oracle(V4.values, lambda a, b: (a - b) ** 2)
    assert expected == pytest.approx(0.5333333333333333, rel=1e-14)
    assert u_stat_naive(V4, make_gini(2)).value == pytest.approx(expected, rel=1e-14)


def test_fast_examples():
    assert u_stat_fast(V4, 2).value == pytest.approx(0.5333333333333333, rel=1e-14)
    assert u_stat_fast(V4, 1).value == pytest.approx(0.6666666666666666, rel=1e-14)
    assert u_stat_fast(vec([5.0, 5.0]), 1).value == 0.0
    with pytest.raises(ValueError):
        u_stat_fast(V4, 3)


def test_symmetrized_square_example():
    h = symmetrize(make_power_scalar(2))
    expected = pair_oracle(V4.values, lambda a, b: (a * a + b * b) / 2)
    assert expected == pytest.approx(1.2, rel=1e-14)
    assert u_stat_naive(V4, h).value == pytest.approx(1.2, rel=1e-14)


def test_v_stat_examples():
    assert v_stat(V4, greenwood()).value == pytest.approx(1.2, rel=1e-14)
    assert v_stat(vec([2.0, 2.0], n=2), make_power_scalar(1)).value == 2.0
    s = sample_uniform(30, RngSpec(1))
    v = scaled_spacings(s, 4)
    one = v_stat(v, ScalarKernel("one", np.ones_like))
    assert one.value == pytest.approx((s.n - 4 + 1) / s.n, rel=1e-14)
    assert one.kind is StatisticKind.FIRST_ORDER


@pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 3.0])
def test_constant_vector_gives_zero(r):
    assert gini_statistic(vec([1.7] * 9), r).value == 0.0


def test_preconditions():
    with pytest.raises(NotScaled):
        u_stat_naive(vec([1.0, 2.0], scaled=False), make_gini(2))
    with pytest.raises(TooFewSpacings):
        u_stat_naive(vec([1.0]), make_gini(2))
    with pytest.raises(TooFewSpacings):
        u_stat_fast(vec([1.0]), 2)
    # first-order statistics are fine with one spacing
    assert v_stat(vec([1.0]), greenwood()).value == 1.0


def test_oracle_equivalence_1000_vectors():
    rng = np.random.default_rng(20241014)
    for _ in range(1000):
        size = int(rng.integers(2, 201))
        v = vec(rng.uniform(0, 10, size))
        for r in (1, 2):
            fast = u_stat_fast(v, r).value
            naive = u_stat_naive(v, make_gini(r)).value
            assert abs(fast - naive) <= 1e-9 * max(1.0, abs(naive))


def test_fast_path_near_constant_input():
    # N sum x^2 - (sum x)^2 cancels badly here; the centred fsum form does not
    base = 1e8
    v = vec(base + np.array([0.0, 1e-4, 2e-4, 3e-4]))
    expected = pair_oracle(v.values, lambda a, b: (a - b) ** 2)
    assert u_stat_fast(v, 2).value == pytest.approx(expected, rel=1e-6)


entries = st.lists(st.floats(min_value=0, max_value=10, allow_nan=False), min_size=2, max_size=40)


@settings(max_examples=150, deadline=None)
@given(entries, st.randoms(use_true_random=False))
def test_naive_is_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    for h in (make_gini(1.5), symmetrize(greenwood())):
        assert u_stat_naive(vec(xs), h).value == u_stat_naive(vec(ys), h).value


@settings(max_examples=150, deadline=None)
@given(entries, st.floats(min_value=-5, max_value=5), st.sampled_from([1.0, 1.5, 2.0]))
def test_gini_translation_invariance(xs, c, r):
    shifted = [x + c + 5.0 for x in xs]
    a = gini_statistic(vec(xs), r).value
    b = gini_statistic(vec(shifted), r).value
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


@settings(max_examples=150, deadline=None)
@given(entries, st.sampled_from([1.0, 1.5, 2.0]))
def test_gini_values_nonnegative(xs, r):
    assert gini_statistic(vec(xs), r).value >= 0.0


@pytest.mark.parametrize("count", [5, 49, 500])
def test_greenwood_identity_at_m1(count):
    s = sample_uniform(count, RngSpec(5, count))
    v = scaled_spacings(s, 1)
    n = s.n
    g = gini_statistic(v, 2).value
    V = v_stat(v, greenwood()).value
    assert g == pytest.approx(2.0 * n * (V - 1.0) / (n - 1), rel=1e-12)


def test_greenwood_correlation_grows_with_n_for_m_gt_1():
    uni = AlternativeModel("uniform")
    corr = []
    for count in (49, 999):
        rows = draw_rows(uni, count, 400, RngSpec(6, count))
        g = batch_statistic(rows, 3, "overlapping", make_gini(2))
        V = batch_statistic(rows, 3, "overlapping", greenwood())
        corr.append(np.corrcoef(g, V)[0, 1])
    assert corr[1] > corr[0] and corr[1] > 0.99


def test_equally_spaced_gives_zero_statistic():
    v = scaled_spacings(equally_spaced_sample(49), 2)
    assert gini_statistic(v, 2).value == pytest.approx(0.0, abs=1e-24)


def test_evaluate_dispatch_matches_naive():
    v = scaled_spacings(sample_uniform(40, RngSpec(2)), 2)
    for r in (1.0, 1.5, 2.0, 2.5):
        assert evaluate(v, make_gini(r)).value == pytest.approx(u_stat_naive(v, make_gini(r)).value, rel=1e-12)
    assert evaluate(v, constant_kernel(2.0)).value == pytest.approx(2.0, rel=1e-14)
    assert evaluate(v, greenwood()).kind is StatisticKind.FIRST_ORDER


@pytest.mark.parametrize("scheme", ["overlapping", "disjoint"])
@pytest.mark.parametrize("r", [1.0, 1.5, 2.0])
def test_batch_matches_scalar_path(scheme, r):
    rows = draw_rows(AlternativeModel("beta", 0.5, 0.5), 49, 30, RngSpec(9))
    batch = batch_statistic(rows, 4, scheme, make_gini(r))
    single = [evaluate(scaled_spacings(Sample(row), 4, scheme), make_gini(r)).value for row in rows]
    np.testing.assert_allclose(batch, single, rtol=1e-12)
    generic = batch_statistic(rows, 4, scheme, symmetrize(make_power_scalar(2)))
    single_generic = [u_stat_naive(scaled_spacings(Sample(row), 4, scheme), symmetrize(greenwood())).value for row in rows]
    np.testing.assert_allclose(generic, single_generic, rtol=1e-12)


def test_batch_gini_rejects_single_spacing():
    with pytest.raises(TooFewSpacings):
        batch_gini(np.ones((3, 1)), 2.0)


@pytest.mark.skipif(_core is None, reason="compiled extension not built")
@pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 0.7])
def test_compiled_matches_numpy_fallback(r):
    x = np.random.default_rng(4).exponential(1.0, (50, 37))
    np.testing.assert_allclose(_core.pair_power_sums(x, r), _pykernels.pair_power_sums(x, r), rtol=1e-12)
    np.testing.assert_allclose(_core.sq_diff_sums(x), _pykernels.sq_diff_sums(x), rtol=1e-12)
    xs = np.sort(x, axis=1)
    np.testing.assert_allclose(_core.abs_diff_sums_sorted(xs), _pykernels.abs_diff_sums_sorted(xs), rtol=1e-12)
    np.testing.assert_allclose(_core.pair_power_sums(x, 1.0), _core.abs_diff_sums_sorted(xs), rtol=1e-12)


def test_fallback_pair_sums_match_oracle():
    x = np.random.default_rng(5).uniform(0, 3, (4, 9))
    for r in (1.0, 1.5, 2.0):
        got = _pykernels.pair_power_sums(x, r)
        for i in range(4):
            want = pair_oracle(x[i], lambda a, b: abs(a - b) ** r) * 36
            assert got[i] == pytest.approx(want, rel=1e-12)
