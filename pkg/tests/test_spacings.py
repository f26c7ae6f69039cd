import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacegof.errors import (
    AlreadyScaled,
    EmptyInput,
    NonFiniteInput,
    OrderTooLarge,
    UnsupportedFamily,
    ValueOutOfSupport,
    ValueOutOfUnitInterval,
)
from spacegof.sampling import RngSpec, sample_uniform
from spacegof.spacings import (
    Sample,
    Scheme,
    batch_scaled_spacings,
    disjoint_spacings,
    equally_spaced_sample,
    from_observations,
    overlapping_spacings,
    parse_null,
    pit_transform,
    read_observations,
    scale,
    scaled_spacings,
    spacings_length,
)


def test_from_observations_sorts():
    s = from_observations([0.9, 0.2, 0.5])
    np.testing.assert_array_equal(s.values, [0.2, 0.5, 0.9])
    assert s.count == 3
    assert s.n == 4


def test_singleton_sample():
    s = from_observations([0.5])
    assert s.count == 1 and s.values[0] == 0.5


@pytest.mark.parametrize("bad", [[0.2, 1.0], [0.0, 0.3], [-0.1], [1.5]])
def test_boundary_values_rejected(bad):
    with pytest.raises(ValueOutOfUnitInterval):
        from_observations(bad)


def test_empty_and_nonfinite():
    with pytest.raises(EmptyInput):
        from_observations([])
    with pytest.raises(NonFiniteInput):
        from_observations([0.5, float("nan")])


def test_ties_are_accepted():
    v = overlapping_spacings(from_observations([0.3, 0.3, 0.6]), 1)
    assert v.values[1] == 0.0


def test_sample_values_are_read_only():
    s = from_observations([0.1, 0.2])
    with pytest.raises(ValueError):
        s.values[0] = 0.5


@pytest.mark.parametrize(
    "raw, null, expected",
    [
        ([0.0], "normal:0,1", [0.5]),
        ([math.log(2.0)], "exp:1", [0.5]),
        ([0.25, 0.75], "uniform:0,1", [0.25, 0.75]),
    ],
)
def test_pit_examples(raw, null, expected):
    np.testing.assert_allclose(pit_transform(raw, null).values, expected, rtol=1e-15)


def test_parse_null_defaults_and_errors():
    assert parse_null("exp").params == (1.0,)
    assert parse_null("norm").family == "normal"
    assert parse_null("uniform:2,5").params == (2.0, 5.0)
    for bad in ("weibull:1", "uniform:3,1", "exp:-1", "normal:0,0", "normal:1"):
        with pytest.raises(UnsupportedFamily):
            parse_null(bad)
    with pytest.raises(ValueOutOfSupport):
        pit_transform([-1.0], "exp:1")


def test_read_observations(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("# header\n0.1\n\n  0.4  # trailing\n0.3\n", encoding="utf-8")
    assert read_observations(p) == [0.1, 0.4, 0.3]
    p.write_text("0.1\nabc\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":2:"):
        read_observations(p)


S3 = Sample(np.array([0.2, 0.5, 0.9]))


@pytest.mark.parametrize(
    "m, expected",
    [(1, [0.2, 0.3, 0.4, 0.1]), (2, [0.5, 0.7, 0.5])],
)
def test_overlapping_examples(m, expected):
    v = overlapping_spacings(S3, m)
    np.testing.assert_allclose(v.values, expected, atol=1e-15)
    assert v.n == 4 and v.scheme is Scheme.OVERLAPPING


def test_overlapping_singleton():
    np.testing.assert_allclose(overlapping_spacings(Sample(np.array([0.5])), 1).values, [0.5, 0.5])


@pytest.mark.parametrize("m, expected", [(2, [0.5, 0.5]), (1, [0.2, 0.3, 0.4, 0.1])])
def test_disjoint_examples(m, expected):
    np.testing.assert_allclose(disjoint_spacings(S3, m).values, expected, atol=1e-15)


def test_disjoint_drops_remainder():
    s = from_observations([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])  # n = 7
    v = disjoint_spacings(s, 3)
    np.testing.assert_allclose(v.values, [0.3, 0.3])


def test_order_too_large():
    with pytest.raises(OrderTooLarge):
        overlapping_spacings(from_observations([0.1, 0.2, 0.3, 0.4]), 3)
    with pytest.raises(OrderTooLarge):
        disjoint_spacings(S3, 0)


def test_scale_examples():
    v = scale(overlapping_spacings(S3, 1))
    np.testing.assert_allclose(v.values, [0.8, 1.2, 1.6, 0.4])
    np.testing.assert_allclose(scale(overlapping_spacings(S3, 2)).values, [2.0, 2.8, 2.0])
    with pytest.raises(AlreadyScaled):
        scale(v)


def test_equally_spaced_grid():
    v = scaled_spacings(equally_spaced_sample(9), 1)
    np.testing.assert_allclose(v.values, np.ones(10))


sorted_samples = st.lists(
    st.floats(min_value=1e-6, max_value=1 - 1e-6, allow_nan=False), min_size=1, max_size=60
).map(lambda xs: from_observations(xs))


@settings(max_examples=200, deadline=None)
@given(sorted_samples, st.data())
def test_overlapping_is_sum_of_simple(s, data):
    m = data.draw(st.integers(min_value=1, max_value=max(1, s.n // 2)))
    simple = overlapping_spacings(s, 1).values
    over = overlapping_spacings(s, m).values
    sums = np.array([math.fsum(simple[j : j + m]) for j in range(s.n - m + 1)])
    np.testing.assert_allclose(over, sums, atol=1e-12)
    assert len(over) == spacings_length(s.n, m, "overlapping") == s.n - m + 1
    assert len(disjoint_spacings(s, m)) == spacings_length(s.n, m, "disjoint") == s.n // m
    assert np.all(over >= 0) and np.all(disjoint_spacings(s, m).values >= 0)


@settings(max_examples=200, deadline=None)
@given(sorted_samples)
def test_simple_spacings_sum_to_one(s):
    assert abs(math.fsum(overlapping_spacings(s, 1).values) - 1.0) < 1e-12


@pytest.mark.parametrize("m", [1, 3])
def test_scaled_mean_converges_to_m(m):
    s = sample_uniform(9999, RngSpec(11, 1))
    v = scaled_spacings(s, m).values
    se = v.std(ddof=1) / math.sqrt(v.size)
    # scaled overlapping spacings are correlated over m lags; inflate accordingly
    assert abs(v.mean() - m) < 3 * se * math.sqrt(2 * m - 1)


@pytest.mark.parametrize("scheme", ["overlapping", "disjoint"])
@pytest.mark.parametrize("m", [1, 2, 5])
def test_batch_matches_single(scheme, m):
    rows = np.sort(np.random.default_rng(3).random((7, 20)), axis=1)
    batch = batch_scaled_spacings(rows, m, scheme)
    for i in range(rows.shape[0]):
        single = scaled_spacings(Sample(rows[i]), m, scheme).values
        np.testing.assert_allclose(batch[i], single, rtol=0, atol=1e-15)
