import numpy as np
import pytest

from spacegof.errors import KernelSpecError, NonpositiveExponent
from spacegof.kernels import (
    BUILTIN_KERNELS,
    ScalarKernel,
    constant_kernel,
    greenwood,
    make_gini,
    make_power_scalar,
    parse_kernel,
    symmetrize,
    symsq,
)


@pytest.mark.parametrize("r, x, y, expected", [(2, 3, 1, 4.0), (1, 0.4, 1.6, 1.2), (1.5, 2, 2, 0.0)])
def test_gini_examples(r, x, y, expected):
    assert make_gini(r).eval(x, y) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("s, x, expected", [(2, 1.5, 2.25), (1, 0.7, 0.7), (2, 0.0, 0.0)])
def test_power_scalar_examples(s, x, expected):
    assert make_power_scalar(s).eval(x) == expected


@pytest.mark.parametrize("s, x, y, expected", [(2, 1, 3, 5.0), (1, 2, 4, 3.0), (2, 2, 2, 4.0)])
def test_symmetrize_examples(s, x, y, expected):
    assert symmetrize(make_power_scalar(s)).eval(x, y) == expected


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_nonpositive_exponent(r):
    with pytest.raises(NonpositiveExponent):
        make_gini(r)
    with pytest.raises(NonpositiveExponent):
        make_power_scalar(r)


@pytest.mark.parametrize("name", sorted(BUILTIN_KERNELS))
def test_registered_kernels_are_exactly_symmetric(name):
    h = BUILTIN_KERNELS[name]()
    rng = np.random.default_rng(7)
    x = rng.exponential(3.0, 10_000)
    y = rng.exponential(3.0, 10_000)
    assert np.array_equal(h.eval(x, y), h.eval(y, x))
    assert np.all(np.isfinite(h.eval(x, y)))


def test_gini_sq_matches_expansion():
    rng = np.random.default_rng(8)
    x, y = rng.uniform(0, 10, 10_000), rng.uniform(0, 10, 10_000)
    direct = make_gini(2).eval(x, y)
    expanded = x * x - 2 * x * y + y * y
    np.testing.assert_allclose(direct, expanded, rtol=1e-12, atol=1e-12)


def test_analytic_pack_only_on_squared_difference():
    assert make_gini(2).analytic_moments == "gini_sq"
    assert make_gini(1.5).analytic_moments is None
    assert make_gini(1).smooth is False
    assert make_gini(2).smooth is True


def test_parse_kernel_grammar():
    assert parse_kernel("gini:r=1.5").gini_r == 1.5
    assert parse_kernel("GINI:2").label == "gini:r=2"
    assert isinstance(parse_kernel("greenwood"), ScalarKernel)
    assert parse_kernel("symsq").eval(1.0, 3.0) == 5.0
    for bad in ("gini", "gini:r=", "gini:r=abc", "maxdiff", "gini:r=-2"):
        with pytest.raises((KernelSpecError, NonpositiveExponent)):
            parse_kernel(bad)


def test_constant_kernel_broadcasts():
    h = constant_kernel(3.0)
    assert h.eval(1.0, 2.0) == 3.0
    np.testing.assert_array_equal(h.eval(np.zeros(4), 1.0), np.full(4, 3.0))


def test_greenwood_and_symsq_agree():
    x, y = np.array([0.5, 2.0]), np.array([1.0, 4.0])
    np.testing.assert_array_equal(symmetrize(greenwood()).eval(x, y), symsq().eval(x, y))
