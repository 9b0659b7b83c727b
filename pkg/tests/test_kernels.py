import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dckrr import ExponentialDecay, FiniteRank, KernelSpec, PolynomialDecay, default_decay, gram, kernel_eval
from dckrr.exceptions import InputError
from dckrr.kernels import decay_from_dict, median_bandwidth
from dckrr.linalg import cholesky

KERNELS = [
    KernelSpec.sobolev1(),
    KernelSpec.gaussian(0.8, dim=3),
    KernelSpec.linear(dim=3),
    KernelSpec.polynomial(3, offset=1.0, dim=3),
]


def test_kernel_eval_examples():
    assert kernel_eval(KernelSpec.sobolev1(), 0.2, 0.5) == pytest.approx(1.2, abs=1e-15)
    assert kernel_eval(KernelSpec.gaussian(6.0), 0.37, 0.37) == 1.0
    assert kernel_eval(KernelSpec.gaussian(1.0, dim=2), [0, 0], [1, 1]) == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_polynomial_and_linear_values():
    x, y = [1.0, 2.0], [0.5, -1.0]
    assert kernel_eval(KernelSpec.linear(2), x, y) == -1.5
    assert kernel_eval(KernelSpec.polynomial(2, 1.0, 2), x, y) == pytest.approx(0.25)


@pytest.mark.parametrize(
    "kernel, x, y",
    [
        (KernelSpec.sobolev1(), 1.2, 0.5),
        (KernelSpec.sobolev1(), -0.1, 0.5),
        (KernelSpec.gaussian(1.0, dim=2), [0.0, 0.0, 0.0], [1.0, 1.0]),
        (KernelSpec.linear(3), [1.0, 2.0], [1.0, 2.0]),
    ],
)
def test_kernel_eval_rejects_bad_points(kernel, x, y):
    with pytest.raises(InputError):
        kernel_eval(kernel, x, y)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="gaussian", sigma=0.0),
        dict(family="gaussian"),
        dict(family="polynomial", degree=0),
        dict(family="polynomial", degree=1.5),
        dict(family="polynomial", offset=-1.0),
        dict(family="sobolev1", dim=2),
        dict(family="matern"),
    ],
)
def test_invalid_kernel_specs(kwargs):
    with pytest.raises(InputError):
        KernelSpec(**kwargs)


@pytest.mark.parametrize("kernel", KERNELS, ids=lambda k: k.family)
def test_symmetry_bitwise_on_random_pairs(kernel):
    rng = np.random.default_rng(11)
    X = rng.uniform(size=(1000, kernel.dim))
    Y = rng.uniform(size=(1000, kernel.dim))
    for x, y in zip(X, Y):
        assert kernel_eval(kernel, x, y) == kernel_eval(kernel, y, x)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 20), seed=st.integers(0, 2**32 - 1), which=st.integers(0, len(KERNELS) - 1))
def test_gram_is_psd(n, seed, which):
    kernel = KERNELS[which]
    X = np.random.default_rng(seed).uniform(size=(n, kernel.dim))
    G = gram(kernel, X)
    assert np.linalg.eigvalsh(G).min() >= -1e-8 * n
    cholesky(G)


@settings(max_examples=200, deadline=None)
@given(
    x=st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=2),
    y=st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=2),
    sigma=st.floats(1e-2, 1e2),
)
def test_gaussian_bounded(x, y, sigma):
    v = kernel_eval(KernelSpec.gaussian(sigma, dim=2), x, y)
    assert 0.0 <= v <= 1.0
    if np.sum((np.array(x) - np.array(y)) ** 2) / (2 * sigma**2) < 700:
        assert v > 0.0


def test_default_decay():
    assert default_decay(KernelSpec.sobolev1()) == PolynomialDecay(nu=1.0, c=1.0)
    assert default_decay(KernelSpec.gaussian(1.0)) == ExponentialDecay(1.0, 1.0)
    assert default_decay(KernelSpec.linear(90)).r == 90
    assert default_decay(KernelSpec.polynomial(3)).r == 4


def test_decay_validation():
    with pytest.raises(InputError):
        FiniteRank((1.0, 2.0))
    with pytest.raises(InputError):
        FiniteRank((1.0, 0.0))
    with pytest.raises(InputError):
        PolynomialDecay(nu=-1.0)
    with pytest.raises(InputError):
        ExponentialDecay(c1=0.0)


@pytest.mark.parametrize("decay", [FiniteRank((1.0, 0.5)), PolynomialDecay(1.5, 2.0), ExponentialDecay(0.5, 3.0)])
def test_decay_dict_round_trip(decay):
    assert decay_from_dict(decay.to_dict()) == decay


def test_decay_from_dict_rejects_unknown():
    with pytest.raises(InputError):
        decay_from_dict({"variant": "polynomial", "nu": 1.0, "nuu": 2})
    with pytest.raises(InputError):
        decay_from_dict({"variant": "polynomial"})
    with pytest.raises(InputError):
        decay_from_dict({"variant": "gamma"})


def test_finite_rank_eigenvalues():
    d = FiniteRank((1.0, 0.5, 0.25))
    np.testing.assert_array_equal(d.eigenvalue(np.arange(6)), [0.0, 1.0, 0.5, 0.25, 0.0, 0.0])


def test_median_bandwidth():
    X = np.array([[0.0], [1.0], [3.0]])
    # pairwise distances 1, 3, 2
    assert median_bandwidth(X) == 2.0
    with pytest.raises(InputError):
        median_bandwidth(np.ones((5, 2)))
