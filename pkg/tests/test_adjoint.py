import math

import numpy as np
import pytest

from hhl.adjoint import apply_Sa_complex, apply_Sa_real, duality_residual, sa_moment
from hhl.halfplane import CayleyPower
from hhl.hausdorff import transform_values
from hhl.kernels import adjoint_kernel, cesaro, hardy_type, moment, zero_kernel
from hhl.realline import SampledLine, eval_at


def test_sa_linear_ramp():
    # averaging f(x) = x over weights on (0,1) halves it
    f = SampledLine.from_function(
        lambda x: np.where((np.asarray(x) >= 0) & (np.asarray(x) <= 1),
                           np.asarray(x, dtype=float), 0.0), 4.0, 1 << 10)
    out = apply_Sa_real(cesaro(), f)
    xs = out.grid()
    sel = (xs > 0.05) & (xs < 0.95)
    assert np.max(np.abs(out.values[sel] - xs[sel] / 2.0)) < 1e-8


def test_sa_zero_weight():
    f = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2), 8.0, 1 << 8)
    out = apply_Sa_real(zero_kernel(), f)
    assert np.max(np.abs(out.values)) == 0.0


def test_sa_real_on_grid_with_bounded_weight():
    f = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2), 8.0, 1 << 8)
    out = apply_Sa_real(cesaro(), f)
    assert np.all(np.isfinite(out.values))


def test_sa_equals_reciprocal_transform():
    # probes avoid x = 0: tail-weighted companions diverge pointwise there
    # for data with nonzero central value
    from hhl.adjoint import _sa_values
    f = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2 / 4.0),
                                  32.0, 1 << 12, label="gauss")
    probe = np.linspace(-10, 10, 31) + 0.013
    for a in (cesaro(), hardy_type()):
        direct = _sa_values(a, lambda x: eval_at(f, x), probe, 1e-10)
        via = transform_values(adjoint_kernel(a), lambda x: eval_at(f, x),
                               probe, tol=1e-10)
        assert np.max(np.abs(direct - via)) < 1e-8


def test_sa_complex_log_value():
    got = apply_Sa_complex(cesaro(), CayleyPower(1.0, 1.0), 1j)
    assert got == pytest.approx(-1j * math.log(2.0), abs=1e-10)


def test_sa_complex_equals_reciprocal_at_random_points():
    rng = np.random.default_rng(11)
    zs = rng.uniform(-3, 3, 20) + 1j * rng.uniform(0.3, 3.0, 20)
    F = CayleyPower(1.0, 1.0)
    a = cesaro()
    adj = adjoint_kernel(a)
    lhs = apply_Sa_complex(a, F, zs)
    rhs = transform_values(adj, F.eval_batch, zs, tol=1e-10)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_sa_complex_rejects_lower_half():
    with pytest.raises(ValueError):
        apply_Sa_complex(cesaro(), CayleyPower(1.0, 1.0), 1 - 2j)


def test_sa_moment_matches_reciprocal_moment():
    for a in (cesaro(), hardy_type()):
        for p in (2.0, 4.0):
            lhs = sa_moment(a, p)
            rhs = moment(adjoint_kernel(a), p)
            assert lhs.finite == rhs.finite
            if lhs.finite:
                assert lhs.value == pytest.approx(rhs.value, rel=1e-8)
    assert sa_moment(cesaro(), 2.0).value == pytest.approx(2.0, rel=1e-9)


def test_duality_residual_gaussians():
    f = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2),
                                  32.0, 1 << 12, label="f")
    g = SampledLine.from_function(lambda x: np.exp(-0.5 * (np.asarray(x) - 1.0) ** 2),
                                  32.0, 1 << 12, label="g")
    assert duality_residual(cesaro(), f, g, 2.0) < 1e-7


def test_duality_zero_function():
    f = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2),
                                  16.0, 1 << 10)
    z = SampledLine.from_values(np.zeros(1 << 10), 16.0)
    assert duality_residual(cesaro(), f, z, 2.0) == 0.0


def test_duality_requires_common_grid():
    f = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2), 16.0, 1 << 10)
    g = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2), 8.0, 1 << 10)
    with pytest.raises(ValueError):
        duality_residual(cesaro(), f, g, 2.0)
