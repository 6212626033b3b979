import math

import numpy as np
import pytest
from scipy.special import dawsn

from hhl.hilbert import (EdgeDecayWarning, HilbertMethod, analytic_completion,
                         commutation_check, cumulative_moment, hilbert,
                         hilbert_with_tails, lp_lower_bound_sweep,
                         project_minus, project_plus)
from hhl.kernels import cesaro, hardy_type, zero_kernel
from hhl.realline import SampledLine


def gaussian_line(L=64.0, N=1 << 12):
    return SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2),
                                     L, N, label="gauss")


def modgauss_line(L=64.0, N=1 << 12):
    fn = lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / 32.0) * np.cos(3.0 * np.asarray(x))
    return SampledLine.from_function(fn, L, N, label="modgauss")


def l2(f: SampledLine) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.h))


def test_cos_to_sin():
    L = 16 * math.pi
    f = SampledLine.from_function(np.cos, L, 1 << 12)
    with pytest.warns(EdgeDecayWarning):
        hf = hilbert(f, "fft")
    assert np.max(np.abs(hf.values.real - np.sin(f.grid()))) < 1e-8


def test_method_validation():
    with pytest.raises(ValueError):
        hilbert(gaussian_line(), "nope")
    with pytest.raises(ValueError):
        HilbertMethod("nope")
    assert HilbertMethod("pv").kind == "pv"


def test_pv_matches_dawson():
    g = gaussian_line()
    hf = hilbert(g, "pv")
    exact = 2.0 / math.sqrt(math.pi) * dawsn(g.grid())
    assert np.max(np.abs(hf.values.real - exact)) < 1e-9


def test_pv_poisson_conjugate():
    P1 = SampledLine.from_function(lambda x: (1 / math.pi) / (1 + np.asarray(x) ** 2),
                                   64.0, 1 << 12, tail_power=2.0, label="P1")
    hf = hilbert(P1, "pv")
    xs = P1.grid()
    Q1 = xs / (math.pi * (1 + xs * xs))
    assert np.max(np.abs(hf.values.real - Q1)) < 1e-6


def test_cross_method_agreement():
    f = modgauss_line()
    a = hilbert(f, "fft")
    b = hilbert(f, "pv", tol=1e-10)
    diff = SampledLine.from_values(a.values - b.values, f.L)
    assert l2(diff) / l2(a) < 1e-6


def test_involution_and_isometry():
    f = modgauss_line()
    hf = hilbert(f, "fft")
    hhf = hilbert(hf, "fft")
    neg = SampledLine.from_values(hhf.values + f.values, f.L)
    assert l2(neg) / l2(f) < 1e-7
    assert abs(l2(hf) - l2(f)) / l2(f) < 1e-7


def test_antisymmetry():
    fn = lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / 32.0) * np.cos(3.0 * np.asarray(x) + 0.7)
    f = SampledLine.from_function(fn, 64.0, 1 << 12)
    refl = SampledLine.from_function(lambda x: fn(-np.asarray(x, dtype=float)),
                                     64.0, 1 << 12)
    h_refl = hilbert(refl, "fft").values
    h_f = hilbert(f, "fft").values
    # -x_j lands on x_(N-j) for j >= 1
    lhs = h_refl[1:]
    rhs = -h_f[1:][::-1]
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_analytic_completion_poisson():
    # the analytic completion of P_1 is the boundary value of the
    # upper-half-plane Cauchy kernel: P_1 + i Q_1
    P1 = SampledLine.from_function(lambda x: (1 / math.pi) / (1 + np.asarray(x) ** 2),
                                   64.0, 1 << 12, tail_power=2.0, label="P1")
    comp = analytic_completion(P1, method="pv")
    xs = P1.grid()
    expect = (1j / math.pi) / (xs + 1j)
    assert np.max(np.abs(comp.values - expect)) < 1e-6


def test_analytic_completion_rejects_complex():
    f = SampledLine.from_values(np.full(64, 1j), 2.0)
    with pytest.raises(ValueError):
        analytic_completion(f)


def test_projections_partition_and_idempotence():
    # dc-free input: the spectral method needs no 1/x tail handling
    f = modgauss_line(N=1 << 12)
    plus = project_plus(f)
    minus = project_minus(f)
    assert np.allclose(plus.values + minus.values, f.values, atol=1e-14)
    again = project_plus(plus)
    diff = SampledLine.from_values(again.values - plus.values, f.L)
    assert l2(diff) / l2(plus) < 1e-7


def test_projection_conjugation_swap():
    f = gaussian_line(N=1 << 10)
    lhs = np.conj(project_plus(f).values)
    rhs = project_minus(f).values  # f real: conj(P+ f) = P- f
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_hilbert_with_tails_whole_line():
    big = SampledLine.from_function(lambda x: np.exp(-np.asarray(x) ** 2),
                                    256.0, 1 << 14, label="gauss")
    hf = hilbert_with_tails(big)
    probes = np.array([-1e4, -300.0, 0.5, 2.0, 300.0, 1e4])
    exact = 2.0 / math.sqrt(math.pi) * dawsn(probes)
    assert np.max(np.abs(hf.form(probes).real - exact)) < 1e-6
    assert hf.tail_power == 1.0  # carries the mass term


def test_commutation_zero_kernel():
    f = gaussian_line(N=1 << 10)
    rep = commutation_check(zero_kernel(), f, 2.0, window_factor=2)
    assert rep.rows[0].residual == 0.0


def test_commutation_quick():
    f = SampledLine.from_function(lambda x: np.asarray(x) * np.exp(-np.asarray(x) ** 2),
                                  64.0, 1 << 12, label="xgauss")
    rep = commutation_check(hardy_type(), f, 2.0)
    assert rep.rows[0].residual < 1e-5


def test_cumulative_moment():
    k = cesaro()
    xs = np.array([0.25, 0.5, 2.0])
    got = cumulative_moment(k, 0.5, xs)
    expect = np.array([2 * math.sqrt(0.25), 2 * math.sqrt(0.5), 2.0])
    assert np.allclose(got, expect, rtol=1e-9)
    up = cumulative_moment(k, 0.5, xs, upper=True)
    assert np.allclose(up, 2.0 - np.minimum(expect, 2.0), atol=1e-9)


def test_lp_sweep_floors_and_sandwich():
    large, small = lp_lower_bound_sweep(hardy_type(), 2.0, (0.05, 0.02))
    for sweep in (large, small):
        assert sweep.moment == pytest.approx(2.0, rel=1e-9)
        assert all(q <= 2.0 * (1 + 1e-6) for q in sweep.quotients)
        assert sweep.best >= 0.9 * 2.0


def test_lp_sweep_validates_inputs():
    with pytest.raises(ValueError):
        lp_lower_bound_sweep(cesaro(), 1.0, (0.1,))
    with pytest.raises(ValueError):
        lp_lower_bound_sweep(cesaro(), 2.0, (1.5,))
