"""Holomorphic functions on the upper half-plane.

The built-in family is small but closed under everything the verification
suites need: shifted Cayley powers (z + i*sigma)^-beta on the principal
branch, the fixed inverse square (z+i)^-2, Poisson extensions of sampled
boundary data, linear combinations, and vertical shifts.  On top of the
family sit the Hardy-norm estimator (supremum of horizontal slice norms),
boundary traces, the interior pointwise bound, and the nontangential
maximal function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .quadrature import integrate_batched, integrate_halfline, geometric_panels
from .realline import SampledLine, lp_norm, _tail_integral
from .report import CheckRow, VerificationReport

__all__ = [
    "HoloFunction",
    "CayleyPower",
    "InverseSquare",
    "PoissonExtension",
    "LinearCombination",
    "HardyNormEstimate",
    "hardy_norm",
    "slice_norm",
    "boundary_trace",
    "BoundaryTraceReport",
    "pointwise_bound_check",
    "nontangential_max",
    "vertical_shift",
    "poisson_extend",
]


class HoloFunction:
    """Base for closed-form holomorphic functions on Im z > 0.

    ``boundary_ok`` marks members that extend continuously to the real
    axis and may be evaluated at Im z = 0; ``tail_power`` gives the decay
    |f(x+iy)| ~ C|x|^-s along slices when known; ``feature_scale`` is the
    smallest lateral width the modulus varies on (used to grade panels);
    ``even_slice_modulus`` marks |f(-x+iy)| = |f(x+iy)|.
    """

    boundary_ok: bool = False
    tail_power: float | None = None
    feature_scale: float = 1.0
    even_slice_modulus: bool = False

    def eval_batch(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval(self, z: complex) -> complex:
        z = complex(z)
        if z.imag <= 0 and not (self.boundary_ok and z.imag == 0.0):
            raise ValueError(f"evaluation point {z} is not in the upper half-plane")
        return complex(self.eval_batch(np.array([z]))[0])

    def shift(self, sigma: float) -> "HoloFunction":
        return _Shifted(self, sigma)


@dataclass(frozen=True)
class CayleyPower(HoloFunction):
    """z -> (z + i*sigma)^-beta with arg taken in (0, pi).

    sigma = 0 is allowed only for beta < 1 and then only at interior
    points; sigma > 0 members extend continuously to the axis.
    """

    beta: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.sigma == 0.0 and self.beta >= 1.0:
            raise ValueError("sigma = 0 requires beta < 1")

    @property
    def boundary_ok(self) -> bool:  # type: ignore[override]
        return self.sigma > 0

    @property
    def tail_power(self) -> float:  # type: ignore[override]
        return self.beta

    @property
    def feature_scale(self) -> float:  # type: ignore[override]
        return self.sigma if self.sigma > 0 else 1e-6

    even_slice_modulus = True

    def eval_batch(self, z):
        zeta = np.asarray(z, dtype=complex) + 1j * self.sigma
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = zeta ** (-self.beta)
        # |zeta| beyond double range means the value underflowed to zero
        return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)

    def shift(self, sigma):
        return CayleyPower(self.beta, self.sigma + sigma)


@dataclass(frozen=True)
class InverseSquare(HoloFunction):
    """z -> (z + i)^-2, the fixed p = 1 test function."""

    boundary_ok = True
    tail_power = 2.0
    feature_scale = 1.0
    even_slice_modulus = True

    def eval_batch(self, z):
        zeta = np.asarray(z, dtype=complex) + 1j
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = 1.0 / (zeta * zeta)
        return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)

    def shift(self, sigma):
        return CayleyPower(2.0, 1.0 + sigma)


@dataclass(frozen=True)
class PoissonExtension(HoloFunction):
    """Harmonic extension u(x + iy) = (g * P_y)(x) of sampled boundary data.

    Holomorphic exactly when g lies in the analytic boundary class; the
    verification suites use it for maximal functions and boundary traces,
    which only need the harmonic extension.
    """

    g: SampledLine = None

    boundary_ok = False
    even_slice_modulus = False

    @property
    def tail_power(self) -> float | None:  # type: ignore[override]
        tp = self.g.tail_power
        return min(2.0, tp) if tp is not None and tp > 1 else None

    @property
    def feature_scale(self) -> float:  # type: ignore[override]
        return max(self.g.h, 1e-6)

    def eval_batch(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        flat_z = z.ravel()
        flat_out = out.ravel()
        for y in np.unique(flat_z.imag):
            if y <= 0:
                raise ValueError("Poisson extension requires Im z > 0")
            sel = flat_z.imag == y
            flat_out[sel] = _poisson_values(self.g, float(y), flat_z.real[sel])
        return out

    def shift(self, sigma):
        return _Shifted(self, sigma)


@dataclass(frozen=True)
class LinearCombination(HoloFunction):
    """sum of coef * member over a list of (coef, HoloFunction) terms."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), f) for c, f in self.terms))

    @property
    def boundary_ok(self) -> bool:  # type: ignore[override]
        return all(f.boundary_ok for _, f in self.terms)

    @property
    def tail_power(self) -> float | None:  # type: ignore[override]
        powers = [f.tail_power for _, f in self.terms]
        if any(tp is None for tp in powers):
            return None
        return min(powers) if powers else None

    @property
    def feature_scale(self) -> float:  # type: ignore[override]
        return min((f.feature_scale for _, f in self.terms), default=1.0)

    even_slice_modulus = False

    def eval_batch(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, f in self.terms:
            out = out + c * f.eval_batch(z)
        return out


@dataclass(frozen=True)
class _Shifted(HoloFunction):
    base: HoloFunction = None
    sigma: float = 0.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("vertical shift must be positive")

    @property
    def boundary_ok(self) -> bool:  # type: ignore[override]
        return True  # the shift moves the axis into the interior

    @property
    def tail_power(self):  # type: ignore[override]
        return self.base.tail_power

    @property
    def feature_scale(self) -> float:  # type: ignore[override]
        return self.base.feature_scale + self.sigma

    @property
    def even_slice_modulus(self) -> bool:  # type: ignore[override]
        return self.base.even_slice_modulus

    def eval_batch(self, z):
        return self.base.eval_batch(np.asarray(z, dtype=complex) + 1j * self.sigma)

    def shift(self, sigma):
        return _Shifted(self.base, self.sigma + sigma)


def vertical_shift(f: HoloFunction, sigma: float) -> HoloFunction:
    """z -> f(z + i*sigma); lands in H^p intersected with H^inf."""
    return f.shift(sigma)


# ---------------------------------------------------------------------------
# Hardy norms over horizontal slices


@dataclass(frozen=True)
class HardyNormEstimate:
    """Slice norms over a decreasing y-grid and their supremum.

    ``monotone`` records whether the norms were nondecreasing as y
    decreased (the classical behavior; it justifies reading the maximum
    as the norm).  ``finite`` is False when some slice diverged.
    """

    p: float
    slice_heights: tuple
    slice_norms: tuple
    estimate: float
    monotone: bool
    finite: bool = True

    def __post_init__(self):
        hs = self.slice_heights
        if any(hs[i] <= hs[i + 1] for i in range(len(hs) - 1)):
            raise ValueError("slice heights must be strictly decreasing")


def slice_norm(f: HoloFunction, y: float, p: float, L: float,
               tol: float = 1e-10) -> float:
    """L^p norm of x -> f(x + iy) with graded panels and analytic tails."""
    if y < 0 or (y == 0 and not f.boundary_ok):
        raise ValueError("slice height must be positive (or 0 for boundary-continuous forms)")

    def fn(xs):
        return f.eval_batch(np.asarray(xs) + 1j * y)

    if math.isinf(p):
        panels = np.asarray(geometric_panels(f.feature_scale + y, L))
        mids = 0.5 * (panels[1:] + panels[:-1])
        probe = np.concatenate([panels[1:], mids])
        vals = np.abs(fn(np.concatenate([probe, -probe, np.array([0.0])])))
        return float(np.max(vals))

    scale = max(f.feature_scale, 1e-12)
    win_pos = integrate_batched(lambda xs: np.abs(fn(xs)) ** p,
                                geometric_panels(scale, L), tol=tol)
    total = float(win_pos.value)
    if f.even_slice_modulus:
        total *= 2.0
    else:
        win_neg = integrate_batched(lambda xs: np.abs(fn(-xs)) ** p,
                                    geometric_panels(scale, L), tol=tol)
        total += float(win_neg.value)
    tp = f.tail_power
    if tp is not None:
        if p * tp <= 1.0:
            return math.inf
        total += _tail_integral(fn, p, L, tp, +1, tol)
        total += _tail_integral(fn, p, L, tp, -1, tol)
    return total ** (1.0 / p)


def hardy_norm(f: HoloFunction, p: float, y_grid=(1.0, 0.5, 0.1, 0.05, 0.01),
               L: float = 1e4, tol: float = 1e-10) -> HardyNormEstimate:
    """Hardy norm estimate: max of slice norms over a decreasing y-grid.

    Boundary-continuous forms may put y = 0 at the end of the grid, in
    which case the supremum is attained there exactly.
    """
    ys = tuple(float(y) for y in y_grid)
    if any(ys[i] <= ys[i + 1] for i in range(len(ys) - 1)):
        raise ValueError("y_grid must be strictly decreasing")
    norms = []
    for y in ys:
        norms.append(slice_norm(f, y, p, L, tol=tol))
    finite = all(math.isfinite(v) for v in norms)
    estimate = max(norms)
    monotone = all(norms[i] <= norms[i + 1] * (1.0 + 1e-8)
                   for i in range(len(norms) - 1))
    return HardyNormEstimate(p=p, slice_heights=ys, slice_norms=tuple(norms),
                             estimate=estimate, monotone=monotone, finite=finite)


@dataclass(frozen=True)
class BoundaryTraceReport:
    heights: tuple
    increments: tuple  # L^p distance between consecutive slices
    convergent: bool


def boundary_trace(f: HoloFunction, y_seq, p: float, L: float, N: int):
    """Boundary proxy: the slice at the smallest y, plus convergence data.

    Returns (SampledLine, BoundaryTraceReport); the report marks the trace
    convergent when the slice increments decrease monotonically.
    """
    ys = tuple(float(y) for y in y_seq)
    if any(ys[i] <= ys[i + 1] for i in range(len(ys) - 1)) or ys[-1] < 0:
        raise ValueError("y_seq must be strictly decreasing and nonnegative")
    if ys[-1] == 0 and not f.boundary_ok:
        raise ValueError("y = 0 requested for a form without boundary continuity")
    slices = []
    for y in ys:
        fn = (lambda yy: lambda xs: f.eval_batch(np.asarray(xs) + 1j * yy))(y)
        slices.append(SampledLine.from_function(fn, L, N, tail_power=f.tail_power))
    increments = []
    for a, b in zip(slices, slices[1:]):
        diff = SampledLine.from_values(b.values - a.values, L)
        increments.append(lp_norm(diff, p))
    convergent = all(increments[i] > increments[i + 1]
                     for i in range(len(increments) - 1))
    return slices[-1], BoundaryTraceReport(heights=ys, increments=tuple(increments),
                                           convergent=convergent)


def pointwise_bound_check(f: HoloFunction, p: float, z_set,
                          L: float = 1e4) -> VerificationReport:
    """Interior bound |f(x+iy)| <= (2/(pi y))^(1/p) * hardy norm at each z."""
    est = hardy_norm(f, p, L=L)
    rows = []
    worst = 0.0
    for z in z_set:
        z = complex(z)
        lhs = abs(f.eval(z))
        rhs = (2.0 / (math.pi * z.imag)) ** (1.0 / p) * est.estimate
        ratio = lhs / rhs if rhs > 0 else math.inf
        worst = max(worst, ratio)
        rows.append(CheckRow(
            suite="halfplane", check=f"pointwise-bound z={z:.4g}",
            anchor="interior-growth-bound", computed=lhs, predicted=rhs,
            residual=ratio, tol=1.0, passed=bool(ratio <= 1.0 + 1e-12)))
    return VerificationReport(suite="halfplane", rows=rows,
                              environment={"p": p, "norm": est.estimate,
                                           "worst_ratio": worst})


def nontangential_max(f: HoloFunction, x: float, y_cap: float,
                      resolution: int = 64, floor: float = 1e-6) -> float:
    """sup of |f| over the cone |t - x| < y <= y_cap on a triangular grid.

    Levels live on an absolute eighth-octave ladder between ``floor`` and
    y_cap, so enlarging the cone scans a superset of points and the
    discrete supremum is monotone in y_cap, like the true one.  Each level
    is scanned at 2*resolution+1 relative lateral offsets.
    """
    if y_cap <= 0:
        raise ValueError("y_cap must be positive")
    j_lo = math.ceil(8.0 * math.log2(floor))
    j_hi = math.floor(8.0 * math.log2(y_cap))
    ys = [2.0 ** (j / 8.0) for j in range(j_lo, j_hi + 1)] + [y_cap]
    offs = np.linspace(-1.0, 1.0, 2 * resolution + 1)[1:-1]
    best = 0.0
    for y in ys:
        vals = np.abs(f.eval_batch(x + y * offs + 1j * y))
        best = max(best, float(vals.max()))
    return best


# ---------------------------------------------------------------------------
# Poisson extension of sampled data

def _poisson_B(u: np.ndarray, y: float) -> np.ndarray:
    """Second antiderivative of the Poisson kernel: B'' = P_y."""
    return (u * np.arctan2(u, y) - 0.5 * y * np.log(u * u + y * y)) / math.pi


def _poisson_A(u: np.ndarray, y: float) -> np.ndarray:
    """Antiderivative of the Poisson kernel: A' = P_y."""
    return np.arctan2(u, y) / math.pi


def _halfhat_outer(x: np.ndarray, c: float, side: float, h: float,
                   y: float) -> np.ndarray:
    """Poisson integral of the outward half of the hat centered at c.

    The full-hat convolution pretends each boundary sample ramps to zero
    outside the window; this closed form lets callers remove that ramp so
    tagged tails can take over without double counting.
    """
    x = np.asarray(x, dtype=float)
    if side < 0:
        x = 2.0 * c - x
    u1 = x - c
    u0 = x - c - h
    a1, a0 = _poisson_A(u1, y), _poisson_A(u0, y)
    i_p = a1 - a0
    i_vp = (u1 * a1 - _poisson_B(u1, y)) - (u0 * a0 - _poisson_B(u0, y))
    return i_p * (1.0 - u1 / h) + i_vp / h


def _poisson_window(g: SampledLine, y: float, xs: np.ndarray,
                    conv: np.ndarray | None = None) -> np.ndarray:
    """Poisson integral of the piecewise-linear model of g on [-L, L-h].

    ``conv`` may carry the precomputed full-hat convolution on g's own
    grid; the outward half-hats of the two boundary samples are removed in
    closed form so the model ends exactly at the sampled span.
    """
    xs = np.asarray(xs, dtype=float)
    h = g.h
    grid = g.grid()
    if conv is None:
        chunk = max(1, (1 << 22) // g.N)
        out = np.empty(xs.shape, dtype=complex)
        for start in range(0, xs.size, chunk):
            d = xs[start:start + chunk, None] - grid[None, :]
            w = (_poisson_B(d + h, y) - 2.0 * _poisson_B(d, y)
                 + _poisson_B(d - h, y)) / h
            out[start:start + chunk] = w.astype(complex) @ g.values
    else:
        out = conv.copy()
    out -= g.values[0] * _halfhat_outer(xs, grid[0], -1.0, h, y)
    out -= g.values[-1] * _halfhat_outer(xs, grid[-1], +1.0, h, y)
    return out


def _poisson_tail(g: SampledLine, y: float, xs: np.ndarray) -> np.ndarray:
    """Contribution of the tagged tails to (g * P_y)(xs).

    The windowed model spans the sampled range [-L, L-h]; the tag
    integrals pick up exactly where it ends.
    """
    edges = {+1.0: g.L - g.h, -1.0: g.L}

    def one_side(side):
        def integrand(ss):
            s = side * (edges[side] + ss)
            py = (y / math.pi) / ((xs[None, :] - s[:, None]) ** 2 + y * y)
            return np.asarray(g.form(s))[:, None] * py
        res = integrate_halfline(integrand, tol=1e-12, support=(1e-12, math.inf))
        if res.diverges:
            raise ValueError("tagged tail is not integrable against the Poisson kernel")
        return res.value

    return one_side(+1.0) + one_side(-1.0)


def _poisson_values(g: SampledLine, y: float, xs: np.ndarray) -> np.ndarray:
    """(g * P_y)(xs) for arbitrary abscissas: windowed hat model in closed
    form plus tagged tails by quadrature."""
    xs = np.asarray(xs, dtype=float)
    out = _poisson_window(g, y, xs)
    if g.form is not None:
        out += _poisson_tail(g, y, xs)
    return out


def _poisson_grid_values(g: SampledLine, y: float) -> np.ndarray:
    """As _poisson_values on g's own grid, via the Toeplitz structure."""
    n = g.N
    h = g.h
    k = np.arange(-(n - 1), n) * h
    w = (_poisson_B(k + h, y) - 2.0 * _poisson_B(k, y) + _poisson_B(k - h, y)) / h
    conv = fftconvolve(g.values, w.astype(complex), mode="valid")
    out = _poisson_window(g, y, g.grid(), conv=conv)
    if g.form is not None:
        out = out + _poisson_tail(g, y, g.grid())
    return out


def poisson_extend(g: SampledLine, y: float) -> SampledLine:
    """Convolution with the Poisson kernel at height y > 0.

    The result carries a derived closed form (pointwise re-convolution)
    so iterated extensions keep their tails; its decay is the kernel's
    x^-2 unless the data decays slower.
    """
    if y <= 0:
        raise ValueError("height y must be positive")
    vals = _poisson_grid_values(g, y)
    tp = None
    if g.form is not None:
        gtp = g.tail_power
        tp = min(2.0, gtp) if gtp is not None and gtp > 1 else gtp
    form = (lambda xs: _poisson_values(g, y, np.asarray(xs, dtype=float)))
    out = SampledLine(L=g.L, values=vals, form=None, tail_power=tp,
                      label=f"P_{y:g}*{g.label}" if g.label else "")
    # attach the derived form after validation against its own values
    object.__setattr__(out, "form", form)
    return out
