"""Periodic coefficients, carrying-capacity curves and the bistability checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy import interpolate, optimize

from .errors import ConfigError
from .kernel import Kernel

__all__ = [
    "TrigPoly",
    "PeriodicCurve",
    "ModelParams",
    "A2Check",
    "StrongCheck",
    "carrying_p",
    "carrying_q",
    "check_A2",
    "check_strong",
    "average",
    "exp_weighted_cumint",
]

DEFAULT_RESOLUTION = 2048
COEFFICIENT_NAMES = ("d1", "r1", "a1", "b1", "d2", "r2", "a2", "b2")


# ---------------------------------------------------------------------------
# trigonometric polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrigPoly:
    """``mean + sum_k [sin_k sin(k w t) + cos_k cos(k w t)]`` with ``w = 2 pi / period``.

    ``harmonics`` is a tuple of ``(k, sin_coeff, cos_coeff)`` triples.
    """

    period: float
    mean: float
    harmonics: tuple = ()

    def __post_init__(self):
        if not self.period > 0:
            raise ConfigError("period must be positive")
        cleaned = []
        for h in self.harmonics:
            k, a, b = h
            if int(k) != k or k < 1:
                raise ConfigError(f"harmonic index must be a positive integer, got {k!r}")
            cleaned.append((int(k), float(a), float(b)))
        object.__setattr__(self, "harmonics", tuple(cleaned))
        object.__setattr__(self, "mean", float(self.mean))

    @classmethod
    def constant(cls, value, period):
        return cls(period, value)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def is_constant(self) -> bool:
        return all(a == 0.0 and b == 0.0 for _, a, b in self.harmonics)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.mean)
        w = self.omega
        for k, a, b in self.harmonics:
            out = out + a * np.sin(k * w * t) + b * np.cos(k * w * t)
        return out if out.ndim else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        w = self.omega
        for k, a, b in self.harmonics:
            out = out + k * w * (a * np.cos(k * w * t) - b * np.sin(k * w * t))
        return out if out.ndim else float(out)

    def antiderivative(self, t):
        """``int_0^t f(s) ds``; equals ``mean * period`` at ``t = period``."""
        t = np.asarray(t, dtype=float)
        out = self.mean * t
        w = self.omega
        for k, a, b in self.harmonics:
            kw = k * w
            out = out + a * (1.0 - np.cos(kw * t)) / kw + b * np.sin(kw * t) / kw
        return out if out.ndim else float(out)

    def scaled(self, factor):
        return TrigPoly(self.period, factor * self.mean,
                        tuple((k, factor * a, factor * b) for k, a, b in self.harmonics))

    def as_dict(self) -> dict:
        out = {"mean": self.mean}
        if self.harmonics:
            out["harmonics"] = [{"k": k, "sin": a, "cos": b} for k, a, b in self.harmonics]
        return out


# ---------------------------------------------------------------------------
# sampled periodic curves
# ---------------------------------------------------------------------------

def _rfft_coeffs(samples):
    n = samples.shape[-1]
    c = np.fft.rfft(samples) / n
    if n % 2 == 0:
        c[..., -1] = 0.0
    return c


def _wavenumbers(n, period):
    return 2.0 * math.pi / period * np.arange(n // 2 + 1)


def spectral_derivative(samples, period):
    """Derivative of a periodic function from its uniform samples (FFT)."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[-1]
    c = _rfft_coeffs(samples)
    return np.fft.irfft(1j * _wavenumbers(n, period) * c * n, n)


def periodic_antiderivative(samples, period):
    """``int_0^{t_j} f`` for uniform samples of a periodic ``f`` (includes ``mean * t``)."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[-1]
    c = _rfft_coeffs(samples)
    k = _wavenumbers(n, period)
    a = np.zeros_like(c)
    a[..., 1:] = c[..., 1:] / (1j * k[1:])
    wave = np.fft.irfft(a * n, n)
    t = np.arange(n) * period / n
    return c[..., 0].real[..., None] * t + wave - wave[..., :1]


def exp_weighted_cumint(h, rate, period):
    """``int_0^{t_j} exp(rate s) h(s) ds`` on the uniform grid, for periodic ``h``.

    Returns ``(values, full)`` where ``full`` is the integral over one period.
    Exact up to the spectral truncation of ``h``.
    """
    h = np.asarray(h, dtype=float)
    n = h.size
    t = np.arange(n) * period / n
    c = _rfft_coeffs(h)
    k = _wavenumbers(n, period)
    if rate == 0.0:
        a = np.zeros_like(c)
        a[1:] = c[1:] / (1j * k[1:])
        s = np.fft.irfft(a * n, n)
        vals = c[0].real * t + s - s[0]
        return vals, c[0].real * period
    a = c / (1j * k + rate)
    s = np.fft.irfft(a * n, n)
    growth = np.exp(rate * t)
    vals = growth * s - s[0]
    full = math.expm1(rate * period) * s[0]
    return vals, full


class PeriodicCurve:
    """Uniform samples of a ``period``-periodic function on ``[0, period)``.

    Point evaluation uses a periodic cubic spline; :meth:`derivative` and
    :meth:`antiderivative` without arguments work spectrally on the samples.
    """

    def __init__(self, period, samples):
        samples = np.array(samples, dtype=float)
        if samples.ndim != 1 or samples.size < 8:
            raise ValueError("PeriodicCurve needs a 1-D array of at least 8 samples")
        self.period = float(period)
        self.samples = samples
        self.samples.setflags(write=False)

    @classmethod
    def from_function(cls, fun, period, n=DEFAULT_RESOLUTION):
        t = np.arange(n) * period / n
        return cls(period, np.broadcast_to(fun(t), t.shape))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def times(self):
        return np.arange(self.n) * self.period / self.n

    @cached_property
    def _spline(self):
        t = np.append(self.times, self.period)
        y = np.append(self.samples, self.samples[0])
        return interpolate.CubicSpline(t, y, bc_type="periodic")

    def __call__(self, t):
        out = self._spline(np.mod(t, self.period))
        return out if np.ndim(out) else float(out)

    def derivative(self, t=None):
        """Spectral derivative at the nodes, or spline derivative at ``t``."""
        if t is None:
            return spectral_derivative(self.samples, self.period)
        out = self._spline(np.mod(t, self.period), 1)
        return out if np.ndim(out) else float(out)

    def antiderivative(self):
        """Samples of ``int_0^{t_j} f(s) ds`` (not periodic unless the mean vanishes)."""
        return periodic_antiderivative(self.samples, self.period)

    def mean(self) -> float:
        return float(self.samples.mean())

    def min(self) -> float:
        return float(self.samples.min())

    def max(self) -> float:
        return float(self.samples.max())

    def map(self, fun):
        return PeriodicCurve(self.period, fun(self.samples))

    def _other_samples(self, other):
        if isinstance(other, PeriodicCurve):
            if other.n != self.n or not math.isclose(other.period, self.period, rel_tol=1e-12):
                raise ValueError("curves live on different grids")
            return other.samples
        if isinstance(other, TrigPoly):
            return other(self.times)
        return np.asarray(other, dtype=float)

    def __add__(self, other):
        return PeriodicCurve(self.period, self.samples + self._other_samples(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PeriodicCurve(self.period, self.samples - self._other_samples(other))

    def __rsub__(self, other):
        return PeriodicCurve(self.period, self._other_samples(other) - self.samples)

    def __mul__(self, other):
        return PeriodicCurve(self.period, self.samples * self._other_samples(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PeriodicCurve(self.period, self.samples / self._other_samples(other))

    def __rtruediv__(self, other):
        return PeriodicCurve(self.period, self._other_samples(other) / self.samples)

    def __neg__(self):
        return PeriodicCurve(self.period, -self.samples)

    def __repr__(self):
        return (f"PeriodicCurve(period={self.period:.6g}, n={self.n}, "
                f"min={self.min():.6g}, max={self.max():.6g})")


# ---------------------------------------------------------------------------
# model parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """All coefficients of the periodic competition system with nonlocal dispersal."""

    period: float
    d1: TrigPoly
    r1: TrigPoly
    a1: TrigPoly
    b1: TrigPoly
    d2: TrigPoly
    r2: TrigPoly
    a2: TrigPoly
    b2: TrigPoly
    kernel1: Kernel = field(default_factory=lambda: Kernel("gaussian"))
    kernel2: Kernel = field(default_factory=lambda: Kernel("gaussian"))
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.period > 0:
            raise ConfigError("period must be positive")
        tgrid = np.linspace(0.0, self.period, 10_001)
        for name in COEFFICIENT_NAMES:
            coef = getattr(self, name)
            if not isinstance(coef, TrigPoly):
                coef = TrigPoly.constant(float(coef), self.period)
                object.__setattr__(self, name, coef)
            if not math.isclose(coef.period, self.period, rel_tol=1e-12):
                raise ConfigError(f"coefficient {name} has period {coef.period!r}, "
                                  f"model period is {self.period!r}")
            lo = float(np.min(coef(tgrid)))
            if not lo > 0:
                raise ConfigError(f"coefficient {name} must be strictly positive; min is {lo:g}")

    @property
    def times(self):
        return np.arange(self.resolution) * self.period / self.resolution

    def sample(self, name):
        """Coefficient ``name`` as a :class:`PeriodicCurve` on the model grid."""
        return PeriodicCurve(self.period, getattr(self, name)(self.times))

    @cached_property
    def p(self) -> PeriodicCurve:
        return carrying_p(self)

    @cached_property
    def q(self) -> PeriodicCurve:
        return carrying_q(self)

    @cached_property
    def products(self) -> dict:
        """``{"a1p", "b1q", "a2p", "b2q"}`` sampled on the model grid."""
        t = self.times
        p, q = self.p.samples, self.q.samples
        return {
            "a1p": PeriodicCurve(self.period, self.a1(t) * p),
            "b1q": PeriodicCurve(self.period, self.b1(t) * q),
            "a2p": PeriodicCurve(self.period, self.a2(t) * p),
            "b2q": PeriodicCurve(self.period, self.b2(t) * q),
        }

    def replace(self, **changes) -> "ModelParams":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return ModelParams(**data)

    @classmethod
    def constant(cls, period=1.0, kernel1=None, kernel2=None, **values):
        """Constant-coefficient model; every one of the eight rates must be given."""
        missing = [n for n in COEFFICIENT_NAMES if n not in values]
        if missing:
            raise ConfigError(f"missing coefficients: {', '.join(missing)}")
        coefs = {n: TrigPoly.constant(values[n], period) for n in COEFFICIENT_NAMES}
        kwargs = {}
        if kernel1 is not None:
            kwargs["kernel1"] = kernel1
        if kernel2 is not None:
            kwargs["kernel2"] = kernel2
        return cls(period, **coefs, **kwargs)


# ---------------------------------------------------------------------------
# carrying capacities
# ---------------------------------------------------------------------------

def _periodic_logistic(r: TrigPoly, a: TrigPoly, n: int) -> PeriodicCurve:
    # With R(t) = int_0^t r = rbar t + Rp(t), the closed form
    #   x(t) = x0 e^R / (1 + x0 int_0^t e^R a),   x0 = (e^{R(T)} - 1) / int_0^T e^R a
    # simplifies to x(t) = e^{Rp(t)} / S(t), where S is the periodic function with
    # int_0^t e^{rbar s} h(s) ds = e^{rbar t} S(t) - S(0) and h = e^{Rp} a.
    T = r.period
    t = np.arange(n) * T / n
    rbar = r.mean
    rp = r.antiderivative(t) - rbar * t
    h = np.exp(rp) * a(t)
    c = _rfft_coeffs(h)
    s = np.fft.irfft(c / (1j * _wavenumbers(n, T) + rbar) * n, n)
    return PeriodicCurve(T, np.exp(rp) / s)


def carrying_p(params: ModelParams, n=None) -> PeriodicCurve:
    """Positive periodic solution of ``p' = p (r1 - a1 p)``."""
    return _periodic_logistic(params.r1, params.a1, n or params.resolution)


def carrying_q(params: ModelParams, n=None) -> PeriodicCurve:
    """Positive periodic solution of ``q' = q (r2 - b2 q)``."""
    return _periodic_logistic(params.r2, params.b2, n or params.resolution)


def average(f) -> float:
    """Mean of ``f`` over one period."""
    if isinstance(f, TrigPoly):
        return f.mean
    if isinstance(f, PeriodicCurve):
        return f.mean()
    raise TypeError(f"cannot average object of type {type(f).__name__}")


class A2Check(NamedTuple):
    integral1: float
    integral2: float
    holds: bool


class StrongCheck(NamedTuple):
    holds: bool
    min_b1_over_b2: float
    min_a2_over_a1: float
    r1_mean: float
    r2_mean: float


def check_A2(params: ModelParams) -> A2Check:
    """Bistability: ``int (a1 p - b1 q) < 0`` and ``int (b2 q - a2 p) < 0`` over a period."""
    pr = params.products
    i1 = params.period * (pr["a1p"].mean() - pr["b1q"].mean())
    i2 = params.period * (pr["b2q"].mean() - pr["a2p"].mean())
    return A2Check(i1, i2, bool(i1 < 0 and i2 < 0))


def _periodic_min(fun, period, n=10_000):
    t = np.linspace(0.0, period, n, endpoint=False)
    vals = fun(t)
    i = int(np.argmin(vals))
    h = period / n
    res = optimize.minimize_scalar(fun, bounds=(t[i] - h, t[i] + h), method="bounded",
                                   options={"xatol": 1e-12})
    return float(min(vals[i], res.fun))


def check_strong(params: ModelParams) -> StrongCheck:
    """Strong condition ensuring a unique, linearly unstable coexistence state."""
    m1 = _periodic_min(lambda t: params.b1(t) / params.b2(t), params.period)
    m2 = _periodic_min(lambda t: params.a2(t) / params.a1(t), params.period)
    r1, r2 = params.r1.mean, params.r2.mean
    return StrongCheck(bool(r1 < m1 * r2 and r2 < m2 * r1), m1, m2, r1, r2)
