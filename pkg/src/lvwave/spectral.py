"""Linearised eigenvalue problems near the two semitrivial states.

Every root equation here is the period average of a pointwise exponent.
Because the kernels do not depend on time, the averages factor into
``mean(d) * (M(lam) - 1)`` plus averages of the reaction products, so no
nested quadrature is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize

from .coefficients import (ModelParams, PeriodicCurve, exp_weighted_cumint,
                           periodic_antiderivative, _rfft_coeffs, _wavenumbers)
from .errors import (ConstructionError, DegenerateProblemError, PreconditionError,
                     RootFindingError)
from .kernel import Kernel

__all__ = [
    "gamma1", "gamma2", "inf_ratio", "spreading_speed_minus", "spreading_speed_plus",
    "speed_interval", "root_function", "solve_root", "solve_periodic_linear",
    "eigen_data", "lecc_pair", "EigenRoot", "SpeedResult", "PeriodicEigenData", "LeccPair",
]

MU_CAP = 50.0
EQUATIONS = ("I1", "h1", "I2", "h2")


def _moment_cap(*kernels: Kernel) -> float:
    cap = MU_CAP
    for k in kernels:
        if k.variant == "laplace":
            cap = min(cap, (1.0 - 1e-9) / k.scale)
    return cap


# ---------------------------------------------------------------------------
# spreading speeds
# ---------------------------------------------------------------------------

def gamma1(params: ModelParams, mu):
    """Averaged principal exponent of the ``u``-subsystem linearised at zero."""
    d = params.d1.mean
    return d * (params.kernel1.mgf(-np.asarray(mu, dtype=float)) - 1.0) + params.products["a1p"].mean()


def gamma2(params: ModelParams, mu):
    """Averaged principal exponent of the ``v``-subsystem linearised at zero."""
    d = params.d2.mean
    return d * (params.kernel2.mgf(np.asarray(mu, dtype=float)) - 1.0) + params.products["b2q"].mean()


class SpeedResult(NamedTuple):
    speed: float
    mu: float


def inf_ratio(gamma: Callable, dgamma: Callable | None = None, d2gamma: Callable | None = None,
              mu_max: float = 5.0, mu_cap: float = MU_CAP) -> SpeedResult:
    """``inf_{mu > 0} gamma(mu) / mu`` for convex ``gamma`` with ``gamma(0) > 0``.

    A coarse scan brackets the minimiser (growing ``mu_max`` if the minimum
    sits at the right edge), golden section narrows it, and up to three
    Newton steps on ``gamma' mu - gamma = 0`` polish it when derivatives are
    supplied.
    """
    g0 = float(gamma(0.0))
    if not g0 > 0:
        raise PreconditionError(f"gamma(0) must be positive, got {g0:g}")

    def ratio(mu):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(gamma(mu), dtype=float) / mu

    upper = min(mu_max, mu_cap)
    while True:
        grid = np.linspace(upper / 400.0, upper, 400)
        vals = ratio(grid)
        vals = np.where(np.isfinite(vals), vals, np.inf)
        i = int(np.argmin(vals))
        if i < grid.size - 1:
            break
        if upper >= mu_cap:
            raise RootFindingError(f"minimiser of gamma/mu not bracketed below mu = {mu_cap:g}")
        upper = min(2.0 * upper, mu_cap)
    lo = grid[i - 1] if i > 0 else 0.5 * grid[0]
    hi = grid[i + 1]
    res = optimize.minimize_scalar(lambda m: float(ratio(m)), bracket=(lo, grid[i], hi),
                                   method="golden", tol=1e-10)
    mu = float(res.x)
    best = float(ratio(mu))
    if dgamma is not None and d2gamma is not None:
        for _ in range(3):
            g, dg, d2g = float(gamma(mu)), float(dgamma(mu)), float(d2gamma(mu))
            if d2g <= 0:
                break
            cand = mu - (dg * mu - g) / (d2g * mu)
            if not (lo <= cand <= hi):
                break
            val = float(ratio(cand))
            if val <= best:
                mu, best = cand, val
    return SpeedResult(best, mu)


def spreading_speed_minus(params: ModelParams) -> SpeedResult:
    """Leftward spreading speed ``c*_-`` of the ``u``-invasion subsystem."""
    d, k = params.d1.mean, params.kernel1
    return inf_ratio(lambda m: gamma1(params, m),
                     lambda m: -d * k.mgf_derivative(-m, 1),
                     lambda m: d * k.mgf_derivative(-m, 2),
                     mu_cap=_moment_cap(k))


def spreading_speed_plus(params: ModelParams) -> SpeedResult:
    """Rightward spreading speed ``c*_+`` of the ``v``-invasion subsystem."""
    d, k = params.d2.mean, params.kernel2
    return inf_ratio(lambda m: gamma2(params, m),
                     lambda m: d * k.mgf_derivative(m, 1),
                     lambda m: d * k.mgf_derivative(m, 2),
                     mu_cap=_moment_cap(k))


def speed_interval(params: ModelParams) -> tuple[float, float]:
    """A priori bounds ``-c*_+ <= c <= c*_-`` on the bistable wave speed."""
    return (-spreading_speed_plus(params).speed, spreading_speed_minus(params).speed)


# ---------------------------------------------------------------------------
# characteristic roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenRoot:
    mu: float
    equation: str
    c: float
    residual: float


def root_function(params: ModelParams, equation: str, c: float) -> Callable:
    """Time-averaged characteristic function of ``mu`` for one of I1, h1, I2, h2."""
    pr = params.products
    d1, d2 = params.d1.mean, params.d2.mean
    k1, k2 = params.kernel1, params.kernel2
    if equation == "I1":
        off = pr["a1p"].mean() - pr["b1q"].mean()
        return lambda m: d1 * (k1.mgf(-np.asarray(m)) - 1.0) - c * np.asarray(m) + off
    if equation == "h1":
        off = -pr["b2q"].mean()
        return lambda m: d2 * (k2.mgf(-np.asarray(m)) - 1.0) - c * np.asarray(m) + off
    if equation == "I2":
        off = pr["b2q"].mean() - pr["a2p"].mean()
        return lambda m: d2 * (k2.mgf(np.asarray(m)) - 1.0) + c * np.asarray(m) + off
    if equation == "h2":
        off = -pr["a1p"].mean()
        return lambda m: d1 * (k1.mgf(np.asarray(m)) - 1.0) + c * np.asarray(m) + off
    raise ValueError(f"unknown equation {equation!r}; expected one of {EQUATIONS}")


def solve_root(params: ModelParams, equation: str, c: float = 0.0) -> EigenRoot:
    """Unique positive root of a characteristic equation at wave speed ``c``."""
    f = root_function(params, equation, c)
    f0 = float(f(0.0))
    if not f0 < 0:
        raise PreconditionError(
            f"{equation}(0, c={c:g}) = {f0:g} is not negative; parameters are not bistable")
    cap = _moment_cap(params.kernel1, params.kernel2)
    hi = min(1.0, cap)
    with np.errstate(over="ignore"):
        while not float(f(hi)) > 0:
            if hi >= cap:
                raise RootFindingError(f"{equation}: no sign change below mu = {cap:g}")
            hi = min(2.0 * hi, cap)
        mu = optimize.brentq(lambda m: float(f(m)), 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                             maxiter=500)
    return EigenRoot(float(mu), equation, float(c), float(f(mu)))


# ---------------------------------------------------------------------------
# periodic linear ODE
# ---------------------------------------------------------------------------

def _as_samples(f, period, n):
    if isinstance(f, PeriodicCurve):
        if f.n == n:
            return np.asarray(f.samples, dtype=float)
        return np.asarray(f(np.arange(n) * period / n), dtype=float)
    if callable(f):
        t = np.arange(n) * period / n
        return np.broadcast_to(np.asarray(f(t), dtype=float), (n,)).copy()
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"sample array must have length {n}")
    return arr


def solve_periodic_linear(coef, forcing, period, n=2048) -> PeriodicCurve:
    """Periodic solution of ``x' - g(t) x = f(t)``.

    ``coef`` and ``forcing`` may be callables of ``t``, constants, sample
    arrays on the ``n``-point grid, or :class:`PeriodicCurve` objects.
    Writing ``int_0^t g = gbar t + G(t)`` with ``G`` periodic, ``y = x e^{-G}``
    solves ``y' - gbar y = f e^{-G}``, which is diagonal in Fourier space.
    """
    g = _as_samples(coef, period, n)
    f = _as_samples(forcing, period, n)
    gbar = float(g.mean())
    if abs(gbar * period) < 1e-12:
        raise DegenerateProblemError(
            "the coefficient has zero mean; no unique periodic solution exists")
    G = periodic_antiderivative(g - gbar, period)
    c = _rfft_coeffs(f * np.exp(-G))
    k = _wavenumbers(n, period)
    y = np.fft.irfft(c / (1j * k - gbar) * n, n)
    return PeriodicCurve(period, np.exp(G) * y)


# ---------------------------------------------------------------------------
# eigenfunctions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicEigenData:
    c: float
    mu1: EigenRoot
    mu2: EigenRoot
    mu3: EigenRoot
    mu4: EigenRoot
    phi1: PeriodicCurve
    rate1: PeriodicCurve
    rho1: PeriodicCurve
    nu2: PeriodicCurve
    rate2: PeriodicCurve
    rho2: PeriodicCurve
    phi1_drift: float
    nu2_drift: float


def _exp_of_mean_free(rate: np.ndarray, period: float):
    mean = float(rate.mean())
    return np.exp(periodic_antiderivative(rate - mean, period)), mean * period


def eigen_data(params: ModelParams, c: float = 0.0) -> PeriodicEigenData:
    """Eigenfunctions of the linearisations at zero and at the ``(0, q)`` state.

    ``phi1`` and ``nu2`` are normalised to 1 at ``t = 0``.  Their exponents
    have zero mean at the characteristic root up to root-finding roundoff;
    that remaining mean (times ``T``) is kept as ``*_drift``.
    """
    T, n, t = params.period, params.resolution, params.times
    pr = params.products
    a1p, b1q, a2p, b2q = (pr[k].samples for k in ("a1p", "b1q", "a2p", "b2q"))
    d1, d2 = params.d1(t), params.d2(t)
    k1, k2 = params.kernel1, params.kernel2

    r1 = solve_root(params, "I1", c)
    r2 = solve_root(params, "h1", c)
    r3 = solve_root(params, "h2", c)
    r4 = solve_root(params, "I2", c)

    m = r1.mu
    rate1 = d1 * (k1.mgf(-m) - 1.0) - c * m + a1p - b1q
    phi1, drift1 = _exp_of_mean_free(rate1, T)
    g1 = d2 * (k2.mgf(-m) - 1.0) - c * m - b2q
    rho1 = solve_periodic_linear(g1 - rate1, a2p, T, n)

    m = r4.mu
    rate2 = d2 * (k2.mgf(m) - 1.0) + c * m + b2q - a2p
    nu2, drift2 = _exp_of_mean_free(rate2, T)
    g2 = d1 * (k1.mgf(m) - 1.0) + c * m - a1p
    rho2 = solve_periodic_linear(g2 - rate2, b1q, T, n)

    return PeriodicEigenData(
        float(c), r1, r2, r3, r4,
        PeriodicCurve(T, phi1), PeriodicCurve(T, rate1), rho1,
        PeriodicCurve(T, nu2), PeriodicCurve(T, rate2), rho2,
        drift1, drift2,
    )


# ---------------------------------------------------------------------------
# eigen-inequality pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeccPair:
    lambda0: float
    p1_minus: PeriodicCurve
    p2_minus: PeriodicCurve
    lambda1: float
    p1_plus: PeriodicCurve
    p2_plus: PeriodicCurve
    margins: dict

    @property
    def min_margin(self) -> float:
        return min(self.margins.values())


LECC_TOL = -1e-10


def _driven_periodic(forcing, growth, period):
    """Periodic solution of ``x' = growth(t) x + forcing(t)`` in variation-of-constants form.

    Evaluates ``(c0(t) + x(0)) exp(int_0^t growth)`` with
    ``c0(t) = int_0^t forcing(s) exp(-int_0^s growth) ds`` and the unique
    ``x(0)`` making ``x`` periodic.  Needs ``mean(growth) < 0``.
    """
    n = forcing.size
    t = np.arange(n) * period / n
    decay = -float(growth.mean())
    if not decay > 0:
        raise ConstructionError("growth exponent must have negative mean")
    wave = periodic_antiderivative(growth + decay, period)
    c0, full = exp_weighted_cumint(forcing * np.exp(-wave), decay, period)
    x0 = full / math.expm1(decay * period)
    return (c0 + x0) * np.exp(-decay * t + wave)


def lecc_pair(params: ModelParams) -> LeccPair:
    """Positive periodic solutions of the two eigen-inequality systems.

    The first pair follows the explicit construction; the second mirrors it
    with ``p2+`` an exact exponential and ``p1+`` driven by ``b1 q p2+``.
    Margins of all four inequalities are checked on the sample grid.
    """
    T, t = params.period, params.times
    pr = params.products
    a1p, b1q, a2p, b2q = (pr[k].samples for k in ("a1p", "b1q", "a2p", "b2q"))

    gap1 = float((b1q - a1p).mean())
    gap2 = float(b2q.mean())
    if not (gap1 > 0 and gap2 > 0):
        raise PreconditionError("the first stability integral must be negative")
    lam0 = 0.5 * min(gap1, gap2)
    p1m = np.exp(periodic_antiderivative(a1p - b1q, T) + gap1 * t)
    p2m = _driven_periodic(a2p * p1m, lam0 - b2q, T)

    gap3 = float((a2p - b2q).mean())
    gap4 = float(a1p.mean())
    if not (gap3 > 0 and gap4 > 0):
        raise PreconditionError("the second stability integral must be negative")
    lam1 = 0.5 * min(gap3, gap4)
    p2p = np.exp(periodic_antiderivative(b2q - a2p, T) + gap3 * t)
    p1p = _driven_periodic(b1q * p2p, lam1 - a1p, T)
    # the system is homogeneous; unit sup norm keeps derivative roundoff small
    scale = max(p1p.max(), p2p.max())
    p1p, p2p = p1p / scale, p2p / scale

    curves = {k: PeriodicCurve(T, v) for k, v in
              (("p1_minus", p1m), ("p2_minus", p2m), ("p1_plus", p1p), ("p2_plus", p2p))}
    der = {k: c.derivative() for k, c in curves.items()}
    res = {
        "inequ1_first": der["p1_minus"] - (a1p - b1q + lam0) * p1m,
        "inequ1_second": der["p2_minus"] - a2p * p1m - (lam0 - b2q) * p2m,
        "inequ2_first": der["p1_plus"] - (lam1 - a1p) * p1p - b1q * p2p,
        "inequ2_second": der["p2_plus"] - (lam1 + b2q - a2p) * p2p,
    }
    margins = {k: float(v.min()) for k, v in res.items()}
    for name, curve in curves.items():
        if not curve.min() > 0:
            raise ConstructionError(f"{name} is not positive", t=float(t[np.argmin(curve.samples)]))
    for name, r in res.items():
        if margins[name] < LECC_TOL:
            raise ConstructionError(f"{name} residual {margins[name]:.3e} below tolerance",
                                    t=float(t[int(np.argmin(r))]))
    return LeccPair(lam0, curves["p1_minus"], curves["p2_minus"],
                    lam1, curves["p1_plus"], curves["p2_plus"], margins)
