"""Dispersal kernels and their exponential moments.

Three symmetric, time-independent kernel families are supported:

* ``gaussian``: ``J(y) = exp(-y**2 / (2 sigma**2)) / (sigma sqrt(2 pi))``
* ``laplace``:  ``J(y) = exp(-|y| / b) / (2 b)``
* ``uniform``:  ``J(y) = 1 / (2 a)`` on ``[-a, a]``

The bilateral moment is ``M(lam) = int J(y) exp(lam y) dy`` and the half-line
moments are ``H+(lam)`` (over ``y > 0``) and ``H-(lam)`` (over ``y < 0``).
Callers pass the sign of ``lam`` they need, e.g. ``M(-mu)`` for
``int J(y) exp(-mu y) dy``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigError, MomentDivergenceError

__all__ = ["Kernel", "gaussian", "laplace", "uniform", "simpson_refined"]

VARIANTS = ("gaussian", "laplace", "uniform")

# default truncation radius for discretisation, in units of the scale parameter
_DEFAULT_TRUNCATION = {"gaussian": 6.0, "laplace": 12.0, "uniform": 1.0}
# radius used for moment quadrature; mass outside is below 1e-30
_QUADRATURE_RADIUS = {"gaussian": 12.0, "laplace": 72.0, "uniform": 1.0}


def simpson_refined(fun, a, b, tol=1e-10, min_panels=64, max_panels=2**20):
    """Composite Simpson rule on ``[a, b]``, doubling panels until converged.

    ``fun`` must accept an array.  Convergence is declared when two successive
    estimates differ by less than ``tol * max(1, |estimate|)``.
    """
    if b == a:
        return 0.0
    panels = min_panels
    x = np.linspace(a, b, panels + 1)
    fx = np.asarray(fun(x), dtype=float)
    h = (b - a) / panels
    prev = h / 3.0 * (fx[0] + fx[-1] + 4.0 * fx[1:-1:2].sum() + 2.0 * fx[2:-1:2].sum())
    while panels < max_panels:
        panels *= 2
        h = (b - a) / panels
        mid = a + h * np.arange(1, panels, 2)
        fmid = np.asarray(fun(mid), dtype=float)
        merged = np.empty(panels + 1)
        merged[0::2] = fx
        merged[1::2] = fmid
        fx = merged
        est = h / 3.0 * (fx[0] + fx[-1] + 4.0 * fx[1:-1:2].sum() + 2.0 * fx[2:-1:2].sum())
        if abs(est - prev) < tol * max(1.0, abs(est)):
            return float(est)
        prev = est
    return float(prev)


@dataclass(frozen=True)
class Kernel:
    """A symmetric dispersal kernel.

    Parameters
    ----------
    variant : {"gaussian", "laplace", "uniform"}
    scale : float
        ``sigma`` for Gaussian, ``b`` for Laplace, half-width ``a`` for uniform.
    truncation_radius : float, optional
        Radius used by :meth:`discretize`.  Defaults to 6 sigma, 12 b, or the
        exact support.
    """

    variant: str
    scale: float = 1.0
    truncation_radius: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown kernel type {self.variant!r}; expected one of {VARIANTS}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ConfigError(f"kernel scale must be positive and finite, got {self.scale!r}")
        if self.truncation_radius is None:
            object.__setattr__(self, "truncation_radius",
                               _DEFAULT_TRUNCATION[self.variant] * self.scale)
        elif not self.truncation_radius > 0:
            raise ConfigError("truncation_radius must be positive")

    @property
    def symmetric(self) -> bool:
        return True

    @property
    def quadrature_radius(self) -> float:
        """Half-width of the interval used for moment quadrature."""
        return _QUADRATURE_RADIUS[self.variant] * self.scale

    def as_dict(self) -> dict:
        key = {"gaussian": "sigma", "laplace": "scale", "uniform": "halfwidth"}[self.variant]
        out = {"type": self.variant, key: self.scale}
        if not math.isclose(self.truncation_radius, _DEFAULT_TRUNCATION[self.variant] * self.scale):
            out["truncation_radius"] = self.truncation_radius
        return out

    # -- pointwise ----------------------------------------------------------

    def density(self, y):
        y = np.asarray(y, dtype=float)
        s = self.scale
        if self.variant == "gaussian":
            out = np.exp(-0.5 * (y / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
        elif self.variant == "laplace":
            out = np.exp(-np.abs(y) / s) / (2.0 * s)
        else:
            out = np.where(np.abs(y) <= s, 1.0 / (2.0 * s), 0.0)
        return out if out.ndim else float(out)

    # -- moments ------------------------------------------------------------

    def _check_laplace(self, lam):
        if self.variant == "laplace" and np.any(np.abs(lam) * self.scale >= 1.0):
            raise MomentDivergenceError(
                f"Laplace kernel moment diverges for |lambda| >= 1/b = {1.0 / self.scale:g}")

    def mgf(self, lam):
        """Bilateral exponential moment ``int J(y) exp(lam y) dy``."""
        lam = np.asarray(lam, dtype=float)
        self._check_laplace(lam)
        s = self.scale
        with np.errstate(over="ignore"):
            if self.variant == "gaussian":
                out = np.exp(0.5 * (s * lam) ** 2)
            elif self.variant == "laplace":
                out = 1.0 / (1.0 - (s * lam) ** 2)
            else:
                x = s * lam
                small = np.abs(x) < 1e-4
                xs = np.where(small, 1.0, x)
                out = np.where(small, 1.0 + x**2 / 6.0 + x**4 / 120.0, np.sinh(xs) / xs)
        return out if out.ndim else float(out)

    def mgf_derivative(self, lam, order=1):
        """First or second derivative of :meth:`mgf` with respect to ``lam``."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        lam = np.asarray(lam, dtype=float)
        self._check_laplace(lam)
        s = self.scale
        with np.errstate(over="ignore"):
            if self.variant == "gaussian":
                m = np.exp(0.5 * (s * lam) ** 2)
                out = s**2 * lam * m if order == 1 else (s**2 + s**4 * lam**2) * m
            elif self.variant == "laplace":
                u = 1.0 - (s * lam) ** 2
                if order == 1:
                    out = 2.0 * s**2 * lam / u**2
                else:
                    out = 2.0 * s**2 * (1.0 + 3.0 * (s * lam) ** 2) / u**3
            else:
                x = s * lam
                small = np.abs(x) < 1e-3
                xs = np.where(small, 1.0, x)
                if order == 1:
                    exact = s * (xs * np.cosh(xs) - np.sinh(xs)) / xs**2
                    out = np.where(small, s * (x / 3.0 + x**3 / 30.0), exact)
                else:
                    exact = s**2 * ((xs**2 + 2.0) * np.sinh(xs) - 2.0 * xs * np.cosh(xs)) / xs**3
                    out = np.where(small, s**2 * (1.0 / 3.0 + x**2 / 10.0), exact)
        return out if out.ndim else float(out)

    def half_moment(self, side, lam):
        """Half-line moment ``int_{side} J(y) exp(lam y) dy``.

        ``side`` is ``"positive"`` (``y > 0``) or ``"negative"`` (``y < 0``).
        """
        if side not in ("positive", "negative"):
            raise ValueError("side must be 'positive' or 'negative'")
        lam = np.asarray(lam, dtype=float)
        sgn = 1.0 if side == "positive" else -1.0
        s = self.scale
        if self.variant == "gaussian":
            with np.errstate(over="ignore"):
                out = np.exp(0.5 * (s * lam) ** 2) * special.ndtr(sgn * s * lam)
        elif self.variant == "laplace":
            if np.any(sgn * lam * s >= 1.0):
                raise MomentDivergenceError("Laplace half moment diverges for lambda*b >= 1 on that side")
            out = 0.5 / (1.0 - sgn * s * lam)
        else:
            # (1/2a) int_0^a exp(sgn*lam*y) dy
            x = sgn * s * lam
            small = np.abs(x) < 1e-6
            xs = np.where(small, 1.0, x)
            out = np.where(small, 0.5 * (1.0 + x / 2.0 + x**2 / 6.0), np.expm1(xs) / (2.0 * xs))
        return out if out.ndim else float(out)

    def expect(self, g, tol=1e-12):
        """``int J(y) g(y) dy`` by refined composite Simpson, split at ``y = 0``."""
        radius = self.quadrature_radius

        def integrand(y):
            return self.density(y) * g(y)

        return (simpson_refined(integrand, -radius, 0.0, tol=tol)
                + simpson_refined(integrand, 0.0, radius, tol=tol))

    def quad_half_moment(self, side, lam, tol=1e-12):
        """Half-line moment by quadrature; used as an independent check."""
        radius = self.quadrature_radius
        lo, hi = (0.0, radius) if side == "positive" else (-radius, 0.0)
        return simpson_refined(lambda y: self.density(y) * np.exp(lam * y), lo, hi, tol=tol)

    # -- discretisation -----------------------------------------------------

    def discretize(self, dx):
        """Trapezoid weights ``w_j ~ J(j dx) dx`` on ``|j dx| <= R``, summing to 1.

        The returned vector has odd length ``2m + 1`` and is exactly symmetric.
        """
        if not dx > 0:
            raise ConfigError("dx must be positive")
        radius = self.truncation_radius
        if dx > radius:
            raise ConfigError(
                f"grid spacing dx={dx:g} exceeds the kernel truncation radius {radius:g}")
        m = int(math.floor(radius / dx + 1e-9))
        half = self.density(np.arange(0, m + 1) * dx) * dx
        if abs(m * dx - radius) <= 1e-9 * radius:
            half[-1] *= 0.5
        w = np.concatenate([half[:0:-1], half])
        w /= w.sum()
        # exact symmetry after renormalisation
        w = 0.5 * (w + w[::-1])
        return w


def gaussian(sigma=1.0, truncation_radius=None) -> Kernel:
    return Kernel("gaussian", sigma, truncation_radius)


def laplace(scale=1.0, truncation_radius=None) -> Kernel:
    return Kernel("laplace", scale, truncation_radius)


def uniform(halfwidth=1.0) -> Kernel:
    return Kernel("uniform", halfwidth)
