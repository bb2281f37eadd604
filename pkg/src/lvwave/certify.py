"""Residual checks for the explicit comparison profiles behind the sign tests.

A lower solution must make both components of the wave-profile operator
nonnegative, an upper solution nonpositive.  The operator is evaluated on a
``(z, t)`` grid with the convolutions computed against the closed-form
profile (no grid truncation): composite Gauss-Legendre on the kernel support,
split at every kink of the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .coefficients import ModelParams, PeriodicCurve
from .errors import ConstructionError, PreconditionError
from .kernel import Kernel
from .spectral import PeriodicEigenData, eigen_data, spreading_speed_minus, spreading_speed_plus
from .speedsign import th1_check, th2_check

__all__ = ["ProfileCandidate", "ResidualReport", "build_lower_th1", "build_upper_th2",
           "residuals", "convolve_closed_form"]

LOWER, UPPER = "LowerTH1", "UpperTH2"
RESIDUAL_TOL = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class ProfileCandidate:
    """A comparison profile ``(Phi, Psi)(z, t)`` built from ``sigma = phi1 / (phi1 + e^{-mu z})``.

    Lower kind: ``Phi = k sigma`` and ``Psi = sigma``.
    Upper kind: ``Phi = max(s0, sigma)`` and ``Psi = min(1, k Phi)``.
    """

    kind: str
    c: float
    k: float
    s0: float | None
    eigen: PeriodicEigenData
    params: ModelParams = field(repr=False)

    @property
    def mu(self) -> float:
        return self.eigen.mu1.mu

    @property
    def phi1(self) -> PeriodicCurve:
        return self.eigen.phi1

    def log_phi1(self, t):
        return np.log(self.phi1(t))

    def dlog_phi1(self, t):
        # the exponent of phi1 with its (roundoff-level) mean removed
        rate = self.eigen.rate1
        return rate(t) - rate.mean()

    def sigma(self, z, t):
        return special.expit(self.mu * np.asarray(z) + self.log_phi1(t))

    def z1(self, t):
        """Junction where the sigmoid reaches ``s0`` (upper kind only)."""
        return (special.logit(self.s0) - self.log_phi1(t)) / self.mu

    def z2(self, t):
        """Junction where ``k * sigma`` reaches 1 (upper kind only)."""
        return (-math.log(self.k - 1.0) - self.log_phi1(t)) / self.mu

    def z_center(self) -> float:
        t = self.params.times
        if self.kind == LOWER:
            return float(np.mean(-self.log_phi1(t) / self.mu))
        return float(np.mean(0.5 * (self.z1(t) + self.z2(t))))

    def values(self, z, t):
        s = self.sigma(z, t)
        if self.kind == LOWER:
            return self.k * s, s
        phi = np.maximum(self.s0, s)
        return phi, np.minimum(1.0, self.k * phi)

    def derivatives(self, z, t):
        """Analytic ``(Phi_z, Phi_t, Psi_z, Psi_t)``; one-sided off the junctions."""
        s = self.sigma(z, t)
        ds = s * (1.0 - s)
        sz, st = self.mu * ds, self.dlog_phi1(t) * ds
        if self.kind == LOWER:
            return self.k * sz, self.k * st, sz, st
        on = s > self.s0
        pz, pt = np.where(on, sz, 0.0), np.where(on, st, 0.0)
        below = self.k * np.maximum(self.s0, s) < 1.0
        return pz, pt, np.where(below, self.k * pz, 0.0), np.where(below, self.k * pt, 0.0)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_lower_th1(params: ModelParams, k1: float | None = None,
                    c_small: float = 1e-3) -> ProfileCandidate:
    """Lower profile for the positive-speed test at a small positive speed."""
    cert = th1_check(params)
    if not cert.k_nonempty:
        raise PreconditionError("the k1 band is empty; no lower profile exists")
    lo, hi = cert.k_interval
    k1 = cert.k_midpoint if k1 is None else float(k1)
    if not lo < k1 < hi:
        raise PreconditionError(f"k1={k1:g} lies outside the band ({lo:g}, {hi:g})")
    cmax = 0.01 * spreading_speed_minus(params).speed
    if not 0.0 < c_small <= cmax:
        raise PreconditionError(f"c_small must lie in (0, {cmax:g}]")
    return ProfileCandidate(LOWER, float(c_small), k1, None, eigen_data(params, c_small), params)


def build_upper_th2(params: ModelParams, k4: float | None = None, s0: float = 0.81,
                    c_small: float = -1e-3) -> ProfileCandidate:
    """Upper profile for the negative-speed test at a small negative speed."""
    cert = th2_check(params, s0)
    if not cert.k_nonempty:
        raise PreconditionError(f"the k4 band is empty at s0={s0:g}; no upper profile exists")
    lo, hi = cert.k_interval
    k4 = cert.k_midpoint if k4 is None else float(k4)
    if not lo < k4 < hi:
        raise PreconditionError(f"k4={k4:g} lies outside the band ({lo:g}, {hi:g})")
    if not k4 * s0 < 1.0:
        raise PreconditionError("k4 * s0 must be below 1 so that the junctions are ordered")
    cmax = 0.01 * spreading_speed_plus(params).speed
    if not -cmax <= c_small < 0.0:
        raise PreconditionError(f"c_small must lie in [{-cmax:g}, 0)")
    return ProfileCandidate(UPPER, float(c_small), k4, float(s0), eigen_data(params, c_small), params)


# ---------------------------------------------------------------------------
# convolution against the closed form
# ---------------------------------------------------------------------------

def _panel_count(kernel: Kernel, mu: float) -> int:
    width = 0.5 * min(kernel.scale, 1.0 / mu)
    return max(8, int(math.ceil(2.0 * kernel.quadrature_radius / width)))


def _gl_integral(fun, a, b, panels):
    """Composite Gauss-Legendre of ``fun`` over per-row intervals ``[a_i, b_i]``."""
    u = ((np.arange(panels)[:, None] + 0.5 * (_GL_X[None, :] + 1.0)) / panels).ravel()
    w = np.tile(0.5 * _GL_W, panels) / panels
    length = np.maximum(b - a, 0.0)
    s = a[:, None] + length[:, None] * u[None, :]
    return length * (fun(s) @ w)


def convolve_closed_form(kernel: Kernel, z, fun, start=-np.inf, panels=None, mu=1.0):
    """``int_{s > start} J(z - s) fun(s) ds`` for each ``z``.

    ``fun`` is smooth on ``s > start``.  The integration window is the
    kernel's quadrature support, split at ``s = z`` where nonsmooth kernels
    have their kink.
    """
    z = np.asarray(z, dtype=float)
    radius = kernel.quadrature_radius
    panels = panels or _panel_count(kernel, mu)
    lo = np.maximum(z - radius, start)
    hi = z + radius
    mid = np.clip(z, lo, hi)

    def integrand(s):
        return kernel.density(z[:, None] - s) * fun(s)

    half = max(4, panels // 2)
    return _gl_integral(integrand, lo, mid, half) + _gl_integral(integrand, mid, hi, half)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

@dataclass
class ResidualReport:
    kind: str
    z: np.ndarray
    t: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    mask: np.ndarray
    tol: float = RESIDUAL_TOL

    def _extreme(self, R):
        vals = np.where(self.mask, R, np.nan)
        if self.kind == LOWER:
            j = np.nanargmin(vals)
        else:
            j = np.nanargmax(vals)
        i, k = np.unravel_index(j, R.shape)
        return float(R[i, k]), float(self.z[i]), float(self.t[k])

    @property
    def worst(self) -> dict:
        out = {}
        for name, R in (("R1", self.R1), ("R2", self.R2)):
            v, z, t = self._extreme(R)
            out[name] = {"value": v, "z": z, "t": t}
        return out

    def component_passes(self, name) -> bool:
        v = self.worst[name]["value"]
        return v >= -self.tol if self.kind == LOWER else v <= self.tol

    @property
    def passes(self) -> bool:
        return self.component_passes("R1") and self.component_passes("R2")

    def to_dict(self) -> dict:
        w = self.worst
        return {
            "kind": self.kind,
            "requirement": ">= -tol" if self.kind == LOWER else "<= +tol",
            "tol": self.tol,
            "R1": dict(w["R1"], passes=self.component_passes("R1")),
            "R2": dict(w["R2"], passes=self.component_passes("R2")),
            "passes": self.passes,
            "z_range": [float(self.z[0]), float(self.z[-1])],
            "t_samples": int(self.t.size),
        }


def residuals(params: ModelParams, cand: ProfileCandidate, z_grid=None, t_grid=None,
              fd_step: float | None = None, exclusion: float | None = None) -> ResidualReport:
    """Evaluate both components of the wave-profile operator on the candidate.

    ``R1 = d1 (J1 * Phi - Phi) - c Phi_z - Phi_t + Phi [a1p (1 - Phi) - b1q (1 - Psi)]``
    ``R2 = d2 (J2 * Psi - Psi) - c Psi_z - Psi_t + (1 - Psi) [a2p Phi - b2q Psi]``

    Derivatives are analytic unless ``fd_step`` is given, in which case
    centred differences with that step are used in both ``z`` and ``t``.
    For upper profiles the junction lines are masked out within
    ``exclusion`` (default two grid spacings).
    """
    zc = cand.z_center()
    if z_grid is None:
        z_grid = np.linspace(zc - 40.0, zc + 40.0, 801)
    if t_grid is None:
        t_grid = np.arange(128) * params.period / 128
    z = np.asarray(z_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if z.min() > zc - 40.0 or z.max() < zc + 40.0:
        raise ConstructionError(
            f"z grid [{z.min():g}, {z.max():g}] must cover [{zc - 40:g}, {zc + 40:g}]")
    dz = float(np.min(np.diff(z))) if z.size > 1 else 1.0
    if exclusion is None:
        exclusion = 2.0 * dz

    k1, k2 = params.kernel1, params.kernel2
    p, q = params.p(t), params.q(t)
    a1p, b1q, a2p, b2q = params.a1(t) * p, params.b1(t) * q, params.a2(t) * p, params.b2(t) * q
    d1, d2 = params.d1(t), params.d2(t)
    c, mu = cand.c, cand.mu
    n1, n2 = _panel_count(k1, mu), _panel_count(k2, mu)

    R1 = np.empty((z.size, t.size))
    R2 = np.empty_like(R1)
    mask = np.ones_like(R1, dtype=bool)
    for j, tj in enumerate(t):
        lp = float(cand.log_phi1(tj))

        def sig(s):
            return special.expit(mu * s + lp)

        Phi, Psi = cand.values(z, tj)
        if cand.kind == LOWER:
            conv1 = cand.k * convolve_closed_form(k1, z, sig, panels=n1)
            conv2 = convolve_closed_form(k2, z, sig, panels=n2)
        else:
            s0, k = cand.s0, cand.k
            z1, z2 = float(cand.z1(tj)), float(cand.z2(tj))
            conv1 = s0 + convolve_closed_form(k1, z, lambda s: sig(s) - s0, z1, n1)
            conv2 = k * (s0 + convolve_closed_form(k2, z, lambda s: sig(s) - s0, z1, n2)) \
                - k * convolve_closed_form(k2, z, lambda s: sig(s) - 1.0 / k, z2, n2)
            mask[:, j] = (np.abs(z - z1) >= exclusion) & (np.abs(z - z2) >= exclusion)
        if fd_step is None:
            Pz, Pt, Sz, St = cand.derivatives(z, tj)
        else:
            h = fd_step
            fp, fm = cand.values(z + h, tj), cand.values(z - h, tj)
            gp, gm = cand.values(z, tj + h), cand.values(z, tj - h)
            Pz, Sz = (fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)
            Pt, St = (gp[0] - gm[0]) / (2 * h), (gp[1] - gm[1]) / (2 * h)
        R1[:, j] = (d1[j] * (conv1 - Phi) - c * Pz - Pt
                    + Phi * (a1p[j] * (1.0 - Phi) - b1q[j] * (1.0 - Psi)))
        R2[:, j] = (d2[j] * (conv2 - Psi) - c * Sz - St
                    + (1.0 - Psi) * (a2p[j] * Phi - b2q[j] * Psi))
    return ResidualReport(cand.kind, z, t, R1, R2, mask)
