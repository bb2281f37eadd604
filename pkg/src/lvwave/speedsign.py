"""Explicit sufficient conditions for the sign of the bistable wave speed.

The positive-speed test compares two ratio curves ``L(t) < U(t)`` and needs a
constant ``k1`` in between; the negative-speed test needs a constant ``k4``
in a similar band plus a pointwise bound on the ``F`` term.  Both tests use
the decay rate ``mu1(0)`` of the wave at the zero state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .coefficients import ModelParams, check_A2
from .errors import PreconditionError
from .spectral import solve_root, speed_interval

__all__ = [
    "Y1", "Y2", "Y3", "F_term", "th1_check", "th2_check", "th2_search", "classify",
    "SignCertificate", "DEFAULT_S0_GRID",
]

POSITIVE, NEGATIVE, INCONCLUSIVE = "Positive", "Negative", "Inconclusive"
DEFAULT_TGRID = 2048
DEFAULT_S0_GRID = tuple(round(0.01 * i, 2) for i in range(1, 100))


@dataclass
class SignCertificate:
    """Outcome of a speed-sign test.

    ``k_interval`` is the feasible band ``(lo, hi)`` for the constant of the
    comparison profile; it is nonempty iff ``lo < hi``.  ``worst_margin`` is
    the smallest dimensionless slack of all checked inequalities and is
    positive exactly when the verdict certifies.
    """

    verdict: str
    theorem: str | None
    mu1_at_0: float
    k_interval: tuple | None
    s0: float | None = None
    worst_margin: float = float("nan")
    per_t_margins: dict = field(default_factory=dict)
    t_grid: np.ndarray | None = None
    evidence: dict = field(default_factory=dict)
    interval: tuple | None = None

    @property
    def k_nonempty(self) -> bool:
        return self.k_interval is not None and self.k_interval[0] < self.k_interval[1]

    @property
    def k_midpoint(self) -> float:
        lo, hi = self.k_interval
        return 0.5 * (lo + hi)

    def to_dict(self, include_curves=False) -> dict:
        out = {
            "verdict": self.verdict,
            "theorem": self.theorem,
            "mu1_at_0": self.mu1_at_0,
            "k_interval": list(self.k_interval) if self.k_interval is not None else None,
            "s0": self.s0,
            "worst_margin": self.worst_margin,
            "per_t_worst_margins": {k: float(np.min(v)) for k, v in self.per_t_margins.items()},
            "evidence": _jsonable(self.evidence),
        }
        if self.interval is not None:
            out["speed_interval"] = list(self.interval)
        if include_curves and self.t_grid is not None:
            out["t_grid"] = self.t_grid.tolist()
            out["per_t_margins"] = {k: np.asarray(v).tolist() for k, v in self.per_t_margins.items()}
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# auxiliary functions
# ---------------------------------------------------------------------------

def Y1(params: ModelParams, mu, t):
    """``d1 (M1(mu) - 1) - d2 (M2(mu) - 1)``."""
    return (params.d1(t) * (params.kernel1.mgf(mu) - 1.0)
            - params.d2(t) * (params.kernel2.mgf(mu) - 1.0))


def _half_combo(kernel, side, mu, sign):
    # int_{side} J(y) (e^{2 s mu y} - e^{s mu y} + e^{-s mu y} - 1) dy with s = sign
    h = kernel.half_moment
    m = sign * mu
    return h(side, 2.0 * m) - h(side, m) + h(side, -m) - h(side, 0.0)


def Y2(params: ModelParams, mu, t):
    """``-d1 int_0^inf J1(y) (1 + e^{mu y}) (e^{mu y/2} - e^{-mu y/2})^2 dy``.

    Uses ``(1 + e^{x})(e^{x/2} - e^{-x/2})^2 = e^{2x} - e^{x} + e^{-x} - 1``.
    """
    return -params.d1(t) * _half_combo(params.kernel1, "positive", mu, 1.0)


def Y3(params: ModelParams, mu, t, printed=False):
    """Negative half-line counterpart of :func:`Y2`.

    By default the integrand is the reflection of the one in ``Y2``,
    ``(1 + e^{-mu y})(e^{mu y/2} - e^{-mu y/2})^2`` on ``y < 0``, so that
    ``Y3 = Y2`` for symmetric kernels.  ``printed=True`` evaluates the
    unreflected integrand ``(1 + e^{mu y})(...)^2`` on ``y < 0`` instead.
    """
    sign = 1.0 if printed else -1.0
    return -params.d1(t) * _half_combo(params.kernel1, "negative", mu, sign)


def _f_expectation(kernel, mu, s0):
    def g(y):
        e = np.exp(mu * y)
        return (2.0 + (1.0 - s0) * (1.0 - e) / (s0 + (1.0 - s0) * e)) * (1.0 - e)

    return kernel.expect(g)


def F_term(params: ModelParams, mu, s0, t):
    """``d2 int J2(y) [2 + (1-s0)(1-e^{mu y}) / (s0 + (1-s0) e^{mu y})] (1 - e^{mu y}) dy``."""
    if not 0.0 < s0 < 1.0:
        raise ValueError(f"s0 must lie in (0, 1), got {s0!r}")
    return params.d2(t) * _f_expectation(params.kernel2, mu, s0)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _require_bistable(params):
    a2 = check_A2(params)
    if not a2.holds:
        raise PreconditionError(
            f"bistability fails: integrals {a2.integral1:.6g}, {a2.integral2:.6g} must both be negative")


def _tgrid(params, t_samples):
    n = int(t_samples)
    if n < 8:
        raise ValueError("t_samples must be at least 8")
    return np.arange(n) * params.period / n


def _refined_extreme(fun, t, vals, period, kind="min"):
    """Grid extreme of ``fun`` polished by a bounded scalar search."""
    sgn = 1.0 if kind == "min" else -1.0
    i = int(np.argmin(sgn * vals))
    h = period / t.size
    res = optimize.minimize_scalar(lambda s: sgn * float(fun(s)), bounds=(t[i] - h, t[i] + h),
                                   method="bounded", options={"xatol": 1e-10})
    return float(min(sgn * vals[i], res.fun) * sgn)


def _products_at(params, t):
    p, q = params.p(t), params.q(t)
    return params.a1(t) * p, params.b1(t) * q, params.a2(t) * p, params.b2(t) * q


def th1_check(params: ModelParams, t_samples: int = DEFAULT_TGRID) -> SignCertificate:
    """Positive-speed test.

    ``L(t) = (Y1 + a1p - b1q + b2q) / (a2p)`` and ``U(t) = (a1p + Y2) / (a1p)``
    with ``mu = mu1(0)``.  Certifies iff ``0 < L < U`` on the grid and
    ``max L < min U`` (so a single ``k1`` fits).
    """
    _require_bistable(params)
    mu = solve_root(params, "I1", 0.0).mu

    def curves(t):
        a1p, b1q, a2p, b2q = _products_at(params, t)
        lo = (Y1(params, mu, t) + a1p - b1q + b2q) / a2p
        hi = (a1p + Y2(params, mu, t)) / a1p
        return lo, hi

    t = _tgrid(params, t_samples)
    L, U = curves(t)
    T = params.period
    lmin = _refined_extreme(lambda s: curves(s)[0], t, L, T, "min")
    lmax = _refined_extreme(lambda s: curves(s)[0], t, L, T, "max")
    umin = _refined_extreme(lambda s: curves(s)[1], t, U, T, "min")
    gap = U - L
    gmin = _refined_extreme(lambda s: np.subtract(*curves(s)[::-1]), t, gap, T, "min")
    band = (lmax, umin)
    worst = min(lmin, gmin, umin - lmax)
    ok = worst > 0
    i = int(np.argmin(np.minimum(L, gap)))
    return SignCertificate(
        verdict=POSITIVE if ok else INCONCLUSIVE,
        theorem="TH1" if ok else None,
        mu1_at_0=mu,
        k_interval=band,
        worst_margin=float(worst),
        per_t_margins={"lower_positive": L, "band_gap": gap},
        t_grid=t,
        evidence={"t_worst": float(t[i]), "L": float(L[i]), "U": float(U[i]),
                  "min_L": lmin, "max_L": lmax, "min_U": umin, "min_gap": gmin},
    )


def th2_check(params: ModelParams, s0: float, t_samples: int = DEFAULT_TGRID,
              _mu=None) -> SignCertificate:
    """Negative-speed test at a given ``s0``.

    Needs ``max(a2p/b2q, 1) < min((1 - (a1p/b1q)(1 - s0))/s0, -Y3/(b1q))`` with
    room for one ``k4`` across all ``t``, and ``F < Y1 + a1p - b1q``.
    """
    if not 0.0 < s0 < 1.0:
        raise ValueError(f"s0 must lie in (0, 1), got {s0!r}")
    if _mu is None:
        _require_bistable(params)
        _mu = solve_root(params, "I1", 0.0).mu
    mu = _mu
    fexp = _f_expectation(params.kernel2, mu, s0)

    def curves(t):
        a1p, b1q, a2p, b2q = _products_at(params, t)
        lhs = np.maximum(a2p / b2q, 1.0)
        rhs = np.minimum((1.0 - a1p / b1q * (1.0 - s0)) / s0, -Y3(params, mu, t) / b1q)
        # second condition, scaled by b1q to match the ratio units of the band
        cond = (Y1(params, mu, t) + a1p - b1q - params.d2(t) * fexp) / b1q
        return lhs, rhs, cond

    t = _tgrid(params, t_samples)
    lhs, rhs, cond = curves(t)
    T = params.period
    lmax = _refined_extreme(lambda s: curves(s)[0], t, lhs, T, "max")
    rmin = _refined_extreme(lambda s: curves(s)[1], t, rhs, T, "min")
    gap = rhs - lhs
    gmin = _refined_extreme(lambda s: curves(s)[1] - curves(s)[0], t, gap, T, "min")
    cmin = _refined_extreme(lambda s: curves(s)[2], t, cond, T, "min")
    worst = min(gmin, rmin - lmax, cmin)
    ok = worst > 0
    i = int(np.argmin(np.minimum(gap, cond)))
    return SignCertificate(
        verdict=NEGATIVE if ok else INCONCLUSIVE,
        theorem="TH2" if ok else None,
        mu1_at_0=mu,
        k_interval=(lmax, rmin),
        s0=float(s0),
        worst_margin=float(worst),
        per_t_margins={"band_gap": gap, "f_condition": cond},
        t_grid=t,
        evidence={"t_worst": float(t[i]), "max_lhs": lmax, "min_rhs": rmin,
                  "min_gap": gmin, "min_f_condition": cmin,
                  "F_at_t0": float(params.d2(0.0) * fexp)},
    )


def th2_search(params: ModelParams, s0_grid=DEFAULT_S0_GRID,
               t_samples: int = DEFAULT_TGRID) -> SignCertificate:
    """Run :func:`th2_check` over ``s0_grid`` and keep the largest worst margin."""
    grid = list(s0_grid)
    if not grid or any(not 0.0 < s < 1.0 for s in grid):
        raise ValueError("s0_grid must be a nonempty subset of (0, 1)")
    _require_bistable(params)
    mu = solve_root(params, "I1", 0.0).mu
    best = None
    for s0 in grid:
        cert = th2_check(params, s0, t_samples, _mu=mu)
        if best is None or cert.worst_margin > best.worst_margin:
            best = cert
    best.evidence["s0_grid_size"] = len(grid)
    return best


def classify(params: ModelParams, t_samples: int = DEFAULT_TGRID,
             s0_grid=DEFAULT_S0_GRID) -> SignCertificate:
    """Positive test first, then the ``s0`` search; attaches the a priori speed interval."""
    cert = th1_check(params, t_samples)
    if cert.verdict != POSITIVE:
        neg = th2_search(params, s0_grid, t_samples)
        if neg.verdict == NEGATIVE:
            cert = neg
        else:
            cert.evidence = {"th1": dict(cert.evidence, worst_margin=cert.worst_margin),
                             "th2": dict(neg.evidence, worst_margin=neg.worst_margin, s0=neg.s0)}
    cert.interval = speed_interval(params)
    return cert
