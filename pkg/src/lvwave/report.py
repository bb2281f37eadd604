"""Assemble the machine-readable summary of one configuration."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from importlib import metadata

from .certify import build_lower_th1, build_upper_th2, residuals
from .coefficients import check_A2, check_strong
from .config import RunConfig, config_hash
from .simulator import run
from .spectral import solve_root, spreading_speed_minus, spreading_speed_plus
from .speedsign import NEGATIVE, POSITIVE, classify

__all__ = ["inspect_summary", "speeds_summary", "residual_summary", "build_report",
           "report_json", "tool_version", "INTERVAL_SLACK"]

INTERVAL_SLACK = 0.10


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - source checkout
        return "0.0.0+unknown"


def inspect_summary(cfg: RunConfig) -> dict:
    m = cfg.model
    pr = m.products
    a2, strong = check_A2(m), check_strong(m)
    return {
        "p0": float(m.p.samples[0]),
        "q0": float(m.q.samples[0]),
        "p_range": [m.p.min(), m.p.max()],
        "q_range": [m.q.min(), m.q.max()],
        "averages": {
            "r1": m.r1.mean, "r2": m.r2.mean, "d1": m.d1.mean, "d2": m.d2.mean,
            **{k: v.mean() for k, v in pr.items()},
        },
        "a2_check": a2._asdict(),
        "strong_check": strong._asdict(),
    }


def speeds_summary(cfg: RunConfig) -> dict:
    m = cfg.model
    minus, plus = spreading_speed_minus(m), spreading_speed_plus(m)
    out = {
        "c_star_minus": minus.speed,
        "c_star_plus": plus.speed,
        "mu_star_minus": minus.mu,
        "mu_star_plus": plus.mu,
        "interval": [-plus.speed, minus.speed],
    }
    for label, eq in (("mu1_0", "I1"), ("mu2_0", "h1"), ("mu3_0", "h2"), ("mu4_0", "I2")):
        try:
            out[label] = solve_root(m, eq, 0.0).mu
        except (ArithmeticError, ValueError, RuntimeError):
            out[label] = None
    return out


def residual_summary(cfg: RunConfig, cert) -> dict | None:
    """Residual check of the comparison profile that backs ``cert``."""
    m = cfg.model
    if cert.verdict == POSITIVE:
        cand = build_lower_th1(m)
    elif cert.verdict == NEGATIVE:
        cand = build_upper_th2(m, s0=cert.s0)
    else:
        return None
    rep = residuals(m, cand).to_dict()
    rep["k"] = cand.k
    rep["c"] = cand.c
    rep["s0"] = cand.s0
    return rep


def build_report(cfg: RunConfig, simulate=True, tgrid=2048, with_residuals=True,
                 sim_overrides=None) -> dict:
    m = cfg.model
    insp = inspect_summary(cfg)
    sp = speeds_summary(cfg)
    cert = classify(m, t_samples=tgrid)
    lo, hi = sp["interval"]
    out = {
        "a2_check": insp["a2_check"],
        "strong_check": insp["strong_check"],
        "p0": insp["p0"],
        "q0": insp["q0"],
        "c_star_minus": sp["c_star_minus"],
        "c_star_plus": sp["c_star_plus"],
        "interval": sp["interval"],
        "certificate": cert.to_dict(),
        "residual_summary": residual_summary(cfg, cert) if with_residuals else None,
        "measured_speed": None,
        "speed_fit": None,
        "in_interval": None,
        "discrepancy": None,
        "sign_agrees": None,
        "provenance": {"config_hash": config_hash(cfg), "tool_version": tool_version()},
    }
    if simulate:
        res = run(m, cfg.sim_config(**(sim_overrides or {})))
        if res.speed is not None:
            c = res.speed.c
            inside = lo * (1 + INTERVAL_SLACK) <= c <= hi * (1 + INTERVAL_SLACK)
            out["measured_speed"] = c
            out["speed_fit"] = {"slope": res.speed.slope, "intercept": res.speed.intercept,
                                "rms": res.speed.rms, "samples": res.speed.samples,
                                "reliable": res.speed.reliable, "dt": res.dt}
            out["in_interval"] = bool(inside)
            out["discrepancy"] = not inside
            if cert.verdict == POSITIVE:
                out["sign_agrees"] = c > 0
            elif cert.verdict == NEGATIVE:
                out["sign_agrees"] = c < 0
    return out


def report_json(report: dict, timestamp=True) -> str:
    """Deterministic JSON; ``report_hash`` covers everything except the timestamp."""
    body = dict(report)
    body.pop("generated_at", None)
    body.pop("report_hash", None)
    text = json.dumps(body, sort_keys=True, indent=2)
    body["report_hash"] = hashlib.sha256(text.encode()).hexdigest()
    if timestamp:
        body["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return json.dumps(body, sort_keys=True, indent=2)
