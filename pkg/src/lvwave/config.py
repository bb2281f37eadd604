"""TOML run configuration: parsing, validation and a lossless writer.

Grammar::

    [model]
    period = 3.141592653589793
    kernel1 = { type = "gaussian", sigma = 1.0 }
    kernel2 = { type = "gaussian", sigma = 1.0 }
    d1 = { mean = 10.0 }
    a1 = { mean = 5.0, harmonics = [{ k = 1, sin = 3.0, cos = 0.0 }] }
    ...                                  # all of d1 r1 a1 b1 d2 r2 a2 b2

    [sim]                                # optional; defaults shown
    x_min = -150.0
    x_max = 150.0
    dx = 0.1
    dt = 0.001
    t_end = 62.83185307179586            # 20 periods
    record_every = 0
    front_level = 0.5
    burn_in_periods = 5
    recenter = true

    [output]                             # optional
    dir = "out"

Coefficient tables may also be written as ``[model.a1]`` sections.  Kernel
types are ``gaussian`` (``sigma``), ``laplace`` (``scale``) and ``uniform``
(``halfwidth``), each with an optional ``truncation_radius``.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .coefficients import COEFFICIENT_NAMES, ModelParams, TrigPoly
from .errors import ConfigError
from .kernel import Kernel
from .simulator import Grid, SimConfig

__all__ = ["RunConfig", "parse_config", "load_config", "dump_config", "config_hash"]

_KERNEL_SCALE_KEY = {"gaussian": "sigma", "laplace": "scale", "uniform": "halfwidth"}
_SIM_DEFAULTS = {
    "x_min": -150.0,
    "x_max": 150.0,
    "dx": 0.1,
    "dt": 1e-3,
    "t_end": None,  # 20 periods
    "record_every": 0,
    "front_level": 0.5,
    "burn_in_periods": 5,
    "recenter": True,
}
_MODEL_KEYS = ("period", "kernel1", "kernel2") + COEFFICIENT_NAMES


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    sim: dict = field(default_factory=dict)
    output_dir: str | None = None

    def sim_config(self, **overrides) -> SimConfig:
        s = dict(self.sim)
        s.update(overrides)
        grid = Grid(s["x_min"], s["x_max"], s["dx"])
        return SimConfig(grid, dt=s["dt"], t_end=s["t_end"], record_every=s["record_every"],
                         front_level=s["front_level"], burn_in_periods=s["burn_in_periods"],
                         recenter=s["recenter"], out_dir=s.get("out_dir"))


def _number(value, where, errors, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{where}: expected a number, got {value!r}")
        return None
    if integer and int(value) != value:
        errors.append(f"{where}: expected an integer, got {value!r}")
        return None
    if not math.isfinite(value):
        errors.append(f"{where}: must be finite")
        return None
    if positive and not value > 0:
        errors.append(f"{where}: must be positive, got {value!r}")
        return None
    return int(value) if integer else float(value)


def _unknown(table, allowed, where, errors):
    for key in table:
        if key not in allowed:
            errors.append(f"{where}: unknown key {key!r}")


def _parse_kernel(tab, where, errors):
    if not isinstance(tab, dict):
        errors.append(f"{where}: expected a table like {{ type = \"gaussian\", sigma = 1.0 }}")
        return None
    kind = tab.get("type")
    if kind not in _KERNEL_SCALE_KEY:
        errors.append(f"{where}.type: expected one of {sorted(_KERNEL_SCALE_KEY)}, got {kind!r}")
        return None
    scale_key = _KERNEL_SCALE_KEY[kind]
    _unknown(tab, ("type", scale_key, "truncation_radius"), where, errors)
    if scale_key not in tab:
        errors.append(f"{where}: missing key {scale_key!r}")
        return None
    scale = _number(tab[scale_key], f"{where}.{scale_key}", errors, positive=True)
    trunc = None
    if "truncation_radius" in tab:
        trunc = _number(tab["truncation_radius"], f"{where}.truncation_radius", errors, positive=True)
    if scale is None:
        return None
    try:
        return Kernel(kind, scale, trunc)
    except ConfigError as exc:
        errors.append(f"{where}: {exc}")
        return None


def _parse_coefficient(tab, name, period, errors):
    where = f"model.{name}"
    if isinstance(tab, (int, float)) and not isinstance(tab, bool):
        tab = {"mean": tab}
    if not isinstance(tab, dict):
        errors.append(f"{where}: expected a table with 'mean' and optional 'harmonics'")
        return None
    _unknown(tab, ("mean", "harmonics", "period"), where, errors)
    if "mean" not in tab:
        errors.append(f"{where}: missing key 'mean'")
        return None
    mean = _number(tab["mean"], f"{where}.mean", errors)
    if "period" in tab and period is not None:
        own = _number(tab["period"], f"{where}.period", errors, positive=True)
        if own is not None and not math.isclose(own, period, rel_tol=1e-12):
            errors.append(f"{where}.period: {own!r} does not match model.period {period!r}")
    harmonics = []
    for i, h in enumerate(tab.get("harmonics", [])):
        hw = f"{where}.harmonics[{i}]"
        if not isinstance(h, dict):
            errors.append(f"{hw}: expected a table {{ k, sin, cos }}")
            continue
        _unknown(h, ("k", "sin", "cos"), hw, errors)
        if "k" not in h:
            errors.append(f"{hw}: missing key 'k'")
            continue
        k = _number(h["k"], f"{hw}.k", errors, positive=True, integer=True)
        a = _number(h.get("sin", 0.0), f"{hw}.sin", errors)
        b = _number(h.get("cos", 0.0), f"{hw}.cos", errors)
        if None not in (k, a, b):
            harmonics.append((k, a, b))
    if mean is None or period is None:
        return None
    return TrigPoly(period, mean, tuple(harmonics))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration.

    All problems found are reported together in one :class:`ConfigError`.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    errors: list[str] = []
    _unknown(doc, ("model", "sim", "output"), "<top level>", errors)
    model = doc.get("model", {})
    if not isinstance(model, dict):
        raise ConfigError("[model] must be a table")
    _unknown(model, _MODEL_KEYS, "model", errors)
    missing = [f"model.{k}" for k in _MODEL_KEYS if k not in model]
    if missing:
        errors.append("missing keys: " + ", ".join(missing))

    period = None
    if "period" in model:
        period = _number(model["period"], "model.period", errors, positive=True)
    kernels = {}
    for name in ("kernel1", "kernel2"):
        if name in model:
            kernels[name] = _parse_kernel(model[name], f"model.{name}", errors)
    coefs = {}
    for name in COEFFICIENT_NAMES:
        if name in model:
            coefs[name] = _parse_coefficient(model[name], name, period, errors)

    sim_in = doc.get("sim", {})
    sim = {}
    if not isinstance(sim_in, dict):
        errors.append("[sim] must be a table")
        sim_in = {}
    _unknown(sim_in, tuple(_SIM_DEFAULTS), "sim", errors)
    for key, default in _SIM_DEFAULTS.items():
        value = sim_in.get(key, default)
        if key == "t_end" and value is None:
            value = 20.0 * period if period else None
        elif key == "recenter":
            if not isinstance(value, bool):
                errors.append("sim.recenter: expected true or false")
        elif key in ("record_every", "burn_in_periods"):
            value = _number(value, f"sim.{key}", errors, integer=True)
            if value is not None and value < 0:
                errors.append(f"sim.{key}: must be nonnegative")
        elif key in ("x_min", "x_max", "front_level"):
            value = _number(value, f"sim.{key}", errors)
        else:
            value = _number(value, f"sim.{key}", errors, positive=True)
        sim[key] = value

    output = doc.get("output", {})
    if not isinstance(output, dict):
        errors.append("[output] must be a table")
        output = {}
    _unknown(output, ("dir",), "output", errors)
    out_dir = output.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        errors.append("output.dir: expected a string")

    if errors:
        raise ConfigError("invalid config:\n  " + "\n  ".join(errors))
    try:
        params = ModelParams(period, kernel1=kernels["kernel1"], kernel2=kernels["kernel2"], **coefs)
        cfg = RunConfig(params, sim, out_dir)
        cfg.sim_config()
    except ConfigError as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# writer
# ---------------------------------------------------------------------------

def _val(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _inline(d: dict) -> str:
    parts = []
    for k, v in d.items():
        if isinstance(v, list):
            inner = ", ".join(_inline(x) for x in v)
            parts.append(f"{k} = [{inner}]")
        else:
            parts.append(f"{k} = {_val(v)}")
    return "{ " + ", ".join(parts) + " }"


def dump_config(cfg: RunConfig) -> str:
    """Canonical TOML text; ``parse_config(dump_config(c)) == c``."""
    m = cfg.model
    lines = ["[model]", f"period = {_val(m.period)}"]
    lines.append(f"kernel1 = {_inline(m.kernel1.as_dict())}")
    lines.append(f"kernel2 = {_inline(m.kernel2.as_dict())}")
    for name in COEFFICIENT_NAMES:
        lines.append(f"{name} = {_inline(getattr(m, name).as_dict())}")
    lines += ["", "[sim]"]
    for key in _SIM_DEFAULTS:
        lines.append(f"{key} = {_val(cfg.sim[key])}")
    if cfg.output_dir is not None:
        lines += ["", "[output]", f"dir = {_val(cfg.output_dir)}"]
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()
