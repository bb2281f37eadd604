"""Command-line front end.

Exit codes: 0 success, 2 when no sign criterion certifies, 1 on errors or a
failed residual check.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from .config import RunConfig, load_config, parse_config
from .errors import LVWaveError
from .report import (build_report, inspect_summary, report_json, residual_summary,
                     speeds_summary)
from .simulator import run, write_trace_csv
from .speedsign import INCONCLUSIVE, classify

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def _resolve_config(path: str) -> RunConfig:
    if os.path.exists(path):
        return load_config(path)
    name = os.path.basename(path)
    if not name.endswith(".cfg"):
        name += ".cfg"
    bundled = resources.files("lvwave") / "data" / name
    if bundled.is_file():
        return parse_config(bundled.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"config {path!r} not found (also not a bundled example)")


def _emit(payload: dict, args, filename: str, text_lines=None):
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.json or not text_lines:
        print(text)
    else:
        print("\n".join(text_lines))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, filename), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_inspect(cfg, args) -> int:
    s = inspect_summary(cfg)
    lines = [
        f"p0 = {s['p0']:.10g}   q0 = {s['q0']:.10g}",
        f"bistable:  integrals {s['a2_check']['integral1']:.6g}, "
        f"{s['a2_check']['integral2']:.6g} -> {s['a2_check']['holds']}",
        f"strong condition: {s['strong_check']['holds']}",
    ]
    _emit(s, args, "inspect.json", lines)
    return EXIT_OK


def cmd_speeds(cfg, args) -> int:
    s = speeds_summary(cfg)
    lines = [
        f"c*- = {s['c_star_minus']:.10g} at mu = {s['mu_star_minus']:.8g}",
        f"c*+ = {s['c_star_plus']:.10g} at mu = {s['mu_star_plus']:.8g}",
        f"speed interval [{s['interval'][0]:.8g}, {s['interval'][1]:.8g}]",
    ]
    _emit(s, args, "speeds.json", lines)
    return EXIT_OK


def cmd_classify(cfg, args) -> int:
    cert = classify(cfg.model, t_samples=args.tgrid)
    d = cert.to_dict()
    lines = [f"verdict: {cert.verdict} ({cert.theorem or 'no criterion'})",
             f"mu1(0) = {cert.mu1_at_0:.10g}",
             f"k band = {d['k_interval']}  s0 = {cert.s0}",
             f"worst margin = {cert.worst_margin:.6g}"]
    _emit(d, args, "classify.json", lines)
    return EXIT_INCONCLUSIVE if cert.verdict == INCONCLUSIVE else EXIT_OK


def cmd_certify(cfg, args) -> int:
    cert = classify(cfg.model, t_samples=args.tgrid)
    if cert.verdict == INCONCLUSIVE:
        _emit({"verdict": cert.verdict, "residual_summary": None}, args, "certify.json",
              ["no sign criterion certifies; nothing to check"])
        return EXIT_INCONCLUSIVE
    rep = residual_summary(cfg, cert)
    lines = [f"{rep['kind']}: k = {rep['k']:.8g}, c = {rep['c']:g}"]
    for comp in ("R1", "R2"):
        r = rep[comp]
        lines.append(f"  {comp}: worst {r['value']:.4e} at z={r['z']:.4g}, t={r['t']:.4g} "
                     f"({'pass' if r['passes'] else 'FAIL'}, need {rep['requirement']})")
    _emit(dict(rep, verdict=cert.verdict), args, "certify.json", lines)
    return EXIT_OK if rep["passes"] else EXIT_ERROR


def cmd_simulate(cfg, args) -> int:
    out_dir = args.out or cfg.output_dir
    sc = cfg.sim_config(out_dir=out_dir)
    res = run(cfg.model, sc)
    payload = {"dt": res.dt, "steps": res.steps, "offset": res.offset,
               "front_samples": len(res.trace.times)}
    if res.speed is not None:
        payload.update(measured_speed=res.speed.c, fit_rms=res.speed.rms,
                       fit_samples=res.speed.samples, reliable=res.speed.reliable)
    else:
        payload["measured_speed"] = None
    if out_dir and not os.path.exists(os.path.join(out_dir, "trace.csv")):
        write_trace_csv(os.path.join(out_dir, "trace.csv"), res.trace)
    lines = [f"measured speed c = {payload['measured_speed']}",
             f"front samples: {payload['front_samples']}, dt = {res.dt:.6g}"]
    if out_dir:
        args = argparse.Namespace(**{**vars(args), "out": out_dir})
    _emit(payload, args, "simulate.json", lines)
    return EXIT_OK


def cmd_report(cfg, args) -> int:
    rep = build_report(cfg, simulate=not args.no_sim, tgrid=args.tgrid)
    text = report_json(rep)
    print(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return EXIT_INCONCLUSIVE if rep["certificate"]["verdict"] == INCONCLUSIVE else EXIT_OK


COMMANDS = {
    "inspect": (cmd_inspect, "carrying capacities, averages and condition checks"),
    "speeds": (cmd_speeds, "spreading speeds, speed interval and characteristic roots"),
    "classify": (cmd_classify, "sign certificate of the wave speed"),
    "certify": (cmd_certify, "residual check of the comparison profile"),
    "simulate": (cmd_simulate, "direct simulation and measured front speed"),
    "report": (cmd_report, "everything above as one JSON report"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lvwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("config_path", nargs="?", help="config file or bundled example name")
        p.add_argument("--config", dest="config_flag", help="config file (alternative to the positional)")
        p.add_argument("--out", help="directory for JSON/CSV artifacts")
        p.add_argument("--tgrid", type=int, default=2048, help="time samples per period for checks")
        p.add_argument("--json", action="store_true", help="print JSON instead of a summary")
        if name == "report":
            p.add_argument("--no-sim", action="store_true", help="skip the simulation")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    path = args.config_flag or args.config_path
    if not path:
        parser.error("a config is required (positional or --config)")
    try:
        cfg = _resolve_config(path)
        return COMMANDS[args.command][0](cfg, args)
    except (LVWaveError, OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"lvwave {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
