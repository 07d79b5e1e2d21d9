"""Command-line front end.

Usage:
    levinson1d verify --family square-well --V0 4 --a 1 --x0 1 --out report.json
    levinson1d phase  --family square-well --V0 4 --a 1 --x0 1 \
                      --k-min 1e-3 --k-max 5 --k-points 40 --out phase.csv
    levinson1d sweep  --family square-well --V0 16 --a 1 --x0 1 --out sweep.csv
    levinson1d bound  --family square-well --V0 4 --a 1 --x0 1 --out bound.json

Exit status: 0 all checked relations pass; 1 numerical-resolution failure
or a failing relation; 2 refusal (slow-decay tail, b < -1/4, critical
tail); 64 unreadable configuration.

Flags override config-file values; the effective configuration is echoed
into every report.  All numbers are written with 17 significant digits so
identical configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import serialize
from .engine import DEFAULT_CONFIG, EngineConfig, Parity
from .errors import (LevinsonError, ParameterError, RefusalError)
from .phase_shifts import DEFAULT_LAMBDA_STEPS, phase_curve
from .bound_states import count_by_matching, count_by_nodes
from .potentials import (Potential, from_json, make_double_well, make_gaussian_well,
                         make_inverse_square_tail, make_square_barrier,
                         make_square_well)
from .tail import tail_zero_energy
from .verifier import sweep_lambda, verify

EX_OK = 0
EX_NUMERIC = 1
EX_REFUSED = 2
EX_CONFIG = 64

_FLAG_KEYS = ("family", "V0", "a", "c", "w", "x0", "tail_b", "potential", "parity",
              "k_min", "k_max", "k_points", "lambda_points", "step", "out", "jobs")

_DEFAULTS = {
    "family": "square-well",
    "V0": 0.0,
    "a": None,
    "c": None,
    "w": None,
    "x0": 1.0,
    "tail_b": None,
    "potential": None,
    "parity": "both",
    "k_min": 1e-3,
    "k_max": 5.0,
    "k_points": 25,
    "lambda_points": DEFAULT_LAMBDA_STEPS,
    "step": 4096,
    "out": None,
    "jobs": os.cpu_count() or 1,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with the same keys as the flags")
    common.add_argument("--family", choices=["square-well", "gaussian-well",
                                             "square-barrier", "double-well"])
    common.add_argument("--V0", type=float, help="well depth (barrier height)")
    common.add_argument("--a", type=float, help="half-width of the well/barrier")
    common.add_argument("--c", type=float, help="inner edge of the double well")
    common.add_argument("--w", type=float, help="width of each double-well lobe")
    common.add_argument("--x0", type=float, help="cutoff radius")
    common.add_argument("--tail-b", dest="tail_b", type=float,
                        help="attach an inverse-square tail b*x^-2 beyond x0")
    common.add_argument("--potential", help="path to a serialized potential descriptor")
    common.add_argument("--parity", choices=["even", "odd", "both"])
    common.add_argument("--step", type=int, help="x-steps on [0, x0] (default 4096)")
    common.add_argument("--lambda-points", dest="lambda_points", type=int,
                        help="initial coupling-grid size for branch tracking")
    common.add_argument("--jobs", type=int, help="parallel workers for per-parity fan-out")
    common.add_argument("--out", help="output path")

    parser = argparse.ArgumentParser(prog="levinson1d",
                                     description="Levinson-theorem toolkit for 1D symmetric potentials")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check the counting relations")
    phase = sub.add_parser("phase", parents=[common], help="phase-shift curve as CSV")
    phase.add_argument("--k-min", dest="k_min", type=float)
    phase.add_argument("--k-max", dest="k_max", type=float)
    phase.add_argument("--k-points", dest="k_points", type=int)
    sub.add_parser("sweep", parents=[common], help="coupling sweep of the zero-energy angle")
    sub.add_parser("bound", parents=[common], help="bound-state listing")
    return parser


def _effective_config(ns: argparse.Namespace) -> dict:
    eff = dict(_DEFAULTS)
    if ns.config is not None:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                loaded = serialize.loads(fh.read())
            if not isinstance(loaded, dict):
                raise ValueError("config root must be an object")
        except (OSError, ValueError) as exc:
            raise ConfigFileError(f"unreadable config {ns.config}: {exc}") from exc
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in _FLAG_KEYS:
                raise ConfigFileError(f"unknown config key {key!r}")
            eff[key] = value
    for key in _FLAG_KEYS:
        value = getattr(ns, key, None)
        if value is not None:
            eff[key] = value
    return eff


class ConfigFileError(Exception):
    pass


def _potential_from(eff: dict) -> Potential:
    if eff.get("potential"):
        with open(eff["potential"], encoding="utf-8") as fh:
            return from_json(fh.read())
    family = eff["family"]
    x0 = float(eff["x0"])
    a = x0 if eff["a"] is None else float(eff["a"])
    V0 = float(eff["V0"])
    if eff["tail_b"] is not None:
        return make_inverse_square_tail(float(eff["tail_b"]), x0, V0, a)
    if family == "square-well":
        return make_square_well(V0, a, x0)
    if family == "gaussian-well":
        return make_gaussian_well(V0, a, x0)
    if family == "square-barrier":
        return make_square_barrier(V0, a, x0)
    if family == "double-well":
        c = float(eff["c"]) if eff["c"] is not None else 0.25 * x0
        w = float(eff["w"]) if eff["w"] is not None else 0.25 * x0
        return make_double_well(V0, c, w, x0)
    raise ParameterError(f"unknown family {family!r}")


def _parities(eff: dict) -> list[Parity]:
    sel = eff["parity"]
    if sel == "both":
        return [Parity.EVEN, Parity.ODD]
    return [Parity(sel)]


def _engine(eff: dict) -> EngineConfig:
    step = int(eff["step"])
    if step == DEFAULT_CONFIG.n_steps:
        return DEFAULT_CONFIG
    return EngineConfig(n_steps=step)


def _write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def cmd_verify(eff: dict) -> int:
    p = _potential_from(eff)
    report = verify(p, _engine(eff), parities=_parities(eff), jobs=int(eff["jobs"]),
                    lambda_steps=int(eff["lambda_points"]))
    out = eff["out"] or "levinson_report.json"
    _write(out, report.to_json())
    for name, block in report.blocks.items():
        print(f"{name}: n={block.n} eta0={block.eta0:.9g} critical={block.critical} "
              f"{block.verdict}")
    print(f"report written to {out}")
    return EX_OK if report.passed else EX_NUMERIC


def cmd_phase(eff: dict) -> int:
    p = _potential_from(eff)
    ks = np.geomspace(float(eff["k_min"]), float(eff["k_max"]), int(eff["k_points"]))
    out = eff["out"] or "phase.csv"
    root, ext = os.path.splitext(out)
    cfg = _engine(eff)
    for parity in _parities(eff):
        curve = phase_curve(p, parity, ks, 1.0, int(eff["lambda_points"]), cfg)
        path = out if len(_parities(eff)) == 1 else f"{root}_{parity.value}{ext}"
        lines = ["k,eta,lambda,parity"]
        for k, eta in zip(curve.k_grid, curve.eta):
            lines.append(serialize.csv_line([k, eta, curve.lam, parity.value]))
        _write(path, "\n".join(lines) + "\n")
        print(f"phase curve written to {path}")
    return EX_OK


def cmd_sweep(eff: dict) -> int:
    p = _potential_from(eff)
    out = eff["out"] or "sweep.csv"
    root, _ = os.path.splitext(out)
    cfg = _engine(eff)
    lines = ["lambda,theta0,parity"]
    events_doc: dict = {}
    for parity in _parities(eff):
        sweep = sweep_lambda(p, parity, config=cfg)
        for lam, th in zip(sweep.lambda_grid, sweep.theta0):
            lines.append(serialize.csv_line([lam, th, parity.value]))
        events_doc[parity.value] = {
            "crossings": [{"lambda_star": e.lambda_star, "direction": e.direction}
                          for e in sweep.crossings],
            "half_bound": (None if sweep.terminal_half_bound is None else
                           {"lambda_star": sweep.terminal_half_bound.lambda_star,
                            "direction": sweep.terminal_half_bound.direction}),
            "net": sweep.net,
        }
    _write(out, "\n".join(lines) + "\n")
    events_path = f"{root}_events.json"
    _write(events_path, serialize.dumps(events_doc) + "\n")
    print(f"sweep written to {out}, events to {events_path}")
    return EX_OK


def cmd_bound(eff: dict) -> int:
    p = _potential_from(eff)
    cfg = _engine(eff)
    doc: dict = {}
    for parity in _parities(eff):
        if p.tail.kind == "inverse_square":
            ze = tail_zero_energy(p, parity, cfg)
            doc[parity.value] = {"count": ze.count, "energies": [],
                                 "half_bound": ze.critical, "method": "node_count"}
        else:
            bm = count_by_matching(p, parity, 1.0, cfg)
            bn = count_by_nodes(p, parity, 1.0, cfg)
            doc[parity.value] = {"count": bm.count, "energies": list(bm.energies),
                                 "half_bound": bm.half_bound, "method": bm.method,
                                 "node_count_check": bn.count}
    out = eff["out"] or "bound.json"
    _write(out, serialize.dumps(doc) + "\n")
    for name, block in doc.items():
        print(f"{name}: count={block['count']} half_bound={block['half_bound']}")
    return EX_OK


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        eff = _effective_config(ns)
        potential_ok = True
    except ConfigFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_CONFIG
    try:
        if ns.command == "verify":
            return cmd_verify(eff)
        if ns.command == "phase":
            return cmd_phase(eff)
        if ns.command == "sweep":
            return cmd_sweep(eff)
        if ns.command == "bound":
            return cmd_bound(eff)
        raise AssertionError(ns.command)
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EX_REFUSED
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_CONFIG
    except LevinsonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
