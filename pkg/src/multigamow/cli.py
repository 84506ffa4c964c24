"""Command-line front end.

Physics parameters come from one JSON config file; flags only carry file
paths and suite selection.  Exit codes: 0 success, 1 validation failure,
2 config or input error, 3 numerical non-convergence.  Failures print one
JSON line ``{"error": <kind>, "reason": <message>}`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import delta_shell as ds
from .errors import ConvergenceError, GamowError, InputError
from .kinematics import ParticleSystem
from .pseudo_norm import (
    bump_profile,
    norm_convergence_scan,
    partition_state,
    separable_state,
    surface_weight,
)
from .tau_front import front_surface_sample, solve_front, solve_tau

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

CONFIG_KEYS = {
    "masses", "dispersion", "energy", "tau_R", "tau_grid", "count", "seed", "point",
    "resolution", "workers", "state", "out",
}
STATE_KEYS = {
    "asymptotic": {"kind"},
    "partition": {"kind", "profile_support"},
    "delta_shell": {"kind", "g", "a", "branch"},
}


class ConfigError(InputError):
    pass


@dataclass
class RunConfig:
    masses: list[float]
    dispersion: str = "nonrelativistic"
    energy: complex | None = None
    tau_R: float | None = None
    tau_grid: list[float] | None = None
    count: int = 16
    seed: int = 0
    point: list[float] | None = None
    resolution: int = 1
    workers: int = 1
    state: dict = field(default_factory=dict)
    out: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "masses" not in raw:
            raise ConfigError("config needs 'masses'")
        raw = dict(raw)
        energy = raw.pop("energy", None)
        if energy is not None:
            if not isinstance(energy, dict) or set(energy) - {"re", "im"} or "re" not in energy:
                raise ConfigError("energy must be an object {'re': ..., 'im': ...}")
            energy = complex(float(energy["re"]), float(energy.get("im", 0.0)))
        cfg = cls(energy=energy, **raw)
        if cfg.state:
            kind = cfg.state.get("kind")
            if kind not in STATE_KEYS:
                raise ConfigError(f"unknown state kind {kind!r}; expected one of {sorted(STATE_KEYS)}")
            extra = set(cfg.state) - STATE_KEYS[kind]
            if extra:
                raise ConfigError(f"unknown keys for state {kind!r}: {sorted(extra)}")
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.from_dict(raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def system(self) -> ParticleSystem:
        return ParticleSystem(tuple(self.masses), self.dispersion)

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"config needs {name!r} for this subcommand")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(buf.getvalue().encode())


def _out_path(args, cfg):
    path = args.out or (cfg.out if cfg is not None else None)
    if path is None:
        raise ConfigError("an output path is required (--out or 'out' in the config)")
    return path


def cmd_front(args) -> int:
    cfg = RunConfig.load(args.config)
    cfg.require("energy", "tau_R")
    system = cfg.system()
    energy = cfg.energy.real if cfg.energy.imag == 0 else cfg.energy
    points, residuals = front_surface_sample(system, energy, cfg.tau_R, cfg.count, cfg.seed)
    header = ["sample_id"] + [f"r_{n + 1}" for n in range(system.n)] + ["tau", "residual"]
    rows = []
    for i, (p, res) in enumerate(zip(points, residuals)):
        tau = solve_tau(p, system, cfg.energy.real)
        rows.append([i, *map(float, p), float(np.real(tau)), float(res)])
    _write_csv(_out_path(args, cfg), header, rows)
    return EXIT_OK


def build_state(cfg: RunConfig, system: ParticleSystem):
    """(state, energy) described by the config's ``state`` block."""
    spec = cfg.state or {"kind": "partition" if system.n == 2 else "asymptotic"}
    kind = spec["kind"]
    if kind == "delta_shell":
        if system.n != 1:
            raise ConfigError("delta_shell states have one particle")
        if cfg.energy is not None:
            raise ConfigError("delta_shell states take their energy from the pole; drop 'energy'")
        res = ds.find_pole(float(spec["g"]), float(spec["a"]), system.masses[0], int(spec.get("branch", 1)))
        return ds.gamow_state(res), res.energy
    cfg.require("energy")
    if kind == "asymptotic":
        if system.n != 1:
            raise ConfigError("asymptotic states have one particle")
        k = np.sqrt(2 * system.masses[0] * cfg.energy)
        return separable_state([k], cfg.energy), cfg.energy
    lo, hi = spec.get("profile_support", (0.1, 0.9))
    state = partition_state(system, cfg.energy, profile=lambda x: bump_profile(x, lo, hi))
    return state, cfg.energy


def cmd_norm(args) -> int:
    cfg = RunConfig.load(args.config)
    system = cfg.system()
    grid = cfg.tau_grid if cfg.tau_grid is not None else ([cfg.tau_R] if cfg.tau_R is not None else None)
    if grid is None:
        raise ConfigError("config needs 'tau_grid' or 'tau_R'")
    state, energy = build_state(cfg, system)
    scan = norm_convergence_scan(state, system, energy, grid, cfg.resolution, cfg.workers)
    rows = [[t, v.real, v.imag, s.real, s.imag, n.real, n.imag] for t, v, s, n in scan.rows()]
    _write_csv(_out_path(args, cfg), ["tau_R", "vol_re", "vol_im", "surf_re", "surf_im", "norm_re", "norm_im"], rows)
    return EXIT_OK


def _branches(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("branches must look like B1:B2") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("need 1 <= B1 <= B2")
    return range(lo, hi + 1)


def cmd_poles(args) -> int:
    rows = []
    for b in args.branches:
        res = ds.find_pole(args.g, args.a, args.m, b)
        rows.append([b, res.k_pole.real, res.k_pole.imag, res.e0, res.gamma, float(res.residual)])
    _write_csv(args.out, ["branch", "k_re", "k_im", "E0", "Gamma", "residual"], rows)
    return EXIT_OK


def _split(x):
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def cmd_tau(args) -> int:
    cfg = RunConfig.load(args.config)
    cfg.require("energy", "point")
    system = cfg.system()
    energy = cfg.energy.real if cfg.energy.imag == 0 else cfg.energy
    front = solve_front(cfg.point, system, energy)
    record = {
        "tau": _split(front.tau),
        "p_s": [_split(p) for p in front.momenta],
        "S": _split(front.action),
        "T": _split(front.t_norm),
        "weight": _split(surface_weight(cfg.point, system, energy)),
    }
    print(json.dumps(record))
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_suite

    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(json.dumps({"error": "validation", "reason": r.line()}), file=sys.stderr)
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multigamow", description="Multi-particle Gamow state numerics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("front", help="sample a constant-tau front to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_front)

    p = sub.add_parser("norm", help="pseudo-norm convergence scan to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("poles", help="delta-shell resonance poles to CSV")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--branches", type=_branches, default=range(1, 2))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_poles)

    p = sub.add_parser("tau", help="travel time and stationary-phase data at one point, as JSON")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("validate", help="run the invariant suites")
    p.add_argument("--suite", choices=("fast", "all"), default="fast")
    p.set_defaults(func=cmd_validate)
    return parser


def _fail(kind, exc, code):
    print(json.dumps({"error": kind, "reason": str(exc)}), file=sys.stderr)
    return code


def run_cli(args=None) -> int:
    """Parse ``args`` and run one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return ns.func(ns)
    except ConvergenceError as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except (InputError, ValueError, KeyError, TypeError) as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except GamowError as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
