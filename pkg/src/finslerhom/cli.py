"""Command-line front end: ``finslerhom <command> [options]``.

Commands: spaces, tensors, geodesic, search, verify, sphere-field.  Every
artifact records the seed; identical (config, seed) give identical bytes.
Exit codes: 0 ok, 1 usage error, 2 domain error, 3 guarantee violated.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import replace

import numpy as np

from .chart import connection_data
from .config import DEFAULT, Tolerances
from .errors import AccuracyError, DomainError, MetricValidityError, NumericalError
from .geodesy import DEFAULT_STEP, integrate_geodesic
from .homspace import ChartRequiredError, applicable_branches
from .search import SearchConfig, certify, find_zeros, sphere_field
from .zoo import PRESETS, SpecFormatError, builtin, resolve_space

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_GUARANTEE = 0, 1, 2, 3

COMMANDS = ("spaces", "tensors", "geodesic", "search", "verify", "sphere-field")
RUN_KEYS = {
    "command", "space", "samples", "step", "window", "seed", "tol", "out", "format",
    "x", "y", "X", "dim", "berwald",
}
DEFAULT_FORMAT = {
    "spaces": "json", "tensors": "json", "geodesic": "csv",
    "search": "json", "verify": "json", "sphere-field": "csv",
}
CERT_TOLS = ("t_residual", "v_residual", "lemma2")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(v: float) -> str:
    return f"{v:.16e}"


def _csv(header, rows, seed) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={seed}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_num(float(v)) if not isinstance(v, str) else v for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


# -- run configuration ----------------------------------------------------------


def load_run_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("run config must be a JSON object")
    extra = set(doc) - RUN_KEYS
    if extra:
        raise UsageError(f"unknown run-config key(s): {sorted(extra)}")
    return doc


def tolerances_from(value, base: Tolerances = DEFAULT) -> Tolerances:
    """A float sets the certification tolerances; a dict names fields."""
    if value is None:
        return base
    try:
        if isinstance(value, dict):
            unknown = set(value) - set(base.as_dict())
            if unknown:
                raise UsageError(f"unknown tolerance key(s): {sorted(unknown)}")
            return replace(base, **{k: float(v) for k, v in value.items()})
        t = float(value)
        return replace(base, **{k: t for k in CERT_TOLS})
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid tolerance: {exc}") from None


def merge(args: argparse.Namespace) -> dict:
    cfg = load_run_config(args.config) if args.config else {}
    if "command" in cfg and cfg["command"] != args.command:
        raise UsageError(f"config is for command {cfg['command']!r}, not {args.command!r}")
    for key in RUN_KEYS - {"command"}:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    cfg["command"] = args.command
    cfg.setdefault("seed", 0)
    cfg.setdefault("format", DEFAULT_FORMAT[args.command])
    if cfg["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {cfg['format']!r}")
    for key in ("samples", "seed"):
        if key in cfg and (not isinstance(cfg[key], int) or isinstance(cfg[key], bool)):
            raise UsageError(f"{key} must be an integer")
    if cfg.get("samples", 1) < 1:
        raise UsageError("samples must be at least 1")
    for key in ("step", "window"):
        if key in cfg and not float(cfg[key]) > 0:
            raise UsageError(f"{key} must be positive")
    cfg["tol"] = tolerances_from(cfg.get("tol"))
    return cfg


def _space(cfg):
    if "space" not in cfg:
        raise UsageError("--space is required for this command")
    try:
        return resolve_space(cfg["space"])
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _vector(cfg, key, dim, default=None):
    v = cfg.get(key, default)
    if v is None:
        raise UsageError(f"--{key} is required")
    v = np.asarray(v, dtype=float)
    if v.shape != (dim,):
        raise UsageError(f"--{key} needs {dim} components, got {v.size}")
    return v


# -- commands -------------------------------------------------------------------


def cmd_spaces(cfg) -> tuple[str, int]:
    rows = []
    for name in PRESETS:
        spec = builtin(name)
        if "dim" in cfg and spec.dim != int(cfg["dim"]):
            continue
        if cfg.get("berwald") and not spec.berwald:
            continue
        rows.append({
            "name": name,
            "family": spec.family,
            "dim": spec.dim,
            "metric": spec.norm.kind,
            "reversible": spec.reversible,
            "berwald": spec.berwald,
            "branches": applicable_branches(spec),
        })
    if cfg["format"] == "json":
        return _json({"seed": cfg["seed"], "spaces": rows}), EXIT_OK
    buf = io.StringIO()
    buf.write(f"# seed={cfg['seed']}\nname,family,dim,metric,reversible,berwald,branches\n")
    for r in rows:
        buf.write(f"{r['name']},{r['family']},{r['dim']},{r['metric']},{str(r['reversible']).lower()},"
                  f"{str(r['berwald']).lower()},{';'.join(r['branches'])}\n")
    return buf.getvalue(), EXIT_OK


def cmd_tensors(cfg) -> tuple[str, int]:
    spec = _space(cfg)
    spec.require_chart()
    x = _vector(cfg, "x", spec.dim, spec.origin)
    y = _vector(cfg, "y", spec.dim)
    cd = connection_data(spec.chart, x, y)
    tensors = {"g": cd.g, "C": cd.C, "gamma": cd.gamma, "N": cd.N, "Gamma": cd.Gamma}
    if cfg["format"] == "json":
        doc = {"seed": cfg["seed"], "space": spec.name, "x": x.tolist(), "y": y.tolist()}
        doc.update({k: np.asarray(v).tolist() for k, v in tensors.items()})
        return _json(doc), EXIT_OK
    buf = io.StringIO()
    buf.write(f"# seed={cfg['seed']}\n# space={spec.name} x={x.tolist()} y={y.tolist()}\n")
    buf.write("tensor,index,value\n")
    for k, arr in tensors.items():
        for idx in np.ndindex(*np.shape(arr)):
            buf.write(f"{k},{'.'.join(str(i + 1) for i in idx)},{_num(float(arr[idx]))}\n")
    return buf.getvalue(), EXIT_OK


def cmd_geodesic(cfg) -> tuple[str, int]:
    spec = _space(cfg)
    spec.require_chart()
    x = _vector(cfg, "x", spec.dim, spec.origin)
    y = _vector(cfg, "y", spec.dim)
    sol = integrate_geodesic(spec.chart, x, y, float(cfg.get("window", 1.0)),
                             float(cfg.get("step", DEFAULT_STEP)), drift_bound=cfg["tol"].speed_drift)
    n = spec.dim
    if cfg["format"] == "json":
        return _json({
            "seed": cfg["seed"], "space": spec.name, "step": sol.step, "exited": sol.exited,
            "exit_time": sol.exit_time, "speed_drift": sol.speed_drift,
            "t": sol.times.tolist(), "x": sol.positions.tolist(), "y": sol.velocities.tolist(),
        }), EXIT_OK
    header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    rows = np.column_stack([sol.times, sol.positions, sol.velocities])
    text = _csv(header, rows, cfg["seed"])
    if sol.exited:
        text += f"# chart exit at t={_num(sol.exit_time)}\n"
    return text, EXIT_OK


def _search_config(cfg) -> SearchConfig:
    kw = {"seed": cfg["seed"], "tol": cfg["tol"]}
    for key in ("samples", "step", "window"):
        if key in cfg:
            kw[key] = cfg[key]
    return SearchConfig(**kw)


def cmd_search(cfg) -> tuple[str, int]:
    spec = _space(cfg)
    report = find_zeros(spec, _search_config(cfg))
    code = EXIT_GUARANTEE if report.status == "guarantee-violated" else EXIT_OK
    if cfg["format"] == "json":
        return _json(report.as_dict()), code
    n = spec.dim
    header = (["status", "provenance", "both_signs"] + [f"X{i + 1}" for i in range(n)]
              + ["t_residual", "v_residual", "lemma2_residual", "sup_distance", "reparam_k"])
    buf = io.StringIO()
    buf.write(f"# seed={cfg['seed']}\n# space={spec.name} status={report.status} "
              f"all_directions={str(report.all_directions).lower()}\n")
    buf.write(",".join(header) + "\n")
    for c in report.candidates:
        nums = list(c.X) + [c.t_residual, c.v_residual, c.lemma2_residual,
                            c.comparison.sup_distance, c.comparison.reparam_k]
        buf.write(",".join([c.status, ";".join(c.provenance), str(c.both_signs).lower()]
                           + [_num(v) if v is not None else "" for v in nums]) + "\n")
    return buf.getvalue(), code


def cmd_verify(cfg) -> tuple[str, int]:
    spec = _space(cfg)
    X = _vector(cfg, "X", spec.algebra.dim)
    if not np.any(X):
        raise DomainError("X must be nonzero")
    cand = certify(spec, X, ("user",), cfg["tol"], float(cfg.get("window", 1.0)),
                   float(cfg.get("step", DEFAULT_STEP)), compare=spec.chart_level)
    rec = {"seed": cfg["seed"], "space": spec.name, **cand.as_dict()}
    if cfg["format"] == "json":
        return _json(rec), EXIT_OK
    header = ["status"] + [f"X{i + 1}" for i in range(len(cand.X))] + [
        "t_residual", "v_residual", "lemma2_residual", "sup_distance"]
    vals = list(cand.X) + [cand.t_residual, cand.v_residual, cand.lemma2_residual,
                           cand.comparison.sup_distance if cand.comparison else None]
    return (f"# seed={cfg['seed']}\n" + ",".join(header) + "\n"
            + ",".join([cand.status] + [_num(v) if v is not None else "" for v in vals]) + "\n"), EXIT_OK


def cmd_sphere_field(cfg) -> tuple[str, int]:
    spec = _space(cfg)
    spec.require_chart()
    sf = sphere_field(spec, int(cfg.get("samples", 2000)), cfg["seed"])
    n = spec.dim
    if cfg["format"] == "json":
        return _json({
            "seed": cfg["seed"], "space": spec.name, "X": sf.X.tolist(), "v": sf.v.tolist(),
            "norm_v": sf.v_norm.tolist(), "norm_t": sf.t_norm.tolist(),
        }), EXIT_OK
    header = [f"x{i + 1}" for i in range(n)] + [f"v{i + 1}" for i in range(n)] + ["norm_v", "norm_t"]
    return _csv(header, np.column_stack([sf.X, sf.v, sf.v_norm, sf.t_norm]), cfg["seed"]), EXIT_OK


HANDLERS = {
    "spaces": cmd_spaces, "tensors": cmd_tensors, "geodesic": cmd_geodesic,
    "search": cmd_search, "verify": cmd_verify, "sphere-field": cmd_sphere_field,
}


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="finslerhom", description="Homogeneous geodesics on homogeneous Finsler spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="run-config JSON file (flags override it)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    spaced = _Parser(add_help=False)
    spaced.add_argument("--space", help="built-in name or space-spec JSON file")
    spaced.add_argument("--tol", type=float, help="tolerance for the t, v and Lemma-2 residuals")

    s = sub.add_parser("spaces", parents=[common], help="list built-in spaces")
    s.add_argument("--dim", type=int)
    s.add_argument("--berwald", action="store_true", help="only Berwald spaces")

    s = sub.add_parser("tensors", parents=[common, spaced], help="g, C, gamma, N, Gamma at (x, y)")
    s.add_argument("--x", type=float, nargs="+", help="base point (default: origin)")
    s.add_argument("--y", type=float, nargs="+", required=False)

    s = sub.add_parser("geodesic", parents=[common, spaced], help="integrate a geodesic (CSV t, x, y)")
    s.add_argument("--x", type=float, nargs="+")
    s.add_argument("--y", type=float, nargs="+")
    s.add_argument("--window", type=float)
    s.add_argument("--step", type=float)

    s = sub.add_parser("search", parents=[common, spaced], help="search geodesic vectors on the sphere")
    s.add_argument("--samples", type=int)
    s.add_argument("--step", type=float)
    s.add_argument("--window", type=float)

    s = sub.add_parser("verify", parents=[common, spaced], help="certify a given algebra vector")
    s.add_argument("--X", type=float, nargs="+")
    s.add_argument("--step", type=float)
    s.add_argument("--window", type=float)

    s = sub.add_parser("sphere-field", parents=[common, spaced], help="sample v and t on the sphere")
    s.add_argument("--samples", type=int)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = merge(args)
        text, code = HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecFormatError, ChartRequiredError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, MetricValidityError, AccuracyError, NumericalError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = cfg.get("out")
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
