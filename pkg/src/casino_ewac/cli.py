"""Command-line front end.

Subcommands map one-to-one onto the library: ``smooth`` writes posterior
state probabilities, ``bounds`` a JSON report of every bound and benchmark
for a single model, ``sweep-eta`` and ``sweep-horizon`` CSV grids,
``wac-dist`` Monte-Carlo draws of the cheating loss, and ``copulas`` the
three benchmark couplings.  Options may come from a JSON config file via
``--config``; explicit flags win over config values.  Numbers are written
with 12 significant digits and reruns with identical inputs produce
byte-identical files.

Exit codes: 0 success, 2 bad flags or config, 3 infeasible constraint set,
4 numerical failure (for example an impossible observation path).
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from casino_ewac.engine import (InfeasibleMaskError, copula_pmf, cs_mask,
                                ewac_bounds, ewac_objective, ewac_of_theta,
                                inhomogeneous_bounds, naive_ewac, pm_mask)
from casino_ewac.hmm import HmmModel, ZeroLikelihoodError, canonical_model, smooth
from casino_ewac.sweeps import (ETA_SWEEP_COLUMNS, HORIZON_SWEEP_COLUMNS,
                                default_horizon_grid, eta_sweep, horizon_sweep,
                                sample_wac)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

PATH_1 = (3, 5, 1, 2, 5, 4, 6, 3, 5, 2, 4, 3, 6, 4, 1,
          2, 6, 4, 2, 3, 2, 1, 6, 3, 4, 1, 5, 1, 5, 6)
PATH_2 = (6, 5, 6, 4, 1, 3, 5, 1, 2, 2, 6, 3, 4, 5, 5,
          3, 2, 5, 6, 3, 4, 5, 5, 4, 6, 4, 4, 6, 5, 5)

_THETA_KINDS = ("lb", "ub", "independence", "comonotonic", "countermonotonic")
_CONSTRAINT_SETS = ("none", "pm", "cs")

log = logging.getLogger("casino_ewac")

__all__ = ["PATH_1", "PATH_2", "main", "entry_point"]


def _fmt(x):
    """12 significant digits; empty string for missing values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _json_ready(obj):
    if obj is None:
        return None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    return obj


def _write_text(out, text):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _csv(columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _parse_path(spec):
    if isinstance(spec, (list, tuple)):
        return [int(v) for v in spec]
    if not isinstance(spec, str):
        raise ValueError(f"cannot read an observation path from {spec!r}")
    if spec == "builtin:1":
        return list(PATH_1)
    if spec == "builtin:2":
        return list(PATH_2)
    if spec.startswith("builtin:"):
        raise ValueError(f"unknown builtin path {spec!r}; use builtin:1 or builtin:2")
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            spec = fh.read().replace("\n", ",")
    try:
        return [int(tok) for tok in spec.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise ValueError(f"bad observation path {spec!r}: {exc}") from None


def _parse_grid(spec, cast=float):
    if isinstance(spec, (list, tuple)):
        return [cast(v) for v in spec]
    try:
        return [cast(tok) for tok in str(spec).split(",") if tok]
    except ValueError as exc:
        raise ValueError(f"bad grid {spec!r}: {exc}") from None


# Config keys each subcommand accepts (besides those shared by all).
_COMMON_KEYS = {"out"}
_COMMAND_KEYS = {
    "smooth": {"eta", "model", "path"},
    "bounds": {"eta", "model", "path"},
    "sweep-eta": {"path", "grid"},
    "sweep-horizon": {"eta", "seed", "t_grid", "t_min", "t_max", "t_points"},
    "wac-dist": {"eta", "model", "path", "theta", "constraints", "samples",
                 "seed"},
    "copulas": {"eta", "model"},
}


def _load_config(path, command):
    if path is None:
        return {}
    with open(path) as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config {path}: line {exc.lineno}, column "
                             f"{exc.colno}: {exc.msg}") from None
    if not isinstance(config, dict):
        raise ValueError(f"config {path}: expected a JSON object at top level")
    allowed = _COMMAND_KEYS[command] | _COMMON_KEYS
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise ValueError(
            f"config {path}: unknown field {unknown[0]!r} for {command!r} "
            f"(allowed: {', '.join(sorted(allowed))})")
    return config


def _option(args, config, key, default=None):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    return config.get(key, default)


def _resolve_model(args, config):
    eta = _option(args, config, "eta")
    spec = config.get("model")
    if (eta is None) == (spec is None):
        raise ValueError(
            "specify the model exactly one way: --eta (or config 'eta') for "
            "the canonical casino, or a config 'model' object")
    if eta is not None:
        return canonical_model(float(eta))
    for key in ("p", "Q", "E", "w"):
        if key not in spec:
            raise ValueError(f"config model is missing field {key!r}")
    return HmmModel(spec["p"], spec["Q"], spec["E"], spec["w"])


def _cmd_smooth(args, config):
    model = _resolve_model(args, config)
    obs = _parse_path(_option(args, config, "path", "builtin:1"))
    delta = smooth(model, obs)
    rows = [{"t": t + 1, "delta_fair": delta[t, 0], "delta_biased": delta[t, 1]}
            for t in range(delta.shape[0])]
    _write_text(_option(args, config, "out"),
                _csv(("t", "delta_fair", "delta_biased"), rows))
    return EXIT_OK


def _cmd_bounds(args, config):
    model = _resolve_model(args, config)
    obs = _parse_path(_option(args, config, "path", "builtin:1"))
    objective = ewac_objective(model, obs, smooth(model, obs))
    plain = ewac_bounds(objective)
    loose = inhomogeneous_bounds(objective)
    report = {
        "lb": plain.lb, "ub": plain.ub,
        "lb_cs": None, "ub_cs": None,
        "lb_inhom": loose.lb, "ub_inhom": loose.ub,
        "naive": naive_ewac(model, obs),
        "theta_lb": plain.theta_lb, "theta_ub": plain.theta_ub,
    }
    try:
        mask = cs_mask(model.emission)
    except ValueError:
        log.info("fair die is not uniform; skipping the cs bounds")
    else:
        tied = ewac_bounds(objective, mask, tag="cs")
        report["lb_cs"], report["ub_cs"] = tied.lb, tied.ub
    for kind in ("independence", "comonotonic", "countermonotonic"):
        report[f"ewac_{kind}"] = ewac_of_theta(objective,
                                               copula_pmf(model, kind))
    _write_text(_option(args, config, "out"),
                json.dumps(_json_ready(report), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_sweep_eta(args, config):
    obs = _parse_path(_option(args, config, "path", "builtin:1"))
    grid = _option(args, config, "grid")
    rows = eta_sweep(obs, None if grid is None else _parse_grid(grid))
    _write_text(_option(args, config, "out"),
                _csv(ETA_SWEEP_COLUMNS, [r.as_dict() for r in rows]))
    return EXIT_OK


def _cmd_sweep_horizon(args, config):
    eta = _option(args, config, "eta")
    if eta is None:
        raise ValueError("sweep-horizon needs --eta (or config 'eta')")
    t_grid = _option(args, config, "t_grid")
    if t_grid is not None:
        t_grid = _parse_grid(t_grid, int)
    else:
        t_grid = default_horizon_grid(
            int(_option(args, config, "t_min", 10)),
            int(_option(args, config, "t_max", 100_000)),
            int(_option(args, config, "t_points", 25)))
    rows = horizon_sweep(float(eta), t_grid,
                         int(_option(args, config, "seed", 0)))
    _write_text(_option(args, config, "out"),
                _csv(HORIZON_SWEEP_COLUMNS, [r.as_dict() for r in rows]))
    return EXIT_OK


def _theta_for_kind(model, objective, kind, constraints):
    if kind in ("independence", "comonotonic", "countermonotonic"):
        return copula_pmf(model, kind)
    mask = frozenset()
    if constraints == "pm":
        mask = pm_mask(model.num_symbols)
    elif constraints == "cs":
        mask = cs_mask(model.emission)
    pair = ewac_bounds(objective, mask, tag=constraints)
    return pair.theta_lb if kind == "lb" else pair.theta_ub


def _cmd_wac_dist(args, config):
    model = _resolve_model(args, config)
    obs = _parse_path(_option(args, config, "path", "builtin:1"))
    kind = _option(args, config, "theta", "comonotonic")
    if kind not in _THETA_KINDS:
        raise ValueError(f"theta must be one of {_THETA_KINDS}, got {kind!r}")
    constraints = _option(args, config, "constraints", "none")
    if constraints not in _CONSTRAINT_SETS:
        raise ValueError(
            f"constraints must be one of {_CONSTRAINT_SETS}, got {constraints!r}")
    objective = ewac_objective(model, obs, smooth(model, obs))
    theta = _theta_for_kind(model, objective, kind, constraints)
    samples = sample_wac(model, obs, theta,
                         int(_option(args, config, "samples", 10_000)),
                         int(_option(args, config, "seed", 0)))
    rows = [{"sample": s + 1, "wac": samples.wac[s]}
            for s in range(samples.wac.size)]
    _write_text(_option(args, config, "out"), _csv(("sample", "wac"), rows))
    return EXIT_OK


def _cmd_copulas(args, config):
    model = _resolve_model(args, config)
    report = {kind: copula_pmf(model, kind)
              for kind in ("independence", "comonotonic", "countermonotonic")}
    _write_text(_option(args, config, "out"),
                json.dumps(_json_ready(report), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


_DISPATCH = {
    "smooth": _cmd_smooth,
    "bounds": _cmd_bounds,
    "sweep-eta": _cmd_sweep_eta,
    "sweep-horizon": _cmd_sweep_horizon,
    "wac-dist": _cmd_wac_dist,
    "copulas": _cmd_copulas,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="casino-ewac",
        description="Bounds on the expected winnings attributable to cheating "
                    "in the two-state casino model.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, model=False, path=False, seed=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--out", help="output file (default: stdout)")
        if model:
            p.add_argument("--eta", type=float,
                           help="fairness level of the canonical casino")
        if path:
            p.add_argument("--path",
                           help="observation path: builtin:1, builtin:2, "
                                "comma-separated faces, or @file")
        if seed:
            p.add_argument("--seed", type=int, help="RNG seed (default 0)")
        return p

    add("smooth", "posterior state probabilities per period",
        model=True, path=True)
    add("bounds", "all bounds and benchmarks for one model and path",
        model=True, path=True)

    p = add("sweep-eta", "bounds across fairness levels", path=True)
    p.add_argument("--grid", help="comma-separated fairness levels")

    p = add("sweep-horizon", "per-period bounds along one simulated path",
        model=True, seed=True)
    p.add_argument("--t-grid", help="comma-separated horizons")
    p.add_argument("--t-min", type=int, help="smallest horizon (default 10)")
    p.add_argument("--t-max", type=int, help="largest horizon (default 100000)")
    p.add_argument("--t-points", type=int,
                   help="points in the geometric grid (default 25)")

    p = add("wac-dist", "Monte-Carlo draws of the cheating loss",
            model=True, path=True, seed=True)
    p.add_argument("--theta", choices=_THETA_KINDS,
                   help="which joint PMF to sample under (default comonotonic)")
    p.add_argument("--constraints", choices=_CONSTRAINT_SETS,
                   help="constraint set for the lb/ub optimisers (default none)")
    p.add_argument("--samples", type=int, help="number of draws (default 10000)")

    add("copulas", "the three benchmark joint PMFs", model=True)
    return parser


def main(argv=None):
    """Run the CLI; returns the process exit code."""
    level = os.environ.get("CASINO_EWAC_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else int(exc.code)
    try:
        config = _load_config(args.config, args.command)
        return _DISPATCH[args.command](args, config)
    except InfeasibleMaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ZeroLikelihoodError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
