"""Command-line front end.

Commands: eval, symbol, wos, solve, obstacle, heat, verify.  Parameters
come from a flat key=value config file (--config), positional key=value
tokens, and named flags, merged in that order (later wins).  Results are
emitted as newline-delimited JSON records or CSV with a header; every
record carries an error estimate or stderr field.

Exit codes: 0 success, 1 usage error, 2 numerical failure (diagnostic
JSON on stderr), 3 verification failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import warnings
from typing import Dict, List, Optional

import numpy as np

from . import discrete, evaluate, kernels, oracles, verify, wos
from .errors import (
    AccuracyWarning,
    NonConvergenceError,
    NonIntegrableTailError,
    NumericalError,
    SingularityError,
    UnsupportedDensityError,
)
from .special import constants

COMMANDS = ("eval", "symbol", "wos", "solve", "obstacle", "heat", "verify")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fracops", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("params", nargs="*", help="key=value parameters")
        p.add_argument("--s", type=float, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--grid-n", type=int, default=None, dest="grid_n")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", type=str, default=None, choices=("json", "csv"))
        p.add_argument("--config", type=str, default=None)
    return parser


def _read_config(path: str) -> Dict[str, str]:
    cfg: Dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line not key=value: {raw.rstrip()}")
            k, v = line.split("=", 1)
            cfg[k.strip()] = v.strip()
    return cfg


def _merge_params(args) -> Dict[str, str]:
    params: Dict[str, str] = {}
    if args.config:
        params.update(_read_config(args.config))
    for tok in args.params:
        if "=" not in tok:
            raise UsageError(f"positional parameter not key=value: {tok!r}")
        k, v = tok.split("=", 1)
        params[k] = v
    flag_map = {
        "s": args.s,
        "n": args.n,
        "N": args.grid_n,
        "seed": args.seed,
        "samples": args.samples,
        "tol": args.tol,
        "out": args.out,
        "format": args.format,
    }
    for k, v in flag_map.items():
        if v is not None:
            params[k] = str(v)
    return params


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(rows: List[dict], params: Dict[str, str]) -> None:
    fmt = params.get("format", "json")
    if fmt not in ("json", "csv"):
        raise UsageError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    if fmt == "json":
        for row in rows:
            buf.write(json.dumps(row, sort_keys=True) + "\n")
    else:
        if rows:
            keys = list(rows[0].keys())
            buf.write(",".join(keys) + "\n")
            for row in rows:
                buf.write(",".join(_fmt(row[k]) for k in keys) + "\n")
    out = params.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _parse_points(spec: str, n: int) -> np.ndarray:
    pts = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = [float(v) for v in chunk.split(",")]
        if len(vals) != n:
            raise UsageError(f"point {chunk!r} has {len(vals)} coordinates, expected {n}")
        pts.append(vals)
    if not pts:
        raise UsageError("no points given")
    return np.asarray(pts)


def _kernel_from_params(params: Dict[str, str], n: int, s: float):
    record = {"variant": params.get("kernel", "fractional_laplacian"),
              "n": str(n), "s": str(s)}
    for key in ("atoms", "lambda", "Lambda", "density", "factor"):
        if key in params:
            record[key] = params[key]
    return kernels.kernel_from_record(record)


def _cmd_eval(params: Dict[str, str]) -> List[dict]:
    n = int(params.get("n", "1"))
    s = float(params.get("s", "0.5"))
    field = oracles.named_field(params.get("field", "ball_torsion"), n, s)
    kernel = _kernel_from_params(params, n, s)
    cfg = evaluate.QuadConfig(target_rel_err=float(params.get("tol", "1e-6")))
    pts = _parse_points(params.get("x", "0" + ",0" * (n - 1)), n)
    rows = []
    for x in pts:
        value, err = evaluate.apply_operator(kernel, field, x, cfg)
        rows.append({"x": ";".join(repr(float(v)) for v in x), "value": value, "err_est": err})
    return rows


def _cmd_symbol(params: Dict[str, str]) -> List[dict]:
    n = int(params.get("n", "1"))
    s = float(params.get("s", "0.5"))
    kernel = _kernel_from_params(params, n, s)
    if "xi" in params:
        pts = _parse_points(params["xi"], n)
    else:
        mags = np.linspace(float(params.get("xi_min", "0.25")),
                           float(params.get("xi_max", "4.0")),
                           int(params.get("count", "16")))
        e1 = np.zeros(n)
        e1[0] = 1.0
        pts = mags[:, None] * e1[None, :]
    rows = []
    for xi in pts:
        if isinstance(kernel, kernels.Comparable):
            value, err = kernels._comparable_symbol(
                kernel, np.asarray(xi, dtype=float))
        else:
            value, err = kernels.fourier_symbol(kernel, xi), 0.0
        rows.append({"xi": ";".join(repr(float(v)) for v in xi), "symbol": value, "err_est": err})
    return rows


def _make_domain(params: Dict[str, str], n: int) -> wos.Domain:
    kind = params.get("domain", "ball")
    if kind == "ball":
        center = [float(v) for v in params.get("center", ",".join(["0"] * n)).split(",")]
        return wos.ball(center, float(params.get("radius", "1")))
    if kind == "interval":
        return wos.interval(float(params.get("a", "-1")), float(params.get("b", "1")))
    if kind == "box":
        lo = [float(v) for v in params["lo"].split(",")]
        hi = [float(v) for v in params["hi"].split(",")]
        return wos.box(lo, hi)
    if kind == "halfspace":
        e = [float(v) for v in params.get("e", ",".join(["0"] * (n - 1) + ["1"])).split(",")]
        return wos.halfspace(e, float(params.get("offset", "0")))
    raise UsageError(f"unknown domain {kind!r}")


def _cmd_wos(params: Dict[str, str]) -> List[dict]:
    n = int(params.get("n", "1"))
    s = float(params.get("s", "0.5"))
    domain = _make_domain(params, n)
    field = oracles.named_field(params.get("g", "shifted_halfspace"), n, s)
    g = wos.ExteriorData(lambda pts: field(np.atleast_2d(pts)),
                         decay_exponent=field.decay_exponent)
    cfg = wos.WosConfig(
        n_samples=int(params.get("samples", "10000")),
        master_seed=int(params.get("seed", "0")),
        n_streams=int(params.get("streams", "8")),
        radius_safety=float(params.get("radius_safety", "1.0")),
        max_steps=int(params.get("max_steps", "1000")),
    )
    pts = _parse_points(params.get("x", "0" + ",0" * (n - 1)), n)
    rows = []
    for x in pts:
        est = wos.wos_solve(domain, g, x, s, cfg)
        rows.append({
            "x": ";".join(repr(float(v)) for v in x),
            "mean": est.mean,
            "stderr": est.stderr,
            "n_samples": est.n_samples,
            "mean_steps": est.mean_steps,
            "max_steps_hit": est.max_steps_hit,
        })
    return rows


def _exterior_callable(params: Dict[str, str], n: int, s: float):
    name = params.get("g", "zero")
    if name == "zero":
        return None
    if name == "one":
        return lambda z: np.ones_like(np.asarray(z, dtype=float))
    field = oracles.named_field(name, n, s)
    return lambda z: field(np.atleast_2d(np.asarray(z, dtype=float)).T.reshape(-1, 1))


def _cmd_solve(params: Dict[str, str]) -> List[dict]:
    s = float(params.get("s", "0.5"))
    N = int(params.get("N", "512"))
    grid = discrete.Grid1D(float(params.get("a", "-1")), float(params.get("b", "1")), N)
    op = discrete.assemble_operator(s, grid)
    f_spec = params.get("f", "q")
    if f_spec == "q":
        fv = np.full(N, constants(1, s).q_ns)
    else:
        fv = np.full(N, float(f_spec))
    g = _exterior_callable(params, 1, s)
    sol = discrete.solve_dirichlet(op, fv, g)
    resid = float(np.max(np.abs(op.matrix @ sol.values + op.exterior_load(g) - fv)))
    return [
        {"x": x, "value": v, "residual": resid}
        for x, v in zip(grid.nodes, sol.values)
    ]


def _cmd_obstacle(params: Dict[str, str]) -> List[dict]:
    s = float(params.get("s", "0.5"))
    N = int(params.get("N", "2048"))
    tol = float(params.get("tol", "1e-9"))
    grid = discrete.Grid1D(float(params.get("a", "-1")), float(params.get("b", "1")), N)
    op = discrete.assemble_operator(s, grid)
    shape = params.get("obstacle", "quadratic")
    if shape == "quadratic":
        height = float(params.get("height", "0.5"))
        phi = height - grid.nodes ** 2
    else:
        raise UsageError(f"unknown obstacle {shape!r}")
    g = _exterior_callable(params, 1, s)
    sol = discrete.solve_obstacle(op, phi, g, tol=tol)
    fit = discrete.fit_growth_exponent(sol, side=params.get("side", "right"))
    out = params.get("out")
    if out:
        sol.solution.to_csv(out)
        sol.solution.to_json(
            out + ".json",
            s=s,
            N=N,
            residual=sol.residual,
            sweeps=sol.sweeps,
            contact_nodes=int(sol.contact.sum()),
            exponent=fit.exponent,
            r_squared=fit.r_squared,
            free_boundary=fit.x_star,
        )
        params.pop("out")  # summary row goes to stdout, artifacts to files
    return [{
        "exponent": fit.exponent,
        "r_squared": fit.r_squared,
        "free_boundary": fit.x_star,
        "residual": sol.residual,
        "sweeps": sol.sweeps,
        "contact_nodes": int(sol.contact.sum()),
    }]


def _cmd_heat(params: Dict[str, str]) -> List[dict]:
    s = float(params.get("s", "0.5"))
    t = float(params.get("t", "1.0"))
    xmax = float(params.get("xmax", "5.0"))
    count = int(params.get("count", "21"))
    xs = np.linspace(-xmax, xmax, count)
    xg, pg = oracles.heat_kernel_grid(s, t)
    dx = xg[1] - xg[0]
    mass_defect = abs(float(np.sum(pg) * dx) - 1.0)
    rows = []
    for x in xs:
        rows.append({"x": float(x), "p": oracles.heat_kernel(1, s, t, [x]),
                     "mass_defect": mass_defect})
    return rows


def _cmd_verify(params: Dict[str, str]) -> int:
    results = verify.run_all()
    rows = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status:4s} {r.name:32s} measured={r.measured:.3e} threshold={r.threshold:.3e}"
        if r.detail:
            line += f"  ({r.detail})"
        print(line)
        rows.append({"check": r.name, "passed": r.passed, "measured": r.measured,
                     "threshold": r.threshold, "detail": r.detail})
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    out = params.get("out")
    if out:
        _emit(rows, {**params, "out": out})
    return 3 if n_fail else 0


_HANDLERS = {
    "eval": _cmd_eval,
    "symbol": _cmd_symbol,
    "wos": _cmd_wos,
    "solve": _cmd_solve,
    "obstacle": _cmd_obstacle,
    "heat": _cmd_heat,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        params = _merge_params(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "verify":
            return _cmd_verify(params)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            rows = _HANDLERS[args.command](params)
        _emit(rows, params)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, NonConvergenceError, NonIntegrableTailError,
            SingularityError, UnsupportedDensityError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        err_est = getattr(exc, "err_est", None)
        if err_est is not None:
            diag["err_est"] = err_est
        print(json.dumps(diag, sort_keys=True), file=sys.stderr)
        return 2
    except (KeyError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
