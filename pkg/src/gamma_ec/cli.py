"""Command-line front end with deterministic file outputs.

Every command reads a JSON job file, writes a JSON (or CSV) result, and
exits 0 on success, 2 on validation errors, 3 on solver failures (a
diagnostic JSON is still written in that case).  Floating-point output is
formatted at 17 significant digits so identical jobs and seeds produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import exp_rouche, gamma_core, level_curves, solver_1d, solver_nd
from .algebraic_fn import AlgebraicFunction
from .errors import GammaEcError

SCHEMA_VERSION = 1

COMMANDS = (
    "solve1d",
    "solvend",
    "solve-exp",
    "trace-modulus",
    "trace-argument",
    "count-zeros",
    "periodic-points",
    "verify-identities",
)

_ALLOWED_KEYS = {
    "solve1d": {"function", "ball_radius", "epsilon", "max_zeros"},
    "solvend": {"n", "functions", "c", "epsilon", "theta", "eta", "limits", "targets"},
    "solve-exp": {"function", "count", "y_start"},
    "trace-modulus": {"r", "x_end"},
    "trace-argument": {"theta", "seed", "x_end"},
    "count-zeros": {"function", "radii", "epsilon"},
    "periodic-points": {"period", "count", "max_modulus"},
    "verify-identities": {"points", "max_modulus", "orders"},
}


class ValidationError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    input: str
    output: str
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    fmt: str = "json"
    job: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# deterministic serialization

def _fmt_float(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if x != x or x in (math.inf, -math.inf):
        return "null"
    return format(float(x), ".17g")


def _serialize(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, complex):
        _serialize([obj.real, obj.imag], out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _serialize(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _serialize(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def dumps(obj) -> str:
    out = []
    _serialize(obj, out)
    return "".join(out)


def _write_json(path, payload):
    with open(path, "w") as fh:
        fh.write(dumps(payload))
        fh.write("\n")


def _write_zeros_csv(path, zeros):
    with open(path, "w") as fh:
        fh.write("root_re,root_im,residual,winding,bbox_xmin,bbox_xmax,bbox_ymin,bbox_ymax\n")
        for z in zeros:
            bb = z.region.bbox()
            cells = [z.root.real, z.root.imag, z.residual, z.winding, *bb]
            fh.write(",".join(_fmt_float(c) if not isinstance(c, int) else str(c) for c in cells))
            fh.write("\n")


# ---------------------------------------------------------------------------
# config handling

def _load_config(args) -> JobConfig:
    if args.command not in COMMANDS:
        raise ValidationError(f"unknown command {args.command!r}")
    try:
        with open(args.input) as fh:
            job = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read job file: {exc}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"job file is not valid JSON: {exc}")
    if not isinstance(job, dict):
        raise ValidationError("job file must hold a JSON object")
    allowed = _ALLOWED_KEYS[args.command]
    unknown = set(job) - allowed
    if unknown:
        raise ValidationError(f"unknown job fields for {args.command}: {sorted(unknown)}")
    tolerances = {}
    for name, value in (("root", args.tol_root), ("trace", args.tol_trace)):
        if value is not None:
            if not (1e-14 <= value <= 1e-2):
                raise ValidationError(f"tolerance override {name}={value} outside [1e-14, 1e-2]")
            tolerances[name] = value
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("GAMMA_EC_THREADS", "1"))
    if threads < 1:
        raise ValidationError("threads must be >= 1")
    return JobConfig(
        command=args.command,
        input=args.input,
        output=args.output,
        tolerances=tolerances,
        seed=args.seed,
        threads=threads,
        fmt=args.format,
        job=job,
    )


def _function_from(job, key="function", arity=None):
    if key not in job:
        raise ValidationError(f"job is missing the {key!r} field")
    try:
        return AlgebraicFunction.from_job_dict(job[key], arity=arity)
    except ValueError as exc:
        raise ValidationError(str(exc))


def _require(job, key, kind, default=None):
    if key not in job:
        if default is not None:
            return default
        raise ValidationError(f"job is missing the {key!r} field")
    value = job[key]
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ValidationError(f"field {key!r} has the wrong type")


# ---------------------------------------------------------------------------
# command bodies

def _zeros_payload(cfg, zeros, extra=None):
    tol_root = cfg.tolerances.get("root")
    if tol_root is not None:
        bad = [z for z in zeros if z.residual > tol_root]
        if bad:
            raise GammaEcError(f"{len(bad)} zeros exceed the residual override {tol_root}")
    payload = {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "count": len(zeros),
        "zeros": [
            {
                "root": [z.root.real, z.root.imag],
                "residual": z.residual,
                "winding": z.winding,
                "region_bbox": list(z.region.bbox()),
            }
            for z in zeros
        ],
    }
    if extra:
        payload.update(extra)
    return payload


def _run_solve1d(cfg, rng):
    job = cfg.job
    A = _function_from(job)
    ball = _require(job, "ball_radius", float)
    eps = _require(job, "epsilon", float, default=1.0)
    max_zeros = int(job.get("max_zeros", 200))
    zeros = solver_1d.enumerate_zeros(A, ball, eps, rng=rng, max_zeros=max_zeros)
    return _zeros_payload(cfg, zeros)


def _run_solvend(cfg, rng):
    job = cfg.job
    n = _require(job, "n", int)
    fns = job.get("functions")
    if not isinstance(fns, list) or len(fns) != n:
        raise ValidationError("field 'functions' must list exactly n entries")
    functions = [AlgebraicFunction.from_job_dict(f, arity=n) for f in fns]
    limits = job.get("limits")
    spec = solver_nd.make_system_spec(
        functions,
        c=job.get("c"),
        epsilon=float(job.get("epsilon", 0.25)),
        theta=job.get("theta"),
        eta=job.get("eta"),
        limits=limits,
        rng=rng,
    )
    targets = job.get("targets", {})
    if not isinstance(targets, dict) or set(targets) - {"count", "max_modulus"}:
        raise ValidationError("field 'targets' must hold only count/max_modulus")
    count = int(targets.get("count", 1))
    max_modulus = targets.get("max_modulus")
    sols = solver_nd.solve_system(
        spec, count=count,
        max_modulus=None if max_modulus is None else float(max_modulus),
        rng=rng,
    )
    return {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "count": len(sols),
        "solutions": [
            {
                "point": [[z.real, z.imag] for z in s.point],
                "residuals": list(s.residuals),
                "rouche_margin": s.rouche_margin,
                "certification_level": s.certification_level,
            }
            for s in sols
        ],
    }


def _run_solve_exp(cfg, rng):
    job = cfg.job
    A = _function_from(job)
    count = _require(job, "count", int)
    y_start = job.get("y_start")
    zeros = exp_rouche.solve_exp_equation(A, count, rng=rng,
                                          y_start=None if y_start is None else float(y_start))
    return _zeros_payload(cfg, zeros)


def _run_trace_modulus(cfg, rng):
    job = cfg.job
    r = _require(job, "r", float)
    x_end = _require(job, "x_end", float)
    tol = cfg.tolerances.get("trace", 1e-9)
    curve = level_curves.trace_modulus_curve(r, x_end, tol=tol)
    return curve


def _run_trace_argument(cfg, rng):
    job = cfg.job
    theta = _require(job, "theta", float)
    seed = job.get("seed")
    if not (isinstance(seed, list) and len(seed) == 2):
        raise ValidationError("field 'seed' must be [re, im]")
    x_end = _require(job, "x_end", float)
    tol = cfg.tolerances.get("trace", 1e-9)
    return level_curves.trace_argument_curve(theta, complex(seed[0], seed[1]), x_end, tol=tol)


def _run_count_zeros(cfg, rng):
    job = cfg.job
    A = _function_from(job)
    radii = job.get("radii")
    if not isinstance(radii, list) or not radii:
        raise ValidationError("field 'radii' must be a non-empty list")
    eps = _require(job, "epsilon", float, default=1.0)
    counts, setup, zeros = solver_1d.count_zeros_by_radius(A, radii, eps, rng=rng)
    return {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "counts": {_fmt_float(R): counts[R] for R in counts},
        "offset_c": setup.c,
        "first_crossing": [setup.b.real, setup.b.imag],
        "perturbation_radius": setup.perturbation_N,
        "disc_radius": setup.disc_radius,
        "zeros": [[z.root.real, z.root.imag] for z in zeros],
    }


def _run_periodic_points(cfg, rng):
    job = cfg.job
    period = _require(job, "period", int)
    count = _require(job, "count", int, default=1)
    max_modulus = float(job.get("max_modulus", 1e4))
    pts = solver_nd.periodic_points(period, count, rng=rng, max_modulus=max_modulus)
    residuals = []
    for z in pts:
        w = z
        for _ in range(period):
            w = gamma_core.gamma(w).value
        residuals.append(abs(w - z))
    return {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "period": period,
        "points": [[z.real, z.imag] for z in pts],
        "composed_residuals": residuals,
    }


def _run_verify_identities(cfg, rng):
    job = cfg.job
    points = _require(job, "points", int, default=1000)
    max_modulus = _require(job, "max_modulus", float, default=50.0)
    orders = job.get("orders", [2, 3])
    if not isinstance(orders, list) or any(int(n) < 2 for n in orders):
        raise ValidationError("field 'orders' must list integers >= 2")
    alpha = gamma_core.alpha()
    samples = []
    while len(samples) < points:
        z = complex(rng.uniform(alpha + 1e-3, max_modulus), rng.uniform(1e-3, max_modulus))
        if abs(z) <= max_modulus:
            samples.append(z)

    def residuals_at(z):
        per_order = [gamma_core.verify_identities(z, int(n)) for n in orders]
        rec = per_order[0][0]
        refl = per_order[0][1]
        mult = {int(n): res[2] for n, res in zip(orders, per_order)}
        return rec, refl, mult

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(residuals_at, samples))
    else:
        rows = [residuals_at(z) for z in samples]
    worst = {
        "recurrence": max(r[0] for r in rows),
        "reflection": max(r[1] for r in rows),
    }
    for n in orders:
        worst[f"multiplication_{int(n)}"] = max(r[2][int(n)] for r in rows)
    worst["algebraic"] = gamma_core.verify_gamma_algebraic_identity()
    return {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "points": points,
        "max_residuals": worst,
    }


_RUNNERS = {
    "solve1d": _run_solve1d,
    "solvend": _run_solvend,
    "solve-exp": _run_solve_exp,
    "trace-modulus": _run_trace_modulus,
    "trace-argument": _run_trace_argument,
    "count-zeros": _run_count_zeros,
    "periodic-points": _run_periodic_points,
    "verify-identities": _run_verify_identities,
}


def _emit(cfg, result):
    if isinstance(result, level_curves.LevelCurve):
        if cfg.fmt == "json":
            payload = {
                "schema": SCHEMA_VERSION,
                "command": cfg.command,
                "seed": cfg.seed,
                "kind": result.kind,
                "level": result.level,
                "tol": result.tol,
                "terminus": result.terminus,
                "samples": [
                    [z.real, z.imag, la, ar]
                    for z, la, ar in zip(result.samples, result.log_abs, result.arg)
                ],
            }
            _write_json(cfg.output, payload)
        else:
            result.to_csv(cfg.output)
        return
    if cfg.fmt == "csv" and "zeros" in result and result.get("command") in ("solve1d", "solve-exp"):
        # rebuild lightweight rows from the payload for tabular consumers
        with open(cfg.output, "w") as fh:
            fh.write("root_re,root_im,residual,winding\n")
            for z in result["zeros"]:
                fh.write(
                    ",".join(
                        [
                            _fmt_float(z["root"][0]),
                            _fmt_float(z["root"][1]),
                            _fmt_float(z["residual"]),
                            str(z["winding"]),
                        ]
                    )
                )
                fh.write("\n")
        return
    _write_json(cfg.output, result)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gamma-ec",
        description="Certified solving of Gamma(z_k) = A_k(z) equations and systems",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, help="path to the JSON job file")
    parser.add_argument("--output", required=True, help="path for the result file")
    parser.add_argument("--tol-root", type=float, default=None,
                        help="override: maximal accepted root residual")
    parser.add_argument("--tol-trace", type=float, default=None,
                        help="override: level-curve sample tolerance")
    parser.add_argument("--seed", type=int, default=0, help="sampling seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (fallback: GAMMA_EC_THREADS)")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command.startswith("trace-") else "json"
    try:
        cfg = _load_config(args)
    except ValidationError as exc:
        print(f"gamma-ec: validation error: {exc}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(cfg.seed)
    try:
        result = _RUNNERS[cfg.command](cfg, rng)
    except ValidationError as exc:
        print(f"gamma-ec: validation error: {exc}", file=sys.stderr)
        return 2
    except GammaEcError as exc:
        diagnostic = {
            "schema": SCHEMA_VERSION,
            "command": cfg.command,
            "seed": cfg.seed,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        _write_json(cfg.output, diagnostic)
        print(f"gamma-ec: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    _emit(cfg, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
