"""
Command line interface.

Subcommands: ``verify``, ``solve``, ``eig``, ``dtn``, ``sweep``.  Exit codes:
0 pass, 1 verified failure (or spectral-point error), 2 usage or I/O error.

Complex values are written in Python literal syntax (``-1``, ``2j``,
``1+1j``); values starting with a minus sign and containing ``j`` must be
attached with ``=`` (``--lambda=-3-1j``).  All complex outputs are
``[re, im]`` pairs (JSON) or separate re/im columns (CSV).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import extensions as ext
from .extensions import DEFAULT_PROBES, BoundaryParameter
from .modelio import ModelFormatError, load_model
from .models import builtin
from .numcore import SingularMatrixError
from .suite import DEFAULT_THETAS, TOLERANCES, auto_region, run_verification
from .triple import ResolventPointError, TripleModel, gamma

REPORT_SCHEMA = "quasitriple.report/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input or unreadable model."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    param: str = "theta=1"
    lambdas: tuple = ()
    region: tuple | None = None
    probes: tuple = DEFAULT_PROBES
    tolerances: dict = field(default_factory=dict)
    seed: int | None = None
    out: str | None = None
    fmt: str = "json"
    timestamp: bool = True
    rhs: str = "e1"
    grid: int = 64
    thetas: tuple = ()


# -- parsing helpers ----------------------------------------------------------------


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a complex number: {text!r}") from exc


def parse_complex_list(text: str) -> tuple:
    return tuple(parse_complex(t) for t in text.split(",") if t.strip())


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return parse_complex(text)


def parse_model_spec(spec: str, seed: int | None = None) -> TripleModel:
    """``NAME[:k=v,...]`` (or ``NAME k=v ...``) for a builtin, otherwise a JSON file path."""
    if spec.endswith(".json") or Path(spec).exists():
        try:
            return load_model(spec)
        except (OSError, ModelFormatError, ValueError) as exc:
            raise UsageError(f"cannot load model {spec!r}: {exc}") from exc
    head, _, rest = spec.replace(" ", ":", 1).partition(":")
    params = {}
    for item in rest.replace(" ", ",").split(","):
        if not item:
            continue
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"model parameter {item!r} is not key=value")
        params[key] = _parse_value(val)
    if seed is not None and head == "synthetic":
        params["seed"] = seed
    try:
        return builtin(head, **params)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise UsageError(f"cannot build {head!r}: {exc}") from exc


def _parse_entries(data, m: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.shape != (m, m):
        raise UsageError(f"boundary matrix must be {m}x{m}")
    return arr.astype(complex)


def parse_param(text: str, m: int) -> BoundaryParameter:
    """``theta=<complex>``, ``dirichlet`` or JSON ``{"b1": [[...]], "b2": [[...]]}`` (or ``{"B": ...}``)."""
    text = text.strip()
    if text == "dirichlet":
        return BoundaryParameter.dirichlet(m)
    if text.startswith("theta="):
        return BoundaryParameter.robin(parse_complex(text[6:]), m)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"unrecognized boundary parameter {text!r}") from exc
    if "B" in doc:
        return BoundaryParameter.from_matrix(_parse_entries(doc["B"], m))
    b2 = _parse_entries(doc["b2"], m)
    b1 = _parse_entries(doc["b1"], m) if "b1" in doc else np.eye(m)
    return BoundaryParameter(b1, b2, "matrix")


def parse_region(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad region {text!r}") from exc
    if len(vals) != 4 or vals[0] > vals[1] or vals[2] > vals[3]:
        raise UsageError("region must be re_min,re_max,im_min,im_max")
    return vals


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or ():
        key, eq, val = item.partition("=")
        if not eq or key not in TOLERANCES:
            raise UsageError(f"--tol expects FAMILY=VALUE with FAMILY in {sorted(TOLERANCES)}")
        try:
            v = float(val)
        except ValueError:
            v = float("nan")
        if not v > 0:
            raise UsageError("tolerances must be positive")
        out[key] = v
    return out


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# -- output ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, payload: dict | None, rows: list | None, header: list | None) -> None:
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        doc = dict(payload)
        if cfg.timestamp:
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _clean(x):
    """Replace non-finite floats by ``None`` so the JSON stays strict."""
    if isinstance(x, float) and not np.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.floating):
        return _clean(float(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# -- commands ------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    model = parse_model_spec(cfg.model, cfg.seed)
    report = run_verification(model, cfg.probes, cfg.thetas or DEFAULT_THETAS, cfg.tolerances)
    payload = {"schema": REPORT_SCHEMA, **_clean(report.to_dict())}
    rows = [[e.name, e.anchor, e.defect, e.tolerance, int(e.passed)] for e in report.entries]
    _emit(cfg, payload, rows, ["name", "anchor", "defect", "tolerance", "passed"])
    for e in report.failures():
        print(f"FAIL {e.name}: defect {e.defect:.3e} > {e.tolerance:.1e}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _rhs(cfg: RunConfig, n: int) -> np.ndarray:
    spec = cfg.rhs
    if spec == "random":
        rng = np.random.Generator(np.random.PCG64(cfg.seed or 0))
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if spec.startswith("e") and spec[1:].isdigit():
        k = int(spec[1:])
        if not 1 <= k <= n:
            raise UsageError(f"--rhs {spec}: index out of range 1..{n}")
        h = np.zeros(n, dtype=complex)
        h[k - 1] = 1.0
        return h
    raise UsageError("--rhs expects eK (1-based basis vector) or 'random'")


def _error(cfg: RunConfig, reason: str, detail: str, lam: complex) -> int:
    doc = {"status": "error", "reason": reason, "detail": detail, "lambda": _pair(lam)}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    if cfg.fmt == "json":
        _emit(cfg, doc, None, None)
    return EXIT_FAIL


def cmd_solve(cfg: RunConfig) -> int:
    if len(cfg.lambdas) != 1:
        raise UsageError("solve needs exactly one --lambda")
    lam = cfg.lambdas[0]
    model = parse_model_spec(cfg.model, cfg.seed)
    param = parse_param(cfg.param, model.m)
    h = _rhs(cfg, model.n)
    try:
        model.stack_solver("plain", lam)
    except ResolventPointError as exc:
        return _error(cfg, "resolvent point", str(exc), lam)
    # with lam in rho(A0), a singular restricted stack and a singular I - b2 M b1 are the same event
    try:
        f_d = ext.ab_solve(model, param, lam, h)
        u_k, f_k = ext.krein_solution(model, param, lam, h)
    except SingularMatrixError as exc:
        return _error(cfg, ext.BirmanSchwingerSingular.reason, str(exc), lam)
    u_d = model.embed @ f_d
    dev = float(np.linalg.norm(u_k - u_d) / max(np.linalg.norm(u_d), np.finfo(float).tiny))
    payload = {
        "lambda": _pair(lam), "param": param.label, "rhs": cfg.rhs,
        "deviation": dev,
        "boundary_residual_direct": ext.boundary_residual(model, param, f_d),
        "boundary_residual_krein": ext.boundary_residual(model, param, f_k),
        "u_direct": [_pair(z) for z in u_d], "u_krein": [_pair(z) for z in u_k],
    }
    rows = [[i, z.real, z.imag, w.real, w.imag] for i, (z, w) in enumerate(zip(u_d, u_k))]
    _emit(cfg, payload, rows, ["index", "re_u_direct", "im_u_direct", "re_u_krein", "im_u_krein"])
    return EXIT_OK


def _region(cfg: RunConfig, model, param):
    return cfg.region if cfg.region is not None else auto_region(model, param)


def cmd_eig(cfg: RunConfig) -> int:
    model = parse_model_spec(cfg.model, cfg.seed)
    param = parse_param(cfg.param, model.m)
    region = _region(cfg, model, param)
    res = ext.eigenvalue_search(model, param, region, grid=cfg.grid)
    roots = [{"lambda": _pair(r.lam), "multiplicity": r.multiplicity, "bs_residual": r.bs_residual,
              "pencil_distance": r.pencil_distance, "pencil_match": r.pencil_match} for r in res.roots]
    payload = {"param": param.label, "region": list(region), "roots": roots,
               "pencil": [_pair(z) for z in res.pencil],
               "flagged": [{"lambda": _pair(z), "reason": why} for z, why in res.flagged],
               "diagnostics": list(res.diagnostics)}
    rows = [[k, r.lam.real, r.lam.imag, r.multiplicity, r.bs_residual, r.pencil_distance, int(r.pencil_match)]
            for k, r in enumerate(res.roots)]
    _emit(cfg, _clean(payload), rows,
          ["k", "lambda_re", "lambda_im", "multiplicity", "bs_residual", "pencil_distance", "pencil_match"])
    return EXIT_OK if all(r.pencil_match for r in res.roots) else EXIT_FAIL


def cmd_dtn(cfg: RunConfig) -> int:
    """Weyl matrix in raw boundary coordinates: the map ``G0 f -> G1 f`` on ``ker(T - lam)``."""
    if not cfg.lambdas:
        raise UsageError("dtn needs at least one --lambda")
    model = parse_model_spec(cfg.model, cfg.seed)
    rows, mats = [], []
    for lam in cfg.lambdas:
        try:
            w = gamma(model, lam).weyl
        except ResolventPointError as exc:
            return _error(cfg, "resolvent point", str(exc), lam)
        raw = model.frame_in @ w @ model.frame_out
        mats.append({"lambda": _pair(lam), "matrix": [[_pair(z) for z in row] for row in raw]})
        for i in range(model.m):
            for j in range(model.m):
                rows.append([lam.real, lam.imag, i, j, raw[i, j].real, raw[i, j].imag])
    _emit(cfg, {"weyl": mats}, rows, ["lambda_re", "lambda_im", "i", "j", "re", "im"])
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    """Eigenvalues of ``A_B`` for ``B = theta * I`` over a list of real or complex ``theta``."""
    model = parse_model_spec(cfg.model, cfg.seed)
    thetas = cfg.thetas or tuple(np.linspace(0.1, 1.0, 10))
    region = cfg.region or auto_region(model, BoundaryParameter.robin(thetas[0], model.m))
    rows, traj, prev, prev_t = [], [], None, None
    for th in thetas:
        param = BoundaryParameter.robin(th, model.m)
        res = ext.eigenvalue_search(model, param, region, grid=cfg.grid)
        lams = res.values
        for k, r in enumerate(res.roots):
            jump = float(np.min(np.abs(prev - r.lam))) if prev is not None and prev.size else None
            rate = None if jump is None else jump / abs(complex(th) - complex(prev_t))
            rows.append([complex(th).real, complex(th).imag, k, r.lam.real, r.lam.imag,
                         r.bs_residual, int(r.pencil_match), jump, rate])
            traj.append({"theta": _pair(th), "k": k, "lambda": _pair(r.lam), "bs_residual": r.bs_residual,
                         "pencil_match": r.pencil_match, "jump": jump, "sensitivity": rate})
        prev, prev_t = lams, th
    _emit(cfg, _clean({"region": list(region), "rows": traj}), rows,
          ["theta_re", "theta_im", "k", "lambda_re", "lambda_im", "bs_residual", "pencil_match",
           "jump", "sensitivity"])
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "eig": cmd_eig, "dtn": cmd_dtn, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasitriple", description=__doc__.split("\n\n")[0].strip())
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0])
        p.add_argument("--model", required=True, help="builtin NAME[:k=v,...] or model JSON path")
        p.add_argument("--param", default="theta=1",
                       help="theta=<complex> | dirichlet | JSON {\"b1\":..,\"b2\":..} or {\"B\":..}")
        p.add_argument("--lambda", dest="lambdas", action="append", default=[], help="spectral parameter")
        p.add_argument("--region", help="re_min,re_max,im_min,im_max")
        p.add_argument("--probes", help="comma-separated probe points")
        p.add_argument("--tol", action="append", help="FAMILY=VALUE tolerance override")
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--no-timestamp", action="store_true")
        p.add_argument("--rhs", default="e1", help="eK or random (solve)")
        p.add_argument("--grid", type=int, default=64, help="scan points per axis (eig, sweep)")
        p.add_argument("--thetas", help="comma-separated theta values (sweep, verify)")
    return ap


def config_from_args(args) -> RunConfig:
    lambdas = tuple(z for text in args.lambdas for z in parse_complex_list(text))
    return RunConfig(
        command=args.command, model=args.model, param=args.param, lambdas=lambdas,
        region=parse_region(args.region) if args.region else None,
        probes=parse_complex_list(args.probes) if args.probes else DEFAULT_PROBES,
        tolerances=parse_tolerances(args.tol), seed=args.seed, out=args.out, fmt=args.format,
        timestamp=not args.no_timestamp, rhs=args.rhs, grid=args.grid,
        thetas=parse_complex_list(args.thetas) if args.thetas else (),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stdout = None
        return 0


if __name__ == "__main__":
    sys.exit(main())
