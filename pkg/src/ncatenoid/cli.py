"""Command-line entry point: ``ncatenoid classify|solve|verify|mesh|example``."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import errors
from .fluxmodel import FluxData, check_balance, classify_type, detect_obstructions, inverse_stereographic
from .residues import (
    SolutionCandidate,
    dumps,
    verify_solution,
    weierstrass_from_solution,
)
from .solver import DEFAULT_SEED, TOL_RESIDUAL, TOL_ROOT, FamilySolution, named_example, solve
from .surface import (
    SamplingConfig,
    contour_flux,
    export_obj,
    hopf_weight,
    loop_closure,
    sample_surface,
)

EXIT_OK, EXIT_NONE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
FLUX_RTOL = 1e-6
HOPF_TOL = 1e-8
FLUX_SUM_RTOL = 1e-8
CLOSURE_RTOL = 1e-6


def _diag(level, message, **extra):
    rec = {"level": level, "message": message}
    rec.update(extra)
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)


def _parse_params(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ValueError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = float(v)
        except ValueError:
            out[k] = complex(v.replace("i", "j"))
    return out


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _emit(text, out_path):
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise errors.SinkFailure(str(exc)) from exc
    else:
        print(text)


def _solution_record(c: SolutionCandidate, flat=False):
    w = weierstrass_from_solution(c)
    rep = verify_solution(c)
    return {
        "candidate": c.to_dict(),
        "weierstrass": w.to_dict(),
        "gauss_degree": w.gauss_degree,
        "branched": w.branched,
        "flat": flat,
        "verification": rep.to_dict(),
    }


def _candidates_from(obj):
    items = obj if isinstance(obj, list) else [obj]
    out = []
    for it in items:
        if not isinstance(it, dict):
            raise ValueError("solution entries must be JSON objects")
        out.append(SolutionCandidate.from_dict(it.get("candidate", it)))
    return out


def _sampling(args):
    return SamplingConfig(contour_samples=args.contour_samples)


def oracle_report(c: SolutionCandidate, cfg: SamplingConfig, tol_residual: float):
    """verify_solution plus the contour-integration cross-checks."""
    rep = verify_solution(c)
    w = weierstrass_from_solution(c)
    flux_err, hopf_err, closure = [], [], []
    total = np.zeros(3)
    size = 0.0
    for j in range(c.n):
        f = contour_flux(w, j, cfg)
        total += f
        size += float(np.linalg.norm(f))
        # relative to |4 pi a_j|, absolute for flat (zero-weight) ends
        scale = 4 * math.pi * abs(c.a[j]) or 1.0
        flux_err.append(float(np.linalg.norm(f - 4 * math.pi * c.a[j] * inverse_stereographic(c.p[j]))) / scale)
        hopf_err.append(abs(hopf_weight(w, j, cfg)[0] - c.a[j]))
        re, sz = loop_closure(w, j, cfg)
        closure.append(float(np.max(np.abs(re))) / sz if sz else 0.0)
    total_norm = float(np.linalg.norm(total))
    ok = (
        rep.reduction2_residual < tol_residual
        and max(flux_err) < FLUX_RTOL
        and max(hopf_err) < HOPF_TOL
        and total_norm <= FLUX_SUM_RTOL * max(size, 1.0)
        and max(closure) < CLOSURE_RTOL
    )
    return ok, {
        "passed": ok,
        "verification": rep.to_dict(),
        "contour_flux_errors": flux_err,
        "hopf_weight_errors": hopf_err,
        "contour_flux_sum": total_norm,
        "loop_closure": closure,
        "gauss_degree": w.gauss_degree,
        "branched": w.branched,
    }


def cmd_classify(args):
    d = FluxData.from_dict(_load_json(args.input))
    bal = check_balance(d)
    if bal > 1e-10 * float(np.sum(np.abs(d.weights))):
        _diag("error", "flux data are not balanced", imbalance=bal)
        return EXIT_INPUT
    out = {"type": classify_type(d).to_dict(), "obstructions": detect_obstructions(d).to_dict(), "imbalance": bal}
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_solve(args):
    d = FluxData.from_dict(_load_json(args.input))
    bal = check_balance(d)
    if bal > 1e-10 * float(np.sum(np.abs(d.weights))):
        _diag("error", "flux data are not balanced", imbalance=bal)
        return EXIT_INPUT
    params = _parse_params(args.param)
    kind, result = solve(d, args.tol_residual, args.tol_root, args.seed)
    if isinstance(result, FamilySolution):
        t = params.get("t", 1.0)
        records = [_solution_record(result.candidate(t))]
        records[0]["family"] = {"q": [[x.real, x.imag] for x in result.q], "a": list(result.a),
                                "eqf_residual": result.residual()}
    else:
        records = [_solution_record(c) for c in result]
    if not records:
        _diag("info", "no solution", type=kind, obstructions=detect_obstructions(d).to_dict())
        _emit(dumps([]), args.output)
        return EXIT_NONE
    _emit(dumps(records), args.output)
    return EXIT_OK


def cmd_verify(args):
    cands = _candidates_from(_load_json(args.input))
    cfg = _sampling(args)
    reports, all_ok = [], True
    for c in cands:
        ok, rep = oracle_report(c, cfg, args.tol_residual)
        all_ok &= ok
        reports.append(rep)
    _emit(dumps(reports), args.output)
    return EXIT_OK if all_ok else EXIT_NONE


def cmd_mesh(args):
    cands = _candidates_from(_load_json(args.input))
    if not 0 <= args.index < len(cands):
        raise ValueError(f"--index {args.index} out of range")
    if not args.output:
        raise ValueError("mesh needs -o out.obj")
    c = cands[args.index]
    mesh = sample_surface(weierstrass_from_solution(c), _sampling(args))
    try:
        with open(args.output, "wb") as fh:
            export_obj(mesh, fh)
    except OSError as exc:
        raise errors.SinkFailure(str(exc)) from exc
    _diag("info", "mesh written", vertices=len(mesh.vertices), triangles=len(mesh.triangles),
          ends=mesh.end_meta)
    return EXIT_OK


def cmd_example(args):
    ex = named_example(args.name, _parse_params(args.param))
    records = [_solution_record(c, flat=ex.flat) for c in ex.candidates]
    for note in ex.notes:
        _diag("info", note)
    _emit(dumps(records), args.output)
    return EXIT_OK if records else EXIT_NONE


def build_parser():
    ap = argparse.ArgumentParser(prog="ncatenoid", description="Genus-zero minimal surfaces with catenoid ends.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output path (default: stdout)")
    common.add_argument("--tol-residual", type=float, default=TOL_RESIDUAL)
    common.add_argument("--tol-root", type=float, default=TOL_ROOT)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--contour-samples", type=int, default=1024)
    common.add_argument("--param", action="append", metavar="K=V")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("classify", "solve", "verify"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("input")
    p = sub.add_parser("mesh", parents=[common])
    p.add_argument("input")
    p.add_argument("--index", type=int, default=0)
    p = sub.add_parser("example", parents=[common])
    p.add_argument("name")
    return ap


COMMANDS = {"classify": cmd_classify, "solve": cmd_solve, "verify": cmd_verify, "mesh": cmd_mesh,
            "example": cmd_example}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except errors.NewtonFailure as exc:
        _diag("error", str(exc), kind="NewtonFailure")
        return EXIT_NUMERIC
    except errors.NoSolution as exc:
        _diag("info", str(exc), kind=type(exc).__name__,
              obstructions=[h.to_dict() for h in exc.obstructions])
        if args.command == "solve":
            _emit(dumps([]), args.output)
        return EXIT_NONE
    except (errors.NonConvergence, errors.PathBlocked) as exc:
        _diag("error", str(exc), kind=type(exc).__name__)
        return EXIT_NUMERIC
    except (errors.InvalidFluxData, errors.UnknownName, errors.ParamOutOfRange, errors.SinkFailure,
            errors.DegenerateConfiguration, ValueError, KeyError, TypeError) as exc:
        _diag("error", str(exc), kind=type(exc).__name__)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
