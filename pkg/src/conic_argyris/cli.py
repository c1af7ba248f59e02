"""Command-line harness: mesh, interpolate, check, convergence.

Exit status is 0 when every check passes, 1 when a check fails and 2 when
the input cannot be used at all.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io as fio
from . import testfunctions
from .conic import Conic, Domain, oval_domain
from .interpolator import interpolate
from .mesh import generate_disk_mesh, validate
from .norms import boundary_trace, c1_jump, interpolation_residuals, sup_estimate, vertex_mismatch
from .study import run_convergence
from .tolerances import BOUNDARY_RTOL, IDENTITY_RTOL, ORDER_SLACK

THREADS_ENV = "CONIC_ARGYRIS_THREADS"
BUILTIN_DOMAINS = {"circle": testfunctions.UNIT_CIRCLE, "ellipse": testfunctions.ELLIPSE_2_1}

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def resolve_threads(arg: int | None) -> int:
    if arg is not None:
        n = arg
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise InputError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise InputError("thread count must be at least 1")
    return n


def resolve_domain(name: str) -> Domain:
    if name in BUILTIN_DOMAINS and not Path(name).exists():
        return oval_domain(BUILTIN_DOMAINS[name])
    if not Path(name).exists():
        raise InputError(f"domain {name!r} is neither a file nor one of: {', '.join(BUILTIN_DOMAINS)}")
    domain = fio.load_domain(name)
    problems = domain.check()
    if problems:
        raise InputError("invalid domain: " + "; ".join(problems))
    return domain


def generator_args(domain: Domain) -> tuple[Conic, float]:
    """The ring generator handles a region bounded by one closed elliptic arc."""
    if len(domain.arcs) != 1 or not domain.arcs[0].closed:
        raise InputError("the mesh generator supports domains bounded by a single closed conic arc")
    arc = domain.arcs[0]
    q = arc.conic
    if not q.is_bounded_oval():
        raise InputError("the mesh generator needs an ellipse")
    c = q.center()
    return q, math.atan2(arc.start[1] - c[1], arc.start[0] - c[0])


def parse_levels(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--levels expects comma-separated integers, got {text!r}") from None


def emit(lines: list[str], payload: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(payload, indent=1, default=repr) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# ---------------------------------------------------------------------------
# subcommands


def cmd_mesh(args) -> int:
    domain = resolve_domain(args.domain)
    q, angle = generator_args(domain)
    try:
        mesh = generate_disk_mesh(q, args.n, angle)
    except ValueError as exc:
        raise InputError(f"mesh generation failed: {exc}") from exc
    rep = validate(mesh)
    fio.save_mesh(args.out, mesh)
    counts = {c: len(mesh.class_ids(c)) for c in ("ordinary", "pie", "buffer")}
    lines = [f"mesh: {len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles {counts}, h = {mesh.h():.6g}"]
    lines += rep.lines()
    lines.append(f"overall {status(rep.ok)}")
    emit(lines, {"n_vertices": len(mesh.vertices), "counts": counts, "h": mesh.h(), "conditions": rep.to_dict(), "pass": rep.ok}, args.format)
    return EXIT_OK if rep.ok else EXIT_FAIL


def _load_valid_mesh(path):
    mesh = fio.load_mesh(path)
    rep = validate(mesh)
    if not rep.ok:
        raise InputError("mesh fails validation:\n" + "\n".join(rep.lines()))
    return mesh


def c1_report(s, tol: float):
    worst_v = worst_n = 0.0
    bad = []
    for e in s.mesh.interior_edges():
        dv, dn = c1_jump(s, e)
        worst_v, worst_n = max(worst_v, dv), max(worst_n, dn)
        if dv > tol or dn > tol:
            bad.append((e, dv, dn))
    return worst_v, worst_n, bad


def cmd_interpolate(args) -> int:
    mesh = _load_valid_mesh(args.mesh)
    try:
        fn = testfunctions.get(args.fn)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    try:
        s = interpolate(mesh, fn.data, threads=resolve_threads(args.threads))
    except ValueError as exc:
        raise InputError(f"{args.fn}: {exc}") from exc
    fio.save_spline(args.out, s)
    res = interpolation_residuals(s, fn.data)
    jv, jn, bad = c1_report(s, args.tol)
    ok = all(r <= args.tol for r, _ in res.values()) and not bad
    lines = [f"{k:22s} {r:.3e}  {status(r <= args.tol)}" for k, (r, _) in res.items()]
    lines.append(f"{'c1_value_jump':22s} {jv:.3e}  {status(jv <= args.tol)}")
    lines.append(f"{'c1_normal_jump':22s} {jn:.3e}  {status(jn <= args.tol)}")
    lines.append(f"overall {status(ok)}")
    payload = {"residuals": {k: r for k, (r, _) in res.items()}, "c1_value_jump": jv, "c1_normal_jump": jn, "tol": args.tol, "pass": ok}
    emit(lines, payload, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check(args) -> int:
    mesh = _load_valid_mesh(args.mesh)
    s = fio.load_spline(args.spline, mesh)
    jv, jn, bad = c1_report(s, args.tol)
    sup = sup_estimate(s)
    trace = boundary_trace(s)
    trace_ok = trace <= BOUNDARY_RTOL * sup
    vm, where = vertex_mismatch(s)
    ok = not bad and trace_ok and vm <= args.tol
    lines = [
        f"{'c1_value_jump':22s} {jv:.3e}  {status(jv <= args.tol)}",
        f"{'c1_normal_jump':22s} {jn:.3e}  {status(jn <= args.tol)}",
        f"{'boundary_trace':22s} {trace:.3e}  {status(trace_ok)}  (sup |s| ~ {sup:.3e})",
        f"{'vertex_mismatch':22s} {vm:.3e}  {status(vm <= args.tol)}" + ("" if vm <= args.tol else f"  at vertex/alpha {where}"),
    ]
    for e, dv, dn in bad:
        lines.append(f"offending edge {e}: value jump {dv:.3e}, normal jump {dn:.3e}")
    lines.append(f"overall {status(ok)}")
    payload = {
        "c1_value_jump": jv,
        "c1_normal_jump": jn,
        "offending_edges": [list(e) for e, _, _ in bad],
        "boundary_trace": trace,
        "sup_estimate": sup,
        "vertex_mismatch": vm,
        "tol": args.tol,
        "pass": ok,
    }
    emit(lines, payload, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_convergence(args) -> int:
    domain = resolve_domain(args.domain)
    q, angle = generator_args(domain)
    levels = parse_levels(args.levels)
    if len(levels) < 2:
        raise InputError("a convergence study needs at least two levels")
    try:
        fn = testfunctions.get(args.fn)
        res = run_convergence(q, levels, fn, threads=resolve_threads(args.threads), slack=args.slack, corner_angle=angle)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    text = res.to_csv() if args.format == "csv" else res.to_json()
    if args.out:
        Path(args.out).write_text(text)
    lines = [f"{'n':>5s} {'h':>10s} {'e_L2':>10s} {'e_H1':>10s} {'e_H2':>10s} {'p_L2':>6s} {'p_H1':>6s} {'p_H2':>6s} {'R':>7s}"]
    for r, e in zip(res.rows, res.extra):
        o = [("" if r[f"order_{k}"] is None else f"{r[f'order_{k}']:.2f}") for k in ("L2", "H1", "H2")]
        lines.append(f"{r['n_boundary']:5d} {r['h']:10.4e} {r['e_L2']:10.3e} {r['e_H1']:10.3e} {r['e_H2']:10.3e} {o[0]:>6s} {o[1]:>6s} {o[2]:>6s} {e['R']:7.3f}")
    for k, (obs, thr, p) in res.checks().items():
        lines.append(f"order {k} on finest pair {obs:.3f} >= {thr:.2f}  {status(p)}")
    lines.append(f"overall {status(res.ok)}")
    sys.stdout.write("\n".join(lines) + "\n")
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK if res.ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conic-argyris", description="C1 quintic interpolation on domains bounded by conics")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="text"):
        sp.add_argument("--format", choices=["text", "csv", "json"] if fmt_default == "csv" else ["text", "json"], default=fmt_default)

    m = sub.add_parser("mesh", help="generate and validate a mesh")
    m.add_argument("--domain", default="circle", help="domain JSON file or builtin name (circle, ellipse)")
    m.add_argument("--n", "--levels", dest="n", type=int, required=True, help="number of boundary vertices")
    m.add_argument("--out", required=True)
    common(m)
    m.set_defaults(func=cmd_mesh)

    i = sub.add_parser("interpolate", help="interpolate a builtin test function")
    i.add_argument("--mesh", required=True)
    i.add_argument("--fn", required=True, help=f"one of {', '.join(sorted(testfunctions.REGISTRY))}")
    i.add_argument("--out", required=True)
    i.add_argument("--tol", type=float, default=IDENTITY_RTOL)
    i.add_argument("--threads", type=int, default=None)
    common(i)
    i.set_defaults(func=cmd_interpolate)

    c = sub.add_parser("check", help="check continuity, boundary trace and vertex agreement of a spline")
    c.add_argument("--mesh", required=True)
    c.add_argument("--spline", required=True)
    c.add_argument("--tol", type=float, default=IDENTITY_RTOL)
    common(c)
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("convergence", help="convergence study over several resolutions")
    v.add_argument("--domain", default="circle")
    v.add_argument("--levels", default="16,32,64,128")
    v.add_argument("--fn", required=True)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=["csv", "json"], default="csv")
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--slack", type=float, default=ORDER_SLACK, help="allowed shortfall below the expected orders")
    v.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        testfunctions.self_check()
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, fio.FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
