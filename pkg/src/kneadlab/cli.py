"""Batch command-line frontend.

Every subcommand resolves a family (shorthand, kind name or JSON), runs one
module pipeline and writes a single deterministic document.  Exit codes:
0 on success, 2 when the computation finished with a negative verdict,
1 when it could not be carried out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from . import kneading as kn
from . import motionlab as ml
from . import plmaps as pl
from . import solver as sv
from . import transfer as tf
from . import transversality as tv
from .errors import KneadlabError, VerdictNegative, ZeroDeterminant
from .families import (
    Family,
    LorenzAffine,
    PowerLaw,
    family_from_json,
    flat_beta,
    make_family,
)

FORMATS = ("json", "csv", "plotdata")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def _clean(x):
    """Make numpy and complex values JSON friendly."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    return x


def emit_plotdata(blocks) -> str:
    """Two-column blocks separated by one blank line.  No blocks, no text."""
    out = []
    for block in blocks:
        if not block:
            continue
        out.append("\n".join(f"{float(a)!r} {float(b)!r}" for a, b in block))
    return "\n\n".join(out) + ("\n" if out else "")


def emit_csv(records: list[dict], knobs: dict) -> str:
    if not records:
        return ""
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={_clean(v)}" for k, v in sorted(knobs.items())) + "\n")
    cols = list(records[0])
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: json.dumps(_clean(v)) if isinstance(v, (list, dict)) else _clean(v) for k, v in r.items()})
    return buf.getvalue()


def emit_json(command: str, knobs: dict, doc: dict) -> str:
    body = {"command": command, "knobs": knobs, **doc}
    return json.dumps(_clean(body), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# family and parameter resolution


def _floats(text: Optional[str]) -> Optional[list[float]]:
    if text is None:
        return None
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def load_family(args) -> tuple[Family, Optional[np.ndarray], dict]:
    if args.family_json:
        src = args.family_json
        obj = json.loads(src) if src.lstrip().startswith("{") else json.load(open(src))
        fam, params = family_from_json(obj)
        return fam, params, obj
    if not args.family:
        raise UsageError("one of --family or --family-json is required")
    return make_family(args.family), None, {"kind": args.family}


def default_bracket(fam: Family) -> tuple[float, float]:
    if fam.kind == "PowerUnimodal":
        return (-2.0, 0.25)
    if fam.kind == "PowerLaw":
        return (-(2.0 ** (1.0 / (fam.ell - 1.0))) if fam.ell > 1 else -2.0, 0.0)
    if fam.kind == "FlatExp":
        return (-flat_beta(fam.ell, fam.b), 0.0)
    if fam.kind == "MultiplicativeClassE":
        return (1.6, 3.1)
    raise UsageError(f"no default bracket for {fam.kind}; pass --from and --to")


def bracket(args, fam: Family) -> tuple[float, float]:
    lo, hi = default_bracket(fam) if args.start is None or args.stop is None else (None, None)
    lo = args.start if args.start is not None else lo
    hi = args.stop if args.stop is not None else hi
    return float(lo), float(hi)


def parse_relations(text: str) -> list[sv.Relation]:
    rels = []
    for item in text.split(","):
        parts = [int(p) for p in item.split(":")]
        rels.append(sv.Relation(*parts))
    return rels


def parse_box(text: str):
    v = _floats(text)
    if len(v) != 4:
        raise UsageError("--box needs a0,a1,b0,b1")
    return [(v[0], v[1]), (v[2], v[3])]


LORENZ_DEFAULT = ("0:2,1:3", "1.05,2.0,-0.9,0.9")
NEWTON_TOL = 1e-10


def resolve_params(args, fam: Family, preset) -> tuple[np.ndarray, dict]:
    """Parameters from --params, the family JSON, --word, --period or --relations."""
    if args.params is not None:
        return fam.check_params(_floats(args.params)), {"source": "given"}
    if preset is not None:
        return fam.check_params(preset), {"source": "family-json"}
    if fam.param_dim == 1:
        lo, hi = bracket(args, fam)
        if args.word:
            return np.array([sv.solve_word(fam, args.word, (lo, hi))]), {"source": "word", "bracket": [lo, hi]}
        if args.period:
            c = sv.solve_superstable_1d(fam, args.period, (lo, hi), args.subintervals)
            return np.array([c]), {"source": "period", "bracket": [lo, hi]}
        raise UsageError("pass --params, --word or --period")
    if fam.param_dim == 2:
        rel_text = args.relations or (LORENZ_DEFAULT[0] if isinstance(fam, LorenzAffine) else None)
        box_text = args.box or (LORENZ_DEFAULT[1] if isinstance(fam, LorenzAffine) else None)
        if rel_text is None or box_text is None:
            raise UsageError("pass --params or --relations with --box")
        res = sv.solve_2d_from_scan(fam, parse_relations(rel_text), parse_box(box_text), args.grid, NEWTON_TOL)
        return res.params, {"source": "relations", "relations": rel_text, "box": box_text, "newton_tol": NEWTON_TOL,
                            "residual": res.residual, "iterations": res.iterations}
    raise UsageError("pass --params")


# ---------------------------------------------------------------------------
# subcommands; each returns (knobs, doc, records, plot blocks, negative?)


def cmd_solve(args):
    fam, preset, fj = load_family(args)
    knobs = {"family": fj}
    if fam.param_dim == 2:
        knobs["newton_tol"] = NEWTON_TOL
        params, info = resolve_params(args, fam, None)
        rec = {"params": params.tolist(), "residual": info["residual"], "iterations": info["iterations"]}
        knobs.update(relations=info["relations"], box=info["box"], grid=args.grid)
        return knobs, {"records": [rec]}, [rec], [], False
    lo, hi = bracket(args, fam)
    knobs.update(bracket=[lo, hi], subintervals=args.subintervals, residual_tol=sv.RESIDUAL_TOL)
    x0 = fam.critical([0.5 * (lo + hi)])[0].point.value
    if args.word:
        knobs["word"] = args.word
        roots = [sv.solve_word(fam, args.word, (lo, hi))]
        q = len(args.word)
    elif args.period:
        knobs["period"] = args.period
        q = args.period
        roots = sv.superstable_roots(fam, q, (lo, hi), args.subintervals)
    else:
        raise UsageError("solve needs --period or --word")
    recs = []
    for c in roots:
        ys, _ = sv._orbit_with_dc(fam, c, x0, q)
        # the grid + bracketing root finder does not expose an iteration count
        recs.append({"param": c, "residual": abs(ys[q] - x0), "iterations": None,
                     "word": str(kn.kneading(fam, [c], q))})
    return knobs, {"records": recs}, recs, [[(c, r["residual"]) for c, r in zip(roots, recs)]], False


def cmd_knead(args):
    fam, preset, fj = load_family(args)
    params, info = resolve_params(args, fam, preset)
    n = (64 if args.steps is None else args.steps)
    k = kn.kneading(fam, params, n)
    doc = {"params": params.tolist(), "word": str(k), "resolved": info}
    if isinstance(k, kn.KneadingSequence):
        doc.update(period=k.period, truncated=k.truncated)
    rec = {"params": params.tolist(), "word": str(k)}
    return {"family": fj, "length": n}, doc, [rec], [], False


def _kneading_at(fam, prefix):
    return lambda c: kn.kneading(fam, [c], prefix)


def cmd_scan(args):
    fam, _, fj = load_family(args)
    lo, hi = bracket(args, fam)
    steps = (2001 if args.steps is None else args.steps)
    prefix = args.prefix
    grid = [lo + (hi - lo) * i / (steps - 1) if steps > 1 else lo for i in range(steps)]
    with ThreadPoolExecutor(max_workers=ml._threads()) as pool:
        words = list(pool.map(_kneading_at(fam, prefix), grid))
    recs = []
    greater = 0
    for i, (c, k) in enumerate(zip(grid, words)):
        cmp = None if i == 0 else kn.mt_compare(words[i - 1], k).value
        greater += cmp == kn.Order.GREATER.value
        recs.append({"param": c, "word": str(k), "compare_to_prev": cmp})
    ranks = {w: n for n, w in enumerate(sorted({r["word"] for r in recs}))}
    block = [(r["param"], ranks[r["word"]]) for r in recs]
    knobs = {"family": fj, "from": lo, "to": hi, "steps": steps, "prefix": prefix}
    doc = {"records": recs, "greater_transitions": greater}
    return knobs, doc, recs, [block], greater > 0


def _orbit(args):
    fam, preset, fj = load_family(args)
    params, info = resolve_params(args, fam, preset)
    args.tol = sv.default_tol(fam) if args.tol is None else args.tol
    orbit = sv.marked_orbit(fam, params, args.tol)
    return fam, fj, params, info, orbit


def cmd_trans(args):
    fam, fj, params, info, orbit = _orbit(args)
    rep = tv.report(orbit)
    rep["resolved"] = info
    try:
        ok, q = tv.positively_oriented(orbit)
        rep["positively_oriented"] = ok
    except ZeroDeterminant as exc:
        rep["positively_oriented"] = None
        rep["finding"] = str(exc)
    knobs = {"family": fj, "period": args.period, "word": args.word, "tol": args.tol,
             "zero_det_threshold": tv.ZERO_DET}
    rec = {"params": params.tolist(), "quotient": rep["quotient"], "verdict": rep["verdict"]}
    return knobs, rep, [rec], [], not rep["verdict"]


def cmd_spectrum(args):
    fam, fj, params, info, orbit = _orbit(args)
    A = tf.build_A(orbit)
    AJ = tf.build_AJ(orbit)
    doc = {"params": params.tolist(), "orbit": orbit.summary(), "resolved": info,
           "A": tf.matrix_to_json(A), "A_J": tf.matrix_to_json(AJ),
           "exceptional": tv.exceptional_values(orbit)}
    recs = [{"index": n, "re": z.real, "im": z.imag, "modulus": abs(z)} for n, z in enumerate(A.eigenvalues)]
    block = [(z.real, z.imag) for z in A.eigenvalues]
    return {"family": fj, "tol": args.tol}, doc, recs, [block], False


def cmd_lift(args):
    fam, fj, params, info, orbit = _orbit(args)
    rmax = args.rmax if args.rmax is not None else 0.3
    motion = ml.make_motion(orbit, args.sigma, args.seed, args.rays, args.radii, rmax, mode=args.mode)
    k = (30 if args.steps is None else args.steps)
    d, rate = ml.iterate_lifts(motion, orbit, k)
    A = tf.build_A(orbit)
    col_err = float(np.abs(ml.lift_derivative(ml.lift_motion(motion, orbit))
                           - A.matrix @ ml.lift_derivative(motion)).max())
    recs = [{"k": n + 1, "d": x} for n, x in enumerate(d)]
    block = [(n + 1, math.log(x)) for n, x in enumerate(d) if x > 0]
    knobs = {"family": fj, "tol": args.tol, "steps": k, "seed": args.seed, "sigma": args.sigma, "rmax": rmax,
             "rays": args.rays, "radii": args.radii, "mode": args.mode}
    doc = {"params": params.tolist(), "resolved": info, "records": recs, "decay_rate": rate,
           "spectral_radius": A.spectral_radius, "lift_vs_operator_max_error": col_err}
    return knobs, doc, recs, [block], False


def cmd_sectors(args):
    ell = args.ell if args.ell is not None else 60.0
    theta = args.theta if args.theta is not None else 0.05
    rmax = args.rmax if args.rmax is not None else 0.1
    word = args.word or "-++0"
    fam = PowerLaw(ell, ell)
    lo, hi = (args.start, args.stop) if args.start is not None else default_bracket(fam)
    c = sv.solve_word(fam, word, (lo, hi))
    res = ml.sector_lift_experiment(fam, c, theta, args.sigma, rmax, args.rays, args.radii, args.seed)
    knobs = {"ell": ell, "theta": theta, "word": word, "rmax": rmax, "rays": args.rays,
             "radii": args.radii, "seed": args.seed, "sigma": args.sigma, "bracket": [lo, hi]}
    recs = [{"lift": s["lift"], "theta_regular": s["theta_regular"], "A1": s["A1"], "A2": s["A2"]}
            for s in res["lifts"]]
    ok = res["initial_theta_regular"] and res["all_lifts_theta_regular"] and res["final_half_regular"]
    block = [(s["lift"], min(s["A1"], s["A2"])) for s in res["lifts"]]
    return knobs, res, recs, [block], not ok


def _pl_spec(args) -> pl.PLSpec:
    if args.t is not None:
        return pl.tent_spec(args.t)
    if args.family_json:
        src = args.family_json
        obj = json.loads(src) if src.lstrip().startswith("{") else json.load(open(src))
        return pl.PLSpec.from_json(obj)
    v = _floats(args.v)
    if v is None:
        raise UsageError("pl needs --t, --v (with --kappa) or --family-json")
    kappa = _floats(args.kappa) or [1.0] * (len(v) + 1)
    return pl.pl_from_values(args.eps, len(v), kappa, v)


def cmd_pl(args):
    spec = _pl_spec(args)
    mk = pl.pl_markov_matrix(spec)
    orbit = sv.marked_orbit(spec.family(), list(spec.v))
    doc = {"spec": spec.to_json(), "s": spec.s, "turning_points": spec.c, "slopes": spec.slopes,
           "partition": pl.partition(spec), "A": mk["A"], "widths": mk["widths"],
           "eigen_residual": mk["residual"], "det_I_minus_A_over_s": mk["det"],
           "ergodic": pl.pl_ergodic(spec), "exceptional": tv.exceptional_values(orbit),
           "entropy": math.log(spec.s)}
    negative = False
    try:
        ok, q = tv.positively_oriented(orbit)
        doc.update(positively_oriented=ok, quotient=q)
        negative = not ok
    except ZeroDeterminant as exc:
        doc.update(positively_oriented=None, finding=str(exc))
        negative = True
    recs = [{"a": a, "b": b, "width": b - a} for a, b in doc["partition"]]
    return {"t": args.t, "eps": spec.eps, "kappa": list(spec.kappa), "v": list(spec.v)}, doc, recs, [], negative


def cmd_lorenz(args):
    if not args.family and not args.family_json:
        args.family = "lorenz"
    fam, preset, fj = load_family(args)
    if fam.param_dim != 2:
        raise UsageError("lorenz needs a two-parameter Lorenz family")
    params, info = resolve_params(args, fam, preset)
    defo = fam.deformation(params)
    r = pl.lorenz_R(fam, defo.base_w, params)
    args.tol = sv.default_tol(fam) if args.tol is None else args.tol
    orbit = sv.marked_orbit(fam, params, args.tol)
    A = tf.build_A(orbit)
    doc = {"params": params.tolist(), "resolved": info, "R": r["R"], "jacobian": r["jacobian"],
           "cond": r["cond"], "quotient": r["quotient"], "positive": r["positive"],
           "orbit": orbit.summary(), "spectral_radius": A.spectral_radius,
           "eigenvalues": A.eigenvalues}
    rec = {"params": params.tolist(), "quotient": r["quotient"], "positive": r["positive"]}
    return {"family": fj, "tol": args.tol, "grid": args.grid}, doc, [rec], [], not r["positive"]


def parse_ell_range(text: str) -> list[int]:
    if ".." in text:
        a, b = (int(t) for t in text.split(".."))
        return [e for e in range(a, b + 1) if e % 2 == 1 and e >= 3]
    return [int(t) for t in text.split(",")]


def cmd_constants(args):
    ells = parse_ell_range(args.odd_ell)
    recs = []
    for ell in ells:
        theta, R, margin = ml.odd_constants(ell)
        recs.append({"ell": ell, "theta": theta, "R": R, "residual": ml.R_residual(R, ell), "margin": margin})
    block = [(r["ell"], r["margin"]) for r in recs]
    return {"odd_ell": args.odd_ell}, {"records": recs}, recs, [block], any(r["margin"] <= 0 for r in recs)


def cmd_separation(args):
    fam, _, fj = load_family(args)
    ok, rep = ml.separation_check(fam)
    return {"family": fj}, rep, [rep], [], not ok


COMMANDS = {
    "solve": cmd_solve, "knead": cmd_knead, "scan": cmd_scan, "trans": cmd_trans,
    "spectrum": cmd_spectrum, "lift": cmd_lift, "sectors": cmd_sectors, "pl": cmd_pl,
    "lorenz": cmd_lorenz, "constants": cmd_constants, "separation": cmd_separation,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kneadlab", description="Transversality and kneading experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="shorthand (quad, flat, sin, tent, lorenz, ...) or kind name")
    common.add_argument("--family-json", help="JSON text or path: {kind, shape, params}")
    common.add_argument("--params", help="comma separated parameter values")
    common.add_argument("--period", type=int)
    common.add_argument("--word", help="kneading word over -, 0, + ending in 0")
    common.add_argument("--steps", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float)
    common.add_argument("--rmax", type=float)
    common.add_argument("--rays", type=int, default=ml.DEFAULT_RAYS)
    common.add_argument("--radii", type=int, default=ml.DEFAULT_RADII)
    common.add_argument("--theta", type=float)
    common.add_argument("--ell", type=float)
    common.add_argument("--sigma", type=float, default=1e-3)
    common.add_argument("--mode", choices=("real", "complex"), default="real")
    common.add_argument("--from", dest="start", type=float)
    common.add_argument("--to", dest="stop", type=float)
    common.add_argument("--prefix", type=int, default=40)
    common.add_argument("--subintervals", type=int, default=10_000)
    common.add_argument("--relations", help="2D relations crit:q[:target],...")
    common.add_argument("--box", help="2D seed box a0,a1,b0,b1")
    common.add_argument("--grid", type=int, default=60, help="2D seed grid size")
    common.add_argument("--odd-ell", default="3..31")
    common.add_argument("--t", type=float, help="tent slope for the pl subcommand")
    common.add_argument("--eps", type=int, default=1)
    common.add_argument("--kappa")
    common.add_argument("--v")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--out")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        knobs, doc, recs, blocks, negative = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kneadlab {args.command}: {exc}", file=sys.stderr)
        return 1
    except VerdictNegative as exc:
        print(f"kneadlab {args.command}: negative verdict: {exc}", file=sys.stderr)
        return 2
    except (KneadlabError, ValueError, OSError) as exc:
        print(f"kneadlab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        text = emit_json(args.command, knobs, doc)
    elif args.format == "csv":
        text = emit_csv(recs, knobs)
    else:
        text = emit_plotdata(blocks)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 2 if negative else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
