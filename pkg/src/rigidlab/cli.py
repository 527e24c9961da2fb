"""Command-line surface: analyze / splits / interp / witness / measure /
verify-dichotomy / gaussian / demo / behrend.

Exit codes: 0 success, 1 I/O or parse failure, 2 precondition violation,
3 cap exceeded or search exhausted.  Errors go to stderr as one JSON object.
Exact rationals serialize as "p/q" strings; floating-point outputs carry an
"approx" marker.  Identical configurations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import behrend as bh
from . import deciders as dec
from . import demos
from . import families as fm
from . import gaussians as ga
from . import lattice as lat
from . import measure as ms
from .errors import (
    CapExceeded,
    ParseError,
    PreconditionError,
    RigidlabError,
    SearchExhausted,
)
from .schedule import Schedule



_FAMILY_KEYS = {
    "polynomial": {"kind", "polys"},
    "beatty": {"kind", "alphas", "independent"},
    "explicit": {"kind", "values", "relations"},
}


_TERM_RE = re.compile(r"\s*([+-]?)\s*(\d+)?\s*\*?\s*(n)?\s*(?:\^\s*(\d+))?\s*")


def parse_poly_expr(text: str) -> list[int]:
    """Ascending integer coefficient vector of terms like '2n^3-n+5'."""
    coeffs: dict[int, int] = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("expected a term", pos)
        sign_s, coeff_s, var, exp_s = m.groups()
        if coeff_s is None and var is None:
            raise ParseError("expected a coefficient or 'n'", pos)
        if not first and not sign_s:
            raise ParseError("terms must be joined by '+' or '-'", pos)
        if exp_s is not None and var is None:
            raise ParseError("exponent without 'n'", pos)
        sign = -1 if sign_s == "-" else 1
        coeff = int(coeff_s) if coeff_s is not None else 1
        degree = 0
        if var:
            degree = int(exp_s) if exp_s is not None else 1
        coeffs[degree] = coeffs.get(degree, 0) + sign * coeff
        pos = m.end()
        first = False
    if first:
        raise ParseError("empty polynomial", 0)
    top = max(coeffs)
    return [coeffs.get(d, 0) for d in range(top + 1)]


def load_family(path: str) -> fm.SequenceFamily:
    with open(path) as fh:
        obj = json.load(fh)
    kind = obj.get("kind")
    if kind not in _FAMILY_KEYS:
        raise PreconditionError(f"unknown family kind {kind!r}")
    extra = set(obj) - _FAMILY_KEYS[kind]
    if extra:
        raise PreconditionError(f"unknown keys in family spec: {sorted(extra)}")
    if kind == "polynomial":
        return fm.polynomial_family(obj["polys"])
    if kind == "beatty":
        return fm.beatty_family(obj["alphas"], obj["independent"])
    relations = obj.get("relations")
    return fm.explicit_family(
        obj["values"],
        None if relations is None else lat.Lattice.from_json(relations),
    )


def _json_out(obj, path: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_out(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_subset(text: str | None) -> set[int] | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return set()
    return {int(x) for x in text.split(",")}


def _fmt_subset(F) -> str:
    return "{" + " ".join(str(j) for j in sorted(F)) + "}"


def cmd_analyze(args) -> int:
    fam = load_family(args.family)
    out = {"size": fam.size, "kind": fam.kind}
    A = fm.relation_group(fam)
    out["relation_group"] = A.to_json()
    if fam.kind == fm.EXPLICIT:
        out["provenance"] = "user-asserted"
    else:
        verdict = fm.is_adequate(fam)
        out["adequate"] = bool(verdict)
        if verdict.certificate:
            out["adequacy_certificate"] = list(verdict.certificate)
    out["coordinate_gcds"] = [
        lat.coordinate_image_gcd(A, j) for j in range(1, fam.size + 1)
    ]
    interp = dec.interpolation_condition(fam)
    out["interpolation"] = bool(interp)
    _json_out(out, args.out)
    return 0


def cmd_splits(args) -> int:
    fam = load_family(args.family)
    F = _parse_subset(args.F)
    if F is not None:
        table = {frozenset(F): dec.split_feasible(fam, F)}
    else:
        table = dec.all_splits(fam)
    header = "F,feasible,witness_vector,witness_coordinate"
    if args.witness:
        header += ",witness_group"
    lines = [header]
    for key in sorted(table, key=lambda s: (len(s), sorted(s))):
        v = table[key]
        wv = "" if v.witness_vector is None else " ".join(map(str, v.witness_vector))
        wc = "" if v.witness_coordinate is None else str(v.witness_coordinate)
        row = f"{_fmt_subset(key)},{str(v.feasible).lower()},{wv},{wc}"
        if args.witness:
            group = ""
            if v.feasible:
                H = dec.split_witness_group(fam, key)
                group = " ".join(
                    "(" + " ".join(map(str, r)) + ")" for r in H.basis
                )
            row += f",{group}"
        lines.append(row)
    _csv_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_interp(args) -> int:
    fam = load_family(args.family)
    verdict = dec.interpolation_condition(fam)
    out = {"holds": bool(verdict)}
    if verdict.witness_vector is not None:
        out["witness_vector"] = list(verdict.witness_vector)
        out["witness_coordinate"] = verdict.witness_coordinate
    _json_out(out, args.out)
    return 0


def cmd_witness(args) -> int:
    fam = load_family(args.family)
    F = _parse_subset(args.F) or set()
    H = dec.split_witness_group(fam, F)
    _json_out(
        {"F": sorted(F), "H": H.to_json(), "index": lat.index_in_ambient(H)},
        args.out,
    )
    return 0


def cmd_measure(args) -> int:
    fam = load_family(args.family)
    with open(args.group) as fh:
        G = lat.Lattice.from_json(json.load(fh))
    sigma, sched, red, g_tilde = ms.build_measure_for_group(
        fam, G, args.depth, args.samples, args.seed
    )
    bundle = {
        "family": json.load(open(args.family)),
        "group": G.to_json(),
        "schedule": sched.to_json(),
        "image_group": g_tilde.to_json(),
        "scale": red.scale,
        "subfamily_indices": list(red.indices),
        "sigma": sigma.to_json(),
        "samples": args.samples,
        "seed": args.seed,
    }
    _json_out(bundle, args.out)
    return 0


def _load_bundle(path: str):
    with open(path) as fh:
        bundle = json.load(fh)
    fam = _family_from_obj(bundle["family"])
    G = lat.Lattice.from_json(bundle["group"])
    sched = Schedule.from_json(bundle["schedule"])
    sigma = ms.AtomicMeasure.from_json(bundle["sigma"])
    return bundle, fam, G, sched, sigma


def _family_from_obj(obj) -> fm.SequenceFamily:
    kind = obj.get("kind")
    if kind == "polynomial":
        return fm.polynomial_family(obj["polys"])
    if kind == "beatty":
        return fm.beatty_family(obj["alphas"], obj["independent"])
    relations = obj.get("relations")
    return fm.explicit_family(
        obj["values"],
        None if relations is None else lat.Lattice.from_json(relations),
    )


def cmd_verify_dichotomy(args) -> int:
    bundle, fam, G, sched, sigma = _load_bundle(args.sigma)
    report = ms.verify_dichotomy(sigma, sched, fam, G, args.bound, args.tol)
    _csv_out(report.to_csv(), args.out)
    top = sched.depth
    return 0 if report.passes(top) else 2


def cmd_gaussian(args) -> int:
    interval = (float(args.lo), float(args.hi))
    if args.rho is not None:
        mass = ga.gaussian_pair_mass(args.rho, interval, interval)
        _json_out({"rho": args.rho, "mass": mass, "approx": True}, args.out)
        return 0
    bundle, fam, G, sched, sigma = _load_bundle(args.sigma)
    report = ga.verify_gaussian_transfer(sigma, sched, fam, G, interval, args.tol)
    rows = [
        {
            "coordinate": r.coordinate,
            "level": r.level,
            "rho": r.rho,
            "mass": r.mass,
            "target": r.target,
            "rigid": r.rigid,
            "deviation": r.deviation,
        }
        for r in report.rows
    ]
    _json_out({"rows": rows, "approx": True, "passes": report.passes(sched.depth)}, args.out)
    return 0 if report.passes(sched.depth) else 2


def cmd_behrend(args) -> int:
    B = bh.behrend_set(args.ell)
    value, bound = bh.verify_behrend(B, args.ell)
    _json_out(
        {
            "ell": args.ell,
            "set": B.to_json(),
            "measure": str(B.measure()),
            "triple_integral": str(value),
            "bound": str(bound),
            "passes": value <= bound,
        },
        args.out,
    )
    return 0


def _scan_csv(scan) -> str:
    lines = ["alpha,n_alpha,correlation,threshold,stderr,verdict"]
    for p in scan.points:
        alpha = " ".join(str(i) for i in p.alpha)
        lines.append(
            f"{alpha},{p.value},{p.correlation:.12g},{scan.threshold:.12g},"
            f"{p.stderr:.12g},{p.verdict}"
        )
    return "\n".join(lines) + "\n"


def cmd_demo(args) -> int:
    polys = [parse_poly_expr(p) for p in args.polys.split(",")] if args.polys else None
    # the Behrend-target demos need deeper tails before the free-coordinate
    # discretization spike mu(B)/k! clears their small thresholds
    depth = args.depth if args.depth is not None else (6 if args.which == "cor65" else 7)
    k0_max = args.k0_max if args.k0_max is not None else (3 if args.which == "cor65" else 5)
    if args.which == "cor65":
        if polys is None:
            raise PreconditionError("--polys is required for cor65")
        report = demos.cor65_demo(
            args.ell, polys, depth, args.samples, args.seed, k0_max=k0_max
        )
    elif args.which == "cor66":
        p = parse_poly_expr(args.p)
        q = parse_poly_expr(args.q)
        report = demos.cor66_demo(
            p, q, args.ell, depth, args.samples, args.seed, k0_max=k0_max
        )
    else:
        primes = [int(x) for x in args.primes.split(",")]
        report = demos.cor67_demo(
            args.ell, primes, depth, args.samples, args.seed, k0_max=k0_max
        )
    _json_out(report.to_json(), args.out)
    if args.scan_csv and hasattr(report, "scans") and report.cutoff is not None:
        _csv_out(_scan_csv(report.scans[report.cutoff]), args.scan_csv)
    return 0 if report.passed else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rigidlab",
        description="exact mixing/rigidity deciders and torus measure simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", help="relation group, adequacy, gcd summary")
    p.add_argument("family")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("splits", help="feasibility of rigidity subsets F")
    p.add_argument("family")
    p.add_argument("--F", help="comma-separated indices; omit for the full table")
    p.add_argument("--witness", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_splits)
    p = sub.add_parser("interp", help="interpolation condition")
    p.add_argument("family")
    p.add_argument("--out")
    p.set_defaults(func=cmd_interp)
    p = sub.add_parser("witness", help="finite-index witness group for F")
    p.add_argument("family")
    p.add_argument("--F", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_witness)
    p = sub.add_parser("measure", help="build the sampled torus measure")
    p.add_argument("family")
    p.add_argument("--group", required=True)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_measure)
    p = sub.add_parser("verify-dichotomy", help="Fourier dichotomy report")
    p.add_argument("sigma")
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--tol", type=float, default=0.15)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_dichotomy)
    p = sub.add_parser("gaussian", help="pair masses / Gaussian transfer")
    p.add_argument("--sigma")
    p.add_argument("--rho", type=float)
    p.add_argument("--lo", type=float, default=-1.0)
    p.add_argument("--hi", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gaussian)
    p = sub.add_parser("behrend", help="progression-poor interval set")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_behrend)
    p = sub.add_parser("demo", help="counterexample demos")
    p.add_argument("which", choices=("cor65", "cor66", "cor67"))
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--polys", help="comma-separated polynomials, e.g. 'n,n^2'")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--primes", default="2,3,5,7,11,13")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--k0-max", type=int, default=None, dest="k0_max")
    p.add_argument("--out")
    p.add_argument("--scan-csv", dest="scan_csv")
    p.set_defaults(func=cmd_demo)
    return parser


def run(argv=None) -> int:
    threads = os.environ.get("RIGIDLAB_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            sys.stderr.write(
                json.dumps({"error": "RIGIDLAB_THREADS must be a positive integer"})
                + "\n"
            )
            return 1
        # The implementation is single-threaded, so any positive bound holds.
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CapExceeded, SearchExhausted) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}) + "\n"
        )
        return 3
    except (PreconditionError, ParseError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}) + "\n"
        )
        return 2
    except RigidlabError as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}) + "\n"
        )
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}) + "\n"
        )
        return 1


def main() -> None:
    sys.exit(run())
if __name__ == "__main__":
    main()
