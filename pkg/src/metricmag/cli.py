"""Command-line interface.

Points are numbered from 1 on the command line and in reports. Exit codes:
0 success (including a reported singularity), 1 when a verification
campaign finds a violation, 2 for bad input.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import fixtures, fourpoint, homology, inclexcl
from .core import (FiniteMetricSpace, SimilaritySpace, determinant, from_distances,
                   is_positive_definite, leading_principal_minors, magnitude_telescoped,
                   weighting)
from .errors import ConstructionError, MetricMagError, SingularityError, ValidationError
from .io import load_space, space_to_dict
from .scalar import format_scalar, parse_scalar
from .spacegen import (GeneratorConfig, find_non_posdef_5pt, four_point_subspaces_positive_definite,
                       graph_metric, random_similarity)
from .verify import THEOREMS, run_theorem

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _fmt(x):
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if isinstance(x, bool) or x is None:
        return x
    return format_scalar(x)


def _points(spec: str, n: int) -> List[int]:
    try:
        pts = [int(tok) - 1 for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise InputError(f"bad point list {spec!r}") from None
    if not pts or any(not 0 <= p < n for p in pts):
        raise InputError(f"point list {spec!r} must name points 1..{n}")
    return pts


def _pair(spec: str, n: int):
    pts = _points(spec, n)
    if len(pts) != 2 or pts[0] == pts[1]:
        raise InputError(f"--pair needs two distinct points, got {spec!r}")
    return tuple(pts)


def _similarity(args) -> SimilaritySpace:
    """Input as a similarity space in the requested arithmetic mode."""
    space = load_space(args.input)
    if isinstance(space, FiniteMetricSpace):
        if args.mode == "exact":
            raise InputError("exact mode needs a similarity file (distance input gives irrational e^-d)")
        space = from_distances(space)
    if args.mode == "float":
        space = space.to_float()
    elif args.mode == "exact" and not space.exact:
        raise InputError("exact mode needs rational 'p/q' similarity entries")
    if args.tolerance is not None:
        space = SimilaritySpace(space.Z, space.labels, args.tolerance)
    return space


def _tol(args, default):
    return default if args.tolerance is None else args.tolerance


# ---------------------------------------------------------------------------
# commands; each returns (report, exit code)

def cmd_mag(args):
    space = _similarity(args)
    w = weighting(space)
    report = {"n": space.n, "mode": "exact" if space.exact else "float",
              "magnitude": _fmt(w.magnitude), "weighting": _fmt(list(w))}
    try:
        report["magnitude_telescoped"] = _fmt(magnitude_telescoped(space))
    except SingularityError:
        report["magnitude_telescoped"] = None
    return report, EXIT_OK


def cmd_posdef(args):
    space = _similarity(args)
    return {"n": space.n, "determinant": _fmt(determinant(space)),
            "leading_minors": _fmt(leading_principal_minors(space)),
            "positive_definite": is_positive_definite(space)}, EXIT_OK


def _pair_json(pair):
    return [pair[0] + 1, pair[1] + 1]


def cmd_decompose(args):
    space = _similarity(args)
    pair = _pair(args.pair, space.n)
    pd = inclexcl.pair_decomposition(space, pair, _tol(args, 1e-10))
    report = {"pair": _pair_json(pair), "z_pair": _fmt(space.Z[pair[0]][pair[1]]),
              "b_minus": _fmt(pd.b_minus), "b_zero": _fmt(pd.b_zero),
              "delta_A": _fmt(pd.delta_A), "delta_B": _fmt(pd.delta_B),
              "delta_overlap": _fmt(pd.delta_overlap), "lhs": _fmt(pd.lhs), "rhs": _fmt(pd.rhs),
              "residual": _fmt(pd.residual)}
    if space.n == 4:
        rest = [k for k in range(4) if k not in pair]
        local = space.permuted(list(pair) + rest)
        b = fourpoint.bounds4(local)
        report["b_plus"] = _fmt(b.b_plus)
        report["cases"] = sorted(c.value for c in fourpoint.classify_case(local))
    return report, EXIT_OK


def cmd_inclexcl(args):
    space = _similarity(args)
    pair = _pair(args.pair, space.n)
    tol = _tol(args, 1e-10)
    rep = inclexcl.defect(space, pair, tol)
    comp = inclexcl.comparison_report(space, pair, _tol(args, inclexcl.GATE_TOL))
    return {"pair": _pair_json(pair), "z_pair": _fmt(rep.z_pair),
            "b_minus": _fmt(comp.b_minus), "b_zero": _fmt(rep.b_zero),
            "delta_direct": _fmt(rep.delta_direct), "delta_formula": _fmt(rep.delta_formula),
            "alpha": _fmt(rep.alpha), "beta": _fmt(rep.beta),
            "magnitudes": {k: _fmt(v) for k, v in rep.magnitudes.items()},
            "c1": comp.c1, "c2": comp.c2}, EXIT_OK


def cmd_conditions(args):
    space = load_space(args.input)
    if isinstance(space, SimilaritySpace) and args.mode == "float":
        space = space.to_float()
    A, B = _points(args.A, space.n), _points(args.B, space.n)
    rep = inclexcl.check_conditions(space, A, B, _tol(args, inclexcl.GATE_TOL))
    w = rep.witnesses
    return {
        "A": [a + 1 for a in sorted(A)], "B": [b + 1 for b in sorted(B)],
        "c1": rep.c1, "c2a": rep.c2a, "c2b": rep.c2b, "c2": rep.c2,
        "witnesses": {
            "c1_gates": [[a + 1, b + 1, c + 1] for (a, b), c in sorted(w["c1_gates"].items())],
            "c1_failures": [[a + 1, b + 1] for a, b in w["c1_failures"]],
            "c2a_projection": {str(x + 1): p + 1 for x, p in w["c2a_projection"].items()},
            "c2a_failures": [x + 1 for x in w["c2a_failures"]],
            "c2b_projection": {str(x + 1): p + 1 for x, p in w["c2b_projection"].items()},
            "c2b_failures": [x + 1 for x in w["c2b_failures"]],
        },
    }, EXIT_OK


def cmd_homology(args):
    space = load_space(args.input)
    if not isinstance(space, FiniteMetricSpace):
        raise InputError("homology needs a distance file")
    tol = _tol(args, homology.HOMOLOGY_TOL)
    try:
        requested = parse_scalar(args.ell if "/" in args.ell else float(args.ell))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad --ell {args.ell!r}") from None
    ell = requested
    lengths = set()
    for j in (args.k - 1, args.k, args.k + 1):
        if 0 <= j <= homology.MAX_SPECTRUM_DEGREE:
            lengths.update(homology.length_spectrum(space, j, tol))
    nearest = min(lengths, key=lambda v: abs(float(v) - float(requested)), default=None)
    if nearest is not None and abs(float(nearest) - float(requested)) <= args.ell_tolerance:
        ell = nearest
    res = homology.magnitude_homology(space, args.k, ell, tol)
    return {"k": res.k, "ell": _fmt(ell), "ell_requested": _fmt(requested),
            "rank": res.rank, "torsion": list(res.torsion),
            "basis_size": list(res.basis_size)}, EXIT_OK


def _gen_space(args):
    name = args.fixture
    n = 4 if args.n is None else args.n
    cfg = GeneratorConfig(args.seed, args.denominator_bound)
    if name == "q4":
        return fixtures.q4()
    if name == "mv4":
        return fixtures.mayer_vietoris()
    if name == "circle1":
        return fixtures.circle_1()
    if name == "circle2":
        return fixtures.circle_2()
    if name == "path3":
        return fixtures.path_3()
    if name == "equilateral":
        return fixtures.equilateral(n, Fraction(args.z))
    if name == "random":
        return random_similarity(n, cfg)
    if name == "graph":
        if not args.edges:
            raise InputError("--edges is required for the graph fixture")
        edges = []
        for tok in args.edges.split(","):
            parts = tok.split("-")
            if len(parts) not in (2, 3):
                raise InputError(f"bad edge {tok!r}; use u-v or u-v-weight")
            w = Fraction(parts[2]) if len(parts) == 3 else 1
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1, w))
        return graph_metric(edges, args.n)
    if name == "nonposdef5":
        return find_non_posdef_5pt(cfg).space
    raise InputError(f"unknown fixture {name!r}")


def cmd_gen(args):
    return space_to_dict(_gen_space(args)), EXIT_OK


def cmd_search5(args):
    w = find_non_posdef_5pt(GeneratorConfig(args.seed, args.denominator_bound))
    return {"graph": w.graph, "q": _fmt(w.q), "t": w.t, "determinant": _fmt(w.determinant),
            "positive_definite": is_positive_definite(w.space),
            "four_point_subspaces_positive_definite": four_point_subspaces_positive_definite(w.space),
            "space": space_to_dict(w.space)}, EXIT_OK


def cmd_verify(args):
    report = run_theorem(args.theorem, args.samples, args.seed, args.denominator_bound, args.workers)
    return report.to_dict(), EXIT_OK if report.ok else EXIT_VERDICT


COMMANDS = {
    "mag": cmd_mag, "posdef": cmd_posdef, "decompose": cmd_decompose,
    "inclexcl": cmd_inclexcl, "conditions": cmd_conditions, "homology": cmd_homology,
    "gen": cmd_gen, "verify": cmd_verify, "search5": cmd_search5,
}
FIXTURES = ("q4", "mv4", "circle1", "circle2", "path3", "equilateral", "random", "graph",
            "nonposdef5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metricmag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text)
        if needs_input:
            p.add_argument("--input", required=True, help="space file (JSON)")
        p.add_argument("--mode", choices=("exact", "float", "auto"), default="auto")
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    add("mag", "magnitude and weighting")
    add("posdef", "determinant, leading minors, positive definiteness")
    add("decompose", "determinant decomposition for a pair").add_argument("--pair", default="1,2")
    add("inclexcl", "inclusion-exclusion defect for a pair").add_argument("--pair", default="1,2")
    p = add("conditions", "gating conditions C1/C2 for a cover A, B")
    p.add_argument("--A", required=True, help="comma-separated points, e.g. 1,3,4")
    p.add_argument("--B", required=True)
    p = add("homology", "magnitude homology rank at (k, ell)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", required=True, help="length, decimal or p/q")
    p.add_argument("--ell-tolerance", type=float, default=1e-4,
                   help="snap --ell to a chain length within this distance")
    p = add("gen", "write a space file", needs_input=False)
    p.add_argument("--fixture", choices=FIXTURES, default="random")
    p.add_argument("--n", type=int, default=None, help="number of points (default 4)")
    p.add_argument("--z", default="1/2", help="equilateral similarity")
    p.add_argument("--edges", help="graph edges u-v[-w], comma separated, 1-based")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--denominator-bound", type=int, default=64)
    p = add("verify", "run a randomized verification suite", needs_input=False)
    p.add_argument("--theorem", choices=sorted(THEOREMS), required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--denominator-bound", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p = add("search5", "search a 5-point space that is not positive definite", needs_input=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--denominator-bound", type=int, default=64)
    return parser


def _csv(report: dict) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "key", "value"])

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for i, v in enumerate(value):
                walk(f"{prefix}[{i}]", v)
        else:
            section, _, key = prefix.rpartition(".")
            writer.writerow([section, key, json.dumps(value) if isinstance(value, list) else value])

    walk("", report)
    return buf.getvalue()


def _emit(report, args):
    text = _csv(report) if args.format == "csv" else json.dumps(report, indent=2, ensure_ascii=False)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = COMMANDS[args.command](args)
    except SingularityError as exc:
        report = {"error": {"type": "singularity", "what": exc.what, "message": str(exc)}}
        code = EXIT_OK
    except (InputError, ValidationError, ConstructionError, ValueError) as exc:
        kind = "construction" if isinstance(exc, ConstructionError) else "input"
        print(f"metricmag {args.command}: {exc}", file=sys.stderr)
        report = {"error": {"type": kind, "message": str(exc),
                            "location": getattr(exc, "location", None)}}
        code = EXIT_INPUT
    except MetricMagError as exc:
        print(f"metricmag {args.command}: {exc}", file=sys.stderr)
        report = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        code = EXIT_INPUT
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
