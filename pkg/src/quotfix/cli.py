"""Command line front end.

One subcommand per library operation, JSON in and JSON out (CSV and DOT as
lossy views where they make sense). Output is deterministic for fixed inputs
and seeds. Exit codes: 0 success, 2 bad input, 3 resource limit, 1 anything
else.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import charfn as cf
from . import fixtures as fx
from . import incidence as inc
from . import realize as rz
from . import schemegeo as sg
from . import verify as vf
from .errors import ResourceLimitError, ValidationError

# Caps passed to the library unless overridden per call.
DEFAULT_CAP = int(os.environ.get("QUOTFIX_CAP", 10**6))


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_json(path: str) -> dict:
    try:
        obj = json.loads(_read_input(path))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return obj


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _load_chi(path: str):
    return cf.charfn_from_json(_load_json(path))


def _chi_or_structure(path: str):
    """Accepts either serialized form; returns ("chi", f) or ("structure", S)."""
    obj = _load_json(path)
    if "parts" in obj:
        return "structure", inc.structure_from_json(obj)
    return "chi", cf.charfn_from_json(obj)


def _resolve_r(args, chi) -> int:
    """Explicit --r wins; padded functions carry their own bound."""
    if args.r is not None:
        return args.r
    if isinstance(chi, cf.PaddedCharFn):
        return chi.rank
    raise ValidationError("--r is required for this input")


def _to_plain_structure(S):
    return S.structure if isinstance(S, inc.ChiStructure) else S


# ---------------------------------------------------------------------------
# Subcommand handlers. Each takes parsed args and returns an exit code.


def _cmd_enumerate(args) -> int:
    found = cf.enumerate_charfns(args.r, args.d, args.n, cap=args.cap)
    if args.format == "csv":
        w = csv.writer(sys.stdout)
        for chi in found:
            cells = "; ".join(
                " ".join(map(str, p)) + ":" + str(v)
                for p, v in sorted(chi.entries.items())
            )
            w.writerow([chi.weight(), cells])
        return 0
    _emit(
        {
            "params": {"r": args.r, "d": args.d, "n": args.n},
            "count": len(found),
            "functions": [cf.charfn_to_json(chi) for chi in found],
        }
    )
    return 0


def _cmd_structure(args) -> int:
    chi = _load_chi(args.infile)
    cs = inc.build_S_chi(chi, _resolve_r(args, chi))
    if args.format == "dot":
        sys.stdout.write(inc.structure_to_dot(cs.structure))
        return 0
    _emit(inc.structure_to_json(cs.structure))
    return 0


def _cmd_regions(args) -> int:
    chi = _load_chi(args.infile)
    _emit(rz.regions_to_json(rz.chi_to_regions(chi, _resolve_r(args, chi))))
    return 0


def _cmd_realize(args) -> int:
    text = _read_input(args.infile)
    if text.lstrip().startswith("{"):
        G = inc.structure_from_json(json.loads(text))
    else:
        G = rz.parse_graph_text(text)
    r = args.r if args.r is not None else G.rank + 1
    chi = rz.graph_to_chi(G, args.d, r, cap=args.cap)
    _emit(cf.charfn_to_json(chi))
    return 0


def _cmd_intervals(args) -> int:
    kind, val = _chi_or_structure(args.infile)
    if kind == "chi":
        S = inc.build_S_chi(val, _resolve_r(args, val)).structure
    else:
        S = val
    rep = inc.classify(S)
    out = {
        "is_complete": rep["is_complete"],
        "is_interval": rep["is_interval"],
        "partite_profile": list(rep["partite_profile"]),
        "intervals": None,
    }
    if rep["intervals"] is not None:
        out["intervals"] = [
            {"vertex": list(v), "range": list(span)}
            for v, span in sorted(rep["intervals"].items())
        ]
    _emit(out)
    return 0


def _structure_and_r(args):
    kind, val = _chi_or_structure(args.infile)
    if kind == "chi":
        r = _resolve_r(args, val)
        return inc.build_S_chi(val, r).structure, r
    if args.r is None:
        raise ValidationError("--r is required with a structure input")
    return val, args.r


def _cmd_euler(args) -> int:
    S, r = _structure_and_r(args)
    _emit({"r": r, "count": sg.coordinate_fixed_points(S, r, cap=args.cap)})
    return 0


def _cmd_count_fq(args) -> int:
    S, r = _structure_and_r(args)
    _emit({"r": r, "q": args.q, "count": sg.count_points_Fq(S, r, args.q, cap=args.cap)})
    return 0


def _cmd_dimension(args) -> int:
    kind, val = _chi_or_structure(args.infile)
    if kind == "chi":
        r = _resolve_r(args, val)
        S = inc.build_S_chi(val, r)
    else:
        if args.r is None:
            raise ValidationError("--r is required with a structure input")
        S, r = val, args.r
    _emit({"r": r, "dimension": sg.interval_dimension(S, r)})
    return 0


def _cmd_tangent(args) -> int:
    obj = _load_json(args.infile)
    if "structure" not in obj or "config" not in obj:
        raise ValidationError('input must hold "structure" and "config" keys')
    S = inc.structure_from_json(obj["structure"])
    config = sg.config_from_json(obj["config"], S)
    _emit({"tangent": sg.tangent_dimension(config, check_closure=args.closure)})
    return 0


def _cmd_smooth(args) -> int:
    chi = _load_chi(args.infile)
    r = _resolve_r(args, chi)
    verdict = sg.smooth_verdict(
        chi, r, d=args.d, seed=args.seed, samples=args.samples, prime=args.prime
    )
    if "config" in verdict:
        config = verdict["config"]
        verdict["structure"] = inc.structure_to_json(config.structure)
        verdict["config"] = sg.config_to_json(config)
    _emit(verdict)
    return 0


def _cmd_verify(args) -> int:
    if args.which == "identity":
        if args.d is None:
            raise ValidationError("verify identity needs --d")
        report = vf.check_identity(args.r, args.d, args.nmax, cap=args.cap, jobs=args.jobs)
    else:
        report = vf.product_series_check(args.r, args.nmax, cap=args.cap, jobs=args.jobs)
    _emit(report)
    return 0


def _cmd_fixtures(args) -> int:
    if args.r < 3:
        raise ValidationError("--r must be at least 3 for the crossed-lines variant")
    stair = fx.staircase_charfn()
    out = {
        "staircase": {
            "chi": cf.charfn_to_json(stair),
            "r": 3,
            "structure": inc.structure_to_json(fx.staircase_structure()),
        },
        "crossed_lines_r3": {"chi": cf.charfn_to_json(fx.crossed_lines_charfn(3)), "r": 3},
        f"crossed_lines_r{args.r}": {
            "chi": cf.charfn_to_json(fx.crossed_lines_charfn(args.r)),
            "r": args.r,
        },
        "k33": {"structure": inc.structure_to_json(fx.k33_structure())},
        "subdivided_k5": {"structure": inc.structure_to_json(fx.subdivided_k5_structure())},
    }
    _emit(out)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.


def _add_common(p, infile=True, r=False):
    if infile:
        p.add_argument("--in", dest="infile", required=True, metavar="FILE",
                       help="input file, or - for stdin")
    if r:
        p.add_argument("--r", type=int, default=None, help="value bound")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="quotfix",
        description="Characteristic functions, incidence structures, and their geometry.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list all functions with given bound, dimension, weight")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(run=_cmd_enumerate)

    p = sub.add_parser("structure", help="incidence structure of a function")
    _add_common(p, r=True)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(run=_cmd_structure)

    p = sub.add_parser("regions", help="projected level-set regions of a function")
    _add_common(p, r=True)
    p.set_defaults(run=_cmd_regions)

    p = sub.add_parser("realize", help="function realizing a partite graph")
    _add_common(p, r=True)
    p.add_argument("--d", type=int, default=4, help="ambient dimension (>= 4)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(run=_cmd_realize)

    p = sub.add_parser("intervals", help="interval-graph classification")
    _add_common(p, r=True)
    p.set_defaults(run=_cmd_intervals)

    p = sub.add_parser("euler", help="count coordinate-subspace configurations")
    _add_common(p, r=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(run=_cmd_euler)

    p = sub.add_parser("count-fq", help="count configurations over a prime field")
    _add_common(p, r=True)
    p.add_argument("--q", type=int, required=True, help="prime field size")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(run=_cmd_count_fq)

    p = sub.add_parser("dimension", help="dimension of an interval structure's locus")
    _add_common(p, r=True)
    p.set_defaults(run=_cmd_dimension)

    p = sub.add_parser("tangent", help="tangent dimension at a subspace configuration")
    _add_common(p)
    p.add_argument("--closure", action="store_true",
                   help="also check invariance under transitive closure")
    p.set_defaults(run=_cmd_tangent)

    p = sub.add_parser("smooth", help="smoothness verdict for a function's locus")
    _add_common(p, r=True)
    p.add_argument("--d", type=int, default=None, help="assert the ambient dimension")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--prime", type=int, default=sg.WITNESS_PRIME)
    p.set_defaults(run=_cmd_smooth)

    p = sub.add_parser("verify", help="global cross-checks")
    p.add_argument("which", choices=("identity", "series"))
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("fixtures", help="ready-made example inputs as JSON")
    p.add_argument("--r", type=int, default=4,
                   help="bound for the general crossed-lines variant")
    p.set_defaults(run=_cmd_fixtures)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        return 0
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
