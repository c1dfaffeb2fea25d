import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import replace
from pathlib import Path

from entmap.base.config import Config
from entmap.base.exceptions import EntmapError
from entmap.base.matcore import Tolerance
from entmap.base.misc import sig
from entmap.cli import verify
from entmap.cli.stateio import bundled, read_state, write_csv
from entmap.criteria.criteria import classify, default_maps
from entmap.criteria.sweep import csv_header, csv_row, sweep
from entmap.maps.posmaps import Family, MapDescriptor, build_map, describe, map_family, parse_map_spec
from entmap.states.families import FamilyId


logger = logging.getLogger(__name__)

OK, VERIFY_FAILED, INPUT_ERROR = 0, 1, 2


def build_parser():
    parser = argparse.ArgumentParser(prog="entmap",
        description="Entanglement detection with positive, not completely positive elementary maps.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for details")
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", help="run PPT, realignment and positive-map criteria on a state")
    detect.add_argument("--state", required=True, help="state file, or the name of a bundled state")
    detect.add_argument("--map", dest="maps", action="append", metavar="SPEC",
        help="map spec such as cyclic:4:1, reduction2, delta:3,3,3 or perm:1,2,0 (repeatable)")
    detect.add_argument("--tol", type=float, help="PSD slack for the verdicts")
    detect.add_argument("--format", choices=("text", "json"), default="text")

    sw = commands.add_parser("sweep", help="classify a state family over its weight simplex and write CSV")
    sw.add_argument("--family", required=True,
        help="shift3, shift4, coherent3, coherent4, shift or coherent; Ex33, Ex42, Ex54, Ex34, Ex43 and Ex55 also work")
    sw.add_argument("--n", type=int, help="order of the shift and coherent families")
    sw.add_argument("--grid", type=int, required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--map", dest="maps", action="append", metavar="SPEC",
        help="defaults to every cyclic map of the family's order")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--tol", type=float)

    ver = commands.add_parser("verify", help="replay the claims of the ledger against numeric oracles")
    ver.add_argument("--scope", type=verify.parse_scope, choices=verify.Scope.CHOICES, default=verify.Scope.ALL,
        help="section-2 .. section-5 name the same scopes in order")
    ver.add_argument("--seed", type=int)
    ver.add_argument("--probes", type=int, help="random probes per positivity check")

    mp = commands.add_parser("map", help="inspect built-in maps")
    mp_commands = mp.add_subparsers(dest="map_command", required=True)
    show = mp_commands.add_parser("show", help="print the Kraus-difference terms and the Choi spectrum")
    show.add_argument("--family", required=True,
        help=f"one of {', '.join(Family.ALL)}, or an alias such as PhiNK, Phi0, Psi0, Phi33Prime or DeltaT")
    show.add_argument("--n", type=int, default=0)
    show.add_argument("--k", type=int, help="shift of cyclic maps, variant of cyclic3 and cyclic4")
    show.add_argument("--t", help="comma-separated weights of the diagonal map")
    show.add_argument("--pi", help="comma-separated permutation")
    show.add_argument("--format", choices=("text", "json"), default="text")

    return parser


def configure_logging(verbosity):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def make_config(args):
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "probes", None) is not None:
        overrides["probes"] = args.probes
    config = Config.from_env(**overrides)
    if getattr(args, "tol", None) is not None:
        config = replace(config, tolerance=replace(config.tolerance, psd_slack=args.tol))
    return config


def state_path(text):
    path = Path(text)
    if not path.exists() and bundled(text).exists():
        return bundled(text)
    return path


def cmd_detect(args, out):
    config = make_config(args)
    path = state_path(args.state)
    rho = read_state(path, config.tolerance)
    maps = [parse_map_spec(s) for s in args.maps] if args.maps else default_maps(rho.dA)
    report = classify(rho, maps, config.tolerance)

    if args.format == "json":
        doc = {
            "state": str(path),
            "dims": [rho.dA, rho.dB],
            "results": [{"criterion": r.label, "verdict": r.verdict, "witness": r.witness_value,
                "scaled_witness": r.scaled_witness} for r in report.results],
            "classification": report.classification,
        }
        print(json.dumps(doc, indent=2), file=out)
        return OK

    print(f"state {path} dims ({rho.dA}, {rho.dB})", file=out)
    width = max(len(r.label) for r in report.results)
    for r in report.results:
        line = f"{r.label:<{width}}  {r.verdict:<6}  witness {sig(r.witness_value)}"
        if r.scale != 1.0:
            line += f"  (x{r.scale:g}: {sig(r.scaled_witness)})"
        print(line, file=out)
    print(f"classification {report.classification}", file=out)
    return OK


def cmd_sweep(args, out):
    config = make_config(args)
    fid = FamilyId.parse(args.family, args.n)
    maps = [parse_map_spec(s) for s in args.maps] if args.maps \
        else [MapDescriptor.cyclic(fid.n, k) for k in range(1, fid.n)]
    rows = sweep(fid, args.grid, maps, config)
    write_csv(args.out, csv_header(fid.n, maps), [csv_row(r) for r in rows])

    counts = Counter(r.report.classification for r in rows)
    print(f"wrote {len(rows)} rows to {args.out}", file=out)
    for label, count in sorted(counts.items()):
        print(f"  {label}: {count}", file=out)
    return OK


def cmd_verify(args, out):
    ledger = verify.run(args.scope, make_config(args))
    print(verify.render(ledger), file=out)
    return VERIFY_FAILED if ledger.failed else OK


def _descriptor(args):
    family, variant = map_family(args.family)
    k = variant if args.k is None else args.k
    if family == Family.CYCLIC:
        return MapDescriptor.cyclic(args.n, k)
    if family in (Family.CYCLIC3, Family.CYCLIC4):
        return MapDescriptor(family, k=k)
    if family == Family.DIAGONAL:
        return parse_map_spec(f"delta:{args.t or ''}")
    if family == Family.PERMUTATION:
        return parse_map_spec(f"perm:{args.pi or ''}")
    return MapDescriptor(family, n=args.n)


def _entry(re, im):
    if im == 0:
        return sig(re, 6)
    return f"{sig(re, 6)}{'+' if im > 0 else '-'}{sig(abs(im), 6)}j"


def cmd_map_show(args, out):
    summary = describe(build_map(_descriptor(args)))
    if args.format == "json":
        print(json.dumps(dict(summary), indent=2), file=out)
        return OK

    print(f"{summary['label']}: {summary['dim_in']} -> {summary['dim_out']}, order {tuple(summary['order'])}", file=out)
    for sign in ("plus", "minus"):
        for i, term in enumerate(summary.get(sign, ())):
            entries = [f"({r},{c})={_entry(*z)}" for r, row in enumerate(term) for c, z in enumerate(row) if z[0] or z[1]]
            print(f"  {sign} {i}: {' '.join(entries)}", file=out)
    print(f"choi min eigenvalue {sig(summary['choi_min_eigenvalue'])}", file=out)
    if "ncp_quick_check" in summary:
        check = summary["ncp_quick_check"]
        print(f"quick check {check['verdict']} (min norm {sig(check['min_norm'])})", file=out)
    return OK


COMMANDS = {
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "map": cmd_map_show,
}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args, out)
    except (EntmapError, OSError) as e:
        print(f"entmap: error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
