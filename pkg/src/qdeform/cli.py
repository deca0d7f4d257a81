"""Command-line interface.

Four subcommands:

``verify``
    Re-run the checks behind the claims stored in the catalog (identity
    checks, confluence, restriction blocks, contraction closure, algebra
    maps) for chosen entries or for the whole catalog.

``contract``
    Run a singular-scaling limit, either replaying a stored recipe or
    assembling one inline from ``--eta``, ``--limit``, ``--transform`` and
    ``--rebind``, and print the resulting matrix as JSON.

``relations``
    Print the exchange relations extracted from a matrix entry (the
    two-colour relations for a coloured family).

``hom``
    Certify a stored algebra map at a chosen exponent, optionally with
    parameter bindings overridden.

Exit codes: 0 all checks passed, 1 a check failed or a computation did not
converge, 2 usage error (including unknown entry names).
"""

from __future__ import annotations

import argparse
import json
import platform
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .symexpr import ParamSet, ParseError, serialize
from .tensor import SymMatrix
from .rmx import ContractionSpec, SingularLimit, contract_limit
from .hopf import HomFailure, check_hom
from .catalog import (
    Catalog,
    SchemaError,
    available_checks,
    build_hom,
    load_builtin,
    run_contraction,
    verify_entry,
)


class UsageError(Exception):
    """Bad invocation; reported on stderr with exit code 2."""


#: Named leg transforms for inline contractions, keyed by name:
#: (site dimension, row-major entries over the source parameters + ``eta``).
TRANSFORMS = {
    "J2": (2, ("1", "eta",
               "0", "1")),
    "G": (3, ("1", "eta", "0",
              "0", "1", "0",
              "0", "0", "1")),
}

_DEFAULT_TRANSFORM = {2: "J2", 3: "G"}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _toolchain() -> dict:
    return {"python": platform.python_version(), "qdeform": __version__}


def _get(catalog: Catalog, name: str):
    try:
        return catalog.get(name)
    except KeyError:
        raise UsageError(f"unknown entry {name!r}") from None


def _split_binding(item: str, what: str) -> tuple[str, str]:
    key, sep, value = item.partition("=")
    if not sep or not key or not value:
        raise UsageError(f"bad {what} {item!r}; expected NAME=VALUE")
    return key, value


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

_worker_catalog: Catalog | None = None


def _shared_catalog() -> Catalog:
    global _worker_catalog
    if _worker_catalog is None:
        _worker_catalog = load_builtin()
    return _worker_catalog


def _verify_one(name: str, requested: list[str] | None,
                catalog: Catalog | None = None) -> list[dict]:
    catalog = catalog or _shared_catalog()
    entry = catalog.get(name)
    rows = []
    for check in (requested or available_checks(entry)):
        start = time.perf_counter()
        report = verify_entry(entry, catalog, checks=[check])
        seconds = round(time.perf_counter() - start, 3)
        for c in report.checks:
            rows.append({"entry": name, "check": c.name, "status": c.status,
                         "witness": c.witness, "seconds": seconds})
    return rows


def _verify_task(task) -> list[dict]:
    return _verify_one(*task)


def cmd_verify(args) -> int:
    catalog = load_builtin()
    if args.all == bool(args.entry):
        raise UsageError("pick entries with --entry NAME or verify --all")
    names = catalog.names() if args.all else list(args.entry)
    for name in names:
        if name not in catalog:
            raise UsageError(f"unknown entry {name!r}")
    requested = args.check or None
    if args.jobs > 1:
        tasks = [(name, requested) for name in names]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            groups = list(pool.map(_verify_task, tasks))
    else:
        groups = [_verify_one(name, requested, catalog) for name in names]
    rows = [row for group in groups for row in group]
    ok = all(row["status"] == "pass" for row in rows)
    if args.json:
        print(json.dumps({"command": "verify", "entries": names,
                          "checks": rows, "ok": ok,
                          "toolchain": _toolchain()}, indent=2))
    else:
        for row in rows:
            print(f"{row['entry']} {row['check']}: {row['status']} "
                  f"[{row['seconds']:.3f}s]")
            if row["witness"]:
                print(f"  witness: {row['witness']}")
        passed = sum(row["status"] == "pass" for row in rows)
        print(f"{passed}/{len(rows)} checks passed")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# contract
# ---------------------------------------------------------------------------

def _new_symbols(texts, known) -> list[str]:
    found: list[str] = []
    for text in texts:
        for m in _IDENT.finditer(text):
            s = m.group()
            if s not in known and s not in found:
                found.append(s)
    return found


def _inline_contraction(catalog: Catalog, args):
    source = _get(catalog, args.source)
    if source.kind not in ("rmatrix", "coloured-family"):
        raise UsageError(f"{source.name!r} is not a matrix entry")
    src_params = list(source.param_set().symbols)
    limit_param, limit_text = _split_binding(args.limit, "--limit")
    try:
        limit_value = Fraction(limit_text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad limit value {limit_text!r}") from None
    rebind_items = [_split_binding(item, "--rebind") for item in args.rebind]
    extras = _new_symbols([args.eta] + [e for _, e in rebind_items], src_params)
    work = ParamSet(tuple(src_params) + tuple(extras))
    if limit_param not in work.symbols:
        raise UsageError(f"limit parameter {limit_param!r} does not occur")
    matrix = source.matrix()
    site = int(round(matrix.rows ** 0.5))
    tname = args.transform or _DEFAULT_TRANSFORM.get(site)
    if tname is None:
        raise UsageError(f"no default transform for site dimension {site}; "
                         f"pick one of {sorted(TRANSFORMS)}")
    tdim, tcells = TRANSFORMS[tname]
    if tdim != site:
        raise UsageError(f"transform {tname!r} acts on {tdim}-dimensional "
                         f"legs, the source has {site}-dimensional legs")
    tps = ParamSet(work.symbols + ("eta",))
    rebind = {}
    for key, expr in rebind_items:
        if key not in src_params:
            raise UsageError(f"--rebind names unknown parameter {key!r}")
        rebind[key] = work.parse(expr)
    target_syms = tuple(p for p in work.symbols
                        if p != limit_param and p not in rebind)
    spec = ContractionSpec(
        transform=SymMatrix.parse(tps, site, site, tcells),
        eta="eta", eta_def=work.parse(args.eta),
        limit_param=limit_param, limit_value=limit_value,
        target_ps=ParamSet(target_syms), rebind=rebind)
    result = contract_limit(matrix, spec)
    return result, {"command": "contract", "source": source.name,
                    "transform": tname}


def cmd_contract(args) -> int:
    catalog = load_builtin()
    if args.spec:
        if args.eta or args.limit or args.rebind or args.transform:
            raise UsageError("--spec replays a stored recipe; it cannot be "
                             "combined with the inline options")
        entry = _get(catalog, args.spec)
        if entry.kind != "contraction":
            raise UsageError(f"{entry.name!r} is not a contraction recipe")
        if args.source and args.source != entry.doc["source"]:
            raise UsageError(f"recipe {entry.name!r} starts from "
                             f"{entry.doc['source']!r}, not {args.source!r}")
        result, target = run_contraction(catalog, entry)
        head = {"command": "contract", "spec": entry.name,
                "source": entry.doc["source"], "target": target.name}
        params = list(target.param_set().symbols)
    else:
        if not (args.source and args.eta and args.limit):
            raise UsageError("an inline contraction needs --source, --eta "
                             "and --limit (or use --spec)")
        try:
            result, head = _inline_contraction(catalog, args)
        except ParseError as e:
            raise UsageError(str(e)) from None
        params = list(result.ps.symbols)
    doc = dict(head)
    doc["params"] = params
    doc["dim"] = result.rows
    doc["entries"] = [serialize(result[i, j])
                      for i in range(result.rows) for j in range(result.cols)]
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

def cmd_relations(args) -> int:
    catalog = load_builtin()
    entry = _get(catalog, args.entry)
    if entry.kind == "coloured-family":
        pres = entry.pair_presentation()
    elif entry.kind in ("rmatrix", "presentation"):
        pres = entry.presentation()
    else:
        raise UsageError(f"{entry.name!r} has no exchange relations")
    for rel in pres.relations:
        print(rel)
    return 0


# ---------------------------------------------------------------------------
# hom
# ---------------------------------------------------------------------------

def cmd_hom(args) -> int:
    catalog = load_builtin()
    entry = _get(catalog, args.spec)
    if entry.kind != "hom":
        raise UsageError(f"{entry.name!r} is not an algebra-map recipe")
    spec = build_hom(catalog, entry)
    override = None
    if args.override:
        ps = spec.source.alg.ps
        override = {}
        for item in args.override:
            key, expr = _split_binding(item, "--override")
            if key not in spec.bindings:
                raise UsageError(f"--override names unknown target "
                                 f"parameter {key!r}")
            try:
                override[key] = ps.parse(expr)
            except ParseError as e:
                raise UsageError(str(e)) from None
    try:
        report = check_hom(spec, N=args.N, override=override)
    except HomFailure as e:
        rep = e.report
        if rep is not None:
            for rel, status, residue in rep.relation_status:
                line = f"{status}: {rel}"
                if residue is not None:
                    line += f"  (residue {residue})"
                print(line)
        print(f"fail: {e.args[0]}")
        return 1
    except ValueError as e:
        raise UsageError(str(e)) from None
    for rel, status, _ in report.relation_status:
        print(f"{status}: {rel}")
    print(f"ok: {len(report.relation_status)} relations preserved "
          f"at N={report.N}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdeform",
        description="Exact checks for two-parameter deformation data.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify",
                       help="re-run the checks behind catalog claims")
    v.add_argument("--entry", action="append", default=[], metavar="NAME",
                   help="entry to verify (repeatable)")
    v.add_argument("--all", action="store_true",
                   help="verify every catalog entry")
    v.add_argument("--check", action="append", default=[], metavar="NAME",
                   help="restrict to one named check (repeatable)")
    v.add_argument("--json", action="store_true",
                   help="emit a JSON report instead of text")
    v.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="verify entries in N parallel processes")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("contract", help="run a singular-scaling limit")
    c.add_argument("--source", metavar="NAME",
                   help="matrix entry the limit starts from")
    c.add_argument("--spec", metavar="NAME",
                   help="replay a stored contraction recipe")
    c.add_argument("--eta", metavar="EXPR",
                   help="scaling expression, e.g. 'h/(1-q)'")
    c.add_argument("--limit", metavar="PARAM=VALUE",
                   help="parameter limit, e.g. q=1")
    c.add_argument("--transform", metavar="NAME",
                   choices=sorted(TRANSFORMS),
                   help="leg transform (default chosen by leg dimension)")
    c.add_argument("--rebind", action="append", default=[],
                   metavar="PARAM=EXPR",
                   help="rewrite a source parameter before the limit "
                        "(repeatable)")
    c.add_argument("--out", metavar="FILE",
                   help="write the JSON result here instead of stdout")
    c.set_defaults(func=cmd_contract)

    r = sub.add_parser("relations", help="print extracted exchange relations")
    r.add_argument("--entry", required=True, metavar="NAME")
    r.set_defaults(func=cmd_relations)

    h = sub.add_parser("hom", help="certify a stored algebra map")
    h.add_argument("--spec", required=True, metavar="NAME")
    h.add_argument("--N", type=int, default=1,
                   help="binding exponent (default 1)")
    h.add_argument("--override", action="append", default=[],
                   metavar="PARAM=EXPR",
                   help="replace one parameter binding (repeatable)")
    h.set_defaults(func=cmd_hom)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ParseError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SingularLimit as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1
    except Exception as e:  # keep the exit-code contract: never crash out
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
