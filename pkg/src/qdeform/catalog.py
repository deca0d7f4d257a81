"""File-backed registry of deformation data, with loading and verification.

Definition documents are JSON objects.  Common fields: ``name``, ``kind``,
``provenance`` (one of ``paper-derived``, ``contraction-output``,
``reconstructed-by-oracle``), ``flags`` (claimed, re-verifiable properties)
and an optional free-text ``note``.  The remaining fields depend on ``kind``:

``rmatrix``
    ``params`` (ordered), ``dim``, ``entries`` (row-major rational-function
    strings), plus optional ``pattern`` (generator grid with ``"0"``/``"1"``
    cells), ``gens`` (letter order for rewriting), ``hecke`` (the two
    eigenvalue strings), ``hopf`` (determinant-like element, generators to
    invert, antipode images, optional distinguished group-like ``delta``)
    and ``classical`` (undeformed parameter values).
``coloured-family``
    As ``rmatrix`` with ``colour_slots`` naming the first- and second-leg
    colour parameters inside ``params``.
``presentation``
    ``params``, ``gens``, ``pattern`` and explicit ``relations`` strings.
``contraction``
    ``source`` and ``target`` entry names, ``params`` (the joint working
    parameter list), ``transform`` (a ``dim`` × ``dim`` matrix over the
    parameters plus the scale symbol ``eta``), ``eta_def``, ``limit`` and
    ``rebind``.
``hom``
    ``source`` and ``target`` entry names, ``params`` (source parameters,
    used to parse ``invariant.equals``), ``pair`` (whether both sides are
    two-colour pair presentations), ``images``, ``powers``, ``binding_kind``,
    ``bindings``, ``exponents``, optional ``twin`` wiring and ``invariant``.

Serialization is canonical: fixed field order, two-space indentation, inner
maps sorted by key.  ``serialize_entry(load_definition(doc))`` reproduces a
canonically formatted document byte for byte.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .symexpr import ParamSet, ParseError, RatFunc, rf_substitute, serialize
from .tensor import SymMatrix
from .rmx import (CheckResult, ColouredFamily, ContractionSpec, check_cqybe,
                  check_colour_triangular, check_hecke, check_qybe,
                  check_triangular, contract_limit)
from .ncalg import FreeAlgebra, check_confluence, parse_poly
from .hopf import (HomSpec, HopfData, HomFailure, LocalizedElem, Presentation,
                   binding_values, check_hom, coloured_pair_presentation,
                   coloured_single_presentation, presentation_from_matrix,
                   twin_tables_match)

ENV_CATALOG_DIR = "QDEFORM_CATALOG_DIR"

KINDS = ("rmatrix", "coloured-family", "presentation", "contraction", "hom")
PROVENANCES = ("paper-derived", "contraction-output", "reconstructed-by-oracle")
FLAGS_BY_KIND = {
    "rmatrix": ("qybe", "triangular", "hecke", "confluent"),
    "coloured-family": ("cqybe", "colour-triangular", "confluent"),
    "presentation": ("confluent",),
    "contraction": (),
    "hom": (),
}
_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")
_IDENT_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

_FIELD_ORDER = (
    "name", "kind", "provenance", "note", "params", "colour_slots", "dim",
    "entries", "pattern", "gens", "relations", "hecke", "restriction", "hopf",
    "classical", "source", "target", "transform", "eta_def", "limit",
    "rebind", "pair", "images", "powers", "binding_kind", "bindings",
    "exponents", "twin", "twin_param_map", "twin_target_map", "invariant",
    "flags",
)


class SchemaError(ValueError):
    """Structurally invalid definition document."""


class DimensionMismatch(SchemaError):
    """Declared dimensions disagree with the supplied data."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _ident_list(doc, key, *, allow_empty=False) -> list[str]:
    v = doc.get(key)
    _require(isinstance(v, list), f"{key!r} must be a list")
    _require(allow_empty or v, f"{key!r} must not be empty")
    for x in v:
        _require(isinstance(x, str) and _IDENT_RE.match(x),
                 f"{key!r} contains a bad identifier: {x!r}")
    _require(len(set(v)) == len(v), f"{key!r} contains duplicates")
    return list(v)


def _parse_cell(ps: ParamSet, text, where: str) -> RatFunc:
    _require(isinstance(text, str), f"{where}: expected a string")
    try:
        return ps.parse(text)
    except ParseError as e:
        raise ParseError(f"{where}: {e}") from None


@dataclass
class CatalogEntry:
    """One parsed definition document plus lazily built algebra objects."""

    name: str
    kind: str
    provenance: str
    flags: tuple
    doc: dict
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- basic payload accessors -------------------------------------------

    def param_set(self) -> ParamSet:
        if "ps" not in self._cache:
            self._cache["ps"] = ParamSet(tuple(self.doc.get("params", ())))
        return self._cache["ps"]

    def matrix(self) -> SymMatrix:
        _require(self.kind in ("rmatrix", "coloured-family"),
                 f"{self.name}: entry has no matrix payload")
        if "matrix" not in self._cache:
            ps = self.param_set()
            n = self.doc["dim"]
            rows = [[_parse_cell(ps, self.doc["entries"][i * n + j],
                                 f"{self.name} entry ({i},{j})")
                     for j in range(n)] for i in range(n)]
            self._cache["matrix"] = SymMatrix.from_rows(ps, rows)
        return self._cache["matrix"]

    def family(self) -> ColouredFamily:
        _require(self.kind == "coloured-family",
                 f"{self.name}: not a coloured family")
        slots = self.doc["colour_slots"]
        return ColouredFamily(self.matrix(), first=tuple(slots["first"]),
                              second=tuple(slots["second"]))

    def pattern(self) -> list:
        p = self.doc.get("pattern")
        _require(p is not None, f"{self.name}: entry has no pattern")
        return p

    def generator_order(self) -> tuple | None:
        g = self.doc.get("gens")
        return tuple(g) if g is not None else None

    # -- presentations ------------------------------------------------------

    def presentation(self) -> Presentation:
        """Single-copy presentation (coloured families: one-colour form)."""
        if "pres" in self._cache:
            return self._cache["pres"]
        if self.kind == "rmatrix":
            pres = presentation_from_matrix(self.matrix(), self.pattern(),
                                            gens=self.generator_order())
        elif self.kind == "coloured-family":
            pres = coloured_single_presentation(self.family(), self.pattern(),
                                                order=self.generator_order())
        elif self.kind == "presentation":
            ps = self.param_set()
            alg = FreeAlgebra(ps, tuple(self.doc["gens"]))
            rels = [parse_poly(alg, s) for s in self.doc["relations"]]
            pres = Presentation(alg, rels, [self.doc["pattern"]])
        else:
            raise SchemaError(f"{self.name}: entry has no presentation")
        self._cache["pres"] = pres
        return pres

    def pair_presentation(self) -> Presentation:
        _require(self.kind == "coloured-family",
                 f"{self.name}: only coloured families have pair presentations")
        if "pair" not in self._cache:
            self._cache["pair"] = coloured_pair_presentation(
                self.family(), self.pattern(), order=self.generator_order())
        return self._cache["pair"]

    # -- optional payloads --------------------------------------------------

    def hecke_pair(self) -> tuple[RatFunc, RatFunc] | None:
        h = self.doc.get("hecke")
        if h is None:
            return None
        ps = self.param_set()
        return (_parse_cell(ps, h[0], f"{self.name} hecke alpha"),
                _parse_cell(ps, h[1], f"{self.name} hecke beta"))

    def hopf_data(self) -> HopfData:
        h = self.doc.get("hopf")
        _require(h is not None, f"{self.name}: entry has no Hopf payload")
        pres = self.presentation()
        det = (parse_poly(pres.alg, h["det"]) if "det" in h else None)
        data = HopfData(pres, det=det, invert=tuple(h.get("invert", ())))
        big, _ = data.localized()
        if "antipode" in h:
            data.antipode = {
                g: LocalizedElem(img["power"], parse_poly(big, img["body"]))
                for g, img in h["antipode"].items()}
        return data

    def hopf_delta(self):
        h = self.doc.get("hopf") or {}
        if "delta" not in h:
            return None
        return parse_poly(self.presentation().alg, h["delta"])

    def classical_bindings(self) -> dict:
        out = {}
        ps = self.param_set()
        for p, v in (self.doc.get("classical") or {}).items():
            out[p] = _parse_cell(ps, v, f"{self.name} classical {p}")
        return out


# ---------------------------------------------------------------------------
# loading and serialization
# ---------------------------------------------------------------------------

def _validate_pattern(doc, name, gens_required=False):
    pat = doc.get("pattern")
    if pat is None:
        _require(not gens_required, f"{name}: pattern is required")
        return
    _require(isinstance(pat, list) and pat, f"{name}: pattern must be a grid")
    n = len(pat)
    cells = []
    for row in pat:
        _require(isinstance(row, list) and len(row) == n,
                 f"{name}: pattern grid is not square")
        for cell in row:
            _require(isinstance(cell, str), f"{name}: bad pattern cell")
            if cell not in ("0", "1"):
                _require(_IDENT_RE.match(cell),
                         f"{name}: bad pattern cell {cell!r}")
                _require(cell not in cells,
                         f"{name}: pattern cell {cell!r} repeats")
                cells.append(cell)
    if "dim" in doc and doc["dim"] != n * n:
        raise DimensionMismatch(
            f"{name}: {n}x{n} pattern needs dim {n * n}, got {doc['dim']}")
    gens = doc.get("gens")
    if gens is not None:
        _require(sorted(gens) == sorted(cells),
                 f"{name}: gens must list exactly the pattern cells")
    params = doc.get("params", ())
    _require(not set(params) & set(cells),
             f"{name}: parameters and generators overlap")


def _validate_common(doc) -> tuple:
    _require(isinstance(doc, dict), "document must be an object")
    for key in ("name", "kind", "provenance", "flags"):
        _require(key in doc, f"missing field {key!r}")
    name = doc["name"]
    _require(isinstance(name, str) and _NAME_RE.match(name),
             f"bad entry name {name!r}")
    _require(doc["kind"] in KINDS, f"{name}: unknown kind {doc['kind']!r}")
    _require(doc["provenance"] in PROVENANCES,
             f"{name}: unknown provenance {doc['provenance']!r}")
    allowed = set(FLAGS_BY_KIND[doc["kind"]])
    flags = doc["flags"]
    _require(isinstance(flags, list) and len(set(flags)) == len(flags),
             f"{name}: flags must be a duplicate-free list")
    for fl in flags:
        _require(fl in allowed,
                 f"{name}: flag {fl!r} not applicable to kind {doc['kind']!r}")
    unknown = set(doc) - set(_FIELD_ORDER)
    _require(not unknown, f"{name}: unknown fields {sorted(unknown)}")
    return name, doc["kind"]


def _validate_matrix_payload(doc, name):
    params = _ident_list(doc, "params", allow_empty=True)
    dim = doc.get("dim")
    _require(isinstance(dim, int) and dim > 0,
             f"{name}: dim must be a positive integer")
    root = int(round(dim ** 0.5))
    if root * root != dim:
        raise DimensionMismatch(
            f"{name}: a two-site operator needs a square dim, got {dim}")
    entries = doc.get("entries")
    _require(isinstance(entries, list), f"{name}: entries must be a list")
    if len(entries) != dim * dim:
        raise DimensionMismatch(
            f"{name}: expected {dim * dim} entries, got {len(entries)}")
    ps = ParamSet(tuple(params))
    for idx, cell in enumerate(entries):
        _parse_cell(ps, cell, f"{name} entry ({idx // dim},{idx % dim})")
    _validate_pattern(doc, name)
    if "hecke" in doc:
        h = doc["hecke"]
        _require(isinstance(h, list) and len(h) == 2,
                 f"{name}: hecke must list the two eigenvalues")
        for s in h:
            _parse_cell(ps, s, f"{name} hecke")
    if "classical" in doc:
        for p, v in doc["classical"].items():
            _require(p in params, f"{name}: classical value for unknown {p!r}")
            _parse_cell(ps, v, f"{name} classical {p}")
    if "hopf" in doc:
        h = doc["hopf"]
        _require(isinstance(h, dict), f"{name}: hopf must be an object")
        _require(set(h) <= {"det", "invert", "antipode", "delta"},
                 f"{name}: unknown hopf fields")
        if "antipode" in h:
            for g, img in h["antipode"].items():
                _require(isinstance(img, dict)
                         and isinstance(img.get("power"), int)
                         and isinstance(img.get("body"), str),
                         f"{name}: bad antipode image for {g!r}")
    if "restriction" in doc:
        rst = doc["restriction"]
        _require(isinstance(rst, dict)
                 and set(rst) == {"target", "legs", "bindings"},
                 f"{name}: restriction needs target, legs and bindings")
        _require(isinstance(rst["target"], str), f"{name}: bad restriction")
        n = int(round(dim ** 0.5))
        _require(isinstance(rst["legs"], list) and rst["legs"]
                 and all(isinstance(i, int) and 0 <= i < n
                         for i in rst["legs"])
                 and len(set(rst["legs"])) == len(rst["legs"]),
                 f"{name}: restriction legs must be distinct site indices")
        for p, expr in rst["bindings"].items():
            _parse_cell(ps, expr, f"{name} restriction binding {p}")


def _validate_kind(doc, name, kind):
    if kind in ("rmatrix", "coloured-family"):
        _validate_matrix_payload(doc, name)
        if kind == "coloured-family":
            slots = doc.get("colour_slots")
            _require(isinstance(slots, dict)
                     and set(slots) == {"first", "second"},
                     f"{name}: colour_slots needs 'first' and 'second'")
            first, second = slots["first"], slots["second"]
            _require(first and second and not (set(first) & set(second)),
                     f"{name}: colour slots must be disjoint and nonempty")
            for p in (*first, *second):
                _require(p in doc["params"],
                         f"{name}: colour slot {p!r} not among params")
    elif kind == "presentation":
        _ident_list(doc, "params", allow_empty=True)
        _ident_list(doc, "gens")
        _require("pattern" in doc and "relations" in doc,
                 f"{name}: presentation needs pattern and relations")
        _validate_pattern(doc, name, gens_required=True)
        alg = FreeAlgebra(ParamSet(tuple(doc["params"])), tuple(doc["gens"]))
        for i, rel in enumerate(doc["relations"]):
            try:
                parse_poly(alg, rel)
            except ParseError as e:
                raise ParseError(f"{name} relation {i}: {e}") from None
    elif kind == "contraction":
        for key in ("source", "target", "eta_def", "limit", "transform"):
            _require(key in doc, f"{name}: contraction needs {key!r}")
        params = _ident_list(doc, "params")
        work = ParamSet(tuple(params))
        _parse_cell(work, doc["eta_def"], f"{name} eta_def")
        lim = doc["limit"]
        _require(isinstance(lim, dict) and set(lim) == {"param", "value"}
                 and lim["param"] in params,
                 f"{name}: limit must name a working parameter and a value")
        Fraction(lim["value"])
        tr = doc["transform"]
        _require(isinstance(tr, dict) and isinstance(tr.get("dim"), int),
                 f"{name}: transform needs a dim")
        if len(tr.get("entries", ())) != tr["dim"] ** 2:
            raise DimensionMismatch(
                f"{name}: transform expects {tr['dim'] ** 2} entries")
        tps = ParamSet(tuple(params) + ("eta",))
        for idx, cell in enumerate(tr["entries"]):
            _parse_cell(tps, cell, f"{name} transform entry {idx}")
        for p, expr in (doc.get("rebind") or {}).items():
            _require(p in params, f"{name}: rebind of unknown {p!r}")
            _parse_cell(work, expr, f"{name} rebind {p}")
    elif kind == "hom":
        for key in ("source", "target", "params", "images", "powers",
                    "binding_kind", "bindings", "exponents"):
            _require(key in doc, f"{name}: hom needs {key!r}")
        params = _ident_list(doc, "params")
        _require(doc["binding_kind"] in ("monomial", "additive"),
                 f"{name}: bad binding_kind")
        for tparam, row in doc["bindings"].items():
            _require(isinstance(row, dict) and row,
                     f"{name}: empty binding row for {tparam!r}")
            for p, e in row.items():
                _require(p in params,
                         f"{name}: binding over unknown parameter {p!r}")
                _require(e in ("N", "-N") or isinstance(e, int),
                         f"{name}: bad binding exponent {e!r}")
        _require(all(isinstance(n, int) and n != 0
                     for n in doc["exponents"]),
                 f"{name}: exponents must be nonzero integers")
        inv = doc.get("invariant")
        if inv is not None:
            _require(isinstance(inv, dict)
                     and inv.get("op") in ("product", "sum")
                     and isinstance(inv.get("params"), list),
                     f"{name}: bad invariant")
            _parse_cell(ParamSet(tuple(params)), inv["equals"],
                        f"{name} invariant")


def load_definition(source) -> CatalogEntry:
    """Parse and validate one definition document.

    ``source`` may be a mapping, a filesystem path, or raw JSON text.
    """
    if isinstance(source, dict):
        doc = source
    else:
        if isinstance(source, (str, os.PathLike)) and (
                isinstance(source, os.PathLike)
                or not source.lstrip().startswith("{")):
            text = Path(source).read_text()
        else:
            text = source
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(
                f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    name, kind = _validate_common(doc)
    _validate_kind(doc, name, kind)
    return CatalogEntry(name=name, kind=kind, provenance=doc["provenance"],
                        flags=tuple(doc["flags"]), doc=doc)


def _deep_sort(v):
    if isinstance(v, dict):
        return {k: _deep_sort(v[k]) for k in sorted(v)}
    if isinstance(v, list):
        return [_deep_sort(x) for x in v]
    return v


def _canonical(doc: dict):
    out = {}
    for key in _FIELD_ORDER:
        if key not in doc:
            continue
        v = doc[key]
        out[key] = sorted(v) if key == "flags" else _deep_sort(v)
    return out


def serialize_entry(entry: CatalogEntry) -> str:
    """Canonical JSON text for the entry; ends with a newline."""
    return json.dumps(_canonical(entry.doc), indent=2) + "\n"


# ---------------------------------------------------------------------------
# the registry
# ---------------------------------------------------------------------------

class Catalog:
    """Immutable name-indexed set of entries."""

    def __init__(self, entries):
        self._entries = {}
        for e in entries:
            _require(e.name not in self._entries,
                     f"duplicate entry name {e.name!r}")
            self._entries[e.name] = e

    def __contains__(self, name) -> bool:
        return name in self._entries

    def __iter__(self):
        return iter(self.names())

    def get(self, name: str) -> CatalogEntry:
        if name not in self._entries:
            raise KeyError(f"no catalog entry named {name!r}")
        return self._entries[name]

    def names(self) -> list[str]:
        return sorted(self._entries)

    @classmethod
    def load_dir(cls, path) -> "Catalog":
        files = sorted(Path(path).glob("*.json"))
        return cls([load_definition(f) for f in files])


def builtin_dir() -> Path:
    override = os.environ.get(ENV_CATALOG_DIR)
    if override:
        return Path(override)
    return Path(resources.files("qdeform") / "catalog_data")


def load_builtin() -> Catalog:
    return Catalog.load_dir(builtin_dir())


def list_builtin() -> list[str]:
    return load_builtin().names()


# ---------------------------------------------------------------------------
# spec reconstruction from stored documents
# ---------------------------------------------------------------------------

def build_contraction(catalog: Catalog, entry: CatalogEntry):
    """The source matrix and the fully parsed ContractionSpec."""
    _require(entry.kind == "contraction", f"{entry.name}: not a contraction")
    source = catalog.get(entry.doc["source"])
    target = catalog.get(entry.doc["target"])
    work = ParamSet(tuple(entry.doc["params"]))
    tps = ParamSet(tuple(entry.doc["params"]) + ("eta",))
    tr = entry.doc["transform"]
    n = tr["dim"]
    transform = SymMatrix.parse(tps, n, n, tr["entries"])
    rebind = {p: work.parse(expr)
              for p, expr in (entry.doc.get("rebind") or {}).items()}
    spec = ContractionSpec(
        transform=transform, eta="eta", eta_def=work.parse(entry.doc["eta_def"]),
        limit_param=entry.doc["limit"]["param"],
        limit_value=Fraction(entry.doc["limit"]["value"]),
        target_ps=target.param_set(), rebind=rebind)
    return source, target, spec


def run_contraction(catalog: Catalog, entry: CatalogEntry):
    """Recompute the contraction; returns (result matrix, target entry)."""
    source, target, spec = build_contraction(catalog, entry)
    return contract_limit(source.matrix(), spec), target


def build_hom(catalog: Catalog, entry: CatalogEntry,
              resolve_twin: bool = True) -> HomSpec:
    _require(entry.kind == "hom", f"{entry.name}: not a hom")
    source = catalog.get(entry.doc["source"])
    target = catalog.get(entry.doc["target"])
    if entry.doc.get("pair"):
        src, tgt = source.pair_presentation(), target.pair_presentation()
    else:
        src, tgt = source.presentation(), target.presentation()
    _require(tuple(entry.doc["params"]) == src.alg.ps.symbols,
             f"{entry.name}: params disagree with the source presentation")
    bindings = {t: dict(row) for t, row in entry.doc["bindings"].items()}
    twin = twin_pm = twin_tm = None
    if resolve_twin and entry.doc.get("twin"):
        twin = build_hom(catalog, catalog.get(entry.doc["twin"]),
                         resolve_twin=False)
        twin_pm = dict(entry.doc["twin_param_map"])
        twin_tm = dict(entry.doc["twin_target_map"])
    return HomSpec(name=entry.name, source=src, target=tgt,
                   images=dict(entry.doc["images"]),
                   powers=dict(entry.doc["powers"]),
                   bindings=bindings, binding_kind=entry.doc["binding_kind"],
                   twin=twin, twin_param_map=twin_pm, twin_target_map=twin_tm)


def restricted_block(m: SymMatrix, legs) -> SymMatrix:
    """The two-site operator induced on a subset of the site basis."""
    n = int(round(m.rows ** 0.5))
    t = len(legs)
    out = SymMatrix.zeros(m.ps, t * t, t * t)
    for a, i in enumerate(legs):
        for b, j in enumerate(legs):
            for c, k in enumerate(legs):
                for d, l in enumerate(legs):
                    out[a * t + b, c * t + d] = m[i * n + j, k * n + l]
    return out


def _verify_restriction(catalog: Catalog, entry: CatalogEntry) -> CheckOutcome:
    rst = entry.doc["restriction"]
    target = catalog.get(rst["target"])
    sub = restricted_block(entry.matrix(), rst["legs"])
    ps = entry.param_set()
    bindings = {p: ps.parse(expr) for p, expr in rst["bindings"].items()}
    frozen = target.matrix()
    if frozen.rows != sub.rows:
        return CheckOutcome("restriction", "fail",
                            witness=f"block is {sub.rows}-dimensional, "
                                    f"target is {frozen.rows}-dimensional")
    for i in range(sub.rows):
        for j in range(sub.cols):
            expected = rf_substitute(frozen[i, j], bindings, into=ps)
            if sub[i, j] != expected:
                return CheckOutcome(
                    "restriction", "fail",
                    witness=f"cell ({i},{j}): {serialize(sub[i, j])} != "
                            f"{serialize(expected)}")
    return CheckOutcome("restriction", "pass")


def _hom_invariant_holds(entry: CatalogEntry, spec: HomSpec, n: int) -> bool:
    inv = entry.doc.get("invariant")
    if inv is None:
        return True
    ps = spec.source.alg.ps
    bound = binding_values(spec, n)
    acc = ps.one if inv["op"] == "product" else ps.zero
    for p in inv["params"]:
        acc = acc * bound[p] if inv["op"] == "product" else acc + bound[p]
    return acc == ps.parse(inv["equals"])


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class CheckOutcome:
    name: str
    status: str                   # pass | fail | error
    witness: str | None = None


@dataclass
class VerifyReport:
    entry: str
    kind: str
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.checks)


def _outcome(name: str, result: CheckResult) -> CheckOutcome:
    if result.ok:
        return CheckOutcome(name, "pass")
    return CheckOutcome(name, "fail", witness=str(result.witness))


def _confluence_outcome(name: str, pres: Presentation) -> CheckOutcome:
    rep = check_confluence(pres.rewrite())
    if rep.ok:
        return CheckOutcome(name, "pass")
    return CheckOutcome(name, "fail", witness=str(rep.witnesses[:1]))


def available_checks(entry: CatalogEntry) -> list[str]:
    """Check names ``verify_entry`` would run for this entry."""
    if entry.kind == "contraction":
        return ["matches-frozen"]
    if entry.kind == "hom":
        names = [f"N={n}" for n in entry.doc["exponents"]]
        if entry.doc.get("twin"):
            names.append("twin-tables")
        if entry.doc.get("invariant"):
            names.append("invariant")
        return names
    names = list(entry.flags)
    if "restriction" in entry.doc:
        names.append("restriction")
    return names


def _run_flag(entry: CatalogEntry, flag: str) -> CheckOutcome:
    if flag == "qybe":
        return _outcome(flag, check_qybe(entry.matrix()))
    if flag == "triangular":
        return _outcome(flag, check_triangular(entry.matrix()))
    if flag == "hecke":
        pair = entry.hecke_pair()
        if pair is None:
            return CheckOutcome(flag, "error",
                                witness="no hecke pair recorded")
        return _outcome(flag, check_hecke(entry.matrix(), *pair))
    if flag == "cqybe":
        return _outcome(flag, check_cqybe(entry.family()))
    if flag == "colour-triangular":
        return _outcome(flag, check_colour_triangular(entry.family()))
    if flag == "confluent":
        if entry.kind == "coloured-family":
            single = _confluence_outcome(flag, entry.presentation())
            if single.status != "pass":
                return single
            return _confluence_outcome(flag, entry.pair_presentation())
        return _confluence_outcome(flag, entry.presentation())
    return CheckOutcome(flag, "error", witness=f"unknown check {flag!r}")


def _verify_contraction(catalog: Catalog, entry: CatalogEntry) -> CheckOutcome:
    result, target = run_contraction(catalog, entry)
    frozen = target.matrix()
    if result.rows != frozen.rows:
        return CheckOutcome("matches-frozen", "fail",
                            witness=f"dimension {result.rows} != {frozen.rows}")
    for i in range(result.rows):
        for j in range(result.cols):
            if result[i, j] != frozen[i, j]:
                return CheckOutcome(
                    "matches-frozen", "fail",
                    witness=f"cell ({i},{j}): {serialize(result[i, j])} != "
                            f"{serialize(frozen[i, j])}")
    return CheckOutcome("matches-frozen", "pass")


def _verify_hom(catalog: Catalog, entry: CatalogEntry) -> list[CheckOutcome]:
    spec = build_hom(catalog, entry)
    out = []
    for n in entry.doc["exponents"]:
        try:
            check_hom(spec, N=n)
            out.append(CheckOutcome(f"N={n}", "pass"))
        except HomFailure as e:
            out.append(CheckOutcome(f"N={n}", "fail", witness=str(e.args[0])))
    if entry.doc.get("twin"):
        out.append(CheckOutcome(
            "twin-tables", "pass" if twin_tables_match(spec) else "fail"))
    if entry.doc.get("invariant"):
        bad = [n for n in entry.doc["exponents"]
               if not _hom_invariant_holds(entry, spec, n)]
        out.append(CheckOutcome(
            "invariant", "pass" if not bad else "fail",
            witness=None if not bad else f"fails at N={bad[0]}"))
    return out


def verify_entry(entry: CatalogEntry, catalog: Catalog | None = None,
                 checks: list[str] | None = None) -> VerifyReport:
    """Re-run the checks behind the entry's claims (or a chosen subset)."""
    outcomes: list[CheckOutcome] = []
    if entry.kind in ("rmatrix", "coloured-family", "presentation"):
        names = checks if checks is not None else available_checks(entry)
        for flag in names:
            try:
                if flag == "restriction":
                    _require(catalog is not None,
                             "the restriction check needs the catalog")
                    outcomes.append(_verify_restriction(catalog, entry))
                else:
                    outcomes.append(_run_flag(entry, flag))
            except Exception as e:
                outcomes.append(CheckOutcome(flag, "error", witness=str(e)))
    elif entry.kind == "contraction":
        _require(catalog is not None,
                 "verifying a contraction needs the catalog")
        names = checks if checks is not None else available_checks(entry)
        for name in names:
            if name != "matches-frozen":
                outcomes.append(CheckOutcome(name, "error",
                                             witness=f"unknown check {name!r}"))
                continue
            try:
                outcomes.append(_verify_contraction(catalog, entry))
            except Exception as e:
                outcomes.append(CheckOutcome("matches-frozen", "error",
                                             witness=str(e)))
    elif entry.kind == "hom":
        _require(catalog is not None, "verifying a hom needs the catalog")
        try:
            ran = _verify_hom(catalog, entry)
        except Exception as e:
            ran = [CheckOutcome("hom", "error", witness=str(e))]
        if checks is None:
            outcomes.extend(ran)
        else:
            by_name = {c.name: c for c in ran}
            for name in checks:
                outcomes.append(by_name.get(name) or CheckOutcome(
                    name, "error", witness=f"unknown check {name!r}"))
    return VerifyReport(entry=entry.name, kind=entry.kind, checks=outcomes)
