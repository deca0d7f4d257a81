"""Coalgebra and Hopf-level checks on matrix presentations.

A presentation couples a free algebra with its defining exchange relations
and one or more generator-matrix grids.  The grid induces the matrix
coproduct (row-by-column tensor expansion) and the counit (identity grid);
this module verifies that both respect the relations, checks group-likeness
and centrality of distinguished elements, certifies antipodes through a
determinant-clearing representation, compares quotient presentations, and
certifies algebra maps whose generator images are power-of-a-generator
multiples with exponent-indexed parameter bindings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .ncalg import (
    FreeAlgebra,
    NCPoly,
    RewriteSystem,
    apply_hom,
    build_rewrite_system,
    interreduce,
    localize,
    presentation_implies,
    rtt_relations,
)
from .rmx import ColouredFamily, colour_copies
from .symexpr import ParamSet, RatFunc


class AxiomFailure(ValueError):
    """A coalgebra or antipode axiom does not hold; the message names it."""


class QuotientMismatch(ValueError):
    """Killing the requested generators does not reproduce the target."""


class HomFailure(ValueError):
    """An algebra-map certification failed; ``.report`` has the details."""

    def __init__(self, message: str, report: "HomReport | None" = None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

def _grid_cells(grid: Sequence[Sequence[str]]):
    for i, row in enumerate(grid):
        for j, cell in enumerate(row):
            if cell not in ("0", "1"):
                yield cell, i, j


@dataclass
class Presentation:
    """A free algebra, its relation ideal, and its generator-matrix grids.

    ``patterns`` holds one square grid per independent generator matrix
    (coloured pair presentations carry two); cells are generator names or
    the frozen entries ``"0"`` / ``"1"``.  ``relations`` may be ``None`` for
    grid-only data, in which case only pattern-level checks apply.
    """

    alg: FreeAlgebra
    relations: list | None
    patterns: list

    def __post_init__(self):
        seen = []
        for grid in self.patterns:
            n = len(grid)
            if any(len(row) != n for row in grid):
                raise ValueError("pattern grid is not square")
            for cell, _i, _j in _grid_cells(grid):
                if cell not in self.alg._gi:
                    raise ValueError(f"pattern cell {cell!r} is not a generator")
                if cell in seen:
                    raise ValueError(f"generator {cell!r} appears twice")
                seen.append(cell)
        if set(seen) != set(self.alg.gens):
            missing = set(self.alg.gens) - set(seen)
            raise ValueError(f"generators missing from the patterns: {sorted(missing)}")
        self._rsys = None

    def rewrite(self) -> RewriteSystem:
        if self.relations is None:
            raise ValueError("presentation carries no relations")
        if self._rsys is None:
            self._rsys = build_rewrite_system(self.relations, self.alg)
        return self._rsys


def presentation_from_matrix(r, pattern, ps: ParamSet | None = None,
                             gens: Sequence[str] | None = None) -> Presentation:
    """Generators read off the grid row-major; relations extracted from ``r``."""
    ps = ps or r.ps
    if gens is None:
        gens = [cell for cell, _i, _j in _grid_cells(pattern)]
    alg = FreeAlgebra(ps, tuple(gens))
    return Presentation(alg, rtt_relations(r, pattern, alg), [list(map(list, pattern))])


def _suffix_grid(pattern, suffix: str):
    return [[cell if cell in ("0", "1") else cell + suffix for cell in row]
            for row in pattern]


def coloured_single_presentation(fam: ColouredFamily, pattern,
                                 order: Sequence[str] | None = None) -> Presentation:
    """Both tensor legs carry one and the same colour; the second-slot
    parameters disappear from the coefficient field."""
    ps = ParamSet(fam.globals_ + fam.first)
    c = [ps.var(n) for n in fam.first]
    return presentation_from_matrix(fam.instantiate(c, c, into=ps), pattern,
                                    ps=ps, gens=order)


def coloured_pair_presentation(fam: ColouredFamily, pattern,
                               suffixes=("1", "2"),
                               order: Sequence[str] | None = None) -> Presentation:
    """Two differently coloured generator copies with all cross relations.

    The relation set is the union of the same-colour exchange relations of
    each copy and the mixed-colour relations coupling them, inter-reduced.
    ``order``, when given, lists the per-copy generator names in the letter
    order the rewrite engine should use (first copy before second).
    """
    ps2, (c1, c2) = colour_copies(fam, 2)
    pat1 = _suffix_grid(pattern, suffixes[0])
    pat2 = _suffix_grid(pattern, suffixes[1])
    if order is None:
        gens = ([cell for cell, _i, _j in _grid_cells(pat1)]
                + [cell for cell, _i, _j in _grid_cells(pat2)])
    else:
        gens = ([g + suffixes[0] for g in order]
                + [g + suffixes[1] for g in order])
    alg = FreeAlgebra(ps2, tuple(gens))
    rels = (rtt_relations(fam.instantiate(c1, c1, into=ps2), pat1, alg)
            + rtt_relations(fam.instantiate(c2, c2, into=ps2), pat2, alg)
            + rtt_relations(fam.instantiate(c1, c2, into=ps2), pat1, alg,
                            pattern2=pat2))
    return Presentation(alg, interreduce(rels), [pat1, pat2])


# ---------------------------------------------------------------------------
# tensor powers of a presentation's algebra
# ---------------------------------------------------------------------------

def tensor_system(rsys: RewriteSystem, copies: int = 2
                  ) -> tuple[FreeAlgebra, RewriteSystem]:
    """``copies`` independent relabelled copies of the algebra, with letters
    of distinct copies commuting.  Letter ``g`` of copy ``i`` becomes
    ``g@i``; copy-1 letters come first in the order."""
    alg = rsys.alg
    names = [f"{g}@{i}" for i in range(1, copies + 1) for g in alg.gens]
    big = FreeAlgebra(alg.ps, tuple(names))
    rules = {}
    for i in range(1, copies + 1):
        for lhs, rhs in rsys.rules.items():
            nl = tuple(f"{x}@{i}" for x in lhs)
            rules[nl] = NCPoly(big, {tuple(f"{x}@{i}" for x in w): c
                                     for w, c in rhs.terms.items()})
    for i in range(1, copies + 1):
        for j in range(i + 1, copies + 1):
            for x in alg.gens:
                for y in alg.gens:
                    rules[(f"{x}@{j}", f"{y}@{i}")] = big.word(
                        (f"{y}@{i}", f"{x}@{j}"))
    return big, RewriteSystem(big, rules)


def matrix_coproduct(pres: Presentation, big: FreeAlgebra,
                     copy_a: int = 1, copy_b: int = 2) -> dict:
    """Row-by-column coproduct images of every generator, as elements of a
    tensor-power algebra built by :func:`tensor_system`."""
    images: dict[str, NCPoly] = {}
    for grid in pres.patterns:
        n = len(grid)
        for g, i, j in _grid_cells(grid):
            acc = big.zero()
            for k in range(n):
                left, right = grid[i][k], grid[k][j]
                if left == "0" or right == "0":
                    continue
                w = []
                if left != "1":
                    w.append(f"{left}@{copy_a}")
                if right != "1":
                    w.append(f"{right}@{copy_b}")
                acc = acc + big.word(tuple(w))
            images[g] = acc
    return images


def counit_images(pres: Presentation) -> dict:
    """The identity-grid counit: 1 on diagonal cells, 0 elsewhere."""
    ps = pres.alg.ps
    out: dict[str, RatFunc] = {}
    for grid in pres.patterns:
        for g, i, j in _grid_cells(grid):
            out[g] = ps.one if i == j else ps.zero
    return out


def _scalar_image(p: NCPoly, eps: Mapping[str, RatFunc]) -> RatFunc:
    ps = p.alg.ps
    total = ps.zero
    for w, c in p.terms.items():
        v = c
        for letter in w:
            v = v * eps[letter]
        total = total + v
    return total


def _copy_embedding(pres: Presentation, big: FreeAlgebra, i: int) -> dict:
    return {g: big.gen(f"{g}@{i}") for g in pres.alg.gens}


# ---------------------------------------------------------------------------
# bialgebra axioms
# ---------------------------------------------------------------------------

@dataclass
class BialgebraReport:
    ok: bool
    relations_checked: int
    generators_checked: int


def check_bialgebra(pres: Presentation) -> BialgebraReport:
    """Coproduct and counit are algebra maps; coassociativity and the counit
    axioms hold on every generator.  Raises :class:`AxiomFailure` otherwise."""
    rsys = pres.rewrite()
    big2, sys2 = tensor_system(rsys, 2)
    dimg = matrix_coproduct(pres, big2)
    for p in pres.relations:
        nf = sys2.normal_form(apply_hom(p, dimg, big2))
        if not nf.is_zero():
            raise AxiomFailure(
                f"coproduct does not preserve the relation {p}: residue {nf}")
    eps = counit_images(pres)
    for p in pres.relations:
        v = _scalar_image(p, eps)
        if not v.is_zero():
            raise AxiomFailure(
                f"counit does not annihilate the relation {p}: value {v}")
    big3, _sys3 = tensor_system(rsys, 3)
    cop12 = matrix_coproduct(pres, big3, 1, 2)
    cop23 = matrix_coproduct(pres, big3, 2, 3)
    left_images = {}
    right_images = {}
    for g in pres.alg.gens:
        left_images[f"{g}@1"] = cop12[g]
        left_images[f"{g}@2"] = big3.gen(f"{g}@3")
        right_images[f"{g}@1"] = big3.gen(f"{g}@1")
        right_images[f"{g}@2"] = cop23[g]
    for g in pres.alg.gens:
        lhs = apply_hom(dimg[g], left_images, big3)
        rhs = apply_hom(dimg[g], right_images, big3)
        if lhs != rhs:
            raise AxiomFailure(f"coassociativity fails on generator {g!r}")
    alg = pres.alg
    for grid in pres.patterns:
        n = len(grid)
        for g, i, j in _grid_cells(grid):
            acc_l = alg.zero()
            acc_r = alg.zero()
            for k in range(n):
                lcell, rcell = grid[i][k], grid[k][j]
                if lcell != "0" and rcell != "0":
                    acc_l = acc_l + _cell_word(alg, rcell).scale(
                        eps[lcell] if lcell != "1" else alg.ps.one)
                lcell2, rcell2 = grid[i][k], grid[k][j]
                if lcell2 != "0" and rcell2 != "0":
                    acc_r = acc_r + _cell_word(alg, lcell2).scale(
                        eps[rcell2] if rcell2 != "1" else alg.ps.one)
            if acc_l != alg.gen(g) or acc_r != alg.gen(g):
                raise AxiomFailure(f"counit axiom fails on generator {g!r}")
    return BialgebraReport(True, len(pres.relations), len(alg.gens))


def _cell_word(alg: FreeAlgebra, cell: str) -> NCPoly:
    if cell == "1":
        return alg.one()
    return alg.gen(cell)


# ---------------------------------------------------------------------------
# group-like elements
# ---------------------------------------------------------------------------

@dataclass
class GroupLikeReport:
    grouplike: bool
    central: bool
    witness: tuple | None = None


def check_grouplike(pres: Presentation, x: NCPoly) -> GroupLikeReport:
    """Group-like: coproduct splits as the two-copy product and the counit
    gives 1.  Central: commutes with every generator; the witness is the
    first generator with a nonzero commutator normal form."""
    rsys = pres.rewrite()
    big2, sys2 = tensor_system(rsys, 2)
    dimg = matrix_coproduct(pres, big2)
    dx = apply_hom(x, dimg, big2)
    x1 = apply_hom(x, _copy_embedding(pres, big2, 1), big2)
    x2 = apply_hom(x, _copy_embedding(pres, big2, 2), big2)
    split = sys2.normal_form(dx - x1 * x2).is_zero()
    eps_val = _scalar_image(x, counit_images(pres))
    grouplike = split and eps_val.is_one()
    central = True
    witness = None
    for g in pres.alg.gens:
        nf = rsys.normal_form(x * pres.alg.gen(g) - pres.alg.gen(g) * x)
        if not nf.is_zero():
            central = False
            witness = (g, str(nf))
            break
    return GroupLikeReport(grouplike, central, witness)


# ---------------------------------------------------------------------------
# determinant-cleared localization and antipodes
# ---------------------------------------------------------------------------

def quasi_twists(rsys: RewriteSystem, d: NCPoly) -> dict:
    """Scalars ``psi_g`` with ``d·g = psi_g·g·d`` modulo the relations, for
    every generator; raises if some generator fails to quasi-commute."""
    alg = rsys.alg
    out: dict[str, RatFunc] = {}
    for g in alg.gens:
        left = rsys.normal_form(d * alg.gen(g))
        right = rsys.normal_form(alg.gen(g) * d)
        if set(left.terms) != set(right.terms):
            raise ValueError(f"element does not quasi-commute with {g!r}")
        psi = None
        for w, c in left.terms.items():
            ratio = c / right.terms[w]
            if psi is None:
                psi = ratio
            elif psi != ratio:
                raise ValueError(f"element does not quasi-commute with {g!r}")
        out[g] = alg.ps.one if psi is None else psi
    return out


@dataclass
class LocalizedElem:
    """``D^power · body`` with all determinant powers cleared to the left."""
    power: int
    body: NCPoly


class DetAlgebra:
    """Arithmetic for elements ``D^k·p`` over a rewrite system in which the
    chosen element ``D`` quasi-commutes with every generator.

    Equality and the zero test left-cancel common ``D`` powers, which is
    exact because the presented algebras are iterated skew-polynomial
    domains, so ``D`` is regular.
    """

    def __init__(self, rsys: RewriteSystem, det: NCPoly):
        self.rsys = rsys
        self.alg = rsys.alg
        self.det = rsys.normal_form(det)
        self.twists = quasi_twists(rsys, self.det)

    def elem(self, power: int, body: NCPoly) -> LocalizedElem:
        return LocalizedElem(power, self.rsys.normal_form(body))

    def from_poly(self, p: NCPoly) -> LocalizedElem:
        return self.elem(0, p)

    def one(self) -> LocalizedElem:
        return LocalizedElem(0, self.alg.one())

    def zero(self) -> LocalizedElem:
        return LocalizedElem(0, self.alg.zero())

    def _shift(self, p: NCPoly, k: int) -> NCPoly:
        # p·D^k = D^k·shift(p, k)
        if k == 0:
            return p
        terms = {}
        for w, c in p.terms.items():
            for letter in w:
                c = c * self.twists[letter] ** (-k)
            terms[w] = c
        return NCPoly(p.alg, terms)

    def _dpow(self, n: int) -> NCPoly:
        acc = self.alg.one()
        for _ in range(n):
            acc = self.rsys.normal_form(acc * self.det)
        return acc

    def mul(self, a: LocalizedElem, b: LocalizedElem) -> LocalizedElem:
        return self.elem(a.power + b.power, self._shift(a.body, b.power) * b.body)

    def add(self, a: LocalizedElem, b: LocalizedElem) -> LocalizedElem:
        k = min(a.power, b.power)
        return self.elem(k, self._dpow(a.power - k) * a.body
                         + self._dpow(b.power - k) * b.body)

    def neg(self, a: LocalizedElem) -> LocalizedElem:
        return LocalizedElem(a.power, -a.body)

    def scalar(self, c: RatFunc) -> LocalizedElem:
        return LocalizedElem(0, self.alg.const(c))

    def is_zero(self, a: LocalizedElem) -> bool:
        return self.rsys.normal_form(a.body).is_zero()

    def equal(self, a: LocalizedElem, b: LocalizedElem) -> bool:
        return self.is_zero(self.add(a, self.neg(b)))


@dataclass
class HopfData:
    """A presentation with its optional Hopf extras: a determinant-like
    element, generators to invert, and antipode images over the localized
    alphabet (as determinant-cleared elements)."""

    pres: Presentation
    det: NCPoly | None = None
    invert: tuple = ()
    antipode: dict | None = None   # generator -> LocalizedElem

    def localized(self) -> tuple[FreeAlgebra, RewriteSystem]:
        if self.invert:
            return localize(self.pres.relations, self.pres.alg,
                            list(self.invert))
        return self.pres.alg, self.pres.rewrite()


@dataclass
class AntipodeReport:
    ok: bool
    relations_checked: int
    cells_checked: int


def check_antipode(h: HopfData) -> AntipodeReport:
    """The supplied images reverse products on every relation and satisfy
    both matrix inversion identities against the generator grids."""
    if h.antipode is None:
        raise ValueError("no antipode images supplied")
    pres = h.pres
    missing = [g for g in pres.alg.gens if g not in h.antipode]
    if missing:
        raise ValueError(f"antipode undefined on generators {missing}")
    big, rsys = h.localized()
    det = h.det if h.det is not None else pres.alg.one()
    dalg = DetAlgebra(rsys, NCPoly(big, dict(det.terms)))
    images = {g: LocalizedElem(e.power, NCPoly(big, dict(e.body.terms)))
              for g, e in h.antipode.items()}

    def s_word(w, coeff) -> LocalizedElem:
        acc = dalg.scalar(coeff)
        for letter in reversed(w):
            acc = dalg.mul(acc, images[letter])
        return acc

    for p in pres.relations:
        total = dalg.zero()
        for w, c in p.terms.items():
            total = dalg.add(total, s_word(w, c))
        if not dalg.is_zero(total):
            raise AxiomFailure(
                f"images do not reverse the relation {p}: residue "
                f"D^{total.power}*({total.body})")

    cells = 0
    for grid in pres.patterns:
        n = len(grid)
        for i in range(n):
            for j in range(n):
                target = dalg.one() if i == j else dalg.zero()
                left = dalg.zero()
                right = dalg.zero()
                for k in range(n):
                    lcell, rcell = grid[i][k], grid[k][j]
                    if lcell == "0" or rcell == "0":
                        continue
                    sl = dalg.one() if lcell == "1" else images[lcell]
                    pr = (dalg.one() if rcell == "1"
                          else dalg.from_poly(big.gen(rcell)))
                    left = dalg.add(left, dalg.mul(sl, pr))
                    pl = (dalg.one() if lcell == "1"
                          else dalg.from_poly(big.gen(lcell)))
                    sr = dalg.one() if rcell == "1" else images[rcell]
                    right = dalg.add(right, dalg.mul(pl, sr))
                if not dalg.equal(left, target):
                    raise AxiomFailure(
                        f"antipode-times-matrix identity fails at cell "
                        f"({i},{j}): D^{left.power}*({left.body})")
                if not dalg.equal(right, target):
                    raise AxiomFailure(
                        f"matrix-times-antipode identity fails at cell "
                        f"({i},{j}): D^{right.power}*({right.body})")
                cells += 1
    return AntipodeReport(True, len(pres.relations), cells)


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------

@dataclass
class QuotientReport:
    ok: bool
    killed: tuple
    relations_compared: int


def check_quotient(source: Presentation, kill: Sequence[str],
                   target: Presentation) -> QuotientReport:
    """Setting the killed generators to zero must reproduce the target's
    grids and (when both sides carry relations) its relation ideal; the
    killed set must also be a coideal of the grid coproduct."""
    kset = set(kill)
    unknown = kset - set(source.alg.gens)
    if unknown:
        raise ValueError(f"unknown generators to kill: {sorted(unknown)}")
    for grid in source.patterns:
        n = len(grid)
        for g, i, j in _grid_cells(grid):
            if g not in kset:
                continue
            for k in range(n):
                lcell, rcell = grid[i][k], grid[k][j]
                if lcell == "0" or rcell == "0":
                    continue
                if lcell not in kset and rcell not in kset:
                    raise QuotientMismatch(
                        f"coproduct term {lcell}(x){rcell} of killed "
                        f"generator {g!r} survives the quotient")
    transported = [[["0" if cell in kset else cell for cell in row]
                    for row in grid] for grid in source.patterns]
    if transported != [list(map(list, g)) for g in target.patterns]:
        raise QuotientMismatch("quotient grids do not match the target grids")
    compared = 0
    if source.relations is not None and target.relations is not None:
        images = {}
        for g in source.alg.gens:
            images[g] = (target.alg.zero() if g in kset
                         else target.alg.gen(g))
        quotient = [q for q in
                    (apply_hom(p, images, target.alg)
                     for p in source.relations) if not q.is_zero()]
        quotient = interreduce(quotient)
        ok, wit = presentation_implies(quotient, target.rewrite())
        if not ok:
            raise QuotientMismatch(
                f"quotient relation survives in the target: {wit}")
        ok, wit = presentation_implies(
            target.relations, build_rewrite_system(quotient, target.alg))
        if not ok:
            raise QuotientMismatch(
                f"target relation not implied by the quotient: {wit}")
        compared = len(quotient)
    return QuotientReport(True, tuple(kill), compared)


# ---------------------------------------------------------------------------
# exponent-indexed algebra maps
# ---------------------------------------------------------------------------

@dataclass
class HomSpec:
    """Certifiable map: each target generator goes to the N-th power of a
    designated source letter times a source generator, and each target
    parameter is bound to a source expression built from an exponent table.

    ``bindings`` rows are ``{source param: e}`` with ``e`` an integer or the
    markers ``"N"`` / ``"-N"``; a ``monomial`` row multiplies powers, an
    ``additive`` row sums scalar multiples.  ``twin`` points at the additive
    counterpart whose coefficient table must mirror this spec's exponent
    table under the recorded parameter renamings.
    """

    name: str
    source: Presentation
    target: Presentation
    images: dict            # target generator -> source generator
    powers: dict            # target generator -> source letter to raise
    bindings: dict          # target param -> {source param: int | "N" | "-N"}
    binding_kind: str       # "monomial" | "additive"
    twin: "HomSpec | None" = None
    twin_param_map: dict | None = None    # source param -> twin source param
    twin_target_map: dict | None = None   # target param -> twin target param


def _eval_marker(e, n: int) -> int:
    if e == "N":
        return n
    if e == "-N":
        return -n
    if isinstance(e, int):
        return e
    raise ValueError(f"bad exponent entry {e!r}")


def binding_values(spec: HomSpec, n: int) -> dict:
    """The target-parameter substitutions at a concrete exponent."""
    ps = spec.source.alg.ps
    out: dict[str, RatFunc] = {}
    for tparam, row in spec.bindings.items():
        if spec.binding_kind == "monomial":
            v = ps.one
            for p, e in row.items():
                v = v * ps.var(p) ** _eval_marker(e, n)
        else:
            v = ps.zero
            for p, e in row.items():
                v = v + ps.const(_eval_marker(e, n)) * ps.var(p)
        out[tparam] = v
    return out


def twin_tables_match(spec: HomSpec) -> bool:
    """The multiplicative exponent table mirrors the additive coefficient
    table after renaming parameters through the recorded correspondence.

    The colour entries (the ``"N"`` markers) must agree exactly; the plain
    integer entries must agree up to one overall orientation sign, because
    the two deformation families each fix the sign of their classical
    parameter by an independent convention."""
    if spec.twin is None:
        return True
    if spec.binding_kind != "monomial" or spec.twin.binding_kind != "additive":
        return False
    sign = 0
    for tparam, row in spec.bindings.items():
        jparam = spec.twin_target_map[tparam]
        expected = {spec.twin_param_map[p]: e for p, e in row.items()}
        got = spec.twin.bindings.get(jparam)
        if got is None or set(got) != set(expected):
            return False
        for p, e in expected.items():
            g = got[p]
            if isinstance(e, str) or isinstance(g, str):
                if e != g:
                    return False
            elif e == g == 0:
                continue
            elif sign == 0 and e != 0 and g in (e, -e):
                sign = 1 if g == e else -1
            elif g != sign * e:
                return False
    return set(spec.twin_target_map[t] for t in spec.bindings) \
        == set(spec.twin.bindings)


@dataclass
class HomReport:
    ok: bool
    N: int
    relation_status: list          # (relation, "pass"|"fail", residue|None)
    twin_checked: bool | None = None


def check_hom(spec: HomSpec, N: int = 1,
              override: Mapping[str, RatFunc] | None = None) -> HomReport:
    """Every target relation, transported through the generator images and
    parameter bindings at exponent ``N``, must vanish in the source algebra
    localized at the powered letters.  Raises :class:`HomFailure` (with the
    report attached) on the first surviving relation or a twin-table
    mismatch."""
    if N == 0:
        raise ValueError("exponent must be nonzero")
    inv = sorted(set(spec.powers.values()),
                 key=spec.source.alg.gens.index)
    big, rsys = localize(spec.source.relations, spec.source.alg, inv)
    inv_name = {f: f.upper() for f in inv}
    images = {}
    for tgen, sgen in spec.images.items():
        fl = spec.powers[tgen]
        if N > 0:
            w = (fl,) * N + (sgen,)
        else:
            w = (inv_name[fl],) * (-N) + (sgen,)
        images[tgen] = big.word(w)
    param_map = binding_values(spec, N)
    if override:
        param_map.update(override)
    status = []
    first = None
    for p in spec.target.relations:
        nf = rsys.normal_form(apply_hom(p, images, big, param_map))
        if nf.is_zero():
            status.append((str(p), "pass", None))
        else:
            status.append((str(p), "fail", str(nf)))
            if first is None:
                first = (str(p), str(nf))
    twin_ok = None
    if spec.twin is not None:
        twin_ok = twin_tables_match(spec)
    report = HomReport(first is None and twin_ok is not False, N, status,
                       twin_ok)
    if not report.ok:
        if first is not None:
            raise HomFailure(
                f"relation {first[0]} survives with residue {first[1]}",
                report)
        raise HomFailure("exponent tables do not mirror the twin", report)
    return report
