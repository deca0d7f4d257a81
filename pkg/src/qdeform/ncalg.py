"""Noncommutative polynomial algebra over RatFunc coefficients.

The workhorse of the package: free-algebra elements with exact coefficients,
extraction of the quadratic exchange relations a two-site operator imposes on
a matrix of generators (``R T1 T2 = T2 T1 R`` read entry by entry), rewriting
systems with word-overlap confluence checking, restriction to generator
subsets, localization at invertible generators, and multiplicative
application of generator images (for checking algebra maps).

Words are tuples of generator names; the term order is degree-first, then
left-to-right by the fixed generator order (so rewriting always replaces a
word by provably smaller ones and terminates).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .symexpr import ParamSet, RatFunc, rf_project, rf_substitute
from .tensor import SymMatrix, mat_inverse

Word = tuple  # tuple[str, ...]


class NotOrientable(ValueError):
    """A relation could not be turned into a length-two rewrite rule."""


class NotASubalgebra(ValueError):
    """The kept generators do not close under the presented multiplication."""


class LocalizationError(ValueError):
    """The requested generator cannot be inverted against this presentation."""


class FreeAlgebra:
    """A free associative algebra on named generators over a ParamSet.

    The generator tuple fixes the term order; everything downstream (leading
    words, rule orientation, normal forms) depends on it.
    """

    __slots__ = ("ps", "gens", "_gi")

    def __init__(self, ps: ParamSet, gens: Sequence[str]):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generators: {gens}")
        self.ps = ps
        self.gens = gens
        self._gi = {g: i for i, g in enumerate(gens)}

    def __eq__(self, other) -> bool:
        return (isinstance(other, FreeAlgebra)
                and self.ps == other.ps and self.gens == other.gens)

    def __repr__(self) -> str:
        return f"FreeAlgebra({self.gens} over {self.ps.symbols})"

    def word_key(self, w: Word):
        return (len(w), tuple(self._gi[x] for x in w))

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): self.ps.one})

    def const(self, c: RatFunc) -> "NCPoly":
        return NCPoly(self, {(): c})

    def gen(self, name: str) -> "NCPoly":
        if name not in self._gi:
            raise ValueError(f"unknown generator {name!r}")
        return NCPoly(self, {(name,): self.ps.one})

    def word(self, letters: Sequence[str], coeff: RatFunc | None = None) -> "NCPoly":
        for x in letters:
            if x not in self._gi:
                raise ValueError(f"unknown generator {x!r}")
        return NCPoly(self, {tuple(letters): coeff if coeff is not None else self.ps.one})


class NCPoly:
    """A finite RatFunc-combination of words in a FreeAlgebra."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeAlgebra, terms: Mapping[Word, RatFunc]):
        self.alg = alg
        self.terms = {w: c for w, c in terms.items() if not c.is_zero()}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.alg == other.alg and self.terms == other.terms

    def __add__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            out[w] = c if s is None else s + c
        return NCPoly(self.alg, out)

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.alg, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        out: dict[Word, RatFunc] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                s = out.get(w)
                out[w] = c if s is None else s + c
        return NCPoly(self.alg, out)

    def scale(self, c: RatFunc) -> "NCPoly":
        return NCPoly(self.alg, {w: c * v for w, v in self.terms.items()})

    def leading_word(self) -> Word:
        if not self.terms:
            raise ValueError("zero polynomial has no leading word")
        return max(self.terms, key=self.alg.word_key)

    def leading_coeff(self) -> RatFunc:
        return self.terms[self.leading_word()]

    def monic(self) -> "NCPoly":
        if self.is_zero():
            return self
        inv = self.alg.ps.one / self.leading_coeff()
        return self.scale(inv)

    def map_coeffs(self, fn: Callable[[RatFunc], RatFunc],
                   alg: "FreeAlgebra | None" = None) -> "NCPoly":
        return NCPoly(alg or self.alg, {w: fn(c) for w, c in self.terms.items()})

    def substitute_params(self, bindings: Mapping[str, RatFunc],
                          into: "FreeAlgebra | ParamSet | None" = None) -> "NCPoly":
        if into is None:
            into = self.alg
        elif isinstance(into, ParamSet):
            into = FreeAlgebra(into, self.alg.gens)
        return self.map_coeffs(
            lambda c: rf_substitute(c, bindings, into=into.ps), alg=into)

    def letters(self) -> set:
        out: set = set()
        for w in self.terms:
            out.update(w)
        return out

    def sorted_terms(self) -> list[tuple[Word, RatFunc]]:
        return [(w, self.terms[w]) for w in
                sorted(self.terms, key=self.alg.word_key, reverse=True)]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for w, c in self.sorted_terms():
            cs = str(c)
            body = "*".join(w) if w else ""
            if not body:
                piece = f"({cs})" if (" " in cs or "/" in cs) else cs
            elif cs == "1":
                piece = body
            elif cs == "-1":
                piece = "-" + body
            elif " " in cs or cs.startswith("("):
                piece = f"({cs})*{body}"
            else:
                piece = f"{cs}*{body}"
            pieces.append(piece)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"NCPoly({self})"


def _split_level(text: str, seps: tuple[str, ...]) -> list[str]:
    """Split on separators occurring outside parentheses."""
    parts, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0:
            for sep in seps:
                if text.startswith(sep, i):
                    parts.append(text[start:i])
                    i += len(sep)
                    start = i
                    break
            else:
                i += 1
                continue
            continue
        i += 1
    parts.append(text[start:])
    return parts


def parse_poly(alg: FreeAlgebra, text: str) -> NCPoly:
    """Inverse of ``str(NCPoly)``: a signed sum of optionally
    coefficiented generator words, e.g. ``d*a + (q - q^-1)*b*c - a*d``."""
    text = text.strip()
    if not text or text == "0":
        return alg.zero()
    out = alg.zero()
    first, *rest = _split_level(text, (" + ", " - "))
    signs = [1]
    cursor = len(first)
    for piece in rest:
        signs.append(1 if text[cursor + 1] == "+" else -1)
        cursor += 3 + len(piece)
    for sign, piece in zip(signs, [first] + rest):
        piece = piece.strip()
        if piece.startswith("-"):
            sign, piece = -sign, piece[1:].strip()
        factors = _split_level(piece, ("*",))
        word: list[str] = []
        while factors and factors[-1] in alg._gi:
            word.insert(0, factors.pop())
        coeff_text = "*".join(factors) if factors else "1"
        coeff = alg.ps.parse(coeff_text)
        if sign < 0:
            coeff = -coeff
        out = out + alg.word(tuple(word), coeff)
    return out


# ---------------------------------------------------------------------------
# exchange relations imposed by a two-site operator
# ---------------------------------------------------------------------------

def _cell_poly(alg: FreeAlgebra, pattern: Sequence[Sequence[str]],
               i: int, j: int) -> NCPoly:
    cell = pattern[i][j]
    if cell == "0":
        return alg.zero()
    if cell == "1":
        return alg.one()
    return alg.gen(cell)


def rtt_relations(r: SymMatrix, pattern: Sequence[Sequence[str]],
                  alg: FreeAlgebra,
                  pattern2: Sequence[Sequence[str]] | None = None) -> list[NCPoly]:
    """The canonical quadratic relation set imposed by ``R T1 T2 = T2 T1 R``.

    ``pattern`` names the generator sitting in each matrix slot (with ``"0"``
    and ``"1"`` for frozen entries); ``pattern2``, when given, names the
    second copy's slots — used when the two copies carry different colours.
    The raw entrywise equations are cleaned up: zeros dropped, each relation
    made monic, duplicates removed, and the set fully inter-reduced so the
    result is a minimal generating family in a deterministic order.
    """
    n = len(pattern)
    if r.rows != n * n:
        raise ValueError(f"operator is {r.rows}x{r.cols}, pattern is {n}x{n}")
    p2 = pattern2 if pattern2 is not None else pattern
    raw: list[NCPoly] = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    e = alg.zero()
                    for m in range(n):
                        for nn in range(n):
                            cr = r[i * n + j, m * n + nn]
                            if not cr.is_zero():
                                e = e + (_cell_poly(alg, pattern, m, k)
                                         * _cell_poly(alg, p2, nn, l)).scale(cr)
                            cl = r[m * n + nn, k * n + l]
                            if not cl.is_zero():
                                e = e - (_cell_poly(alg, p2, j, nn)
                                         * _cell_poly(alg, pattern, i, m)).scale(cl)
                    if not e.is_zero():
                        raw.append(e)
    return interreduce(raw)


# ---------------------------------------------------------------------------
# rewriting
# ---------------------------------------------------------------------------

def _nf_engine(p: NCPoly, rules: Mapping[Word, NCPoly],
               rng: random.Random | None = None) -> NCPoly:
    """Reduce ``p`` to a normal form under ``lhs -> rhs`` replacements.

    Deterministic policy: largest reducible word first, leftmost match.  With
    ``rng`` the choice of word/position is random instead (used to test path
    independence of confluent systems).
    """
    if not rules:
        return p
    lens = sorted({len(l) for l in rules}, reverse=True)
    terms = dict(p.terms)
    alg = p.alg
    while True:
        candidates = []
        for w in sorted(terms, key=alg.word_key, reverse=True):
            for pos in range(len(w)):
                for L in lens:
                    seg = w[pos:pos + L]
                    if len(seg) == L and seg in rules:
                        candidates.append((w, pos, seg))
                        if rng is None:
                            break
                else:
                    continue
                break
            if candidates and rng is None:
                break
        if not candidates:
            return NCPoly(alg, terms)
        if rng is None:
            w, pos, seg = candidates[0]
        else:
            w, pos, seg = candidates[rng.randrange(len(candidates))]
        c = terms.pop(w)
        pre, post = w[:pos], w[pos + len(seg):]
        for rw, rc in rules[seg].terms.items():
            nw = pre + rw + post
            add = c * rc
            s = terms.get(nw)
            ns = add if s is None else s + add
            if ns.is_zero():
                terms.pop(nw, None)
            else:
                terms[nw] = ns


@dataclass
class RewriteSystem:
    alg: FreeAlgebra
    rules: dict  # Word -> NCPoly, every RHS word strictly smaller than the LHS

    def normal_form(self, p: NCPoly, rng: random.Random | None = None) -> NCPoly:
        return _nf_engine(p, self.rules, rng)

    def nf_word(self, letters: Sequence[str]) -> NCPoly:
        return self.normal_form(self.alg.word(letters))


def _reduce_by(p: NCPoly, others: Sequence[NCPoly]) -> NCPoly:
    rules = {}
    for q in others:
        if q.is_zero():
            continue
        lw = q.leading_word()
        tail = NCPoly(q.alg, {w: c for w, c in q.terms.items() if w != lw})
        rules[lw] = -tail
    return _nf_engine(p, rules)


def interreduce(polys: Iterable[NCPoly]) -> list[NCPoly]:
    """Minimal, deterministic generating set: monic, duplicate-free, and with
    every relation fully reduced modulo the others."""
    work = [p.monic() for p in polys if not p.is_zero()]
    # dedupe exactly
    seen: list[NCPoly] = []
    for p in work:
        if not any(p == q for q in seen):
            seen.append(p)
    work = seen
    stable = False
    while not stable:
        stable = True
        for i in range(len(work)):
            p = work[i]
            if p.is_zero():
                continue
            red = _reduce_by(p, work[:i] + work[i + 1:])
            if red != p:
                stable = False
                work[i] = red.monic()
        work = [p for p in work if not p.is_zero()]
    alg = work[0].alg if work else None
    work.sort(key=lambda p: (alg.word_key(p.leading_word()), str(p)))
    return work


def build_rewrite_system(relations: Iterable[NCPoly],
                         alg: FreeAlgebra | None = None) -> RewriteSystem:
    """Orient an inter-reduced relation set into ``length-2 word -> tail`` rules."""
    rels = interreduce(relations)
    if not rels and alg is None:
        raise ValueError("cannot infer the algebra from an empty relation set")
    alg = alg or rels[0].alg
    rules: dict[Word, NCPoly] = {}
    for p in rels:
        lw = p.leading_word()
        if len(lw) != 2:
            raise NotOrientable(
                f"leading word {'*'.join(lw)} of relation {p} is not quadratic")
        tail = NCPoly(alg, {w: c for w, c in p.terms.items() if w != lw})
        rules[lw] = -tail
    return RewriteSystem(alg, rules)


@dataclass
class ConfluenceReport:
    ok: bool
    witnesses: list = field(default_factory=list)  # (overlap word, nf A, nf B)


def check_confluence(rsys: RewriteSystem) -> ConfluenceReport:
    """Resolve every length-3 overlap of two rules both ways; the system is
    confluent iff all pairs of resulting normal forms agree."""
    alg = rsys.alg
    witnesses = []
    lhss = sorted(rsys.rules, key=alg.word_key)
    for l1 in lhss:
        for l2 in lhss:
            if l1[1] != l2[0]:
                continue
            x, y, z = l1[0], l1[1], l2[1]
            left = rsys.normal_form(
                rsys.rules[l1] * alg.gen(z))
            right = rsys.normal_form(
                alg.gen(x) * rsys.rules[l2])
            if left != right:
                witnesses.append(((x, y, z), str(left), str(right)))
    return ConfluenceReport(not witnesses, witnesses)


# ---------------------------------------------------------------------------
# restriction to a generator subset
# ---------------------------------------------------------------------------

def restrict_subalgebra(relations: Iterable[NCPoly], alg: FreeAlgebra,
                        keep: Sequence[str]) -> tuple[FreeAlgebra, list[NCPoly]]:
    """The presentation induced on the subalgebra spanned by ``keep``.

    Rules whose leading word stays inside ``keep`` must rewrite into words
    inside ``keep`` — otherwise the span does not close and
    :class:`NotASubalgebra` carries the offending rule.
    """
    kset = set(keep)
    for g in keep:
        if g not in alg._gi:
            raise ValueError(f"unknown generator {g!r}")
    rsys = build_rewrite_system(relations, alg)
    sub = FreeAlgebra(alg.ps, tuple(g for g in alg.gens if g in kset))
    out = []
    for lhs in sorted(rsys.rules, key=alg.word_key):
        if not set(lhs) <= kset:
            continue
        rhs = rsys.rules[lhs]
        bad = rhs.letters() - kset
        if bad:
            raise NotASubalgebra(
                f"product {'*'.join(lhs)} rewrites out of the subset "
                f"(through {sorted(bad)}): {rhs}")
        rel = NCPoly(sub, {lhs: alg.ps.one})
        rel = rel - NCPoly(sub, dict(rhs.terms))
        out.append(rel)
    return sub, interreduce(out)


# ---------------------------------------------------------------------------
# mapping presentations into each other
# ---------------------------------------------------------------------------

def apply_hom(p: NCPoly, images: Mapping[str, NCPoly], target: FreeAlgebra,
              param_map: Mapping[str, RatFunc] | None = None) -> NCPoly:
    """Extend generator images multiplicatively to ``p``; coefficients are
    carried over by ``param_map`` (unbound names pass through unchanged)."""
    out = target.zero()
    for w, c in p.terms.items():
        cc = rf_substitute(c, param_map or {}, into=target.ps)
        term = target.const(cc)
        for letter in w:
            if letter not in images:
                raise ValueError(f"no image given for generator {letter!r}")
            term = term * images[letter]
        out = out + term
    return out


def presentation_implies(relations: Iterable[NCPoly],
                         target_rules: RewriteSystem,
                         rename: Mapping[str, str] | None = None,
                         param_map: Mapping[str, RatFunc] | None = None):
    """Check that each relation, transported by generator renaming and
    parameter substitution, reduces to zero in the target presentation.
    Returns (ok, witness) where the witness is the first surviving image."""
    tgt = target_rules.alg
    images = {}
    for p in relations:
        for letter in p.letters():
            if letter not in images:
                name = (rename or {}).get(letter, letter)
                images[letter] = tgt.gen(name)
    for p in relations:
        img = apply_hom(p, images, tgt, param_map)
        nf = target_rules.normal_form(img)
        if not nf.is_zero():
            return False, (str(p), str(nf))
    return True, None


def presentations_equivalent(rels_a: Iterable[NCPoly], alg_a: FreeAlgebra,
                             rels_b: Iterable[NCPoly], alg_b: FreeAlgebra,
                             rename_ab: Mapping[str, str] | None = None,
                             params_ab: Mapping[str, RatFunc] | None = None,
                             rename_ba: Mapping[str, str] | None = None,
                             params_ba: Mapping[str, RatFunc] | None = None):
    """Mutual containment of the two relation ideals under the given maps."""
    rels_a = list(rels_a)
    rels_b = list(rels_b)
    ok_ab, wit = presentation_implies(
        rels_a, build_rewrite_system(rels_b, alg_b), rename_ab, params_ab)
    if not ok_ab:
        return False, ("forward", wit)
    ok_ba, wit = presentation_implies(
        rels_b, build_rewrite_system(rels_a, alg_a), rename_ba, params_ba)
    if not ok_ba:
        return False, ("backward", wit)
    return True, None


# ---------------------------------------------------------------------------
# localization at invertible generators
# ---------------------------------------------------------------------------

def _linear_rhs_matrix(rsys: RewriteSystem, f: str, partners: list[str]):
    """For rules ``f*y -> sum_x c[x,y] x*f`` collect the coefficient matrix;
    None where the shape fails."""
    alg = rsys.alg
    ps = alg.ps
    mat = SymMatrix.zeros(ps, len(partners), len(partners))
    index = {y: i for i, y in enumerate(partners)}
    for y in partners:
        rhs = rsys.rules.get((f, y))
        if rhs is None:
            return None, (f, y, "missing rule")
        for w, c in rhs.terms.items():
            if len(w) != 2 or w[1] != f or w[0] not in index:
                return None, (f, y, f"term {c}*{'*'.join(w)} not of the form x*{f}")
            mat[index[w[0]], index[y]] = c
    return mat, None


def localize(relations: Iterable[NCPoly], alg: FreeAlgebra,
             invert: Sequence[str],
             inverse_names: Mapping[str, str] | None = None
             ) -> tuple[FreeAlgebra, RewriteSystem]:
    """Adjoin two-sided inverses for the listed generators.

    Each inverse letter sits directly after its generator in the new order.
    The exchange rules for an inverse are derived by conjugating the original
    generator's rules, which must move it through every smaller letter
    linearly (``f*y = sum c x*f``); otherwise :class:`LocalizationError`.
    The returned system contains the original rules, the cancellation rules,
    and the derived exchange rules, ready for a confluence check.
    """
    base = build_rewrite_system(relations, alg)
    inv_name = {}
    for f in invert:
        if f not in alg._gi:
            raise ValueError(f"unknown generator {f!r}")
        name = (inverse_names or {}).get(f, f.upper())
        if name in alg._gi or name in inv_name.values() or name == f:
            raise LocalizationError(f"inverse name {name!r} collides")
        inv_name[f] = name
    order: list[str] = []
    for g in alg.gens:
        order.append(g)
        if g in inv_name:
            order.append(inv_name[g])
    big = FreeAlgebra(alg.ps, tuple(order))
    ps = alg.ps
    rules: dict[Word, NCPoly] = {}
    for lhs, rhs in base.rules.items():
        rules[lhs] = NCPoly(big, dict(rhs.terms))
    for f in invert:
        F = inv_name[f]
        rules[(f, F)] = big.one()
        rules[(F, f)] = big.one()
        fi = alg._gi[f]
        below = [g for g in alg.gens[:fi]]
        above = [g for g in alg.gens[fi + 1:]]
        if below:
            phi, err = _linear_rhs_matrix(base, f, below)
            if phi is None:
                raise LocalizationError(
                    f"cannot move {f!r} through smaller letters: {err}")
            try:
                phi_inv = mat_inverse(phi)
            except Exception as e:
                raise LocalizationError(
                    f"exchange matrix of {f!r} is singular: {e}") from None
            for j, y in enumerate(below):
                terms: dict[Word, RatFunc] = {}
                for i, x in enumerate(below):
                    c = phi_inv[i, j]
                    if not c.is_zero():
                        terms[(x, F)] = c
                rules[(F, y)] = NCPoly(big, terms)
        if above:
            # letters larger than f: rules read  z*f -> sum_w psi[w,z] f*w
            idx = {g: i for i, g in enumerate(above)}
            psi = SymMatrix.zeros(ps, len(above), len(above))
            for z in above:
                rhs = base.rules.get((z, f))
                if rhs is None:
                    raise LocalizationError(f"missing rule for {z}*{f}")
                for w, c in rhs.terms.items():
                    if len(w) != 2 or w[0] != f or w[1] not in idx:
                        raise LocalizationError(
                            f"rule {z}*{f} -> {rhs} does not move {f} left linearly")
                    psi[idx[w[1]], idx[z]] = c
            try:
                psi_inv = mat_inverse(psi)
            except Exception as e:
                raise LocalizationError(
                    f"exchange matrix over {f!r} is singular: {e}") from None
            for i, w in enumerate(above):
                terms2: dict[Word, RatFunc] = {}
                for j, z in enumerate(above):
                    c = psi_inv[j, i]
                    if not c.is_zero():
                        terms2[(F, z)] = c
                rules[(w, F)] = NCPoly(big, terms2)
                if w in inv_name:
                    # both letters are inverted: need a plain exchange to
                    # carry the relation over to the pair of inverses
                    rhs = base.rules[(w, f)]
                    if len(rhs.terms) != 1 or (f, w) not in rhs.terms:
                        raise LocalizationError(
                            f"inverted letters {w!r}, {f!r} do not exchange "
                            f"by a plain factor: {rhs}")
                    c1 = rhs.terms[(f, w)]
                    # w f = c f w  =>  W F = c F W
                    rules[(inv_name[w], F)] = NCPoly(
                        big, {(F, inv_name[w]): c1})
    return big, RewriteSystem(big, rules)
