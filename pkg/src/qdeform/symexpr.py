"""Exact arithmetic for multivariate Laurent rational functions over the rationals.

Every coefficient in the workbench lives here: a :class:`RatFunc` is a quotient
of Laurent polynomials over a fixed, ordered :class:`ParamSet`, kept in a
canonical form so that equality of values coincides with equality of the
stored dictionaries.

Canonical form
--------------
A nonzero value is stored as ``num / den`` where

* ``num`` maps exponent vectors (integers, possibly negative) to nonzero
  ``Fraction`` coefficients;
* ``den`` is an ordinary polynomial (no negative exponents) with integer
  coefficients, content 1, positive leading coefficient (lexicographic order
  on exponent vectors) and no monomial factor;
* ``num`` and ``den`` have no common polynomial factor.

The representation of zero is the empty numerator over the denominator 1.
All normalisation is deterministic, so reruns are bit-identical.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping


class DivisionByZero(ZeroDivisionError):
    """Division of a RatFunc by the zero RatFunc."""


class SingularSubstitution(ValueError):
    """A substitution made a denominator vanish identically."""


class SingularLimit(ValueError):
    """The requested limit does not exist (denominator vanishes at the point)."""


class ParseError(ValueError):
    """Malformed RatFunc text."""


Expvec = tuple  # exponent vector, one slot per parameter


# ---------------------------------------------------------------------------
# polynomial dictionaries
#
# A "poly dict" maps exponent vectors to nonzero coefficients.  Helpers below
# are agnostic about coefficient type (Fraction or int) unless stated.
# ---------------------------------------------------------------------------

def _padd(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s = s + c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _pneg(a: dict) -> dict:
    return {e: -c for e, c in a.items()}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e)
            if s is None:
                out[e] = ca * cb
            else:
                s = s + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
    return out


def _pscale(a: dict, c) -> dict:
    if not c:
        return {}
    return {e: v * c for e, v in a.items()}


def _pshift(a: dict, vec: Expvec) -> dict:
    """Multiply by the monomial with exponent vector ``vec``."""
    if not any(vec):
        return dict(a)
    return {tuple(x + y for x, y in zip(e, vec)): c for e, c in a.items()}


def _pminexps(a: dict) -> Expvec:
    it = iter(a)
    first = next(it)
    mins = list(first)
    for e in it:
        for i, x in enumerate(e):
            if x < mins[i]:
                mins[i] = x
    return tuple(mins)


def _plead(a: dict) -> Expvec:
    """Leading exponent vector under plain lexicographic comparison."""
    return max(a)


def _is_one(a: dict) -> bool:
    if len(a) != 1:
        return False
    (e, c), = a.items()
    return c == 1 and not any(e)


# --- integer-coefficient helpers (used by the gcd machinery) ---------------

def _icontent(a: dict) -> int:
    g = 0
    for c in a.values():
        g = math.gcd(g, abs(c))
        if g == 1:
            break
    return g


def _pdiv_exact(a: dict, b: dict) -> dict:
    """Exact division of poly dicts (Fraction or int coefficients).

    Raises ValueError if ``b`` does not divide ``a``.  Exponents must be
    nonnegative in both arguments.
    """
    if not a:
        return {}
    rem = {e: Fraction(c) for e, c in a.items()}
    lb = _plead(b)
    cb = b[lb]
    q: dict = {}
    while rem:
        la = _plead(rem)
        e = tuple(x - y for x, y in zip(la, lb))
        if any(x < 0 for x in e):
            raise ValueError("not divisible")
        c = rem[la] / cb
        q[e] = c
        rem = _padd(rem, _pmul({e: -c}, b))
    return q


def _pp_and_content(a: dict) -> tuple[int, dict]:
    """Split integer poly into (content, primitive part); content carries the sign
    of the leading coefficient, so the primitive part has a positive one."""
    c = _icontent(a)
    if a[_plead(a)] < 0:
        c = -c
    return c, {e: v // c for e, v in a.items()}


def _univar(a: dict, v: int) -> dict[int, dict]:
    """View poly dict as univariate in slot ``v``: degree -> coefficient dict
    (coefficient dicts keep full-width exponent vectors with slot v zeroed)."""
    out: dict[int, dict] = {}
    for e, c in a.items():
        d = e[v]
        r = e[:v] + (0,) + e[v + 1:]
        out.setdefault(d, {})[r] = c
    return out


def _from_univar(u: dict[int, dict], v: int) -> dict:
    out: dict = {}
    for d, coef in u.items():
        for e, c in coef.items():
            out[e[:v] + (d,) + e[v + 1:]] = c
    return out


def _pgcd(a: dict, b: dict) -> dict:
    """Gcd of integer-coefficient poly dicts with nonnegative exponents.

    Returns a primitive gcd with positive leading coefficient, including any
    common monomial factor.  ``_pgcd({}, b)`` is ``b`` made primitive/positive.
    """
    if not a:
        if not b:
            return {}
        return _pp_and_content(b)[1]
    if not b:
        return _pp_and_content(a)[1]
    ca, a1 = _pp_and_content(a)
    cb, b1 = _pp_and_content(b)
    c = math.gcd(ca, cb)
    ma = _pminexps(a1)
    mb = _pminexps(b1)
    m = tuple(min(x, y) for x, y in zip(ma, mb))
    a1 = _pshift(a1, tuple(-x for x in ma))
    b1 = _pshift(b1, tuple(-x for x in mb))
    g = _ppgcd(a1, b1)
    g = _pshift(g, m)
    if c != 1:
        g = {e: cv * c for e, cv in g.items()}
    return g


def _ppgcd(a: dict, b: dict) -> dict:
    """Gcd of primitive integer polys with componentwise minimum exponent 0."""
    if _is_one(a) or _is_one(b):
        return {(0,) * _width(a): 1}
    if len(a) == 1 or len(b) == 1:
        # a monomial shares only monomial factors, and min exponents are 0
        return {(0,) * _width(a): 1}
    # main variable: highest slot occurring in either
    n = _width(a)
    v = -1
    for i in range(n - 1, -1, -1):
        if any(e[i] for e in a) or any(e[i] for e in b):
            v = i
            break
    if v < 0:  # both constant
        return {(0,) * n: 1}
    ua, ub = _univar(a, v), _univar(b, v)
    if len(ua) == 1 and 0 in ua:
        # a is free of v; gcd divides the v-content of b
        contb = {}
        for coef in ub.values():
            contb = _pgcd(contb, coef)
        return _pgcd(a, contb)
    if len(ub) == 1 and 0 in ub:
        conta = {}
        for coef in ua.values():
            conta = _pgcd(conta, coef)
        return _pgcd(conta, b)
    conta: dict = {}
    for coef in ua.values():
        conta = _pgcd(conta, coef)
    contb: dict = {}
    for coef in ub.values():
        contb = _pgcd(contb, coef)
    cont = _pgcd(conta, contb)
    fa = _pdiv_int(a, conta)
    fb = _pdiv_int(b, contb)
    # primitive PRS on fa, fb in variable v
    f, g = (fa, fb) if max(_univar(fa, v)) >= max(_univar(fb, v)) else (fb, fa)
    while True:
        r = _prem(f, g, v)
        if not r:
            break
        # primitive part w.r.t. v
        ur = _univar(r, v)
        contr: dict = {}
        for coef in ur.values():
            contr = _pgcd(contr, coef)
        r = _pdiv_int(r, contr)
        f, g = g, r
    ug2 = _univar(g, v)
    contg: dict = {}
    for coef in ug2.values():
        contg = _pgcd(contg, coef)
    gp = _pp_and_content(_pdiv_int(g, contg))[1]
    # exactness is essential for canonical forms, so verify the division
    _pdiv_exact(fa, gp)
    _pdiv_exact(fb, gp)
    return _pmul(cont, gp) if not _is_one(cont) else gp


def _pdiv_int(a: dict, b: dict) -> dict:
    q = _pdiv_exact(a, b)
    out = {}
    for e, c in q.items():
        if c.denominator != 1:
            raise ValueError("non-integer exact quotient")
        out[e] = c.numerator
    return out


def _prem(f: dict, g: dict, v: int) -> dict:
    """Pseudo-remainder of f by g with respect to variable slot v."""
    uf, ug = _univar(f, v), _univar(g, v)
    dg = max(ug)
    lg = ug[dg]
    while f:
        uf = _univar(f, v)
        df = max(uf)
        if df < dg:
            break
        lf = uf[df]
        shift = (0,) * v + (df - dg,) + (0,) * (_width(f) - v - 1)
        f = _padd(_pmul(f, lg), _pneg(_pmul(_pshift(g, shift), lf)))
    return f


def _width(a: dict) -> int:
    return len(next(iter(a)))


# ---------------------------------------------------------------------------
# ParamSet
# ---------------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ParamSet:
    """An ordered set of parameter symbols.

    The order is fixed for the lifetime of every expression built over it;
    exponent vectors index into it positionally.
    """

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(symbols)
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate parameter symbols: {syms}")
        for s in syms:
            if not _NAME_RE.fullmatch(s):
                raise ValueError(f"bad parameter symbol: {s!r}")
        self.symbols = syms
        self._index = {s: i for i, s in enumerate(syms)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamSet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"ParamSet{self.symbols}"

    def index(self, name: str) -> int:
        return self._index[name]

    @property
    def zero(self) -> "RatFunc":
        return RatFunc(self, {}, {self._zvec(): 1}, _normal=True)

    @property
    def one(self) -> "RatFunc":
        z = self._zvec()
        return RatFunc(self, {z: Fraction(1)}, {z: 1}, _normal=True)

    def const(self, q) -> "RatFunc":
        c = Fraction(q)
        if not c:
            return self.zero
        z = self._zvec()
        return RatFunc(self, {z: c}, {z: 1}, _normal=True)

    def var(self, name: str, power: int = 1) -> "RatFunc":
        i = self.index(name)
        e = tuple(power if j == i else 0 for j in range(len(self.symbols)))
        return RatFunc(self, {e: Fraction(1)}, {self._zvec(): 1}, _normal=True)

    def monomial(self, coeff, exps: Mapping[str, int]) -> "RatFunc":
        c = Fraction(coeff)
        if not c:
            return self.zero
        e = [0] * len(self.symbols)
        for name, p in exps.items():
            e[self.index(name)] = p
        return RatFunc(self, {tuple(e): c}, {self._zvec(): 1}, _normal=True)

    def parse(self, text: str) -> "RatFunc":
        return _parse(self, text)

    def _zvec(self) -> Expvec:
        return (0,) * len(self.symbols)


# ---------------------------------------------------------------------------
# RatFunc
# ---------------------------------------------------------------------------

class RatFunc:
    """A Laurent rational function over a ParamSet, always in canonical form."""

    __slots__ = ("ps", "num", "den")

    def __init__(self, ps: ParamSet, num: dict, den: dict, _normal: bool = False):
        self.ps = ps
        if _normal:
            self.num = num
            self.den = den
            return
        self.num, self.den = _normalize(ps, num, den)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def _raw(ps: ParamSet, num: dict, den: dict) -> "RatFunc":
        return RatFunc(ps, num, den)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return _is_one({e: c for e, c in self.num.items()}) and _is_one(self.den)

    def is_monomial(self) -> bool:
        """True if a single term with denominator 1 (includes constants, excludes 0)."""
        return len(self.num) == 1 and _is_one(self.den)

    def monomial_parts(self) -> tuple[Fraction, Expvec]:
        if not self.is_monomial():
            raise ValueError("not a monomial")
        (e, c), = self.num.items()
        return c, e

    def as_fraction(self) -> Fraction:
        """The value of a constant RatFunc."""
        if self.is_zero():
            return Fraction(0)
        if not self.is_monomial():
            raise ValueError("not a constant")
        c, e = self.monomial_parts()
        if any(e):
            raise ValueError("not a constant")
        return c

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "RatFunc"):
        if self.ps != other.ps:
            raise ValueError(f"parameter sets differ: {self.ps} vs {other.ps}")

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return self._addsub(other, False)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self._addsub(other, True)

    def _addsub(self, other: "RatFunc", negate: bool) -> "RatFunc":
        # Operands are canonical, so cancellation is confined to small gcds
        # between the stored denominators (the classical reduced-fraction
        # addition scheme) rather than one big gcd on the combined result.
        self._check(other)
        onum = _pneg(other.num) if negate else other.num
        ps = self.ps
        if _is_one(other.den):
            if _is_one(self.den):
                return _mk(ps, _padd(self.num, onum), self.den)
            # a prime of the denominator cannot divide the sum: it would
            # have to divide the reduced numerator as well
            num = _padd(self.num, _pmul(onum, _fr(self.den)))
            return _mk(ps, num, self.den)
        if _is_one(self.den):
            num = _padd(_pmul(self.num, _fr(other.den)), onum)
            return _mk(ps, num, other.den)
        g = _pgcd(self.den, other.den)
        if _is_one(g):
            num = _padd(_pmul(self.num, _fr(other.den)),
                        _pmul(onum, _fr(self.den)))
            # denominators are coprime, and each is coprime to its own
            # numerator, so the sum is already reduced
            return _mk(ps, num, _pmul(self.den, other.den))
        d1 = _pdiv_int(self.den, g)
        d2 = _pdiv_int(other.den, g)
        num = _padd(_pmul(self.num, _fr(d2)), _pmul(onum, _fr(d1)))
        # any common factor of num with the denominator divides g
        num, g2 = _cancel(num, g)
        return _mk(ps, num, _pmul(_pmul(d1, d2), g2))

    def __neg__(self) -> "RatFunc":
        return RatFunc(self.ps, _pneg(self.num), dict(self.den), _normal=True)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        self._check(other)
        n1, e2 = _cancel(self.num, other.den)
        n2, e1 = _cancel(other.num, self.den)
        return _mk(self.ps, _pmul(n1, n2), _pmul(e1, e2))

    def _inverse(self) -> "RatFunc":
        if not self.num:
            raise DivisionByZero("division by zero RatFunc")
        sigma = _pminexps(self.num)
        shifted = _pshift(self.num, tuple(-x for x in sigma))
        lcm = 1
        for c in shifted.values():
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        int_num = {e: int(c * lcm) for e, c in shifted.items()}
        cont, nden = _pp_and_content(int_num)
        scale = Fraction(lcm, cont)
        num = _pshift({e: c * scale for e, c in self.den.items()},
                      tuple(-x for x in sigma))
        return RatFunc(self.ps, num, nden, _normal=True)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        self._check(other)
        return self * other._inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if not isinstance(n, int):
            raise TypeError("RatFunc powers must be integers")
        if n == 0:
            return self.ps.one
        if n < 0:
            base = self._inverse()
            n = -n
        else:
            base = self
        # coprime factors stay coprime under powers, so no cancellation arises
        num, den = base.num, base.den
        for _ in range(n - 1):
            num = _pmul(num, base.num)
            den = _pmul(den, base.den)
        return RatFunc(self.ps, num, den, _normal=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.ps == other.ps and self.num == other.num and self.den == other.den

    def __repr__(self) -> str:
        return f"RatFunc({serialize(self)!r})"

    def __str__(self) -> str:
        return serialize(self)


def _fr(a: dict) -> dict:
    """Reinterpret an integer poly dict with Fraction coefficients."""
    return {e: Fraction(c) for e, c in a.items()}


def _mk(ps: ParamSet, num: dict, den: dict) -> RatFunc:
    """Assemble a RatFunc whose parts already satisfy the canonical-form
    invariants (den primitive/positive/no monomial factor, parts coprime)."""
    if not num:
        return ps.zero
    return RatFunc(ps, num, den, _normal=True)


def _cancel(num: dict, den: dict) -> tuple[dict, dict]:
    """Remove common polynomial factors from a Fraction Laurent numerator and
    a canonical-shaped integer denominator."""
    if not num or _is_one(den):
        return num, den
    sigma = _pminexps(num)
    shifted = _pshift(num, tuple(-x for x in sigma))
    lcm = 1
    for c in shifted.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    int_num = {e: int(c * lcm) for e, c in shifted.items()}
    g = _pgcd(int_num, den)
    if _is_one(g):
        return num, den
    den = _pdiv_int(den, g)
    q = _pdiv_exact(shifted, g)
    num = _pshift(q, sigma)
    return num, den


def _normalize(ps: ParamSet, num: dict, den: dict) -> tuple[dict, dict]:
    num = {e: Fraction(c) for e, c in num.items() if c}
    den = {e: c for e, c in den.items() if c}
    if not den:
        raise DivisionByZero("zero denominator")
    z = ps._zvec()
    if not num:
        return {}, {z: 1}
    # move any monomial factor of the denominator into the numerator
    mu = _pminexps(den)
    if any(mu):
        den = _pshift(den, tuple(-x for x in mu))
        num = _pshift(num, tuple(-x for x in mu))
    # integer, primitive, positive-leading denominator
    lcm = 1
    for c in den.values():
        f = Fraction(c)
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    if lcm != 1:
        den = {e: c * lcm for e, c in den.items()}
        num = {e: c * lcm for e, c in num.items()}
    den = {e: int(c) for e, c in den.items()}
    cont, den = _pp_and_content(den)
    if cont != 1:
        num = {e: c / cont for e, c in num.items()}
    num, den = _cancel(num, den)
    return num, den


# ---------------------------------------------------------------------------
# the three spec operations
# ---------------------------------------------------------------------------

def rf_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Field arithmetic dispatcher: op in {add, sub, mul, div}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def rf_substitute(x: RatFunc, bindings: Mapping[str, RatFunc],
                  into: ParamSet | None = None) -> RatFunc:
    """Apply parameter bindings to ``x``.

    Bound parameters are replaced by the given RatFuncs (all over a common
    target ParamSet); unbound parameters must exist, by name, in the target
    set and are left untouched.  Bindings for symbols absent from ``x``'s
    ParamSet are ignored.
    """
    target = into
    for v in bindings.values():
        if target is None:
            target = v.ps
        elif v.ps != target:
            raise ValueError("bindings live over different parameter sets")
    if target is None:
        target = x.ps
    used = set()
    for poly in (x.num, x.den):
        for e in poly:
            for i, p in enumerate(e):
                if p:
                    used.add(i)
    table: list[RatFunc | None] = []
    for i, name in enumerate(x.ps.symbols):
        if name in bindings:
            table.append(bindings[name])
        elif name in target:
            table.append(target.var(name))
        elif i not in used:
            table.append(None)  # slot exists but the value never mentions it
        else:
            raise ValueError(f"parameter {name!r} unbound and absent from target set")
    cache: dict[tuple[int, int], RatFunc] = {}

    def power(i: int, n: int) -> RatFunc:
        key = (i, n)
        got = cache.get(key)
        if got is None:
            try:
                got = table[i] ** n
            except DivisionByZero:
                raise SingularSubstitution(
                    f"binding for {x.ps.symbols[i]!r} is zero but occurs with a negative exponent")
            cache[key] = got
        return got

    def ev(poly: dict) -> RatFunc:
        total = target.zero
        for e, c in poly.items():
            term = target.const(c)
            for i, n in enumerate(e):
                if n:
                    term = term * power(i, n)
            total = total + term
        return total

    den_v = ev({e: Fraction(c) for e, c in x.den.items()})
    if den_v.is_zero():
        raise SingularSubstitution("substitution makes the denominator vanish identically")
    return ev(x.num) / den_v


def rf_limit(x: RatFunc, param: str, value) -> RatFunc:
    """Exact limit of ``x`` as ``param`` approaches the rational ``value``.

    The canonical form already carries maximal cancellation, so the limit is a
    plain evaluation of numerator and denominator; if the denominator (after
    clearing negative powers of the limit variable) vanishes at the point, the
    limit does not exist and SingularLimit is raised.  The result lives over
    the ParamSet with ``param`` removed.
    """
    v = Fraction(value)
    i = x.ps.index(param)
    rest = ParamSet(tuple(s for s in x.ps.symbols if s != param))
    if x.is_zero():
        return rest.zero
    tmin = min(e[i] for e in x.num)
    tmin = min(tmin, 0)  # canonical den has no monomial factor, so den tmin is 0
    num = _pshift(x.num, tuple(-tmin if j == i else 0 for j in range(len(x.ps))))
    den = {e: Fraction(c) for e, c in x.den.items()}
    den = _pshift(den, tuple(-tmin if j == i else 0 for j in range(len(x.ps))))

    def ev_at(poly: dict) -> dict:
        out: dict = {}
        for e, c in poly.items():
            coeff = c * v ** e[i]
            r = e[:i] + e[i + 1:]
            s = out.get(r)
            if s is None:
                if coeff:
                    out[r] = coeff
            else:
                s = s + coeff
                if s:
                    out[r] = s
                else:
                    del out[r]
        return out

    dv = ev_at(den)
    if not dv:
        raise SingularLimit(f"limit {param} -> {v} does not exist")
    nv = ev_at(num)
    return RatFunc(rest, nv, dv)


def rf_project(x: RatFunc, into: ParamSet) -> RatFunc:
    """Re-express ``x`` over another ParamSet containing every symbol it uses."""
    return rf_substitute(x, {}, into=into)


def rf_evaluate(x: RatFunc, values: Mapping) -> Fraction:
    """Exact value of ``x`` with every symbol bound to a rational number."""
    vals = [Fraction(values[s]) for s in x.ps.symbols]

    def ev(poly: dict) -> Fraction:
        total = Fraction(0)
        for e, c in poly.items():
            term = Fraction(c)
            for v, p in zip(vals, e):
                if p:
                    if v == 0 and p < 0:
                        raise DivisionByZero(
                            f"negative power of a vanishing value in {x}")
                    term *= v ** p
            total += term
        return total

    den = ev(x.den)
    if den == 0:
        raise DivisionByZero(f"denominator of {x} vanishes at the given point")
    return ev(x.num) / den


# ---------------------------------------------------------------------------
# serialization / parsing
# ---------------------------------------------------------------------------

def _fmt_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _fmt_poly(ps: ParamSet, poly: Mapping[Expvec, object]) -> str:
    if not poly:
        return "0"
    parts: list[str] = []
    for e in sorted(poly, reverse=True):
        c = Fraction(poly[e])
        factors = []
        for name, p in zip(ps.symbols, e):
            if p == 1:
                factors.append(name)
            elif p:
                factors.append(f"{name}^{p}")
        mag = abs(c)
        if not factors:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_fmt_coeff(mag)] + factors)
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append((" + " if c > 0 else " - ") + body)
    return "".join(parts)


def serialize(x: RatFunc) -> str:
    """Canonical text form; ``ParamSet.parse`` round-trips it bit-exactly."""
    num = _fmt_poly(x.ps, x.num)
    if _is_one(x.den):
        return num
    den = _fmt_poly(x.ps, x.den)
    return f"({num})/({den})"


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            break
        pos = m.end()
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("name", m.group(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op))
    if text[pos:].strip():
        raise ParseError(f"bad character at {pos}: {text[pos:][:10]!r}")
    return out


class _Parser:
    def __init__(self, ps: ParamSet, tokens):
        self.ps = ps
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self) -> RatFunc:
        t = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.i += 1
                rhs = self.term()
                t = t + rhs if val == "+" else t - rhs
            else:
                return t

    def term(self) -> RatFunc:
        t = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.i += 1
                rhs = self.factor()
                if val == "*":
                    t = t * rhs
                else:
                    if rhs.is_zero():
                        raise ParseError("division by zero in expression")
                    t = t / rhs
            else:
                return t

    def factor(self) -> RatFunc:
        sign = 1
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.i += 1
                if val == "-":
                    sign = -sign
            else:
                break
        a = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.i += 1
            a = a ** self.exponent()
        return a if sign > 0 else -a

    def exponent(self) -> int:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.i += 1
            if val == "-":
                sign = -1
            kind, val = self.peek()
        if kind != "int":
            raise ParseError("expected integer exponent")
        self.i += 1
        return sign * val

    def atom(self) -> RatFunc:
        kind, val = self.take()
        if kind == "int":
            return self.ps.const(val)
        if kind == "name":
            if val not in self.ps:
                raise ParseError(f"unknown parameter {val!r} (have {self.ps.symbols})")
            return self.ps.var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val = self.take()
            if kind != "op" or val != ")":
                raise ParseError("missing closing parenthesis")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def _parse(ps: ParamSet, text: str) -> RatFunc:
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression")
    p = _Parser(ps, toks)
    out = p.expr()
    if p.i != len(toks):
        raise ParseError(f"trailing tokens: {toks[p.i:]}")
    return out
