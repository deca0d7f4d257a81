"""R-matrix identities and contraction limits.

Checks provided here:

* the quantum Yang-Baxter equation ``R12 R13 R23 = R23 R13 R12``;
* its colour-dependent version for two-parameter families whose entries carry
  a colour label per tensor leg;
* the Hecke condition ``(PR - alpha)(PR - beta) = 0`` for the flip ``P``;
* (colour-)triangularity ``R21 R = 1``;
* singular-scaling contraction limits that carry one family of solutions
  into another (conjugate by a parameter-dependent transform, rebind
  parameters, then take an exact limit).

Every check returns a :class:`CheckResult`; failures carry the first
offending entry as a witness instead of a bare boolean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .symexpr import (
    ParamSet,
    RatFunc,
    SingularLimit,
    rf_limit,
    rf_project,
    rf_substitute,
)
from .tensor import SymMatrix, embed_two_site, mat_inverse, swap_matrix


@dataclass
class CheckResult:
    ok: bool
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _site_dim(r: SymMatrix) -> int:
    n = math.isqrt(r.rows)
    if r.rows != r.cols or n * n != r.rows:
        raise ValueError(f"not a two-site operator: shape {r.shape}")
    return n


def _multi(idx: int, n: int, sites: int) -> tuple[int, ...]:
    out = []
    for _ in range(sites):
        out.append(idx % n)
        idx //= n
    return tuple(reversed(out))


def _witness_of(residual: SymMatrix, n: int, sites: int) -> tuple | None:
    hit = residual.first_nonzero()
    if hit is None:
        return None
    i, j, entry = hit
    return (_multi(i, n, sites), _multi(j, n, sites), str(entry))


def qybe_residual(r: SymMatrix) -> SymMatrix:
    """``R12 R13 R23 - R23 R13 R12`` on the threefold tensor space."""
    n = _site_dim(r)
    r12 = embed_two_site(r, (0, 1), n)
    r13 = embed_two_site(r, (0, 2), n)
    r23 = embed_two_site(r, (1, 2), n)
    return r12 * r13 * r23 - r23 * r13 * r12


def check_qybe(r: SymMatrix) -> CheckResult:
    n = _site_dim(r)
    res = qybe_residual(r)
    w = _witness_of(res, n, 3)
    return CheckResult(w is None, w, "Yang-Baxter residual")


# ---------------------------------------------------------------------------
# coloured families
# ---------------------------------------------------------------------------

@dataclass
class ColouredFamily:
    """A two-site operator whose entries depend on a colour per tensor leg.

    The stored matrix is the generic instance ``R(c, c')``: the parameters in
    ``first`` carry the colour of the first leg, those in ``second`` the
    colour of the second, and everything else is a global deformation
    parameter.  ``first`` and ``second`` have the same length, slot by slot.
    """

    matrix: SymMatrix
    first: tuple[str, ...]
    second: tuple[str, ...]

    def __post_init__(self):
        if len(self.first) != len(self.second):
            raise ValueError("colour slots must pair up")
        for name in self.first + self.second:
            if name not in self.matrix.ps:
                raise ValueError(f"colour slot {name!r} not a matrix parameter")

    @property
    def globals_(self) -> tuple[str, ...]:
        taken = set(self.first) | set(self.second)
        return tuple(s for s in self.matrix.ps.symbols if s not in taken)

    def instantiate(self, c1: Sequence[RatFunc], c2: Sequence[RatFunc],
                    into: ParamSet) -> SymMatrix:
        """The member ``R(c1, c2)`` as a matrix over the ParamSet ``into``."""
        if len(c1) != len(self.first) or len(c2) != len(self.second):
            raise ValueError("colour value width mismatch")
        bind: dict[str, RatFunc] = {}
        for name, v in zip(self.first, c1):
            bind[name] = v
        for name, v in zip(self.second, c2):
            bind[name] = v
        return self.matrix.map(lambda x: rf_substitute(x, bind, into=into),
                               ps=into)

    def swapped_colours(self) -> SymMatrix:
        """``R(c', c)`` over the same ParamSet, colours interchanged."""
        ps = self.matrix.ps
        bind = {a: ps.var(b) for a, b in zip(self.first, self.second)}
        bind.update({b: ps.var(a) for a, b in zip(self.first, self.second)})
        return self.matrix.map(lambda x: rf_substitute(x, bind, into=ps))


def colour_copies(fam: ColouredFamily, count: int) -> tuple[ParamSet, list[list[RatFunc]]]:
    """A ParamSet holding ``count`` fresh copies of the colour slots, plus the
    colour tuples themselves (named after the first-slot base names)."""
    base = fam.first
    names: list[str] = []
    for k in range(1, count + 1):
        for b in base:
            name = f"{b}{k}"
            if name in fam.globals_ or name in names:
                raise ValueError(f"colour copy name {name!r} collides")
            names.append(name)
    ps = ParamSet(fam.globals_ + tuple(names))
    copies = []
    for k in range(count):
        copies.append([ps.var(names[k * len(base) + i]) for i in range(len(base))])
    return ps, copies


def cqybe_residual(fam: ColouredFamily) -> SymMatrix:
    """Colour-dependent Yang-Baxter residual
    ``R12(c1,c2) R13(c1,c3) R23(c2,c3) - R23(c2,c3) R13(c1,c3) R12(c1,c2)``."""
    n = _site_dim(fam.matrix)
    ps, (c1, c2, c3) = colour_copies(fam, 3)
    r12 = embed_two_site(fam.instantiate(c1, c2, ps), (0, 1), n)
    r13 = embed_two_site(fam.instantiate(c1, c3, ps), (0, 2), n)
    r23 = embed_two_site(fam.instantiate(c2, c3, ps), (1, 2), n)
    return r12 * r13 * r23 - r23 * r13 * r12


def check_cqybe(fam: ColouredFamily) -> CheckResult:
    n = _site_dim(fam.matrix)
    res = cqybe_residual(fam)
    w = _witness_of(res, n, 3)
    return CheckResult(w is None, w, "coloured Yang-Baxter residual")


# ---------------------------------------------------------------------------
# pointwise structure: Hecke, triangularity, invertibility
# ---------------------------------------------------------------------------

def hecke_residual(r: SymMatrix, alpha: RatFunc, beta: RatFunc) -> SymMatrix:
    """``(PR - alpha)(PR - beta)`` for the flip ``P``; zero iff the braid
    operator satisfies the quadratic Hecke relation with those eigenvalues."""
    n = _site_dim(r)
    ps = r.ps
    pr = swap_matrix(ps, n) * r
    eye = SymMatrix.identity(ps, n * n)
    return (pr - eye.scale(alpha)) * (pr - eye.scale(beta))


def check_hecke(r: SymMatrix, alpha: RatFunc, beta: RatFunc) -> CheckResult:
    n = _site_dim(r)
    res = hecke_residual(r, alpha, beta)
    w = _witness_of(res, n, 2)
    return CheckResult(w is None, w,
                       f"Hecke residual with eigenvalues {alpha}, {beta}")


def triangular_residual(r: SymMatrix) -> SymMatrix:
    """``R21 R - 1`` where ``R21 = P R P``."""
    n = _site_dim(r)
    p = swap_matrix(r.ps, n)
    return p * r * p * r - SymMatrix.identity(r.ps, n * n)


def check_triangular(r: SymMatrix) -> CheckResult:
    n = _site_dim(r)
    res = triangular_residual(r)
    w = _witness_of(res, n, 2)
    return CheckResult(w is None, w, "triangularity residual R21 R - 1")


def colour_triangular_residual(fam: ColouredFamily) -> SymMatrix:
    """``R21(c', c) R(c, c') - 1`` with colours swapped in the first factor."""
    n = _site_dim(fam.matrix)
    ps = fam.matrix.ps
    p = swap_matrix(ps, n)
    return p * fam.swapped_colours() * p * fam.matrix - SymMatrix.identity(ps, n * n)


def check_colour_triangular(fam: ColouredFamily) -> CheckResult:
    n = _site_dim(fam.matrix)
    res = colour_triangular_residual(fam)
    w = _witness_of(res, n, 2)
    return CheckResult(w is None, w, "colour triangularity residual")


def check_invertible(r: SymMatrix) -> CheckResult:
    from .tensor import SingularMatrix
    try:
        mat_inverse(r)
    except SingularMatrix as e:
        return CheckResult(False, None, f"not invertible: {e}")
    return CheckResult(True, None, "invertible")


# ---------------------------------------------------------------------------
# contraction limits
# ---------------------------------------------------------------------------

def conjugate_r(r: SymMatrix, t: SymMatrix) -> SymMatrix:
    """``(t (x) t)^-1  R  (t (x) t)`` for a single-leg transform ``t``."""
    n = _site_dim(r)
    if t.shape != (n, n):
        raise ValueError(f"transform must be {n}x{n}, got {t.shape}")
    tinv = mat_inverse(t)
    return tinv.kron(tinv) * r * t.kron(t)


@dataclass
class ContractionSpec:
    """Recipe carrying one solution family into another by a singular scaling.

    The pipeline: resolve the scaling symbol ``eta`` inside ``transform`` via
    ``eta_def``, conjugate the source matrix by the resolved transform on each
    leg, rewrite source parameters via ``rebind``, then take the exact limit
    ``limit_param -> limit_value`` entry by entry and re-express the result
    over ``target_ps``.
    """

    transform: SymMatrix
    eta: str
    eta_def: RatFunc
    limit_param: str
    limit_value: Fraction
    target_ps: ParamSet
    rebind: dict[str, RatFunc] = field(default_factory=dict)

    @property
    def work_ps(self) -> ParamSet:
        return self.eta_def.ps


def contract_limit(r: SymMatrix, spec: ContractionSpec) -> SymMatrix:
    work = spec.work_ps
    t = spec.transform.map(
        lambda x: rf_substitute(x, {spec.eta: spec.eta_def}, into=work), ps=work)
    rw = r.map(lambda x: rf_project(x, work), ps=work)
    conj = conjugate_r(rw, t)
    if spec.rebind:
        conj = conj.map(lambda x: rf_substitute(x, spec.rebind, into=work))
    out = SymMatrix.zeros(spec.target_ps, r.rows, r.cols)
    for i in range(r.rows):
        for j in range(r.cols):
            entry = conj[i, j]
            try:
                lim = rf_limit(entry, spec.limit_param, spec.limit_value)
            except SingularLimit as e:
                raise SingularLimit(
                    f"entry ({i},{j}) = {entry} has no limit: {e}") from None
            out[i, j] = rf_project(lim, spec.target_ps)
    return out
