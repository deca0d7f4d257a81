"""Dense matrices over RatFunc entries, Kronecker products and leg embeddings.

Index conventions (fixed throughout the package): basis vectors of an
``n``-dimensional space are numbered ``0 .. n-1``; the tensor-product basis is
row-major, ``e_i (x) e_j`` sitting at slot ``n*i + j``.  A matrix acts by
``(M v)_i = sum_j M[i,j] v_j``, so for a two-site operator ``R`` the entry
``R[(i,j),(k,l)]`` is the coefficient of ``e_i (x) e_j`` in ``R(e_k (x) e_l)``.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .symexpr import ParamSet, RatFunc


class SingularMatrix(ValueError):
    """Attempted to invert a matrix without an exact inverse."""


class SymMatrix:
    """A dense rows x cols matrix of RatFunc entries over one ParamSet."""

    __slots__ = ("ps", "rows", "cols", "data")

    def __init__(self, ps: ParamSet, rows: int, cols: int,
                 data: Sequence[RatFunc]):
        if len(data) != rows * cols:
            raise ValueError(f"need {rows * cols} entries, got {len(data)}")
        self.ps = ps
        self.rows = rows
        self.cols = cols
        self.data = list(data)

    @staticmethod
    def zeros(ps: ParamSet, rows: int, cols: int) -> "SymMatrix":
        z = ps.zero
        return SymMatrix(ps, rows, cols, [z] * (rows * cols))

    @staticmethod
    def identity(ps: ParamSet, n: int) -> "SymMatrix":
        m = SymMatrix.zeros(ps, n, n)
        one = ps.one
        for i in range(n):
            m.data[i * n + i] = one
        return m

    @staticmethod
    def from_rows(ps: ParamSet, rows: Sequence[Sequence[RatFunc]]) -> "SymMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat: list[RatFunc] = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return SymMatrix(ps, r, c, flat)

    @staticmethod
    def parse(ps: ParamSet, rows: int, cols: int,
              texts: Iterable[str]) -> "SymMatrix":
        return SymMatrix(ps, rows, cols, [ps.parse(t) for t in texts])

    def __getitem__(self, key: tuple[int, int]) -> RatFunc:
        i, j = key
        return self.data[i * self.cols + j]

    def __setitem__(self, key: tuple[int, int], value: RatFunc):
        i, j = key
        self.data[i * self.cols + j] = value

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return (self.ps == other.ps and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        self._shape_check(other)
        return SymMatrix(self.ps, self.rows, self.cols,
                         [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        self._shape_check(other)
        return SymMatrix(self.ps, self.rows, self.cols,
                         [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(self.ps, self.rows, self.cols, [-a for a in self.data])

    def __mul__(self, other: "SymMatrix") -> "SymMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} * {other.shape}")
        out = SymMatrix.zeros(self.ps, self.rows, other.cols)
        oc = other.cols
        for i in range(self.rows):
            base = i * self.cols
            for k in range(self.cols):
                a = self.data[base + k]
                if a.is_zero():
                    continue
                rb = k * oc
                ob = i * oc
                for j in range(oc):
                    b = other.data[rb + j]
                    if not b.is_zero():
                        out.data[ob + j] = out.data[ob + j] + a * b
        return out

    def scale(self, c: RatFunc) -> "SymMatrix":
        return SymMatrix(self.ps, self.rows, self.cols,
                         [c * a for a in self.data])

    def transpose(self) -> "SymMatrix":
        out = SymMatrix.zeros(self.ps, self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[j * self.rows + i] = self.data[i * self.cols + j]
        return out

    def map(self, fn: Callable[[RatFunc], RatFunc],
            ps: ParamSet | None = None) -> "SymMatrix":
        """Apply ``fn`` entrywise; pass ``ps`` when ``fn`` re-expresses the
        entries over a different ParamSet."""
        return SymMatrix(ps or self.ps, self.rows, self.cols,
                         [fn(a) for a in self.data])

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.data)

    def is_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        return self == SymMatrix.identity(self.ps, self.rows)

    def first_nonzero(self) -> tuple[int, int, RatFunc] | None:
        """Row-major first nonzero entry, as a witness for failed checks."""
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i * self.cols + j]
                if not a.is_zero():
                    return i, j, a
        return None

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def _shape_check(self, other: "SymMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def kron(self, other: "SymMatrix") -> "SymMatrix":
        """Kronecker product in the row-major pairing convention."""
        R, C = self.rows * other.rows, self.cols * other.cols
        out = SymMatrix.zeros(self.ps, R, C)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i * self.cols + j]
                if a.is_zero():
                    continue
                for k in range(other.rows):
                    rb = (i * other.rows + k) * C + j * other.cols
                    ob = k * other.cols
                    for l in range(other.cols):
                        b = other.data[ob + l]
                        if not b.is_zero():
                            out.data[rb + l] = a * b
        return out

    def __repr__(self) -> str:
        return f"SymMatrix({self.rows}x{self.cols} over {self.ps.symbols})"

    def pretty(self) -> str:
        cells = [[str(self.data[i * self.cols + j]) for j in range(self.cols)]
                 for i in range(self.rows)]
        widths = [max(len(cells[i][j]) for i in range(self.rows))
                  for j in range(self.cols)]
        lines = []
        for row in cells:
            lines.append("[ " + "  ".join(c.rjust(w) for c, w in zip(row, widths)) + " ]")
        return "\n".join(lines)


def kron_all(mats: Sequence[SymMatrix]) -> SymMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = out.kron(m)
    return out


def swap_matrix(ps: ParamSet, n: int) -> SymMatrix:
    """The flip operator on a two-fold tensor space: e_i (x) e_j -> e_j (x) e_i."""
    m = SymMatrix.zeros(ps, n * n, n * n)
    one = ps.one
    for i in range(n):
        for j in range(n):
            m.data[(i * n + j) * n * n + (j * n + i)] = one
    return m


def embed_two_site(r: SymMatrix, legs: tuple[int, int], n: int) -> SymMatrix:
    """Embed a two-site operator into the 3-fold tensor space.

    ``legs`` names the two factors (0-based, strictly increasing) the operator
    acts on; the remaining factor carries the identity.  The result is the
    n^3 x n^3 matrix whose entry at ``((i0,i1,i2),(j0,j1,j2))`` is
    ``r[(i_a, i_b), (j_a, j_b)]`` when the spectator indices agree and zero
    otherwise.
    """
    a, b = legs
    if not (0 <= a < b <= 2):
        raise ValueError(f"legs must be an increasing pair within (0,1,2): {legs}")
    if r.rows != n * n or r.cols != n * n:
        raise ValueError(f"operator must be {n * n}x{n * n}, got {r.shape}")
    (c,) = [x for x in range(3) if x not in (a, b)]
    N = n ** 3
    out = SymMatrix.zeros(r.ps, N, N)
    for idx in range(N):
        i = (idx // (n * n), (idx // n) % n, idx % n)
        for jdx in range(N):
            j = (jdx // (n * n), (jdx // n) % n, jdx % n)
            if i[c] != j[c]:
                continue
            v = r[(i[a] * n + i[b], j[a] * n + j[b])]
            if not v.is_zero():
                out.data[idx * N + jdx] = v
    return out


def mat_inverse(m: SymMatrix) -> SymMatrix:
    """Exact inverse by Gaussian elimination over the rational-function field."""
    if m.rows != m.cols:
        raise SingularMatrix("only square matrices can be inverted")
    n = m.rows
    ps = m.ps
    work = [list(m.data[i * n:(i + 1) * n]) for i in range(n)]
    inv = [[ps.one if i == j else ps.zero for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = None
        for row in range(col, n):
            if not work[row][col].is_zero():
                pivot = row
                break
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
        p = work[col][col]
        pinv = ps.one / p
        work[col] = [x * pinv for x in work[col]]
        inv[col] = [x * pinv for x in inv[col]]
        for row in range(n):
            if row == col:
                continue
            f = work[row][col]
            if f.is_zero():
                continue
            work[row] = [x - f * y for x, y in zip(work[row], work[col])]
            inv[row] = [x - f * y for x, y in zip(inv[row], inv[col])]
    return SymMatrix.from_rows(ps, inv)
