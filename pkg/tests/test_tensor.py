import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qdeform.symexpr import ParamSet
from qdeform.tensor import (
    SingularMatrix,
    SymMatrix,
    embed_two_site,
    kron_all,
    mat_inverse,
    swap_matrix,
)

PS = ParamSet(("q",))


def _rand_matrix(rng, n):
    data = []
    for _ in range(n * n):
        c = Fraction(rng.randint(-3, 3))
        e = rng.randint(-1, 1)
        data.append(PS.monomial(c, {"q": e}))
    return SymMatrix(PS, n, n, data)


@st.composite
def small_matrices(draw, n=2):
    data = []
    for _ in range(n * n):
        c = Fraction(draw(st.integers(-3, 3)))
        e = draw(st.integers(-1, 1))
        data.append(PS.monomial(c, {"q": e}))
    return SymMatrix(PS, n, n, data)


def test_matrix_basics():
    m = SymMatrix.parse(PS, 2, 2, ["q", "1", "0", "q^-1"])
    assert m[0, 0] == PS.var("q")
    assert m[1, 0].is_zero()
    assert (m - m).is_zero()
    assert (m * SymMatrix.identity(PS, 2)) == m
    assert (SymMatrix.identity(PS, 2) * m) == m
    assert m.transpose().transpose() == m
    assert m.shape == (2, 2)
    two = m + m
    assert two == m.scale(PS.const(2))


def test_matrix_shape_errors():
    m = SymMatrix.identity(PS, 2)
    w = SymMatrix.zeros(PS, 2, 3)
    with pytest.raises(ValueError):
        m + w
    with pytest.raises(ValueError):
        w * w


def test_kron_entry_formula():
    rng = random.Random(3)
    a = _rand_matrix(rng, 2)
    b = _rand_matrix(rng, 3)
    k = a.kron(b)
    assert k.shape == (6, 6)
    for i in range(2):
        for j in range(2):
            for x in range(3):
                for y in range(3):
                    assert k[3 * i + x, 3 * j + y] == a[i, j] * b[x, y]


@settings(max_examples=40, deadline=None)
@given(small_matrices(), small_matrices(), small_matrices(), small_matrices())
def test_kron_mixed_product(a, b, c, d):
    assert a.kron(b) * c.kron(d) == (a * c).kron(b * d)


def test_swap_matrix_involution_and_conjugation():
    p = swap_matrix(PS, 3)
    assert (p * p).is_identity()
    rng = random.Random(5)
    a = _rand_matrix(rng, 3)
    b = _rand_matrix(rng, 3)
    assert p * a.kron(b) * p == b.kron(a)


def test_embed_two_site_against_kron():
    rng = random.Random(9)
    n = 2
    r = _rand_matrix(rng, n * n)
    eye = SymMatrix.identity(PS, n)
    assert embed_two_site(r, (0, 1), n) == r.kron(eye)
    assert embed_two_site(r, (1, 2), n) == eye.kron(r)
    # the middle-leg spectator form equals conjugating by the inner flip
    p = swap_matrix(PS, n)
    conj = eye.kron(p) * r.kron(eye) * eye.kron(p)
    assert embed_two_site(r, (0, 2), n) == conj


def test_embed_two_site_three_dim():
    rng = random.Random(10)
    n = 3
    r = _rand_matrix(rng, n * n)
    eye = SymMatrix.identity(PS, n)
    p = swap_matrix(PS, n)
    assert embed_two_site(r, (0, 1), n) == r.kron(eye)
    conj = eye.kron(p) * r.kron(eye) * eye.kron(p)
    assert embed_two_site(r, (0, 2), n) == conj


def test_embed_leg_validation():
    r = SymMatrix.identity(PS, 4)
    with pytest.raises(ValueError):
        embed_two_site(r, (1, 0), 2)
    with pytest.raises(ValueError):
        embed_two_site(r, (0, 3), 2)
    with pytest.raises(ValueError):
        embed_two_site(SymMatrix.identity(PS, 3), (0, 1), 2)


def test_kron_all_associates():
    rng = random.Random(12)
    a, b, c = (_rand_matrix(rng, 2) for _ in range(3))
    assert kron_all([a, b, c]) == a.kron(b).kron(c)
    assert kron_all([a, b, c]) == a.kron(b.kron(c))


def test_mat_inverse_round_trip():
    q = PS.var("q")
    m = SymMatrix.from_rows(PS, [
        [q, PS.one, PS.zero],
        [PS.zero, q ** -1, PS.one],
        [PS.zero, PS.zero, q + PS.one],
    ])
    inv = mat_inverse(m)
    assert (m * inv).is_identity()
    assert (inv * m).is_identity()


def test_mat_inverse_needs_row_swap():
    m = SymMatrix.parse(PS, 2, 2, ["0", "q", "1", "0"])
    inv = mat_inverse(m)
    assert (m * inv).is_identity()


def test_mat_inverse_singular():
    m = SymMatrix.parse(PS, 2, 2, ["q", "1", "q^2", "q"])
    with pytest.raises(SingularMatrix):
        mat_inverse(m)
    with pytest.raises(SingularMatrix):
        mat_inverse(SymMatrix.zeros(PS, 2, 3))


def test_first_nonzero_witness():
    m = SymMatrix.zeros(PS, 2, 2)
    assert m.first_nonzero() is None
    m[1, 0] = PS.var("q")
    assert m.first_nonzero() == (1, 0, PS.var("q"))
