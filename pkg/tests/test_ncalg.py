"""Free-algebra relations, rewriting, restriction, localization, morphisms."""

import random

import pytest

from qdeform.symexpr import ParamSet
from qdeform.tensor import SymMatrix
from qdeform.ncalg import (
    FreeAlgebra,
    LocalizationError,
    NotASubalgebra,
    NotOrientable,
    apply_hom,
    build_rewrite_system,
    check_confluence,
    interreduce,
    localize,
    presentation_implies,
    presentations_equivalent,
    restrict_subalgebra,
    rtt_relations,
)


def quantum_gl2():
    """One-parameter 4x4 exchange operator and the algebra it acts on."""
    ps = ParamSet(("q",))
    q = ps.var("q")
    r = SymMatrix.zeros(ps, 4, 4)
    r[0, 0] = q
    r[1, 1] = ps.one
    r[2, 2] = ps.one
    r[3, 3] = q
    r[2, 1] = q - q ** -1
    alg = FreeAlgebra(ps, ("a", "b", "c", "d"))
    rels = rtt_relations(r, [["a", "b"], ["c", "d"]], alg)
    return ps, q, alg, rels


def two_parameter_nine_dim():
    """Two-parameter 9x9 operator on a block-diagonal generator matrix."""
    ps = ParamSet(("r", "s"))
    r, s = ps.var("r"), ps.var("s")
    m = SymMatrix.zeros(ps, 9, 9)
    diag = [r ** -1, ps.one, s, ps.one, r ** -1, ps.one, ps.one, s, ps.one]
    for i, v in enumerate(diag):
        m[i, i] = v
    m[3, 1] = r ** -1 - r
    alg = FreeAlgebra(ps, ("a", "b", "c", "d", "f"))
    pat = [["a", "b", "0"], ["c", "d", "0"], ["0", "0", "f"]]
    rels = rtt_relations(m, pat, alg)
    return ps, r, s, alg, rels


def test_quantum_gl2_relations():
    ps, q, alg, rels = quantum_gl2()
    qi = q ** -1
    expected = [
        alg.word(("b", "a")) - alg.word(("a", "b"), qi),
        alg.word(("c", "a")) - alg.word(("a", "c"), qi),
        alg.word(("c", "b")) - alg.word(("b", "c")),
        alg.word(("d", "a")) - alg.word(("a", "d")) + alg.word(("b", "c"), q - qi),
        alg.word(("d", "b")) - alg.word(("b", "d"), qi),
        alg.word(("d", "c")) - alg.word(("c", "d"), qi),
    ]
    assert len(rels) == 6
    for e in expected:
        assert e in rels


def test_rule_orientation():
    ps, q, alg, rels = quantum_gl2()
    rsys = build_rewrite_system(rels, alg)
    assert set(rsys.rules) == {
        ("b", "a"), ("c", "a"), ("c", "b"), ("d", "a"), ("d", "b"), ("d", "c")}
    assert rsys.rules[("d", "a")] == (
        alg.word(("a", "d")) - alg.word(("b", "c"), q - q ** -1))


def test_quantum_gl2_confluent():
    ps, q, alg, rels = quantum_gl2()
    rep = check_confluence(build_rewrite_system(rels, alg))
    assert rep.ok
    assert rep.witnesses == []


def test_normal_form_of_reversed_word():
    ps, q, alg, rels = quantum_gl2()
    rsys = build_rewrite_system(rels, alg)
    nf = rsys.nf_word(("d", "c", "b", "a"))
    qi = q ** -1
    expected = (alg.word(("a", "b", "c", "d"), qi ** 4)
                + alg.word(("b", "b", "c", "c"), qi ** 3 - qi))
    assert nf == expected


def test_rewriting_is_path_independent():
    ps, q, alg, rels = quantum_gl2()
    rsys = build_rewrite_system(rels, alg)
    rng = random.Random(7)
    names = ("a", "b", "c", "d")
    for _ in range(30):
        w = tuple(rng.choice(names) for _ in range(rng.randrange(2, 7)))
        p = alg.word(w)
        nf = rsys.normal_form(p)
        for t in range(3):
            assert rsys.normal_form(p, rng=random.Random(100 + t)) == nf


def test_classical_specialisation_commutes_with_rewriting():
    # first rewrite then set q=1, or first set q=1 then rewrite: same answer
    ps, q, alg, rels = quantum_gl2()
    rsys = build_rewrite_system(rels, alg)
    csys = build_rewrite_system(
        [p.substitute_params({"q": ps.one}) for p in rels], alg)
    rng = random.Random(11)
    names = ("a", "b", "c", "d")
    for _ in range(25):
        w = tuple(rng.choice(names) for _ in range(rng.randrange(2, 7)))
        p = alg.word(w)
        assert rsys.normal_form(p).substitute_params({"q": ps.one}) \
            == csys.normal_form(p)


def test_nine_dim_relations():
    ps, r, s, alg, rels = two_parameter_nine_dim()
    assert len(rels) == 10
    assert alg.word(("f", "b")) - alg.word(("b", "f"), s) in rels
    assert alg.word(("f", "c")) - alg.word(("c", "f"), s ** -1) in rels
    assert alg.word(("f", "a")) - alg.word(("a", "f")) in rels
    assert alg.word(("f", "d")) - alg.word(("d", "f")) in rels
    assert alg.word(("c", "b")) - alg.word(("b", "c")) in rels
    assert check_confluence(build_rewrite_system(rels, alg)).ok


def test_restriction_to_corner_block():
    ps, r, s, alg, rels = two_parameter_nine_dim()
    sub, subrels = restrict_subalgebra(rels, alg, ("a", "b", "c", "d"))
    assert sub.gens == ("a", "b", "c", "d")
    assert len(subrels) == 6
    # the block presentation is the one-parameter one with q replaced by 1/r
    psq, q, algq, relsq = quantum_gl2()
    ok, wit = presentations_equivalent(
        relsq, algq, subrels, sub,
        params_ab={"q": r ** -1}, params_ba={"r": q ** -1})
    assert ok, wit


def test_restriction_detects_nonclosure():
    ps, q, alg, rels = quantum_gl2()
    with pytest.raises(NotASubalgebra):
        restrict_subalgebra(rels, alg, ("a", "b", "d"))


def test_transpose_swap_is_a_symmetry():
    ps, q, alg, rels = quantum_gl2()
    rsys = build_rewrite_system(rels, alg)
    ok, wit = presentation_implies(rels, rsys, rename={"b": "c", "c": "b"})
    assert ok, wit


def test_wrong_parameter_map_is_rejected():
    ps, q, alg, rels = quantum_gl2()
    rsys = build_rewrite_system(rels, alg)
    ok, wit = presentation_implies(rels, rsys, param_map={"q": q * q})
    assert not ok
    assert wit is not None


def test_apply_hom_is_multiplicative():
    ps, q, alg, rels = quantum_gl2()
    images = {"a": alg.gen("a"), "b": alg.gen("c"),
              "c": alg.gen("b"), "d": alg.gen("d")}
    p = alg.word(("a", "b")) + alg.word(("c",), q)
    w = alg.word(("d", "c")) - alg.one()
    lhs = apply_hom(p * w, images, alg)
    assert lhs == apply_hom(p, images, alg) * apply_hom(w, images, alg)


def test_interreduce_drops_redundant_relations():
    ps, q, alg, rels = quantum_gl2()
    padded = rels + [rels[0].scale(q), rels[1] + rels[2], rels[3] - rels[3]]
    assert interreduce(padded) == rels


def test_cubic_leading_word_is_not_orientable():
    ps = ParamSet(("q",))
    alg = FreeAlgebra(ps, ("x", "y"))
    rel = alg.word(("y", "x", "x")) - alg.word(("x",))
    with pytest.raises(NotOrientable):
        build_rewrite_system([rel], alg)


def test_corrupted_rule_breaks_confluence():
    ps, q, alg, rels = quantum_gl2()
    bad = [alg.word(("c", "a")) - alg.word(("a", "c"), q)
           if p.leading_word() == ("c", "a") else p for p in rels]
    rep = check_confluence(build_rewrite_system(bad, alg))
    assert not rep.ok
    assert ("d", "c", "a") in [w[0] for w in rep.witnesses]


def test_localize_single_exchange_pair():
    ps = ParamSet(("q",))
    q = ps.var("q")
    alg = FreeAlgebra(ps, ("x", "f"))
    rels = [alg.word(("f", "x")) - alg.word(("x", "f"), q)]
    big, lsys = localize(rels, alg, ["f"])
    assert big.gens == ("x", "f", "F")
    assert lsys.rules[("F", "x")] == big.word(("x", "F"), q ** -1)
    assert lsys.nf_word(("f", "F")) == big.one()
    assert lsys.nf_word(("F", "f")) == big.one()
    assert lsys.nf_word(("F", "x", "f")) == big.word(("x",), q ** -1)
    assert check_confluence(lsys).ok


def test_localize_nine_dim_last_generator():
    ps, r, s, alg, rels = two_parameter_nine_dim()
    big, lsys = localize(rels, alg, ["f"])
    assert big.gens == ("a", "b", "c", "d", "f", "F")
    assert len(lsys.rules) == 16
    assert check_confluence(lsys).ok
    assert lsys.nf_word(("F", "a", "f")) == big.word(("a",))
    assert lsys.nf_word(("F", "b", "f")) == big.word(("b",), s ** -1)
    assert lsys.nf_word(("F", "c", "f")) == big.word(("c",), s)
    assert lsys.nf_word(("F", "d", "f")) == big.word(("d",))


def test_localize_needs_linear_exchange():
    # f absorbs x instead of moving through it, so no inverse rule exists
    ps = ParamSet(("q",))
    alg = FreeAlgebra(ps, ("x", "f"))
    rels = [alg.word(("f", "x")) - alg.word(("x",))]
    with pytest.raises(LocalizationError):
        localize(rels, alg, ["f"])


def test_localize_needs_an_exchange_rule():
    ps = ParamSet(("q",))
    alg = FreeAlgebra(ps, ("x", "f"))
    with pytest.raises(LocalizationError):
        localize([], alg, ["f"])


def test_pattern_shape_is_checked():
    ps, q, alg, rels = quantum_gl2()
    r4 = SymMatrix.identity(ps, 4)
    with pytest.raises(ValueError):
        rtt_relations(r4, [["a", "b", "0"], ["c", "d", "0"], ["0", "0", "1"]],
                      FreeAlgebra(ps, ("a", "b", "c", "d")))
