"""End-to-end acceptance checks, one test per headline guarantee.

Every algebraic statement here is exact: coefficients are rational functions
with integer arithmetic underneath, and equality means identical normal
forms, never numerical closeness.  The only tolerances anywhere are the
wall-clock bounds pinned next to each timed block.
"""

import random
import re
import time

import pytest

from qdeform.symexpr import rf_evaluate, rf_project, rf_substitute
from qdeform.tensor import SymMatrix
from qdeform.rmx import (
    check_colour_triangular,
    check_cqybe,
    check_qybe,
    check_triangular,
    triangular_residual,
)
from qdeform.ncalg import check_confluence
from qdeform.hopf import (
    HomFailure,
    check_antipode,
    check_bialgebra,
    check_grouplike,
    check_hom,
    presentation_from_matrix,
    quasi_twists,
    twin_tables_match,
)
from qdeform.catalog import build_hom, load_builtin, verify_entry
from qdeform.cli import main

CATALOG = load_builtin()

BRAIDED = ("glq2", "glpq2", "grs", "glh2", "glhh2", "gmk")
COLOURED = ("grs_coloured", "gl2_coloured_q", "gmkk_coloured",
            "gl2_coloured_j")
CONTRACTIONS = ("glq2-to-glh2", "grs-to-gmk", "grs-coloured-to-gmkk-coloured",
                "gl2-coloured-q-to-gl2-coloured-j")
HOMS = ("grs-to-glpq", "gmk-to-glhh", "grs-coloured-to-gl2-coloured-q",
        "gmkk-coloured-to-gl2-coloured-j")

_TIMING = re.compile(r"\[\d+\.\d+s\]")


def test_braid_identity_holds_for_all_six_uncoloured_matrices():
    for name in BRAIDED:
        start = time.perf_counter()
        result = check_qybe(CATALOG.get(name).matrix())
        seconds = time.perf_counter() - start
        assert result.ok, f"{name}: braid identity fails at {result.witness}"
        assert seconds < 60.0, f"{name}: braid check took {seconds:.1f}s"


def test_colour_dependent_braid_identity_holds_for_all_four_families():
    for name in COLOURED:
        start = time.perf_counter()
        result = check_cqybe(CATALOG.get(name).family())
        seconds = time.perf_counter() - start
        assert result.ok, f"{name}: coloured braid fails at {result.witness}"
        assert seconds < 120.0, f"{name}: coloured check took {seconds:.1f}s"


def test_triangularity_separates_the_jordanian_side():
    # every Jordanian-side matrix is unitriangular-flip invertible ...
    for name in ("glh2", "glhh2", "gmk"):
        result = check_triangular(CATALOG.get(name).matrix())
        assert result.ok, f"{name}: {result.witness}"
    # ... including the coloured families, against swapped colours ...
    for name in ("gl2_coloured_j", "gmkk_coloured"):
        result = check_colour_triangular(CATALOG.get(name).family())
        assert result.ok, f"{name}: {result.witness}"
    # ... while the quantum-side matrix genuinely is not: the obstruction
    # is nonzero yet vanishes exactly at the classical point q = 1.
    m = CATALOG.get("glq2").matrix()
    result = check_triangular(m)
    assert not result.ok
    residual = triangular_residual(m)
    ps = m.ps
    assert residual[0, 0] == ps.parse("q * (q - q^-1)")
    nonzero = 0
    for i in range(residual.rows):
        for j in range(residual.cols):
            cell = residual[i, j]
            if cell != ps.zero:
                nonzero += 1
            assert rf_evaluate(cell, {"q": 1}) == 0
    assert nonzero > 0


def test_contraction_limits_reproduce_the_frozen_matrices_exactly():
    from qdeform.catalog import run_contraction
    for name in CONTRACTIONS:
        entry = CATALOG.get(name)
        report = verify_entry(entry, CATALOG)
        assert report.ok, f"{name}: {report.checks}"
        result, target = run_contraction(CATALOG, entry)
        frozen = target.matrix()
        assert result.rows == frozen.rows
        for i in range(result.rows):
            for j in range(result.cols):
                assert result[i, j] == frozen[i, j], (name, i, j)
    # the square commutes: collapsing a coloured family at equal colours
    # recovers the uncoloured matrix on both ends of the contraction
    for coloured_name, plain_name, second, first in (
            ("grs_coloured", "grs", "sp", "s"),
            ("gmkk_coloured", "gmk", "kp", "k")):
        coloured = CATALOG.get(coloured_name).matrix()
        plain = CATALOG.get(plain_name).matrix()
        ps = coloured.ps
        bind = {second: ps.parse(first)}
        collapsed = coloured.map(
            lambda x: rf_project(rf_substitute(x, bind, into=ps), plain.ps),
            ps=plain.ps)
        assert collapsed == plain, coloured_name


def test_corner_block_restrictions_recover_the_smaller_matrices():
    expected = {"grs": ("glq2", {"q": "r^-1"}),
                "gmk": ("glh2", {"h": "m"})}
    for name, (target, bindings) in expected.items():
        entry = CATALOG.get(name)
        rst = entry.doc["restriction"]
        assert rst["target"] == target
        assert rst["legs"] == [0, 1]
        assert rst["bindings"] == bindings
        report = verify_entry(entry, CATALOG, checks=["restriction"])
        assert report.ok, f"{name}: {report.checks}"


def test_algebra_maps_certify_at_every_recorded_exponent():
    for name in HOMS:
        entry = CATALOG.get(name)
        spec = build_hom(CATALOG, entry)
        assert entry.doc["exponents"] == [1, 2, 3, -1]
        for n in entry.doc["exponents"]:
            report = check_hom(spec, N=n)
            assert report.ok, f"{name} at N={n}"
        if entry.doc.get("twin"):
            assert twin_tables_match(spec), f"{name}: twin tables disagree"
        report = verify_entry(entry, CATALOG)
        assert report.ok, f"{name}: {report.checks}"
    # negative controls: a wrong binding must be caught, not absorbed
    spec = build_hom(CATALOG, CATALOG.get("grs-to-glpq"))
    ps = spec.source.alg.ps
    with pytest.raises(HomFailure):
        check_hom(spec, N=1, override={"p": ps.parse("r * s")})
    spec = build_hom(CATALOG, CATALOG.get("gmk-to-glhh"))
    ps = spec.source.alg.ps
    with pytest.raises(HomFailure):
        check_hom(spec, N=1, override={"h": ps.parse("m + k")})


def test_hopf_structure_of_the_three_quantum_function_algebras():
    # the grid coproduct and identity-grid counit are algebra maps, are
    # coassociative and counital, on every presentation in the catalog
    for name in CATALOG.names():
        entry = CATALOG.get(name)
        if entry.kind not in ("rmatrix", "coloured-family", "presentation"):
            continue
        assert check_bialgebra(entry.presentation()).ok, name
    # antipode images satisfy both inversion identities on every grid cell
    for name in ("glq2", "glpq2", "grs"):
        entry = CATALOG.get(name)
        report = check_antipode(entry.hopf_data())
        assert report.ok, name
        assert report.cells_checked == entry.matrix().rows
    # one-parameter determinant: group-like and central
    glq2 = CATALOG.get("glq2")
    rep = check_grouplike(glq2.presentation(), glq2.hopf_data().det)
    assert rep.grouplike and rep.central
    # two-parameter determinant: group-like, central only up to a twist
    glpq2 = CATALOG.get("glpq2")
    pres = glpq2.presentation()
    det = glpq2.hopf_data().det
    rep = check_grouplike(pres, det)
    assert rep.grouplike and not rep.central
    ps = pres.alg.ps
    tw = quasi_twists(pres.rewrite(), det)
    assert tw == {"a": ps.one, "b": ps.parse("p * q^-1"),
                  "c": ps.parse("p^-1 * q"), "d": ps.one}
    # nine-dimensional case: determinant central, the scaling-weighted
    # variant group-like but not central
    grs = CATALOG.get("grs")
    pres = grs.presentation()
    rep = check_grouplike(pres, grs.hopf_data().det)
    assert rep.grouplike and rep.central
    delta = grs.hopf_delta()
    assert delta is not None
    rep = check_grouplike(pres, delta)
    assert rep.grouplike and not rep.central


def test_rewriting_is_confluent_path_independent_and_classically_commutative():
    # (a) every rule system in the catalog has no unresolved overlaps
    for name in CATALOG.names():
        entry = CATALOG.get(name)
        if "confluent" not in entry.flags:
            continue
        assert check_confluence(entry.presentation().rewrite()).ok, name
        if entry.kind == "coloured-family":
            pair = entry.pair_presentation()
            assert check_confluence(pair.rewrite()).ok, f"{name} (pair)"
    # (b) 100 random words: randomized reduction order reaches the same
    # normal form as the deterministic policy, and reduction is a congruence
    rng = random.Random(20260823)
    cases = [("glq2_borel", 50), ("grs", 50)]
    for name, count in cases:
        pres = CATALOG.get(name).presentation()
        alg, rsys = pres.alg, pres.rewrite()
        for k in range(count):
            word = tuple(rng.choice(alg.gens)
                         for _ in range(rng.randrange(2, 7)))
            nf = rsys.normal_form(alg.word(word))
            for seed in (2 * k, 2 * k + 1):
                shuffled = rsys.normal_form(alg.word(word),
                                            rng=random.Random(seed))
                assert shuffled == nf, (name, word, seed)
            cut = rng.randrange(1, len(word))
            u, v = alg.word(word[:cut]), alg.word(word[cut:])
            assert rsys.normal_form(rsys.normal_form(u)
                                    * rsys.normal_form(v)) == nf, (name, word)
    # (c) at the recorded classical parameter values every matrix collapses
    # to the identity, so the extracted relations become plain commutators
    for name in BRAIDED + COLOURED + ("identity4",):
        entry = CATALOG.get(name)
        bindings = entry.classical_bindings()
        if entry.param_set().symbols:
            assert bindings, f"{name}: no classical point recorded"
        m = entry.matrix()
        classical = m.map(lambda x: rf_substitute(x, bindings, into=m.ps))
        assert classical == SymMatrix.identity(m.ps, m.rows), name
    for name in ("glq2", "gmk"):
        entry = CATALOG.get(name)
        m = entry.matrix()
        bindings = entry.classical_bindings()
        classical = m.map(lambda x: rf_substitute(x, bindings, into=m.ps))
        pres = presentation_from_matrix(classical, entry.pattern(),
                                        gens=entry.generator_order())
        assert pres.relations, name
        for rel in pres.relations:
            terms = sorted(rel.terms.items(), key=lambda t: str(t[0]))
            assert len(terms) == 2, (name, str(rel))
            (w1, c1), (w2, c2) = terms
            assert w1 == tuple(reversed(w2)), (name, str(rel))
            assert c1 + c2 == m.ps.zero, (name, str(rel))


def test_full_catalog_verification_is_deterministic_and_fast(capsys):
    import json
    texts, reports = [], []
    for _ in range(2):
        start = time.perf_counter()
        code = main(["verify", "--all"])
        seconds = time.perf_counter() - start
        out = capsys.readouterr().out
        assert code == 0, out
        assert seconds < 900.0, f"full verification took {seconds:.1f}s"
        assert out.strip().endswith("checks passed")
        texts.append(_TIMING.sub("[T]", out))

        start = time.perf_counter()
        code = main(["verify", "--all", "--json"])
        seconds = time.perf_counter() - start
        out = capsys.readouterr().out
        assert code == 0
        assert seconds < 900.0, f"full verification took {seconds:.1f}s"
        report = json.loads(out)
        assert report["ok"] is True
        for row in report["checks"]:
            row["seconds"] = 0
        reports.append(json.dumps(report, sort_keys=True))
    assert texts[0] == texts[1]
    assert reports[0] == reports[1]  # byte-identical once timings are zeroed
