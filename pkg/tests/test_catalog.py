"""Loading, serialization, verification and reconstruction of catalog data."""

import json

import pytest

from qdeform.symexpr import ParseError, serialize
from qdeform.catalog import (
    Catalog,
    DimensionMismatch,
    SchemaError,
    available_checks,
    builtin_dir,
    list_builtin,
    load_builtin,
    load_definition,
    restricted_block,
    serialize_entry,
    verify_entry,
)
from qdeform.ncalg import parse_poly
from qdeform.reconstruct import RECONSTRUCTORS, ReconstructionError, reconstruct

CATALOG = load_builtin()

ALL_NAMES = [
    "gl2-coloured-q-to-gl2-coloured-j", "gl2_coloured_j", "gl2_coloured_q",
    "glh2", "glhh2", "glpq2", "glq2", "glq2-to-glh2", "glq2_borel", "gmk",
    "gmk-to-glhh", "gmkk-coloured-to-gl2-coloured-j", "gmkk_coloured", "grs",
    "grs-coloured-to-gl2-coloured-q", "grs-coloured-to-gmkk-coloured",
    "grs-to-glpq", "grs-to-gmk", "grs_coloured", "identity4",
]


def toy_doc(**overrides):
    doc = {
        "name": "toy",
        "kind": "rmatrix",
        "provenance": "paper-derived",
        "flags": [],
        "params": ["h"],
        "dim": 4,
        "entries": ["1"] * 4 + ["0", "1", "0", "0",
                                "0", "h", "1", "0", "0", "0", "0", "1"],
    }
    doc["entries"][1] = "0"
    doc["entries"][2] = "0"
    doc["entries"][3] = "0"
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------------------
# loading and the canonical form
# ---------------------------------------------------------------------------

def test_builtin_catalog_lists_all_entries():
    assert list_builtin() == ALL_NAMES
    assert "glq2_borel" in CATALOG
    assert "nonexistent" not in CATALOG


def test_get_unknown_entry_raises():
    with pytest.raises(KeyError):
        CATALOG.get("nonexistent")


def test_duplicate_entry_names_rejected():
    e = CATALOG.get("glq2")
    with pytest.raises(SchemaError):
        Catalog([e, e])


@pytest.mark.parametrize("name", ALL_NAMES)
def test_shipped_files_round_trip_byte_exact(name):
    path = builtin_dir() / f"{name}.json"
    text = path.read_text()
    assert serialize_entry(load_definition(path)) == text


def test_serialization_canonicalizes_scrambled_documents():
    doc = {
        "flags": ["triangular", "qybe"],
        "entries": ["1"] + ["0"] * 3 + ["0", "1", "0", "0",
                                        "0", "h", "1", "0", "0", "0", "0", "1"],
        "dim": 4,
        "params": ["h"],
        "kind": "rmatrix",
        "provenance": "paper-derived",
        "name": "toy",
    }
    text = serialize_entry(load_definition(doc))
    loaded = json.loads(text)
    assert list(loaded) == ["name", "kind", "provenance", "params", "dim",
                            "entries", "flags"]
    assert loaded["flags"] == ["qybe", "triangular"]
    # a second pass reproduces the same bytes
    assert serialize_entry(load_definition(text)) == text


def test_load_accepts_dict_path_and_text(tmp_path):
    doc = toy_doc()
    from_dict = load_definition(doc)
    text = serialize_entry(from_dict)
    p = tmp_path / "toy.json"
    p.write_text(text)
    assert serialize_entry(load_definition(p)) == text
    assert serialize_entry(load_definition(text)) == text


def test_malformed_json_reports_location():
    with pytest.raises(ParseError) as exc:
        load_definition('{"name": "x", "kind": }')
    assert "line 1" in str(exc.value)
    assert "column" in str(exc.value)


def test_bad_cell_reports_location():
    with pytest.raises(ParseError) as exc:
        load_definition(toy_doc(entries=["1"] * 15 + ["q +"]))
    assert "entry (3,3)" in str(exc.value)


def test_catalog_dir_override(tmp_path, monkeypatch):
    (tmp_path / "toy.json").write_text(serialize_entry(load_definition(toy_doc())))
    monkeypatch.setenv("QDEFORM_CATALOG_DIR", str(tmp_path))
    assert list_builtin() == ["toy"]


# ---------------------------------------------------------------------------
# schema validation
# ---------------------------------------------------------------------------

def test_wrong_entry_count_is_a_schema_error():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(entries=["1"] * 15))


def test_wrong_entry_count_is_a_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        load_definition(toy_doc(entries=["1"] * 15))


def test_non_square_dim_rejected():
    with pytest.raises(DimensionMismatch):
        load_definition(toy_doc(dim=15, entries=["1"] * 225))


def test_pattern_must_match_dim():
    with pytest.raises(DimensionMismatch):
        load_definition(toy_doc(
            pattern=[["a", "b", "x"], ["c", "d", "y"], ["u", "v", "w"]]))


def test_unknown_kind_rejected():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(kind="spectral"))


def test_unknown_provenance_rejected():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(provenance="guessed"))


def test_flag_must_be_applicable_to_kind():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(flags=["cqybe"]))


def test_unknown_fields_rejected():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(colour="blue"))


def test_generators_must_match_pattern_cells():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(pattern=[["a", "b"], ["c", "d"]],
                                gens=["a", "b", "c", "e"]))


def test_parameters_and_generators_must_not_overlap():
    with pytest.raises(SchemaError):
        load_definition(toy_doc(pattern=[["h", "b"], ["c", "d"]]))


def test_colour_slots_validated():
    doc = toy_doc(kind="coloured-family", params=["h", "c1"],
                  colour_slots={"first": ["c1"], "second": ["c1"]})
    with pytest.raises(SchemaError):
        load_definition(doc)


def test_presentation_relations_parse_with_location():
    doc = {
        "name": "bad", "kind": "presentation", "provenance": "paper-derived",
        "flags": [], "params": ["q"], "gens": ["a", "b"],
        "pattern": [["a", "b"], ["0", "1"]],
        "relations": ["b*a - q*a*b", "b*z"],
    }
    with pytest.raises(ParseError) as exc:
        load_definition(doc)
    assert "relation 1" in str(exc.value)


def test_hom_binding_rows_validated():
    doc = CATALOG.get("grs-to-glpq").doc.copy()
    doc["bindings"] = {"p": {"r": -1, "z": "N"}, "q": {"r": -1, "s": "-N"}}
    with pytest.raises(SchemaError):
        load_definition(doc)


def test_restriction_legs_validated():
    doc = json.loads(serialize_entry(CATALOG.get("grs")))
    doc["restriction"]["legs"] = [0, 9]
    with pytest.raises(SchemaError):
        load_definition(doc)


def test_contraction_transform_size_validated():
    doc = json.loads(serialize_entry(CATALOG.get("glq2-to-glh2")))
    doc["transform"]["entries"] = ["1", "eta", "0"]
    with pytest.raises(DimensionMismatch):
        load_definition(doc)


# ---------------------------------------------------------------------------
# verification of the shipped claims
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ALL_NAMES)
def test_every_claimed_check_passes(name):
    entry = CATALOG.get(name)
    report = verify_entry(entry, CATALOG)
    assert report.checks, f"{name} has nothing to verify"
    assert [c.name for c in report.checks] == available_checks(entry)
    failed = [(c.name, c.witness) for c in report.checks if c.status != "pass"]
    assert not failed, failed
    assert report.ok


def test_false_flag_detected_with_witness():
    entry = CATALOG.get("glq2")
    report = verify_entry(entry, CATALOG, checks=["triangular"])
    assert not report.ok
    (c,) = report.checks
    assert c.status == "fail"
    assert "q^2 - 1" in c.witness


def test_coloured_triangularity_failure_witness():
    entry = CATALOG.get("grs_coloured")
    report = verify_entry(entry, CATALOG, checks=["colour-triangular"])
    (c,) = report.checks
    assert c.status == "fail"
    assert "-1 + r^-2" in c.witness


def test_hecke_check_without_pair_is_an_error():
    doc = toy_doc(flags=["hecke"])
    entry = load_definition(doc)
    report = verify_entry(entry)
    (c,) = report.checks
    assert c.status == "error"


def test_tampered_contraction_target_detected():
    doc = json.loads(serialize_entry(CATALOG.get("glq2-to-glh2")))
    doc["target"] = "glhh2"
    entry = load_definition(doc)
    report = verify_entry(entry, CATALOG)
    (c,) = report.checks
    assert c.status in ("fail", "error")


def test_tampered_hom_binding_detected():
    doc = json.loads(serialize_entry(CATALOG.get("gmk-to-glhh")))
    doc["bindings"]["h"] = {"m": 1, "k": "N"}
    entry = load_definition(doc)
    report = verify_entry(entry, CATALOG)
    status = {c.name: c.status for c in report.checks}
    assert status["N=1"] == "fail"


def test_restriction_block_extraction():
    m = CATALOG.get("grs").matrix()
    sub = restricted_block(m, [0, 1])
    glq2 = CATALOG.get("glq2").matrix()
    # corner block equals the one-parameter matrix at inverted parameter
    ps = m.ps
    assert sub[0, 0] == ps.parse("r^-1")
    assert sub[2, 1] == ps.parse("r^-1 - r")
    assert glq2[2, 1] == glq2.ps.parse("q - q^-1")


# ---------------------------------------------------------------------------
# stored payloads reparse
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["glq2", "glpq2", "grs"])
def test_hopf_payload_reparses(name):
    entry = CATALOG.get(name)
    data = entry.hopf_data()
    assert data.det is not None
    big, _ = data.localized()
    for gen, img in entry.doc["hopf"]["antipode"].items():
        elem = data.antipode[gen]
        assert str(elem.body) == str(parse_poly(big, img["body"]))


def test_relations_payload_reparses():
    entry = CATALOG.get("glq2_borel")
    pres = entry.presentation()
    assert len(pres.relations) == 3
    for text, poly in zip(entry.doc["relations"], pres.relations):
        assert str(poly) == text


def test_classical_bindings_are_constants():
    for name in ALL_NAMES:
        entry = CATALOG.get(name)
        for p, v in entry.classical_bindings().items():
            v.as_fraction()  # raises if not constant


# ---------------------------------------------------------------------------
# reconstruction searches
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(RECONSTRUCTORS))
def test_reconstruction_recovers_frozen_data(name):
    entry = CATALOG.get(name)
    assert entry.provenance == "reconstructed-by-oracle"
    rebuilt = reconstruct(name, CATALOG)
    frozen = entry.matrix()
    assert rebuilt.rows == frozen.rows
    for i in range(rebuilt.rows):
        for j in range(rebuilt.cols):
            assert rebuilt[i, j] == frozen[i, j], (name, i, j)


def test_reconstruction_covers_every_oracle_entry():
    oracle_entries = [n for n in CATALOG.names()
                      if CATALOG.get(n).provenance == "reconstructed-by-oracle"]
    assert sorted(RECONSTRUCTORS) == oracle_entries


def test_contraction_outputs_declare_their_provenance():
    for name in ("glh2", "gmk", "gmkk_coloured", "gl2_coloured_j"):
        assert CATALOG.get(name).provenance == "contraction-output"
