"""Manifest reader and writer."""

import json
from fractions import Fraction

import pytest

from reebmec.catalog import CATALOG, build, emit, sphere_with_handles, ustilovsky
from reebmec.errors import ManifestError
from reebmec.manifest import (
    dumps,
    format_fraction,
    fraction_to_json,
    load,
    loads,
    model_from_dict,
    model_to_dict,
)
from reebmec.mec import mec
from reebmec.orbit_model import AFModel, MBModel

AF_DOC = {
    "kind": "af",
    "n": 2,
    "families": [
        {"label": "x0", "orbit_type": "I", "sigma": 1, "delta": 4, "degree_rule": [4, -2]}
    ],
}


def test_fraction_forms():
    assert fraction_to_json(Fraction(1, 2)) == "1/2"
    assert fraction_to_json(Fraction(3)) == 3
    assert fraction_to_json(Fraction(-6, 4), machine=True) == {"num": -3, "den": 2}
    assert format_fraction(Fraction(29, 46)) == "29/46"
    assert format_fraction(None) == "undefined"


@pytest.mark.parametrize("delta", [4, "4", "8/2", {"num": 8, "den": 2}])
def test_rational_inputs(delta):
    doc = json.loads(json.dumps(AF_DOC))
    doc["families"][0]["delta"] = delta
    assert model_from_dict(doc).families[0].delta == 4


@pytest.mark.parametrize("delta", [True, 4.0, "x/2", {"num": 1, "den": 0}, {"num": 1}])
def test_rational_rejects(delta):
    doc = json.loads(json.dumps(AF_DOC))
    doc["families"][0]["delta"] = delta
    with pytest.raises(ManifestError):
        model_from_dict(doc)


@pytest.mark.parametrize(
    "rule, expected",
    [([4, -2], (4, -2)), ({"a": 4, "b": -2}, (4, -2)), ({"sequence": [2, 6, 10]}, (4, -2))],
)
def test_affine_forms(rule, expected):
    doc = json.loads(json.dumps(AF_DOC))
    doc["families"][0]["degree_rule"] = rule
    assert tuple(model_from_dict(doc).families[0].degree_rule) == expected


@pytest.mark.parametrize(
    "rule", [[4], {"sequence": [2]}, {"sequence": [2, 6, 11]}, {"a": 4}, {"a": 1, "b": 0, "sequence": [1, 2]}]
)
def test_affine_rejects(rule):
    doc = json.loads(json.dumps(AF_DOC))
    doc["families"][0]["degree_rule"] = rule
    with pytest.raises(ManifestError):
        model_from_dict(doc)


def test_unknown_key_has_location():
    doc = json.loads(json.dumps(AF_DOC))
    doc["families"][0]["colour"] = "red"
    with pytest.raises(ManifestError) as info:
        model_from_dict(doc)
    assert info.value.location == "$.families[0]"
    assert "colour" in str(info.value)


def test_unknown_top_key_and_kind():
    with pytest.raises(ManifestError, match="unknown key"):
        model_from_dict({**AF_DOC, "extra": 1})
    with pytest.raises(ManifestError, match="kind"):
        model_from_dict({**AF_DOC, "kind": "xy"})
    with pytest.raises(ManifestError, match="missing"):
        model_from_dict({"kind": "af", "n": 2})


def test_malformed_json_reports_line_and_column():
    with pytest.raises(ManifestError) as info:
        loads('{\n  "kind": "af",\n  "n": 2,,\n}')
    assert "line 3" in str(info.value)
    assert "column" in str(info.value)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_roundtrip(name):
    model = build(name)
    again, meta = loads(json.dumps(emit(name)))
    assert again == model
    assert meta["catalog"] == name
    assert mec(again, linearized=True) == mec(model, linearized=True)


def test_roundtrip_preserves_type_and_flags():
    for model in (ustilovsky(7, 15), sphere_with_handles(4, [1, 2, 3])):
        again, _ = loads(dumps(model))
        assert type(again) is type(model)
        assert again == model


def test_model_to_dict_kinds():
    assert model_to_dict(AFModel(2))["kind"] == "af"
    assert model_to_dict(MBModel(2))["kind"] == "mb"


def test_load_from_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(dumps(build("standard_sphere", n=3)))
    model, _ = load(path)
    assert model == build("standard_sphere", n=3)
