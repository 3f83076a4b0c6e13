"""Built-in models."""

from fractions import Fraction

import pytest

from reebmec.catalog import (
    CATALOG,
    build,
    emit,
    prequantization,
    sphere_with_handles,
    standard_sphere,
    standard_sphere_af,
    ustilovsky,
)
from reebmec.mec import MecValue, handle_family, mec, mec_af, mec_mb
from reebmec.orbit_model import validate

HALF = Fraction(1, 2)


def ustilovsky_closed(n, p):
    return Fraction((n - 1) * p + 1, 2 * ((n - 2) * p + 2))


@pytest.mark.parametrize("n", [2, 5])
def test_standard_sphere_mec(n):
    assert mec_mb(standard_sphere(n)) == MecValue(HALF, 0)


def test_standard_sphere_data():
    S = standard_sphere(4).maximal[0]
    assert tuple(S.mu_rs_rule) == (8, 0) and S.dim == 6 and S.sigma == 1
    (base,) = S.strata
    assert base.euler_underlying == 4 and base.stab_order == 1
    assert base.morse_indices == (0, 2, 4, 6)
    with pytest.raises(ValueError):
        standard_sphere(1)


def test_sphere_af_companion():
    m = standard_sphere_af(2)
    assert [f.delta for f in m.families] == [4, 4]
    assert mec_af(m) == MecValue(HALF, 0)


@pytest.mark.parametrize("n", [3, 5, 7])
@pytest.mark.parametrize("p", [7, 9, 15, 17, 23])
def test_ustilovsky_closed_form(n, p):
    assert mec_mb(ustilovsky(n, p)) == MecValue(ustilovsky_closed(n, p), 0)


def test_ustilovsky_distinguishes():
    assert mec_mb(ustilovsky(5, 7)).chi_plus == Fraction(29, 46)
    assert mec_mb(ustilovsky(5, 9)).chi_plus == Fraction(37, 58)
    for n in (3, 5, 7):
        values = [mec_mb(ustilovsky(n, p)).chi_plus for p in (7, 9, 15, 17, 23)]
        assert len(set(values)) == len(values)


def test_ustilovsky_constraints():
    for n, p in ((4, 7), (1, 7), (5, 3), (5, 0)):
        with pytest.raises(ValueError):
            ustilovsky(n, p)


def test_prequantization_examples():
    assert prequantization(2, 2).value == MecValue(HALF, 0)
    assert prequantization(2, 2).value == mec_mb(standard_sphere(2))
    assert prequantization(0, 5).value.chi_plus == 0
    neg = prequantization(6, -3).value
    assert neg == MecValue(0, -1)
    with pytest.raises(ValueError):
        prequantization(2, 0)


@pytest.mark.parametrize("chi_B, c1, n", [(2, 2, 2), (6, -3, 3), (3, 3, 3), (-2, 1, 2)])
def test_prequantization_model_matches_closed_form(chi_B, c1, n):
    pq = prequantization(chi_B, c1, n)
    assert validate(pq.model) == []
    assert mec(pq.model) == pq.value


def test_handle_family_catalog_examples():
    assert (handle_family(3, 1).sigma, handle_family(3, 1).degree_rule(1)) == (-1, 3)
    assert (handle_family(4, 2).sigma, handle_family(4, 2).degree_rule(1)) == (1, 4)


def test_sphere_with_handles():
    m = sphere_with_handles(4, [1, 2, 2])
    assert mec_af(m).chi_plus == HALF - HALF + HALF + HALF


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_entries_validate(name):
    assert validate(build(name)) == []


def test_closed_form_entries_agree():
    for name, entry in CATALOG.items():
        if entry.kind == "closed_form":
            assert mec(entry.model()) == entry.closed_form()


def test_mb_and_af_routes_agree():
    for n in range(2, 9):
        assert mec(standard_sphere(n)) == mec(standard_sphere_af(n))


def test_emit_carries_metadata():
    doc = emit("ustilovsky", n=7, p=9)
    assert doc["metadata"]["parameters"] == {"n": 7, "p": 9}
    assert "provenance" in doc["metadata"]
    assert emit("prequantization")["metadata"]["closed_form"]["chi_plus"] == "1/2"


def test_unknown_parameters_and_names():
    with pytest.raises(ValueError):
        build("standard_sphere", p=3)
    with pytest.raises(KeyError):
        build("nope")
