"""Orbit models: validation, orbifold invariants and generator enumeration."""

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reebmec.catalog import standard_sphere, standard_sphere_af, ustilovsky
from reebmec.errors import IncompleteDataError, ModelValidationError
from reebmec.orbit_model import (
    TYPE_I,
    TYPE_II,
    AFModel,
    MaximalOrbifold,
    MBModel,
    PrincipalOrbitFamily,
    Stratum,
    af_companion,
    chi_hat,
    descendants,
    e_invariant,
    e_invariant_cells,
    enumerate_generators,
    orbifold_degree,
    orbifold_sign,
    parity_sign,
    simple_cells,
    validate_af,
    validate_mb,
)
from reebmec.suites import random_stratification


def fam(label="x", kind=TYPE_I, sigma=1, delta=4, rule=(4, 0)):
    return PrincipalOrbitFamily(label, kind, sigma, delta, rule)


def brute_generators(model, lo, hi, k_max=2000):
    """Independent enumeration: walk every iterate and keep those in range."""
    out = Counter()
    for f in model.families:
        for k in range(1, k_max + 1):
            if f.orbit_type == TYPE_II and k % 2 == 0:
                continue
            d = f.degree_rule(k)
            if lo <= d <= hi:
                out[int(d)] += 1
    return out


# ---------------------------------------------------------------------------
# validate_af


def test_sphere_af_is_valid():
    for n in range(2, 8):
        assert validate_af(standard_sphere_af(n)) == []


def test_parity_violation():
    v = validate_af(AFModel(3, [fam(sigma=1, rule=(4, 1), delta=4)]))
    assert any("parity" in m for m in v)


def test_zero_delta_violation():
    v = validate_af(AFModel(3, [fam(delta=0, rule=None)]))
    assert any("nonzero" in m for m in v)


def test_af_other_violations():
    m = AFModel(3, [fam("a"), fam("a"), fam("b", rule=(6, 0))])
    v = validate_af(m)
    assert any("duplicate" in x for x in v)
    assert any("slope" in x for x in v)
    assert validate_af(AFModel(3, [fam(rule=(4, 4))]))  # offset above 2n - 4
    assert validate_af(AFModel(3, [fam(rule=(4, -4))]))  # offset below -2
    assert validate_af(AFModel(3, [fam(kind="III")]))
    assert validate_af(AFModel(3, [fam(sigma=0)]))
    assert validate_af(AFModel(0, []))


def test_af_type_i_with_odd_slope_is_rejected():
    v = validate_af(AFModel(3, [fam(kind=TYPE_I, sigma=-1, delta=3, rule=(3, 0))]))
    assert any("odd slope" in m for m in v)
    # type II families only count odd iterates, so an odd slope is fine
    assert validate_af(AFModel(3, [fam(kind=TYPE_II, sigma=-1, delta=3, rule=(3, 0))])) == []


def test_no_low_degree_flag_is_checked():
    m = AFModel(2, [fam(sigma=-1, delta=2, rule=(2, -1))])
    assert any("no_low_degree" in x for x in validate_af(m))
    assert validate_af(AFModel(2, m.families, no_low_degree=False)) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.integers(1, 6), st.integers(-2, 12))
def test_af_window_property(n, half_slope, b):
    # a valid family keeps |gamma^k| - k Delta inside [-2, 2n - 4] for all k
    a = 2 * half_slope
    m = AFModel(n, [fam(sigma=parity_sign(b), delta=a, rule=(a, b))], no_low_degree=False)
    ok = validate_af(m) == []
    inside = all(-2 <= a * k + b - k * a <= 2 * n - 4 for k in range(1, 1001))
    assert ok == inside


# ---------------------------------------------------------------------------
# validate_mb


def simple_orbifold(n=3, sigma=1, rule=(6, 0), morse=(0, 2, 4), chi=3, stab=1):
    base = Stratum("B", 1, chi, 2 * n - 2, stab, morse)
    return MaximalOrbifold("S", sigma, rule, 2 * n - 2, (base,))


def test_mb_pass_fixtures():
    assert validate_mb(standard_sphere(3)) == []
    assert validate_mb(ustilovsky(5, 7)) == []
    assert validate_mb(MBModel(3, [simple_orbifold()])) == []


def test_mb_sigma_parity_violation():
    v = validate_mb(MBModel(3, [simple_orbifold(sigma=-1)]))
    assert any("sigma" in m for m in v)


def test_mb_morse_inconsistent_with_chi():
    v = validate_mb(MBModel(3, [simple_orbifold(morse=(0, 2))]))
    assert any("alternating sum" in m for m in v)


def test_mb_bad_orbifold_rejected():
    # odd slope: degree parity alternates with the iterate
    v = validate_mb(MBModel(3, [simple_orbifold(rule=(5, 1))]))
    assert any("bad orbifold" in m for m in v)
    assert validate_mb(MBModel(3, [simple_orbifold()], good_only=False))


def test_mb_half_integral_rule():
    # mu_RS - dim/2 must be an integer
    v = validate_mb(MBModel(3, [simple_orbifold(rule=(6, Fraction(1, 2)))]))
    assert any("not an integer" in m for m in v)


def test_mb_structure_violations():
    a = Stratum("A", 1, 1, 4, 1, children=("B",))
    b = Stratum("B", 1, 1, 2, 1, children=("A",))
    cyc = MaximalOrbifold("S", 1, (6, 0), 4, (a, b))
    assert any("cycle" in m for m in validate_mb(MBModel(3, [cyc])))
    lost = MaximalOrbifold("S", 1, (6, 0), 4, (Stratum("A", 1, 1, 4, 1, children=("Z",)),))
    assert any("unknown child" in m for m in validate_mb(MBModel(3, [lost])))
    two_tops = MaximalOrbifold(
        "S", 1, (6, 0), 4, (Stratum("A", 1, 1, 4, 1), Stratum("B", 1, 1, 4, 1))
    )
    assert any("one top stratum" in m for m in validate_mb(MBModel(3, [two_tops])))


# ---------------------------------------------------------------------------
# orbifold_degree, orbifold_sign


def test_orbifold_degree_examples():
    S = standard_sphere(2).maximal[0]
    assert orbifold_degree(S, 1, 2) == 2
    U = ustilovsky(5, 7).maximal[0]
    assert U.delta == 46
    assert orbifold_degree(U, 1, 5) == 44
    with pytest.raises(ValueError):
        orbifold_degree(S, 0, 2)


def test_orbifold_sign_examples():
    assert orbifold_sign(standard_sphere(4).maximal[0], 4) == 1
    assert orbifold_sign(ustilovsky(5, 9).maximal[0], 5) == 1
    bad = simple_orbifold(rule=(5, 1))
    with pytest.raises(ModelValidationError, match="bad"):
        orbifold_sign(bad, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(-6, 6), st.integers(0, 6))
def test_good_sign_is_constant(n, half_slope, b):
    morse = tuple(range(0, 2 * n - 1, 2))
    S = simple_orbifold(n=n, rule=(2 * half_slope, b), morse=morse, chi=n)
    sigma = parity_sign(orbifold_degree(S, 1, n))
    S = MaximalOrbifold(S.label, sigma, S.mu_rs_rule, S.dim, S.strata)
    if validate_mb(MBModel(n, [S])) != []:
        return
    signs = {parity_sign(orbifold_degree(S, k, n)) for k in range(1, 51)}
    assert signs == {S.sigma}


# ---------------------------------------------------------------------------
# chi_hat, e_invariant


def test_chi_hat_minimal():
    assert chi_hat([Stratum("P", 1, 4, 6, 1)]) == {"P": 4}


@pytest.mark.parametrize("n", [3, 5, 7])
def test_chi_hat_ustilovsky(n):
    chi = chi_hat(ustilovsky(n, 7).maximal[0].strata)
    assert chi == {"S_pi": n - 1, "S_ppi": 1}


@pytest.mark.parametrize("n", range(2, 9))
def test_e_sphere(n):
    assert e_invariant(standard_sphere(n).maximal[0].strata) == n


@pytest.mark.parametrize("n, p", [(3, 7), (5, 7), (5, 9), (7, 23)])
def test_e_ustilovsky(n, p):
    assert e_invariant(ustilovsky(n, p).maximal[0].strata) == (n - 1) * p + 1


def test_e_zero_chi():
    assert e_invariant([Stratum("T", 1, 0, 2, 3)]) == 0


def test_e_disagreement_is_detected():
    # Morse data on the substratum that the top stratum does not contain
    low = Stratum("L", 1, 1, 0, 2, (0,))
    top = Stratum("T", 1, 1, 2, 1, (2,), children=("L",))
    with pytest.raises(ModelValidationError):
        e_invariant([top, low])


def test_chi_hat_counts_all_descendants():
    # chain Z < Y < X: CHI(X) subtracts both Y and Z
    z = Stratum("Z", 1, 1, 0, 1)
    y = Stratum("Y", 1, 2, 2, 1, children=("Z",))
    x = Stratum("X", 1, 3, 4, 1, children=("Y",))
    assert descendants([x, y, z])["X"] == {"Y", "Z"}
    assert chi_hat([x, y, z]) == {"Z": 1, "Y": 1, "X": 1}


def test_cycle_raises():
    a = Stratum("A", 1, 1, 2, 1, children=("B",))
    b = Stratum("B", 1, 1, 2, 1, children=("A",))
    with pytest.raises(ValueError, match="cycle"):
        chi_hat([a, b])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_euler_lemma_equivalence(seed):
    strata = random_stratification(np.random.default_rng(seed))
    chi = chi_hat(strata)
    by = {s.label: s for s in strata}
    # telescoping: CHI sums to chi of the top stratum
    assert sum(chi.values()) == by["X0"].euler_underlying
    # oracle: CHI of a stratum is the alternating count of its own cells
    cells = simple_cells(strata)
    for x in chi:
        assert chi[x] == sum((-1) ** i * c for i, c in cells[x].items())
    assert e_invariant(strata) == e_invariant_cells(strata)


# ---------------------------------------------------------------------------
# enumerate_generators


def test_sphere_generators_n2():
    assert enumerate_generators(standard_sphere(2), 8, min_degree=0) == Counter(
        {2: 1, 4: 1, 6: 1, 8: 1}
    )


def test_sphere_af_and_mb_agree():
    for n in range(2, 7):
        mb = enumerate_generators(standard_sphere(n), 500)
        af = enumerate_generators(standard_sphere_af(n), 500)
        assert mb == af


def test_below_first_degree_is_empty():
    assert enumerate_generators(standard_sphere(3), 3) == Counter()
    assert enumerate_generators(standard_sphere(3), 10, min_degree=20) == Counter()


def test_incomplete_data():
    with pytest.raises(IncompleteDataError):
        enumerate_generators(ustilovsky(5, 7), 100)
    with pytest.raises(IncompleteDataError):
        enumerate_generators(AFModel(3, [fam(rule=None)]), 100)


def test_type_ii_odd_iterates_only():
    m = AFModel(3, [fam(kind=TYPE_II, sigma=-1, delta=2, rule=(2, 1))])
    assert enumerate_generators(m, 20, min_degree=0) == Counter({3: 1, 7: 1, 11: 1, 15: 1, 19: 1})


def test_companion_is_valid():
    for n in range(2, 6):
        m = af_companion(standard_sphere(n))
        assert validate_af(m) == []
        assert all(f.delta == 2 * n for f in m.families)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from([TYPE_I, TYPE_II]),
            st.integers(-5, 5).filter(bool),
            st.integers(-2, 10),
        ),
        min_size=1,
        max_size=4,
    ),
    st.integers(-200, 200),
    st.integers(0, 300),
)
def test_enumeration_matches_brute_force(specs, lo, width):
    fams = [
        PrincipalOrbitFamily(f"f{i}", kind, parity_sign(b), 2 * h, (2 * h, b))
        for i, (kind, h, b) in enumerate(specs)
    ]
    m = AFModel(6, fams, no_low_degree=False)
    hi = lo + width
    assert enumerate_generators(m, hi, min_degree=lo) == brute_generators(m, lo, hi)
