"""
Built-in models: the standard contact sphere, Ustilovsky's spheres,
prequantization circle bundles and spheres with subcritical handles.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from .mec import MecValue, af_surgery, handle_family
from .orbit_model import MaximalOrbifold, MBModel, Stratum, af_companion

__all__ = [
    "standard_sphere",
    "standard_sphere_af",
    "ustilovsky",
    "prequantization",
    "handle_family",
    "sphere_with_handles",
    "CatalogEntry",
    "CATALOG",
    "build",
    "emit",
]


def cp_morse(m):
    """Morse indices of the perfect Morse function on CP^m."""
    return tuple(range(0, 2 * m + 1, 2))


def standard_sphere(n):
    """Boothby-Wang form on S^{2n-1}: every orbit closed, orbit space CP^{n-1}."""
    if not isinstance(n, int) or n < 2:
        raise ValueError("standard_sphere needs an integer n >= 2")
    base = Stratum(f"CP^{n - 1}", 1, n, 2 * n - 2, 1, cp_morse(n - 1))
    S = MaximalOrbifold("S_1", 1, (2 * n, 0), 2 * n - 2, (base,))
    return MBModel(n, (S,))


def standard_sphere_af(n):
    """Asymptotically finite companion of standard_sphere(n).

    One type I family per critical point of the perfect Morse function on
    CP^{n-1}: Delta = 2n, degrees 2nk + ind - 2.
    """
    return af_companion(standard_sphere(n))


def ustilovsky(n, p):
    """Brieskorn sphere x_0^p + x_1^2 + ... + x_n^2 = 0 with its Boothby-Wang form.

    n odd >= 3 and p = +-1 mod 8.  The orbit space has one singular stratum
    CP^{n-2} with isotropy Z_p inside CP^{n-1}.
    """
    if not isinstance(n, int) or n < 3 or n % 2 == 0:
        raise ValueError("ustilovsky needs an odd integer n >= 3")
    if not isinstance(p, int) or p < 1 or p % 8 not in (1, 7):
        raise ValueError("ustilovsky needs a positive integer p = +-1 mod 8")
    low = Stratum("S_pi", 1, n - 1, 2 * n - 4, p, cp_morse(n - 2))
    top = Stratum("S_ppi", p, n, 2 * n - 2, 1, cp_morse(n - 1), children=("S_pi",))
    rule = (2 * ((n - 2) * p + 2), 0)
    S = MaximalOrbifold("S_ppi", 1, rule, 2 * n - 2, (top, low))
    return MBModel(n, (S,))


class Prequantization(NamedTuple):
    value: MecValue
    model: MBModel


def prequantization(chi_B, c1_pairing, n=2):
    """Circle bundle of Euler class u over a closed symplectic base B.

    chi_B is the Euler characteristic of B (of real dimension 2n - 2) and
    c1_pairing = <c_1(TB), u>.  Returns the closed-form value together with a
    Morse-Bott model (no Morse data) computing the same number.
    """
    if not isinstance(c1_pairing, int) or c1_pairing == 0:
        raise ValueError("c1_pairing must be a nonzero integer")
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")
    q = Fraction(chi_B, 2 * c1_pairing)
    value = MecValue(q, 0) if c1_pairing > 0 else MecValue(0, q)
    base = Stratum("B", 1, chi_B, 2 * n - 2, 1)
    S = MaximalOrbifold("S_1", 1, (2 * c1_pairing, 0), 2 * n - 2, (base,))
    return Prequantization(value, MBModel(n, (S,)))


def sphere_with_handles(n, ks, linearized=False):
    """Standard sphere (AF form) after subcritical surgeries of indices ks."""
    model = standard_sphere_af(n)
    for k in ks:
        model = af_surgery(model, k, linearized=linearized)
    return model


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    parameters: dict
    provenance: str
    builder: Callable = field(repr=False)

    def model(self, **params):
        args = {**self.parameters, **params}
        unknown = set(args) - set(self.parameters)
        if unknown:
            raise ValueError(f"{self.name} takes no parameter(s) {sorted(unknown)}")
        out = self.builder(**args)
        return out.model if isinstance(out, Prequantization) else out

    def closed_form(self, **params):
        if self.kind != "closed_form":
            return None
        return self.builder(**{**self.parameters, **params}).value


CATALOG = {
    e.name: e
    for e in (
        CatalogEntry(
            "standard_sphere", "mb", {"n": 2},
            "standard contact sphere, Morse-Bott orbit space CP^{n-1}",
            standard_sphere,
        ),
        CatalogEntry(
            "standard_sphere_af", "af", {"n": 2},
            "standard contact sphere, perturbed to principal orbit families",
            standard_sphere_af,
        ),
        CatalogEntry(
            "ustilovsky", "mb", {"n": 5, "p": 7},
            "Ustilovsky's Brieskorn spheres, orbifold with a Z_p stratum",
            ustilovsky,
        ),
        CatalogEntry(
            "prequantization", "closed_form", {"chi_B": 2, "c1_pairing": 2, "n": 2},
            "prequantization circle bundle over a closed symplectic base",
            prequantization,
        ),
        CatalogEntry(
            "sphere_with_handle", "af", {"n": 3, "k": 1},
            "standard sphere after one subcritical handle of index k",
            lambda n, k: sphere_with_handles(n, [k]),
        ),
    )
}


def _entry(name):
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {sorted(CATALOG)}") from None


def build(name, **params):
    return _entry(name).model(**params)


def emit(name, **params):
    """Manifest dictionary for a catalog entry."""
    from .manifest import fraction_to_json, model_to_dict

    entry = _entry(name)
    args = {**entry.parameters, **params}
    model = entry.model(**params)
    meta = {"catalog": name, "parameters": args, "provenance": entry.provenance}
    closed = entry.closed_form(**params)
    if closed is not None:
        meta["closed_form"] = {
            "chi_plus": fraction_to_json(closed.chi_plus),
            "chi_minus": fraction_to_json(closed.chi_minus),
        }
    return model_to_dict(model, meta)
