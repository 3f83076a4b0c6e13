"""
Declarative models of closed Reeb orbit data.

Two kinds of model are supported:

* asymptotically finite models (`AFModel`), a finite list of principal orbit
  families, each with a sign, a mean index and an affine degree rule;
* Morse-Bott models (`MBModel`), a list of maximal Reeb orbifolds, each with
  an affine Robbin-Salamon rule and a stratification by isotropy.

Everything here is exact: integers and `fractions.Fraction`.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Tuple

from .errors import IncompleteDataError, ModelValidationError

TYPE_I = "I"
TYPE_II = "II"


class AffineRule(NamedTuple):
    """k -> a*k + b."""

    a: Fraction
    b: Fraction

    def __call__(self, k):
        return self.a * k + self.b


def _rule(pair):
    if pair is None:
        return None
    a, b = pair
    return AffineRule(Fraction(a), Fraction(b))


def parity_sign(d):
    """(-1)^d as an int; also for negative d, where ** would give a float."""
    return -1 if int(d) % 2 else 1


def _is_int(q):
    return Fraction(q).denominator == 1


# ---------------------------------------------------------------------------
# Asymptotically finite models


@dataclass(frozen=True)
class PrincipalOrbitFamily:
    """A sequence of principal orbits gamma^k with |gamma^k| = a k + b.

    Type II families have good iterates at odd k only.
    """

    label: str
    orbit_type: str
    sigma: int
    delta: Fraction
    degree_rule: Optional[AffineRule] = None

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "degree_rule", _rule(self.degree_rule))

    def good_iterates(self, k_max):
        step = 2 if self.orbit_type == TYPE_II else 1
        return range(1, k_max + 1, step)


@dataclass(frozen=True)
class AFModel:
    n: int
    families: Tuple[PrincipalOrbitFamily, ...] = ()
    no_low_degree: bool = True

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))

    def with_family(self, family, no_low_degree=None):
        flag = self.no_low_degree if no_low_degree is None else no_low_degree
        return AFModel(self.n, self.families + (family,), flag)


def low_degrees(family, lo=-1, hi=1):
    """Good-iterate degrees of `family` that fall in [lo, hi]."""
    rule = family.degree_rule
    if rule is None or rule.a == 0:
        return []
    # a k + b in [lo, hi]  <=>  k between (lo - b)/a and (hi - b)/a
    ends = sorted(((lo - rule.b) / rule.a, (hi - rule.b) / rule.a))
    k0 = max(1, -((-ends[0].numerator) // ends[0].denominator))
    k1 = ends[1].numerator // ends[1].denominator
    out = []
    for k in range(k0, k1 + 1):
        if family.orbit_type == TYPE_II and k % 2 == 0:
            continue
        out.append(int(rule(k)))
    return out


def validate_af(model):
    """List every violated invariant of an asymptotically finite model."""
    v = []
    n = model.n
    if not isinstance(n, int) or n < 1:
        v.append(f"n must be a positive integer, got {n!r}")
        return v
    seen = set()
    for fam in model.families:
        tag = f"family {fam.label!r}"
        if fam.label in seen:
            v.append(f"{tag}: duplicate label")
        seen.add(fam.label)
        if fam.orbit_type not in (TYPE_I, TYPE_II):
            v.append(f"{tag}: orbit_type must be 'I' or 'II', got {fam.orbit_type!r}")
        if fam.sigma not in (1, -1):
            v.append(f"{tag}: sigma must be +1 or -1, got {fam.sigma!r}")
        if fam.delta == 0:
            v.append(f"{tag}: mean index delta must be nonzero")
        rule = fam.degree_rule
        if rule is None:
            continue
        if not (_is_int(rule.a) and _is_int(rule.b)):
            v.append(f"{tag}: degree rule ({rule.a}, {rule.b}) must be integral")
            continue
        if rule.a != fam.delta:
            v.append(f"{tag}: degree rule slope {rule.a} differs from delta {fam.delta}")
        if fam.orbit_type == TYPE_I and rule.a % 2:
            v.append(f"{tag}: odd slope {rule.a} makes the sign depend on the iterate")
        if fam.sigma in (1, -1) and parity_sign(rule.a + rule.b) != fam.sigma:
            v.append(
                f"{tag}: parity violation, sigma={fam.sigma:+d} but first degree "
                f"{rule.a + rule.b} has the other parity"
            )
        if not (-2 <= rule.b <= 2 * n - 4):
            v.append(
                f"{tag}: degree offset {rule.b} outside the window [-2, {2 * n - 4}]"
            )
        if model.no_low_degree:
            bad = low_degrees(fam)
            if bad:
                v.append(
                    f"{tag}: no_low_degree is asserted but the family has degree {bad[0]}"
                )
    return v


def check_af(model):
    v = validate_af(model)
    if v:
        raise ModelValidationError(v)
    return model


# ---------------------------------------------------------------------------
# Morse-Bott models


@dataclass(frozen=True)
class Stratum:
    label: str
    cover_multiple: int
    euler_underlying: int
    dim: int
    stab_order: int
    morse_indices: Optional[Tuple[int, ...]] = None
    children: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.morse_indices is not None:
            object.__setattr__(self, "morse_indices", tuple(sorted(self.morse_indices)))
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class MaximalOrbifold:
    label: str
    sigma: int
    mu_rs_rule: AffineRule
    dim: int
    strata: Tuple[Stratum, ...]

    def __post_init__(self):
        object.__setattr__(self, "mu_rs_rule", _rule(self.mu_rs_rule))
        object.__setattr__(self, "strata", tuple(self.strata))

    @property
    def delta(self):
        """Mean index of the orbifold, the slope of the mu_RS rule."""
        return self.mu_rs_rule.a


@dataclass(frozen=True)
class MBModel:
    n: int
    maximal: Tuple[MaximalOrbifold, ...] = ()
    good_only: bool = True

    def __post_init__(self):
        object.__setattr__(self, "maximal", tuple(self.maximal))


def orbifold_degree(S, k, n):
    """|S_{kT}| = mu_RS(S_{kT}) - dim/2 + n - 3."""
    if k < 1:
        raise ValueError("iterate k must be a positive integer")
    d = S.mu_rs_rule(k) - Fraction(S.dim, 2) + n - 3
    if not _is_int(d):
        raise ModelValidationError([f"orbifold {S.label!r}: non-integral degree {d}"])
    return int(d)


def orbifold_sign(S, n, k_max=50):
    """(-1)^{|S_T|}; raises for bad orbifolds whose parity varies with k."""
    s = parity_sign(orbifold_degree(S, 1, n))
    for k in range(2, k_max + 1):
        if parity_sign(orbifold_degree(S, k, n)) != s:
            raise ModelValidationError(
                [f"orbifold {S.label!r} is bad: degree parity changes at k={k}"]
            )
    return s


def _by_label(strata):
    table = {}
    for s in strata:
        table.setdefault(s.label, s)
    return table


def _topo_order(strata):
    """Labels ordered children-first; raises ValueError on a cycle."""
    table = _by_label(strata)
    order, state = [], {}

    def visit(label, trail):
        mark = state.get(label)
        if mark == 2:
            return
        if mark == 1:
            raise ValueError("cycle in stratification: " + " -> ".join(trail + [label]))
        state[label] = 1
        for c in table[label].children:
            if c in table:
                visit(c, trail + [label])
        state[label] = 2
        order.append(label)

    for s in strata:
        visit(s.label, [])
    return order


def descendants(strata):
    """label -> frozenset of all labels strictly below it."""
    table = _by_label(strata)
    below = {}
    for label in _topo_order(strata):
        acc = set()
        for c in table[label].children:
            if c in table:
                acc.add(c)
                acc |= below[c]
        below[label] = frozenset(acc)
    return below


def chi_hat(strata):
    """Inclusion-exclusion Euler numbers of strata.

    CHI(X) = chi(X) - sum of CHI(Y) over every stratum Y strictly below X,
    so that chi of the closure of X is the sum of CHI over it.
    """
    table = _by_label(strata)
    below = descendants(strata)
    out = {}
    for label in _topo_order(strata):
        out[label] = table[label].euler_underlying - sum(out[y] for y in below[label])
    return out


def simple_cells(strata):
    """Morse indices of critical points lying in each stratum proper.

    The multiset of a stratum's own cells is its Morse multiset minus the
    cells of every stratum below it.  Needs morse_indices on every stratum.
    """
    table = _by_label(strata)
    if any(s.morse_indices is None for s in strata):
        raise IncompleteDataError("morse_indices missing on some stratum")
    below = descendants(strata)
    out = {}
    for label in _topo_order(strata):
        own = Counter(table[label].morse_indices)
        for y in below[label]:
            own.subtract(out[y])
        if any(c < 0 for c in own.values()):
            raise ModelValidationError(
                [f"stratum {label!r}: Morse data does not contain its substrata's cells"]
            )
        out[label] = +own
    return out


def e_invariant(strata):
    """sum over strata of CHI(X) |Stab(X)|.

    When every stratum carries Morse data the cell sum
    sum over cells of (-1)^ind |Stab| is computed too and must agree.
    """
    table = _by_label(strata)
    chi = chi_hat(strata)
    e = sum(chi[x] * table[x].stab_order for x in chi)
    if strata and all(s.morse_indices is not None for s in strata):
        e_cells = e_invariant_cells(strata)
        if e_cells != e:
            raise ModelValidationError(
                [f"orbifold Euler numbers disagree: strata sum {e}, cell sum {e_cells}"]
            )
    return e


def e_invariant_cells(strata):
    table = _by_label(strata)
    cells = simple_cells(strata)
    return sum(
        table[x].stab_order * sum((-1) ** ind * c for ind, c in cells[x].items())
        for x in cells
    )


def _validate_strata(S, tag):
    v = []
    labels = [s.label for s in S.strata]
    if not S.strata:
        return [f"{tag}: no strata"]
    if len(set(labels)) != len(labels):
        v.append(f"{tag}: duplicate stratum labels")
    known = set(labels)
    for s in S.strata:
        st = f"{tag} stratum {s.label!r}"
        for c in s.children:
            if c not in known:
                v.append(f"{st}: unknown child {c!r}")
        if s.cover_multiple < 1:
            v.append(f"{st}: cover_multiple must be positive")
        if s.stab_order < 1:
            v.append(f"{st}: stab_order must be positive")
        if s.dim < 0 or s.dim % 2 or s.dim > S.dim:
            v.append(f"{st}: dim {s.dim} must be even and within [0, {S.dim}]")
        if s.morse_indices is not None:
            if any(i < 0 or i > s.dim for i in s.morse_indices):
                v.append(f"{st}: Morse index outside [0, {s.dim}]")
            alt = sum((-1) ** i for i in s.morse_indices)
            if alt != s.euler_underlying:
                v.append(
                    f"{st}: Morse multiset has alternating sum {alt}, "
                    f"expected euler_underlying {s.euler_underlying}"
                )
    if v:
        return v
    try:
        below = descendants(S.strata)
    except ValueError as exc:
        return [f"{tag}: {exc}"]
    covered = set().union(*below.values())
    roots = [x for x in labels if x not in covered]
    if len(roots) != 1:
        v.append(f"{tag}: expected one top stratum, found {roots}")
    else:
        top = _by_label(S.strata)[roots[0]]
        if top.dim != S.dim:
            v.append(f"{tag}: top stratum dim {top.dim} differs from orbifold dim {S.dim}")
    if all(s.morse_indices is not None for s in S.strata):
        try:
            simple_cells(S.strata)
        except ModelValidationError as exc:
            v.extend(f"{tag}: {m}" for m in exc.violations)
    return v


def validate_mb(model):
    """List every violated invariant of a Morse-Bott model."""
    v = []
    n = model.n
    if not isinstance(n, int) or n < 1:
        return [f"n must be a positive integer, got {n!r}"]
    if not model.good_only:
        v.append("good_only is false: bad Reeb orbifolds are not supported")
    seen = set()
    for S in model.maximal:
        tag = f"orbifold {S.label!r}"
        if S.label in seen:
            v.append(f"{tag}: duplicate label")
        seen.add(S.label)
        if S.sigma not in (1, -1):
            v.append(f"{tag}: sigma must be +1 or -1")
        if S.dim < 0 or S.dim % 2 or S.dim > 2 * n - 2:
            v.append(f"{tag}: dim {S.dim} must be even and within [0, {2 * n - 2}]")
        rule = S.mu_rs_rule
        if not (_is_int(2 * rule.a) and _is_int(2 * rule.b)):
            v.append(f"{tag}: mu_RS rule ({rule.a}, {rule.b}) must be half-integral")
        elif not _is_int(rule(1) - Fraction(S.dim, 2)):
            v.append(f"{tag}: mu_RS(S_T) - dim/2 = {rule(1) - Fraction(S.dim, 2)} is not an integer")
        elif not _is_int(rule.a) or rule.a % 2:
            v.append(f"{tag}: bad orbifold, degree parity alternates (slope {rule.a})")
        elif S.sigma in (1, -1) and parity_sign(orbifold_degree(S, 1, n)) != S.sigma:
            v.append(f"{tag}: sigma {S.sigma:+d} disagrees with degree {orbifold_degree(S, 1, n)}")
        v.extend(_validate_strata(S, tag))
    return v


def check_mb(model):
    v = validate_mb(model)
    if v:
        raise ModelValidationError(v)
    return model


def validate(model):
    return validate_af(model) if isinstance(model, AFModel) else validate_mb(model)


# ---------------------------------------------------------------------------
# Generators


def _degree_range(rule, step, lo, hi, k_first=1):
    """Degrees a k + b for k = k_first, k_first + step, ... inside [lo, hi]."""
    a, b = int(rule.a), int(rule.b)
    if a == 0:
        raise IncompleteDataError("a zero-slope rule has infinitely many generators")
    first = a * k_first + b
    stride = a * step
    if a > 0:
        if first > hi:
            return range(0)
        start = first if first >= lo else first + stride * -(-(lo - first) // stride)
        return range(start, hi + 1, stride)
    if first < lo:
        return range(0)
    start = first if first <= hi else first + stride * -((first - hi) // stride)
    return range(start, lo - 1, stride)


def _mb_generator_rules(model):
    """Affine degree rules of the generators of a perturbed MB model.

    Yields (label, rule, delta, sigma) per critical point, with the rule
    k -> mu_RS(S_{kT}) - dim/2 + ind + n - 3.
    """
    n = model.n
    for S in model.maximal:
        for s in S.strata:
            if s.morse_indices is None:
                raise IncompleteDataError(
                    f"orbifold {S.label!r} stratum {s.label!r} has no Morse data"
                )
            if s.stab_order != 1:
                raise IncompleteDataError(
                    f"orbifold {S.label!r} stratum {s.label!r} has nontrivial isotropy; "
                    "index data of its covers is not part of the model"
                )
        # with trivial isotropy every point has the maximal period T, so the
        # k-th iterate of each critical point sits on S_{kT}
        cells = simple_cells(S.strata)
        for label in sorted(cells):
            for ind, count in sorted(cells[label].items()):
                a = S.mu_rs_rule.a
                b = S.mu_rs_rule.b - Fraction(S.dim, 2) + ind + n - 3
                for j in range(count):
                    yield f"{S.label}/{label}/{ind}#{j}", AffineRule(a, b), a, S.sigma


def enumerate_generators(model, max_degree, min_degree=None):
    """Counter degree -> number of good generators with degree in the window.

    The window is [min_degree, max_degree]; min_degree defaults to
    -|max_degree|.
    """
    if min_degree is None:
        min_degree = -abs(max_degree)
    out = Counter()
    if min_degree > max_degree:
        return out
    if isinstance(model, AFModel):
        for fam in model.families:
            if fam.degree_rule is None:
                raise IncompleteDataError(f"family {fam.label!r} has no degree rule")
            step = 2 if fam.orbit_type == TYPE_II else 1
            out.update(_degree_range(fam.degree_rule, step, min_degree, max_degree))
    else:
        for _, rule, _, _ in _mb_generator_rules(model):
            out.update(_degree_range(rule, 1, min_degree, max_degree))
    return out


def af_companion(model):
    """Asymptotically finite model with one family per critical point.

    Only available when enumerate_generators is, i.e. for complete data.
    """
    fams = []
    for label, rule, delta, _ in _mb_generator_rules(model):
        first = int(rule(1))
        fams.append(PrincipalOrbitFamily(label, TYPE_I, parity_sign(first), delta, rule))
    quiet = not any(low_degrees(f) for f in fams)
    return AFModel(model.n, tuple(fams), no_low_degree=quiet)
