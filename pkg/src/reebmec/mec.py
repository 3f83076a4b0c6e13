"""
Mean Euler characteristic: closed formulas, the truncated-complex oracle
and subcritical surgery bookkeeping.

All arithmetic is exact (`fractions.Fraction`).
"""

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import (
    DimensionThreeError,
    ModelValidationError,
    NotSubcriticalError,
    UndefinedMecError,
)
from .orbit_model import (
    TYPE_I,
    TYPE_II,
    AFModel,
    PrincipalOrbitFamily,
    check_af,
    check_mb,
    e_invariant,
    enumerate_generators,
    low_degrees,
)

GENERATOR = "generator"
COROLLARY = "corollary"
MODES = (GENERATOR, COROLLARY)
L_MINUS = -2
DIM3_MESSAGE = (
    "in dimension 3 a subcritical handle introduces a contractible Reeb orbit of "
    "degree 1, so the cylindrical surgery formula does not apply; "
    "use the linearized flag to proceed"
)


@dataclass(frozen=True)
class MecValue:
    """(chi+, chi-, chi) with chi = (chi+ + chi-)/2; None marks undefined."""

    chi_plus: Optional[Fraction]
    chi_minus: Optional[Fraction]
    note: str = ""

    def __post_init__(self):
        for name in ("chi_plus", "chi_minus"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, Fraction(val))

    @property
    def defined(self):
        return self.chi_plus is not None and self.chi_minus is not None

    @property
    def chi(self):
        if not self.defined:
            return None
        return (self.chi_plus + self.chi_minus) / 2

    def __eq__(self, other):
        if not isinstance(other, MecValue):
            return NotImplemented
        return (self.chi_plus, self.chi_minus) == (other.chi_plus, other.chi_minus)

    def __hash__(self):
        return hash((self.chi_plus, self.chi_minus))


def mec_af(model, linearized=False):
    """chi+- = sum+- sigma/Delta (type I) + 1/2 sum+- sigma/Delta (type II).

    The formula needs the absence of orbits in degree -1, 0 and 1; the
    `linearized` flag lifts that requirement.
    """
    check_af(model)
    if not model.no_low_degree and not linearized:
        raise ModelValidationError(
            ["orbits of degree -1, 0 or 1 are present; pass linearized=True to proceed"]
        )
    plus = minus = Fraction(0)
    for fam in model.families:
        term = Fraction(fam.sigma) / fam.delta
        if fam.orbit_type == TYPE_II:
            term /= 2
        if fam.delta > 0:
            plus += term
        else:
            minus += term
    return MecValue(plus, minus)


def mec_mb(model):
    """chi+- = sum+- sigma(S) e(S) / Delta(S) over maximal orbifolds."""
    check_mb(model)
    plus = minus = Fraction(0)
    for S in model.maximal:
        if S.delta == 0:
            return MecValue(
                None, None, note=f"orbifold {S.label!r} has zero mean index; chi is undefined"
            )
        term = Fraction(S.sigma * e_invariant(S.strata)) / S.delta
        if S.delta > 0:
            plus += term
        else:
            minus += term
    return MecValue(plus, minus)


def mec(model, linearized=False):
    if isinstance(model, AFModel):
        return mec_af(model, linearized=linearized)
    return mec_mb(model)


# ---------------------------------------------------------------------------
# Truncated-complex oracle


def _signed_count(counts, lo, hi):
    return sum((-1) ** (d % 2) * c for d, c in counts.items() if lo <= d <= hi)


def truncated_euler(model, N, side="+", l_plus=None, l_minus=L_MINUS, counts=None):
    """Euler characteristic of the chain complex truncated at degree N.

    For side "+" this is sum_{l = l+}^{N} (-1)^l dim C_l with l+ = 2n - 4.
    For side "-" the window is [-N, l-] and the sum is negated, so that
    truncated_euler(model, N, "-") / N tends to chi-.
    `counts` may carry a precomputed enumerate_generators result.
    """
    if side == "+":
        lo = 2 * model.n - 4 if l_plus is None else l_plus
        if N < lo:
            return Fraction(0)
        if counts is None:
            counts = enumerate_generators(model, N, min_degree=lo)
        return Fraction(_signed_count(counts, lo, N))
    if side == "-":
        if -N > l_minus:
            return Fraction(0)
        if counts is None:
            counts = enumerate_generators(model, l_minus, min_degree=-N)
        return Fraction(-_signed_count(counts, -N, l_minus))
    raise ValueError(f"side must be '+' or '-', got {side!r}")


class OracleReport(NamedTuple):
    N: tuple
    estimates: tuple
    fitted_limit: Fraction
    max_dev: Fraction
    closed_form: Optional[Fraction]

    def deviations(self):
        """|estimate - closed form| * N for each truncation level."""
        if self.closed_form is None:
            return None
        return tuple(abs(e - self.closed_form) * n for e, n in zip(self.estimates, self.N))


def oracle_convergence(model, N_list, side="+", l_plus=None):
    """Estimates chi_N / N with a fit of the form L + c/N.

    The limit L is taken from the two largest N.  max_dev is the largest
    |chi_N / N - closed form| * N, the constant of the O(1/N) error.
    """
    N_list = [int(N) for N in N_list]
    if not N_list:
        raise ValueError("N_list is empty")
    if any(b <= a for a, b in zip(N_list, N_list[1:])) or N_list[0] <= 0:
        raise ValueError("N_list must be positive and strictly increasing")
    top = N_list[-1]
    if side == "+":
        lo = 2 * model.n - 4 if l_plus is None else l_plus
        counts = enumerate_generators(model, top, min_degree=min(lo, top))
    else:
        counts = enumerate_generators(model, L_MINUS, min_degree=-top)
    est = tuple(
        truncated_euler(model, N, side, l_plus=l_plus, counts=counts) / N for N in N_list
    )
    if len(N_list) == 1:
        limit = est[0]
    else:
        n1, n2 = N_list[-2], N_list[-1]
        limit = (n2 * est[-1] - n1 * est[-2]) / (n2 - n1)
    value = mec(model, linearized=True)
    closed = value.chi_plus if side == "+" else value.chi_minus
    max_dev = (
        max(abs(e - closed) * N for e, N in zip(est, N_list)) if closed is not None else None
    )
    return OracleReport(tuple(N_list), est, limit, max_dev, closed)


# ---------------------------------------------------------------------------
# Subcritical surgery


class LowDegreeWarning(UserWarning):
    """A handle introduces an orbit of degree -1, 0 or 1."""


def _check_subcritical(n, k):
    if not (isinstance(k, int) and 1 <= k < n):
        raise NotSubcriticalError(f"surgery index k={k} is not subcritical for n={n}")


def surgery_generators(n, k, r):
    """Degrees 2n - k - 4 + 2m, m >= 1, up to r, of the handle's orbits."""
    _check_subcritical(n, k)
    return list(range(2 * n - k - 2, r + 1, 2))


def handle_family(n, k, label=None):
    """Principal family created by a subcritical handle of index k.

    Type I, Delta = 2, sigma = (-1)^k and |x^m| = 2n - k - 4 + 2m.
    """
    _check_subcritical(n, k)
    fam = PrincipalOrbitFamily(
        label or f"handle(k={k})", TYPE_I, (-1) ** k, Fraction(2), (2, 2 * n - k - 4)
    )
    first = 2 * n - k - 2
    if first in (-1, 0, 1):
        warnings.warn(
            f"handle of index {k} in dimension {2 * n - 1} has an orbit of degree {first}",
            LowDegreeWarning,
            stacklevel=2,
        )
    return fam


def _fresh_label(model, base):
    taken = {f.label for f in model.families}
    label, j = base, 1
    while label in taken:
        j += 1
        label = f"{base}#{j}"
    return label


def af_surgery(model, k, linearized=False):
    """Model after attaching one subcritical handle of index k."""
    n = model.n
    _check_subcritical(n, k)
    if n == 2 and not linearized:
        raise DimensionThreeError(DIM3_MESSAGE)
    with warnings.catch_warnings():
        if linearized:
            warnings.simplefilter("ignore", LowDegreeWarning)
        fam = handle_family(n, k, _fresh_label(model, f"handle(k={k})"))
    quiet = model.no_low_degree and not low_degrees(fam)
    return model.with_family(fam, no_low_degree=quiet)


@dataclass(frozen=True)
class SurgeryStep:
    k: int
    n: int
    mode: str = GENERATOR
    linearized: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        _check_subcritical(self.n, self.k)
        if self.n == 2 and not self.linearized:
            raise DimensionThreeError(DIM3_MESSAGE)


def surgery_apply(v, step):
    """MEC after one surgery.

    generator mode: chi+ moves by (-1)^k / 2, the handle family's sigma/Delta.
    corollary mode: chi moves by (-1)^k / 2; since the handle family has
    positive mean index the whole shift is carried by chi+ (by (-1)^k).
    """
    if not v.defined:
        raise UndefinedMecError("surgery_apply needs a defined MEC value")
    sign = (-1) ** step.k
    if step.mode == GENERATOR:
        return MecValue(v.chi_plus + Fraction(sign, 2), v.chi_minus)
    return MecValue(v.chi_plus + sign, v.chi_minus)


class Reachability(NamedTuple):
    """Outcome of the half-integer lattice test.

    half_steps = (#even-index surgeries) - (#odd-index surgeries) needed;
    min_even / min_odd is the smallest split achieving it.
    """

    possible: bool
    shift: Fraction
    half_steps: Optional[int]
    min_even: Optional[int]
    min_odd: Optional[int]


def reachability_necessary(source, target, mode=GENERATOR):
    """Necessary condition for reaching `target` from `source` by surgeries.

    Each surgery moves the mode's coordinate (chi+ in generator mode, chi
    in corollary mode) by +-1/2, so the difference must lie in Z/2.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not (source.defined and target.defined):
        raise UndefinedMecError("reachability needs defined MEC values")
    if mode == GENERATOR:
        shift = target.chi_plus - source.chi_plus
    else:
        shift = target.chi - source.chi
    twice = 2 * shift
    if twice.denominator != 1:
        return Reachability(False, shift, None, None, None)
    h = int(twice)
    return Reachability(True, shift, h, max(h, 0), max(-h, 0))
