"""
Indices of symplectic paths: Conley-Zehnder, Robbin-Salamon, mean, unitary,
the Dupont / Guichardet-Wigner quasimorphism, contact-homology grading and a
fitter for linear lower bounds of the form index >= kappa1 * action + kappa2.

All indices are computed in the standard unitary frame of R^{2n}.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DegenerateEndpointError, ReebMecError
from .symplin import (
    EPS_SYM,
    EPS_THETA,
    SympPath,
    block_rotation,
    catenate,
    complex_part,
    half_dim,
    iterate_path,
    lift_angle,
    polar_decompose,
    standard_J,
)

EPS_ND = 1e-8
KAPPA1_CAP = 1e6
DEFAULT_K_MAX = 64

# eigenvalue classification tolerance for the rotation function
EIG_TOL = 1e-7
# crossing detection tolerance for analytic block paths, in units of turns
CROSSING_TOL = 1e-9


class MeanIndex(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class WipCertificate:
    """index >= kappa1 * action + kappa2 on every supplied sample."""

    kappa1: float
    kappa2: float
    witness_margin: float


# ---------------------------------------------------------------------------
# Unitary-type indices


def unitary_index(path):
    """theta(T) / pi for the unitary-part angle lift of `path`."""
    return lift_angle(path).final / math.pi


def _principal_angles(W):
    phi = np.angle(np.linalg.eigvals(W))
    # np.angle returns [-pi, pi]; the branch used here is (-pi, pi]
    phi[phi <= -math.pi] = math.pi
    return phi


def dgw_index(A):
    """Sum of principal eigen-angles of the unitary part of A, over pi.

    The branch (-pi, pi] is a convention; only defect-type statements about
    this function are branch independent.
    """
    U = polar_decompose(A).U
    return float(np.sum(_principal_angles(complex_part(U)))) / math.pi


def catenation_defect(path1, path2):
    """|mu(path1 * path2) - mu(path1) - mu(path2)| for the unitary index."""
    whole = unitary_index(catenate(path1, path2))
    return abs(whole - unitary_index(path1) - unitary_index(path2))


def degree(mu_cz, n):
    """Contact-homology grading of an orbit with Conley-Zehnder index mu_cz."""
    return mu_cz + n - 3


# ---------------------------------------------------------------------------
# Conley-Zehnder index


def conley_zehnder_rot(rates, T):
    """Closed form for t -> (+)_j R(w_j t) on [0, T].

    Each positive rate contributes 2 floor(w T / 2 pi) + 1, each negative
    rate the negative of the contribution of |w|.
    """
    total = 0
    for w in np.atleast_1d(np.asarray(rates, dtype=float)):
        turns = abs(w) * T / (2 * math.pi)
        if abs(turns - round(turns)) < CROSSING_TOL:
            raise DegenerateEndpointError(
                f"rate {w} has w*T in 2*pi*Z; use rs (robbin_salamon)"
            )
        total += int(np.sign(w)) * (2 * math.floor(turns) + 1)
    return total


def _krein_clusters(A, tol=EIG_TOL):
    """Eigen-data of A split into the pieces the rotation function needs.

    Returns (neg_real_count, elliptic) where elliptic is a list of
    (lambda, m_plus) over clusters of unit-modulus non-real eigenvalues and
    m_plus is the number of positive directions of the Krein form
    -i v^H J0 v on the cluster's eigenvectors.
    """
    n = half_dim(A)
    J = standard_J(n)
    w, V = np.linalg.eig(A)
    neg = 0
    ell = []
    for i, lam in enumerate(w):
        if abs(lam.imag) <= tol * max(1.0, abs(lam)):
            if lam.real < 0:
                neg += 1
            continue
        if abs(abs(lam) - 1.0) <= tol:
            ell.append(i)
    clusters = []
    used = set()
    for i in ell:
        if i in used:
            continue
        members = [j for j in ell if j not in used and abs(w[j] - w[i]) <= 1e3 * tol]
        used.update(members)
        Vc = V[:, members]
        H = -1j * (Vc.conj().T @ J @ Vc)
        H = 0.5 * (H + H.conj().T)
        h = np.linalg.eigvalsh(H)
        m_plus = int(np.sum(h > 0))
        if m_plus == len(members):
            # definite cluster: keep the individual eigenvalues
            clusters.extend((w[j] / abs(w[j]), 1) for j in members)
        elif m_plus:
            lam = np.mean(w[members])
            clusters.append((lam / abs(lam), m_plus))
    return neg, clusters


def rotation_function(A):
    """Continuous map Sp(2n) -> S^1 equal to det_C on unitary matrices.

    rho(A) = (-1)^{m0/2} * prod of the Krein-positive elliptic eigenvalues,
    where m0 counts negative real eigenvalues with multiplicity.
    """
    neg, clusters = _krein_clusters(A)
    rho = (-1.0) ** (neg // 2) + 0j
    for lam, m_plus in clusters:
        rho *= lam**m_plus
    return rho / abs(rho)


def _fiber_correction(A, max_depth=24):
    """Lift of arg rho(P^s U) - arg det_C(U) along s in [0, 1].

    This is the difference between the rotation-function angle and the
    unitary-part angle at A, normalised to vanish on unitary matrices.
    """
    parts = polar_decompose(A, check=False)
    p, Q = np.linalg.eigh(parts.P)
    if np.max(np.abs(p - 1.0)) < 1e-14:
        return 0.0
    logp = np.log(p)

    def f(s):
        Ps = (Q * np.exp(s * logp)) @ Q.T
        return rotation_function(Ps @ parts.U)

    def lift(a, fa, b, fb, depth):
        step = np.angle(fb / fa)
        if abs(step) <= math.pi / 8:
            return step
        if depth >= max_depth:
            raise ReebMecError("rotation function is discontinuous along the polar fiber")
        mid = 0.5 * (a + b)
        fm = f(mid)
        return lift(a, fa, mid, fm, depth + 1) + lift(mid, fm, b, fb, depth + 1)

    grid = np.linspace(0.0, 1.0, 9)
    vals = [f(s) for s in grid]
    return float(
        sum(lift(grid[i], vals[i], grid[i + 1], vals[i + 1], 0) for i in range(8))
    )


def continuation_increment(A):
    """theta-increment of an eigenvalue-monotone continuation of A to W+-.

    The continuation moves every Krein-positive elliptic eigenvalue
    e^{i phi}, phi in (0, 2 pi), monotonically to -1 and leaves the other
    eigenvalues off the unit circle, so it stays inside the component of A in
    the non-degenerate set.
    """
    _, clusters = _krein_clusters(A)
    swing = 0.0
    for lam, m_plus in clusters:
        phi = float(np.angle(lam)) % (2 * math.pi)
        swing += m_plus * (math.pi - phi)
    return swing + _fiber_correction(A)


def conley_zehnder(path):
    """Conley-Zehnder index of a non-degenerate sampled path.

    Lifts theta along the path, adds the theta-increment of the continuation
    of Psi(T) to its normal form and divides by pi.
    """
    A = path.endpoint
    nd = abs(np.linalg.det(A - np.eye(A.shape[-1])))
    if nd < EPS_ND:
        raise DegenerateEndpointError(
            f"|det(Psi(T) - I)| = {nd:.2e} is below {EPS_ND:g}; use rs (robbin_salamon)"
        )
    total = lift_angle(path).final + continuation_increment(A)
    value = total / math.pi
    k = round(value)
    # the exact value is an integer; a wrong integer would need an error of 1/2
    if abs(value - k) > 1e-3:
        raise ReebMecError(f"non-integral Conley-Zehnder value {value!r}")
    return int(k)


# ---------------------------------------------------------------------------
# Robbin-Salamon index on analytic block paths


def _plane_sum(blocks):
    """Assemble 2x2 blocks acting on the (x_j, y_j) planes."""
    n = len(blocks)
    M = np.zeros((2 * n, 2 * n))
    for j, B in enumerate(blocks):
        M[j, j], M[j, n + j] = B[0, 0], B[0, 1]
        M[n + j, j], M[n + j, n + j] = B[1, 0], B[1, 1]
    return M


@dataclass(frozen=True)
class BlockPath:
    """Analytic path t -> (+) R(w_j t) (+) diag(e^{l_j t}, e^{-l_j t}) on [0, T].

    Rotation planes come first, then stretch planes.
    """

    rates: tuple = ()
    stretches: tuple = ()
    T: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(w) for w in self.rates))
        object.__setattr__(self, "stretches", tuple(float(s) for s in self.stretches))
        if not self.rates and not self.stretches:
            raise ValueError("a block path needs at least one plane")
        if self.T <= 0:
            raise ValueError("T must be positive")

    @property
    def n(self):
        return len(self.rates) + len(self.stretches)

    def at(self, t):
        blocks = [block_rotation([w * t]) for w in self.rates]
        blocks += [np.diag([math.exp(s * t), math.exp(-s * t)]) for s in self.stretches]
        return _plane_sum(blocks)

    def sample(self, m=None):
        if m is None:
            rates = np.abs(np.asarray(self.rates + (0.0,)))
            worst = max(rates.max(), 0.5 * rates.sum())
            m = max(8, int(math.floor(4 * worst * self.T / math.pi)) + 1)
        times = np.linspace(0.0, self.T, m + 1)
        return SympPath(times, np.array([self.at(t) for t in times]), validate=False)


def robbin_salamon(path):
    """Robbin-Salamon index of an analytic block path, as a Fraction.

    Sums 1/2 sign(Gamma_0) + sum of interior sign(Gamma_t) + 1/2 sign(Gamma_T)
    over the crossings of each plane.  A rotation by w has crossing form w*I
    at t in (2 pi / |w|) Z, so every crossing has signature 2 sign(w).  A
    stretch crosses only at t = 0 with signature 0.  Planes with zero rate
    are constant and contribute nothing.
    """
    if not isinstance(path, BlockPath):
        raise TypeError("robbin_salamon needs an analytic BlockPath descriptor")
    total = Fraction(0)
    for w in path.rates:
        if w == 0.0:
            continue
        turns = abs(w) * path.T / (2 * math.pi)
        q = round(turns)
        hits_end = abs(turns - q) < CROSSING_TOL
        interior = q - 1 if hits_end else math.floor(turns)
        sig = 2 * int(np.sign(w))
        total += Fraction(sig, 2) + sig * interior + (Fraction(sig, 2) if hits_end else 0)
    return total


# ---------------------------------------------------------------------------
# Mean index


def is_loop(path, tol=EPS_SYM):
    return float(np.max(np.abs(path.endpoint - np.eye(2 * path.n)))) <= tol


def mean_index(path, k_max=DEFAULT_K_MAX):
    """Mean index from the growth of theta along iterates of `path`.

    For a loop (Psi(T) = I) theta(T) / pi is an integer and is returned
    exactly.  Otherwise theta(kT) / pi is fitted linearly in k = 1..k_max
    and the slope is returned with the largest fit residual as error bar.
    """
    if is_loop(path):
        value = lift_angle(path).final / math.pi
        k = round(value)
        if abs(value - k) > EPS_THETA:
            raise ReebMecError(f"loop with non-integral angle {value!r}")
        return MeanIndex(int(k), 0.0)
    if k_max < 2:
        raise ValueError("k_max must be at least 2 for a non-loop")
    m = len(path) - 1
    theta = lift_angle(iterate_path(path, k_max)).theta
    k = np.arange(1, k_max + 1)
    y = theta[k * m] / math.pi
    slope, intercept = np.polyfit(k, y, 1)
    resid = float(np.max(np.abs(y - (slope * k + intercept))))
    return MeanIndex(float(slope), resid)


# ---------------------------------------------------------------------------
# Weak index-positivity certificates


def wip_fit(samples, kappa1_cap=KAPPA1_CAP):
    """Tight linear lower bound index >= kappa1 * action + kappa2.

    The supporting line passes through the sample of largest action (lowest
    index among ties) and takes the smallest slope that keeps every other
    sample on or above it, i.e. the last edge of the lower convex hull.
    Returns None when that slope is not positive.  When all actions
    coincide the slope is unbounded and `kappa1_cap` is used.
    """
    pts = [(float(a), float(mu)) for a, mu in samples]
    if not pts:
        raise ValueError("wip_fit needs at least one sample")
    if any(a <= 0 for a, _ in pts):
        raise ValueError("actions must be positive")
    a_last = max(a for a, _ in pts)
    mu_last = min(mu for a, mu in pts if a == a_last)
    slopes = [(mu_last - mu) / (a_last - a) for a, mu in pts if a < a_last]
    kappa1 = max(slopes) if slopes else math.inf
    if kappa1 <= 0:
        return None
    kappa1 = min(kappa1, kappa1_cap)
    resid = [mu - kappa1 * a for a, mu in pts]
    kappa2 = min(resid)
    scale = max(1.0, max(abs(r) for r in resid))
    off_line = [r - kappa2 for r in resid if r - kappa2 > 1e-12 * scale]
    return WipCertificate(kappa1, kappa2, min(off_line) if off_line else 0.0)
