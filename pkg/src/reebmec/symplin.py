"""
Symplectic linear algebra on R^{2n} with coordinates (x_1..x_n, y_1..y_n).

The standard structure is J0 = [[0, -I], [I, 0]].  A unitary (orthogonal and
symplectic) matrix has the block form [[X, -Y], [Y, X]] and corresponds to the
complex matrix X + iY.  Sampled paths of symplectic matrices are immutable
value objects; every operation returns a new path.
"""

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotSymplecticError,
    PolarConvergenceError,
    SamplingDensityError,
)

EPS_SYM = 1e-9
EPS_THETA = 1e-7

POLAR_MAX_ITER = 30
POLAR_TOL = 1e-12

# |dtheta| between consecutive samples must stay below this
GUARD = math.pi / 2


def standard_J(n):
    """Return the 2n x 2n standard complex structure [[0, -I], [I, 0]]."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def half_dim(A):
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2] or A.shape[-1] % 2:
        raise DimensionMismatchError(f"expected a 2n x 2n matrix, got shape {A.shape}")
    return A.shape[-1] // 2


def symplectic_residual(A):
    """max-norm of A^T J0 A - J0."""
    A = np.asarray(A, dtype=float)
    J = standard_J(half_dim(A))
    return float(np.max(np.abs(A.T @ J @ A - J)))


def is_symplectic(A, tol=EPS_SYM):
    if tol <= 0:
        raise ValueError("tol must be positive")
    return symplectic_residual(A) <= tol


def _check_symplectic(A, tol=EPS_SYM):
    # relative to ||A||^2 so that large but valid matrices pass
    A = np.asarray(A, dtype=float)
    scale = max(1.0, float(np.max(np.abs(A))) ** 2)
    res = symplectic_residual(A)
    if res > tol * scale:
        raise NotSymplecticError(f"matrix is not symplectic (residual {res:.3e})")


# ---------------------------------------------------------------------------
# Elementary generators


def block_rotation(angles):
    """Direct sum of planar rotations R(phi_j) acting on the (x_j, y_j) planes.

    A stack of angle vectors with shape (..., n) gives a stack of matrices.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    n = angles.shape[-1]
    out = np.zeros(angles.shape[:-1] + (2 * n, 2 * n))
    i = np.arange(n)
    c, s = np.cos(angles), np.sin(angles)
    out[..., i, i] = c
    out[..., i, n + i] = -s
    out[..., n + i, i] = s
    out[..., n + i, n + i] = c
    return out


def block_stretch(logs):
    """diag(e^{l_j}) on x and diag(e^{-l_j}) on y."""
    logs = np.atleast_1d(np.asarray(logs, dtype=float))
    n = len(logs)
    z = np.zeros((n, n))
    return np.block([[np.diag(np.exp(logs)), z], [z, np.diag(np.exp(-logs))]])


def shear(S):
    """[[I, S], [0, I]] for a symmetric S."""
    S = np.asarray(S, dtype=float)
    S = 0.5 * (S + S.T)
    n = S.shape[0]
    return np.block([[np.eye(n), S], [np.zeros((n, n)), np.eye(n)]])


def linear_lift(M):
    """Embed M in GL(n) as diag(M, M^{-T})."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    z = np.zeros((n, n))
    return np.block([[M, z], [z, np.linalg.inv(M).T]])


def unitary_from_complex(W):
    """Real 2n x 2n form of a complex n x n unitary matrix."""
    W = np.asarray(W, dtype=complex)
    X, Y = W.real, W.imag
    return np.block([[X, -Y], [Y, X]])


def complex_part(U):
    """X + iY for U = [[X, -Y], [Y, X]] (no unitarity check)."""
    n = half_dim(U)
    U = np.asarray(U)
    return U[..., :n, :n] + 1j * U[..., n:, :n]


def random_symplectic(rng, n, scale=1.0, factors=3):
    """Product of random shears, block rotations and stretches.

    `scale` bounds the shear entries and stretch logarithms; keep it O(1) so
    that the condition number stays moderate.
    """
    A = np.eye(2 * n)
    for _ in range(factors):
        S = rng.uniform(-scale, scale, size=(n, n))
        A = shear(S) @ A
        A = block_rotation(rng.uniform(-np.pi, np.pi, size=n)) @ A
        A = block_stretch(rng.uniform(-scale, scale, size=n)) @ A
        A = shear(S.T).T @ A
    return A


# ---------------------------------------------------------------------------
# Polar decomposition


class PolarParts(NamedTuple):
    """A = P @ U with P symmetric positive definite and U unitary."""

    P: np.ndarray
    U: np.ndarray


def unitary_factor(As, max_iter=POLAR_MAX_ITER, tol=POLAR_TOL):
    """Orthogonal polar factor of a stack of matrices by Newton iteration.

    Iterates X <- (g X + X^{-T} / g) / 2 with Frobenius-norm scaling g while
    far from convergence.  Matrices that are already orthogonal are returned
    untouched.
    """
    X = np.array(As, dtype=float)
    single = X.ndim == 2
    if single:
        X = X[None]
    eye = np.eye(X.shape[-1])
    ortho = np.max(np.abs(np.swapaxes(X, -1, -2) @ X - eye), axis=(-2, -1))
    active = ortho > tol
    for _ in range(max_iter):
        if not active.any():
            break
        Y = X[active]
        YinvT = np.swapaxes(np.linalg.inv(Y), -1, -2)
        fro = np.linalg.norm(Y, axis=(-2, -1))
        fro_inv = np.linalg.norm(YinvT, axis=(-2, -1))
        g = np.sqrt(fro_inv / fro)[:, None, None]
        Ynew = 0.5 * (g * Y + YinvT / g)
        step = np.linalg.norm(Ynew - Y, axis=(-2, -1)) / np.linalg.norm(Ynew, axis=(-2, -1))
        # scaling only helps far from the fixed point
        near = step < 1e-2
        if near.any():
            plain = 0.5 * (Y[near] + YinvT[near])
            Ynew[near] = plain
            step[near] = np.linalg.norm(plain - Y[near], axis=(-2, -1)) / np.linalg.norm(
                plain, axis=(-2, -1)
            )
        X[active] = Ynew
        idx = np.flatnonzero(active)
        active[idx[step <= tol]] = False
    else:
        if active.any():
            raise PolarConvergenceError(
                f"polar iteration did not converge in {max_iter} steps"
            )
    return X[0] if single else X


def polar_decompose(A, check=True):
    """Polar decomposition A = P U of a symplectic matrix.

    Parameters
    ----------
    A : array_like, shape (2n, 2n)
    check : bool
        Verify that A is symplectic before decomposing.

    Returns
    -------
    PolarParts
        P is symmetric positive definite, U is orthogonal and symplectic.
    """
    A = np.asarray(A, dtype=float)
    half_dim(A)
    if check:
        _check_symplectic(A)
    U = unitary_factor(A)
    P = A @ U.T
    P = 0.5 * (P + P.T)
    if np.min(np.linalg.eigvalsh(P)) <= 0:
        raise PolarConvergenceError("symmetric factor is not positive definite")
    return PolarParts(P=P, U=U)


def det_complex(U):
    """Complex determinant det(X + iY) of a unitary matrix or stack of them."""
    return np.linalg.det(complex_part(U))


def det_complex_sq(U, tol=EPS_SYM):
    """Squared complex determinant of an orthogonal-symplectic matrix."""
    U = np.asarray(U, dtype=float)
    n = half_dim(U)
    X, Y = U[:n, :n], U[n:, :n]
    block_err = max(
        float(np.max(np.abs(U[n:, n:] - X))), float(np.max(np.abs(U[:n, n:] + Y)))
    )
    ortho_err = float(np.max(np.abs(U.T @ U - np.eye(2 * n))))
    if max(block_err, ortho_err) > tol:
        raise NotSymplecticError("matrix is not unitary (orthogonal and symplectic)")
    return complex(np.linalg.det(X + 1j * Y) ** 2)


# ---------------------------------------------------------------------------
# Paths


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SympPath:
    """Sampled path t -> Psi(t) in Sp(2n) with Psi(0) = I.

    `times` has shape (m+1,), `matrices` has shape (m+1, 2n, 2n).  Both arrays
    are read-only.
    """

    times: np.ndarray
    matrices: np.ndarray

    def __init__(self, times, matrices, validate=True):
        times = _readonly(times)
        matrices = _readonly(matrices)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "matrices", matrices)
        if validate:
            self._validate()

    def _validate(self):
        t, A = self.times, self.matrices
        if t.ndim != 1 or len(t) < 1:
            raise ValueError("a path needs at least one sample")
        if A.ndim != 3 or A.shape[0] != len(t):
            raise DimensionMismatchError("times and matrices disagree in length")
        half_dim(A[0])
        if t[0] != 0.0:
            raise ValueError("path must start at t = 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if np.max(np.abs(A[0] - np.eye(A.shape[-1]))) > EPS_SYM:
            raise ValueError("path must start at the identity")
        for M in A:
            _check_symplectic(M)

    @classmethod
    def from_samples(cls, samples):
        """Build from an iterable of (t, A) pairs."""
        samples = list(samples)
        return cls([s[0] for s in samples], [s[1] for s in samples])

    @classmethod
    def constant(cls, n, T=1.0):
        eye = np.eye(2 * n)
        return cls([0.0, T], [eye, eye])

    @property
    def n(self):
        return self.matrices.shape[-1] // 2

    @property
    def T(self):
        return float(self.times[-1])

    @property
    def endpoint(self):
        return self.matrices[-1]

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.matrices))

    def to_json(self):
        return json.dumps(
            [{"t": float(t), "A": A.ravel().tolist()} for t, A in self], indent=None
        )

    @classmethod
    def from_json(cls, text):
        records = json.loads(text)
        if not isinstance(records, list) or not records:
            raise ValueError("path JSON must be a non-empty array of records")
        times, mats = [], []
        for i, rec in enumerate(records):
            if set(rec) != {"t", "A"}:
                raise ValueError(f"record {i}: expected keys 't' and 'A'")
            entries = np.asarray(rec["A"], dtype=float)
            dim = math.isqrt(entries.size)
            if dim * dim != entries.size or dim % 2:
                raise DimensionMismatchError(
                    f"record {i}: {entries.size} entries is not 4n^2"
                )
            times.append(float(rec["t"]))
            mats.append(entries.reshape(dim, dim))
        if len({m.shape for m in mats}) != 1:
            raise DimensionMismatchError("records have different dimensions")
        return cls(times, mats)


@dataclass(frozen=True, eq=False)
class AngleTrack:
    """Continuous lift theta(t) with det_C(U(t))^2 = exp(2 i theta(t))."""

    times: np.ndarray
    theta: np.ndarray

    @property
    def final(self):
        return float(self.theta[-1])


def lift_segment(matrices, theta0=0.0):
    """Lift the unitary-part angle along consecutive symplectic samples.

    `theta0` is the already-known angle at the first sample; it must agree
    with arg det_C of that sample modulo 2 pi.  Raises SamplingDensityError
    when two consecutive samples differ by |dtheta| >= pi/2.
    """
    U = unitary_factor(np.asarray(matrices, dtype=float))
    if U.ndim == 2:
        U = U[None]
    d = det_complex(U)
    d = d / np.abs(d)
    if abs(np.angle(d[0] * np.exp(-1j * theta0))) > EPS_THETA:
        raise ValueError("theta0 is inconsistent with the first sample")
    steps = np.angle(d[1:] / d[:-1])
    bad = np.flatnonzero(np.abs(steps) >= GUARD)
    if bad.size:
        i = int(bad[0])
        raise SamplingDensityError(
            f"angle step {steps[i]:.3f} between samples {i} and {i + 1} "
            "violates |dtheta| < pi/2; refine the path"
        )
    return theta0 + np.concatenate([[0.0], np.cumsum(steps)])


def lift_angle(path):
    """Continuous lift of arg det_C of the unitary part along a path."""
    return AngleTrack(times=path.times, theta=_readonly(lift_segment(path.matrices)))


def iterate_path(path, k):
    """Extend a path to [0, kT] by Psi(jT + s) = Psi(s) Psi(T)^j."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k == 1:
        return path
    t, A, T = path.times, path.matrices, path.T
    E = path.endpoint
    times, mats = [t], [A]
    power = np.eye(A.shape[-1])
    for j in range(1, k):
        power = power @ E
        times.append(t[1:] + j * T)
        mats.append(A[1:] @ power)
    return SympPath(np.concatenate(times), np.concatenate(mats), validate=False)


def catenate(path1, path2):
    """path1 on [0, T1], then path2(t - T1) @ path1(T1)."""
    if path1.n != path2.n:
        raise DimensionMismatchError("paths have different dimensions")
    T1 = path1.T
    times = np.concatenate([path1.times, path2.times[1:] + T1])
    mats = np.concatenate([path1.matrices, path2.matrices[1:] @ path1.endpoint])
    return SympPath(times, mats, validate=False)


def reverse_path(path):
    """Time-reversed inverse t -> Psi(T - t) Psi(T)^{-1}."""
    inv_end = np.linalg.inv(path.endpoint)
    times = path.T - path.times[::-1]
    mats = path.matrices[::-1] @ inv_end
    mats[0] = np.eye(mats.shape[-1])
    return SympPath(times, mats, validate=False)


def default_samples(rates, T):
    """Smallest uniform sample count meeting the per-rate and lift guards."""
    rates = np.abs(np.atleast_1d(np.asarray(rates, dtype=float)))
    worst = max(float(rates.max(initial=0.0)), 0.5 * float(rates.sum()))
    # 1% headroom keeps rates at exact multiples of pi off the guard boundary
    return int(math.floor(4.04 * worst * abs(T) / math.pi)) + 1


def rotation_path(rates, T, m=None):
    """Sample t -> (+)_j R(w_j t) at m+1 uniform times on [0, T].

    The default m keeps max|w_j| T/m < pi/4 and sum|w_j| T/m < pi/2.
    """
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    if T <= 0:
        raise ValueError("T must be positive")
    if m is None:
        m = default_samples(rates, T)
    if np.max(np.abs(rates)) * T / m >= math.pi / 4:
        raise SamplingDensityError(
            f"{m} samples are too few for rates {rates.tolist()} on [0, {T}]"
        )
    times = np.linspace(0.0, T, m + 1)
    mats = block_rotation(np.outer(times, rates))
    return SympPath(times, mats, validate=False)


def stretch_path(logs, T, m=8):
    """t -> diag(e^{l_j t}, e^{-l_j t})."""
    logs = np.atleast_1d(np.asarray(logs, dtype=float))
    times = np.linspace(0.0, T, m + 1)
    return SympPath(times, np.array([block_stretch(logs * t) for t in times]), validate=False)


def path_from_function(func, T, m):
    """Sample an arbitrary callable t -> Sp(2n) at m+1 uniform times."""
    times = np.linspace(0.0, T, m + 1)
    return SympPath(times, np.array([func(t) for t in times]))
