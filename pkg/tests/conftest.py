"""Shared helpers for the test suite."""

import numpy as np

from reebmec.symplin import complex_part, polar_decompose, unitary_from_complex


def geodesic(A):
    """t -> P^t U^t for A = P U: a path in Sp(2n) from I to A."""
    P, U = polar_decompose(A)
    w, V = np.linalg.eigh(P)
    lam, E = np.linalg.eig(complex_part(U))
    E_inv = np.linalg.inv(E)
    phase = np.angle(lam)

    def at(t):
        Pt = V @ np.diag(w**t) @ V.T
        Wt = E @ np.diag(np.exp(1j * t * phase)) @ E_inv
        return Pt @ unitary_from_complex(Wt)

    return at


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
