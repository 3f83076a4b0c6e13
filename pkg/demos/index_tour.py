"""Four indices of one symplectic path, and where they part ways.

Run: python3 demos/index_tour.py
"""

import numpy as np

from reebmec import (
    conley_zehnder,
    dgw_index,
    mean_index,
    robbin_salamon,
    rotation_path,
    unitary_index,
    wip_fit,
)
from reebmec.errors import ReebMecError
from reebmec.indices import BlockPath, conley_zehnder_rot
from reebmec.symplin import random_symplectic

# a rotation by 1.3*pi in one plane and -0.4*pi in the other
rates, T = [1.3 * np.pi, -0.4 * np.pi], 1.0
path = rotation_path(rates, T)
print("rotation path, rates/pi =", [r / np.pi for r in rates])
print("  cz (lift)     =", conley_zehnder(path))
print("  cz (closed)   =", conley_zehnder_rot(rates, T))
print("  rs            =", robbin_salamon(BlockPath(rates, T=T)))
print("  mean          = %.6f" % mean_index(path).value)
print("  unitary       = %.6f" % unitary_index(path))

# a full turn ends at the identity: cz refuses, rs still answers
loop = rotation_path([2 * np.pi], 1.0)
try:
    conley_zehnder(loop)
except ReebMecError as exc:
    print("full turn: cz refused:", exc)
print("full turn: rs =", robbin_salamon(BlockPath([2 * np.pi])), " mean =", mean_index(loop).value)

# the DGW index is a function on Sp(2n), not on paths
rng = np.random.default_rng(3)
A, B = random_symplectic(rng, 2), random_symplectic(rng, 2)
defect = abs(dgw_index(A @ B) - dgw_index(A) - dgw_index(B))
print("DGW quasimorphism defect on one random pair: %.4f" % defect)

# weak index-positivity: the tightest line below (action, index) samples
samples = [(1.0, 2), (2.0, 5), (3.0, 7), (4.5, 11)]
cert = wip_fit(samples)
print("wip_fit:", "index >= %.3f * action %+.3f" % (cert.kappa1, cert.kappa2))
