# The bundle side: pushing normal forms to free holomorphic bundles over the
# twisted torus, building extensions, and reading off stability and
# finite-monodromy data.

import numpy as np

from eqconn import (
    MonodromyPair,
    TorusPoly,
    Transversal,
    build_extension,
    central_charge,
    is_nori_finite,
    k_swap,
    phase,
    psi_star,
    std_bundle_data,
    unit_object,
)
from eqconn.category import NormalForm

tau = 1.0 - 1.0j
theta = (np.sqrt(5.0) - 1.0) / 2.0
strip = Transversal(tau)

# A rank-one object maps to the line bundle with connection scalar
# 2 pi i z'; higher rank gives an upper-triangular connection matrix.
line = NormalForm(np.array([[0.3 * tau]], dtype=complex),
                  np.array([[2.0]], dtype=complex), strip, theta, tau)
fb = psi_star(line)
print("line bundle connection entry:", fb.diagonal()[0], "= 2 pi i (0.3 tau)")

# Extensions stack a new line on top; inclusion and projection commute with
# the connections as exact polynomial identities.
tail = TorusPoly(theta, {(1, -1): 0.5})
ext = build_extension(2j * np.pi * 0.1 * tau, [tail], fb)
print("extension diagonal:", ext.diagonal())

# Standard bundles carry degree m, rank m*theta + n, slope deg/rank.
for m, n in ((0, 1), (1, 0), (1, 1), (-1, 2)):
    deg, rk, mu = std_bundle_data(m, n, theta)
    print("label (%2d, %2d): deg %s rank %.6f slope %.6f  phase %.6f"
          % (m, n, deg, rk, mu, phase(m, n, theta)))
print("degree-0 classes all sit at phase 1/2:", phase(0, 5, theta))
print("torsion-sheaf relabelling of (0, 1):", k_swap(0, 1, theta))
print("central charge of (1, 0):", central_charge(1, 0, theta))

# Finite monodromy: semisimple with root-of-unity eigenvalues.
print("\nfourth roots of unity:", is_nori_finite(np.diag([1j, -1.0])))
print("an irrational rotation:",
      is_nori_finite(np.array([[np.exp(2j * np.pi * theta)]])))
print("a unipotent block:",
      is_nori_finite(np.array([[1.0, 1.0], [0.0, 1.0]])))
print("a commuting finite pair:",
      is_nori_finite(MonodromyPair(np.diag([1j, -1j]), np.diag([-1.0, 1.0]))))
