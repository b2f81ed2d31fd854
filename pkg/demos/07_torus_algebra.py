# The twisted polynomial algebra: two invertible generators, a commutation
# phase, a two-parameter family of derivations, and modular automorphisms
# that permute those derivations.

import numpy as np

from eqconn import Omega, TorusPoly, check_intertwine, modular_apply
from eqconn import psi_delta_residual, psi_embed

theta = (np.sqrt(5.0) - 1.0) / 2.0
tau = 1.0 - 1.0j

u1, u2 = TorusPoly.u1(theta), TorusPoly.u2(theta)

# The defining relation: swapping the generators costs a phase.
print("U2 U1 =", (u2 * u1).coeffs)
print("U1 U2 =", (u1 * u2).coeffs)

# Derivations scale monomials by their exponents.
x = TorusPoly.monomial(theta, 2, 1)
print("\ndelta_1 on U1^2 U2:", x.delta(1).coeffs)
print("delta in the direction (tau, 1):", x.delta_omega(Omega(tau, 1.0)).coeffs)

# The modular generators act by U1 -> U1 U2, U2 -> U2 and U1 -> U2^-1,
# U2 -> U1, and conjugating a derivation matches the action on directions.
print("\ng1 sends U1 to", modular_apply("g1", u1).coeffs)
print("g2 sends U1 to", modular_apply("g2", u1).coeffs)
w = Omega(0.7 + 0.2j, -1.1)
for token in ("g1", "g2"):
    print("conjugation residual for %s:" % token,
          check_intertwine(token, w, bound=4, theta=theta))

# Functions on the punctured plane embed along z -> U1, exchanging the
# scaling derivation with tau * delta_1.
f = {2: 1.0, 0: -0.5, -1: 3.0}
print("\nembedded Laurent polynomial:", psi_embed(f, theta).coeffs)
print("derivation intertwining residual:", psi_delta_residual(f, tau, theta))
