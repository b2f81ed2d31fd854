# Composition series, classes in the Grothendieck group, and their image as
# divisor classes on the elliptic curve C/(Z + tau Z).

import numpy as np

from eqconn import (
    Divisor,
    Transversal,
    decompose,
    divisor_equivalent,
    k0_class,
    k0_to_divisor,
    normalize,
)
from eqconn.category import EquivariantConnection, NormalForm

tau = 1.0 - 1.0j
theta = (np.sqrt(5.0) - 1.0) / 2.0
strip = Transversal(tau)

# A non-semisimple example: the composition series sees the label twice.
nil = NormalForm(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
                 np.eye(2, dtype=complex), strip, theta, tau)
print("composition series of the unipotent extension:", decompose(nil))
print("its class:", k0_class(nil))

# Strip-shifted presentations of one object carry equal classes.
zp, b = 0.25 * tau + 0.1, 2.0
x = NormalForm(np.array([[zp]], dtype=complex),
               np.array([[b]], dtype=complex), strip, theta, tau)
shifted = normalize(EquivariantConnection.from_constant(
    [[zp + tau]], [[b]], theta, tau), strip)
print("\nclass survives a strip shift:", k0_class(x) == k0_class(shifted))

# The divisor map sends the label (b, z') to the point -z'; the dilation
# label is forgotten.
div = k0_to_divisor(k0_class(x))
print("divisor of the class:", div)

# Abel-type equivalence: degree zero plus lattice-trivial weighted sum.
pa, pb = 0.2 + 0.3 * tau, 0.45 + 0.11 * tau
principal = Divisor(tau, [(pa, 1), (pb, 1), (0.0, -1), (pa + pb, -1)])
print("\n[a] + [b] - [0] - [a+b] is equivalent to zero:",
      divisor_equivalent(principal, Divisor(tau)))
off = Divisor(tau, [(pa, 1), (pa + 0.37, -1)])
print("a loose degree-zero combination is not:",
      divisor_equivalent(off, Divisor(tau)))
