# The rigid tensor structure: tensor products fold spectra back into the
# strip, duals pair against their objects, and the triangle identities hold
# as literal matrix equations.

import numpy as np

from eqconn import (
    Transversal,
    dual,
    hom_basis,
    k0_class,
    monodromy,
    tensor,
    triangle_residuals,
    unit_object,
)
from eqconn.category import NormalForm

tau = 1.0 - 1.0j
theta = (np.sqrt(5.0) - 1.0) / 2.0
strip = Transversal(tau)


def line(zprime, b):
    return NormalForm(np.array([[zprime]], dtype=complex),
                      np.array([[b]], dtype=complex), strip, theta, tau)


# 1-dim objects multiply: connection scalars add and fold, dilations multiply.
x = line(0.6 * tau, 2.0)
y = line(0.7 * tau, 3.0 - 1.0j)
xy = tensor(x, y)
print("(0.6 tau) + (0.7 tau) folds to:", xy.A0[0, 0] / tau, "tau")
print("dilation labels multiply:", xy.B0[0, 0])

# Tensor of monodromies is the Kronecker product of the factors.
rep = monodromy(xy)
print("tensor monodromy:", rep.M1[0, 0],
      "= product of factors:",
      monodromy(x).M1[0, 0] * monodromy(y).M1[0, 0])

# Duality inverts both labels (the connection label up to a strip fold).
xd = dual(x)
print("\ndual labels:", xd.A0[0, 0] / tau, "tau and", xd.B0[0, 0])

# The unit sits inside x tensor dual(x): evaluation has somewhere to land.
u = unit_object(theta, tau, strip)
print("dim hom(unit, x (x) dual x):", len(hom_basis(u, tensor(x, xd))))

# Triangle identities, checked as matrix products, for a 3-dim object.
rng = np.random.default_rng(11)
c = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
from eqconn import reduce_to_transversal
a0, _ = reduce_to_transversal(c, strip)
big = NormalForm(a0, np.eye(3) + 0.1 * (c @ c), strip, theta, tau)
r1, r2 = triangle_residuals(big)
print("\ntriangle identity residuals:", r1, r2)
print("double dual has the class of the object:",
      k0_class(dual(dual(big))) == k0_class(big))
