# Branch-selected matrix logarithms: for any invertible M there is exactly
# one A with exp(2 pi i A / tau) = M whose spectrum sits inside a chosen
# strip.  The branch is chosen per eigenvalue cluster, so Jordan structure
# survives.

import numpy as np

from eqconn import Transversal, log_transversal, mat_exp, reduce_to_transversal

tau = 1.0 - 1.0j
strip = Transversal(tau)
two_pi_i = 2j * np.pi

# A unipotent Jordan block: the logarithm is nilpotent, no diagonalization
# involved.
m = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
a = log_transversal(m, strip)
print("log of a unipotent block:\n", np.round(a, 12))
print("round trip error:", np.linalg.norm(mat_exp(two_pi_i * a / tau) - m))

# A random invertible matrix: the log lands with every eigenvalue in the
# strip, and exponentiating returns the input.
rng = np.random.default_rng(1)
m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
a = log_transversal(m, strip)
print("\nrandom 5x5:")
print("  eigenvalue strip positions:",
      np.round([strip.position(v) for v in np.linalg.eigvals(a)], 6))
print("  round trip error:",
      np.linalg.norm(mat_exp(two_pi_i * a / tau) - m) / np.linalg.norm(m))

# reduce_to_transversal shifts whole eigenvalue clusters by integer
# multiples of tau without changing the exponential.
a = np.diag([0.3 * tau, 2.3 * tau, -0.7 * tau])
folded, shifts = reduce_to_transversal(a, strip)
print("\nfolding a diagonal spectrum into the strip:")
print("  shifts:", [(np.round(lam, 3), k) for lam, k in shifts])
print("  folded diagonal:", np.round(np.diag(folded), 12))
print("  exponential preserved:",
      np.allclose(mat_exp(two_pi_i * a / tau), mat_exp(two_pi_i * folded / tau)))
