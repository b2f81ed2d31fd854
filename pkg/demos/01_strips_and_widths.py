# Strips transversal to the lattice tau*Z, and how the modular group can
# always squeeze their real width below one.

import numpy as np

from eqconn import SL2Z, Transversal, find_small_width, moebius, wd

tau = 1.0 - 1.0j
strip = Transversal(tau, offset=0.0)

# Every complex number has exactly one representative with strip coordinate
# Re(z/tau) in [0, 1).
for lam in (0.3 * tau, 1.3 * tau, -0.2 * tau, 2.0 + 0.5j):
    rep, shift = strip.reduce(lam)
    print("%-22s -> %-22s (shifted by %d tau, position %.3f)"
          % (lam, rep, shift, strip.position(rep)))

# The strip meets the real line in an interval of length wd(tau).
print("\nreal width of tau = 1 - i:", wd(tau))
print("real width of tau = -i:   ", wd(-1.0j))

# Translating by an integer N and inverting shrinks the width to
# 1/(Re tau + N); the returned group element realizes the move.
g, gtau = find_small_width(tau)
print("\nwidth-reducing move for tau = 1 - i:")
print("  g =", [[g.a, g.b], [g.c, g.d]], " g(tau) =", gtau, " wd =", wd(gtau))

# The identity wd(g(tau)) * (Re tau + N) = 1 holds along the whole family.
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    t = complex(rng.uniform(0.1, 3.0), rng.uniform(-2.0, 2.0))
    for n in range(1, 5):
        move = SL2Z.inversion() @ SL2Z.translation(n)
        worst = max(worst, abs(wd(moebius(move, t)) * (t.real + n) - 1.0))
print("\nlargest deviation of the width identity over 800 samples:", worst)
