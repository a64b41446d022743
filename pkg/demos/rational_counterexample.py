"""Over a coefficient field with trivial Frobenius, a type (1, -1) filtration of
the trivial plane is never admissible: its first step is always a rational line.
Over a degree-2 field a non-rational line is fine, and the lattice iteration
behaves accordingly."""

import random

from isocrystals import (CoeffContext, Filtration, Lattice, NoConvergence, ValuedMatrix,
                         check_weak_admissibility, hn_vector, laffaille_iterate, lattice_type,
                         standard_form)

c1 = CoeffContext(2, 1, N=64)
X = standard_form(c1, [(0, 1, 2)])
rng = random.Random(1)
for _ in range(3):
    F = Filtration.random(X, [1, -1], rng)
    v = check_weak_admissibility(X, F)
    print(v.kind, "witness dim", v.witness.dim, "t_H", v.t_H, "t_N", v.t_N,
          "HN vector", hn_vector(X, F).slopes)
try:
    laffaille_iterate(Lattice.standard(X), F)
except NoConvergence as exc:
    print("lattice iteration:", exc)

c2 = CoeffContext(2, 2, N=64)
Y = standard_form(c2, [(0, 1, 2)])
G = Filtration(Y, [1, -1], ValuedMatrix.from_values(c2, [[1, 0], [c2.gen(), 1]]))
print("line (1, t) over degree 2:", check_weak_admissibility(Y, G).kind)
M = laffaille_iterate(Lattice.standard(Y), G)
print("adapted lattice after", M.iterations, "steps, type", lattice_type(M))
