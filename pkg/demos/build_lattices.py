"""Every integral type above the Newton vector is realized: first by an
admissible filtration, then by a strongly divisible lattice of that type."""

import random

from isocrystals import (CoeffContext, DominanceFails, GenericityBudget, adapted_bounds,
                         check_mazur, construct_admissible_filtration, construct_lattice_of_type,
                         lattice_type)
from isocrystals.generate import random_dominating, random_isocrystal
from isocrystals.lattice import Lattice

ctx = CoeffContext(2, 2, N=64)
rng = random.Random(7)
X, summands, _ = random_isocrystal(ctx, rng, 4)
nu = X.newton_vector()
print("summands", summands, "Newton vector", nu)
for _ in range(3):
    mu = random_dominating(nu, rng)
    F = construct_admissible_filtration(X, mu.as_ints(), GenericityBudget(seed=1))
    M = construct_lattice_of_type(X, mu)
    print(f"mu={mu}: filtration {F.verdict.kind}, lattice type {lattice_type(M)}")

try:
    construct_lattice_of_type(X, [0] * X.d)
except DominanceFails as exc:
    print("refused:", exc)

R = Lattice.random(X, rng)
print("random lattice type", lattice_type(R), "Mazur holds:", check_mazur(R))
lo, hi = adapted_bounds(R, F)
print("adapted lattices around it: inside", lo <= R, "containing", R <= hi)
