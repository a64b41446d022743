"""Newton vectors of standard forms survive a random change of basis, and
dominance of slope vectors is the same thing as one polygon lying above another."""

import random

from isocrystals import (CoeffContext, SlopeVector, dominance_leq, newton_vector_of, polygon_of,
                         random_unimodular, standard_form)

ctx = CoeffContext(2, 2, N=64)
X = standard_form(ctx, [(1, 2, 1), (-1, 3, 1), (0, 1, 2)])
print("declared summands:", X.summands)
print("Newton vector:    ", X.newton_vector())
print("Newton polygon:   ", polygon_of(X.newton_vector()))

rng = random.Random(0)
g, g_inv = random_unimodular(ctx, X.d, rng, 16)
A2 = g @ X.A @ g_inv.frobenius(1)
print("after sigma-conjugation:", newton_vector_of(A2, ctx.r))

nu = SlopeVector.parse("1/2,1/2")
for mu in ("1,0", "2,-1", "1,1", "0,0"):
    print(f"({mu}) dominates {nu}?", dominance_leq(nu, SlopeVector.parse(mu)))
