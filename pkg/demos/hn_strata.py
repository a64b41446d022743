"""Sampling random filtrations of a fixed type and sorting them by their
Harder-Narasimhan vector.  Only observed strata are listed."""

from isocrystals import CoeffContext, standard_form, stratum_sample

ctx = CoeffContext(2, 2, N=64)
for summands, mu in (([(0, 1, 1), (1, 1, 1)], [1, 0]),
                     ([(0, 1, 2), (1, 2, 1)], [1, 0, 0, 0]),
                     ([(0, 1, 2)], [1, -1])):
    X = standard_form(ctx, summands)
    print(summands, "type", mu)
    for s in stratum_sample(X, mu, 40, seed=3):
        print(f"   lambda={s.slopes}  observed {s.count}/40")

c1 = CoeffContext(2, 1, N=64)
X = standard_form(c1, [(0, 1, 2)])
print("trivial Frobenius, type (1, -1):",
      [(str(s.slopes), s.count) for s in stratum_sample(X, [1, -1], 20)])
