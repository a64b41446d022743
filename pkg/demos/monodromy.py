"""(phi, N)-modules: the relation N phi = p phi N forces N to lower slopes by one,
and admissibility passes from the isocrystal to the module."""

import random

from isocrystals import (CheckStrategy, CoeffContext, Filtration, check_weak_admissibility,
                         check_weak_admissibility_phiN, random_phi_n_module)
from isocrystals.generate import random_dominating
from isocrystals.phin import slope_shift_holds

ctx = CoeffContext(2, 2, N=64)
for seed in range(4):
    rng = random.Random(seed)
    m = random_phi_n_module(ctx, rng)
    nu = m.X.newton_vector()
    mu = random_dominating(nu, rng)
    F = Filtration.random(m.X, mu.as_ints(), rng)
    strategy = CheckStrategy(seed=seed)
    print(f"Newton {nu}, slope shift {slope_shift_holds(m)}, type {mu}: "
          f"isocrystal {check_weak_admissibility(m.X, F, strategy).kind}, "
          f"module {check_weak_admissibility_phiN(m, F, strategy).kind}")
