"""Isocrystals over unramified p-adic fields: Newton vectors, filtrations,
weak admissibility, lattices of prescribed type and Harder-Narasimhan vectors."""

from .context import CoeffContext, with_precision_retries
from .errors import (ConditionIFailsError, ConstructionRetryExhausted, DivisionByUncertain,
                     DominanceFails, InsufficientPrecision, IsocrystalError, LengthMismatch,
                     NoConvergence, NotDiagonalizableAtPrecision, NotStronglyDivisible,
                     RelationFails, RetriesExhausted, SchemaError)
from .existence import GenericityBudget, construct_admissible_filtration, transversality_report
from .filtration import (Admissible, CheckStrategy, ConditionIFails, Filtration, NotAdmissible,
                         ProbablyAdmissible, check_weak_admissibility, induced, induced_type)
from .hn import HNVector, Stratum, hn_vector, stratum_sample
from .isocrystal import (Isocrystal, SlopeDecomposition, SubIsocrystal, diagonal_isocrystal,
                         newton_vector_of, simple_block, standard_form)
from .lattice import (Lattice, adapted_bounds, check_mazur, construct_lattice_of_type,
                      laffaille_iterate, lattice_type, strongly_divisible,
                      strongly_divisible_basis)
from .linalg import ValuedMatrix, kernel, random_unimodular, smith_valuations
from .phin import PhiNModule, check_weak_admissibility_phiN, random_phi_n_module
from .polygon import NewtonPolygon, SlopeVector, dominance_leq, polygon_of
from .scalar import ValuedScalar

__version__ = "0.1.0"
