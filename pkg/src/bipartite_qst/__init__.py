"""Two-stage generalized Grover walk state transfer on complete bipartite graphs."""

from .errors import (BadParity, DegenerateSize, DimensionMismatch, InvalidConfig, InvalidEpsilon,
                     NonAdjacent, OutOfRange, QSTError, SpecMismatch, UnsupportedBasis)
from .graph import BipartiteSpec, arc_index, arc_pair, arcs, degree, neighbors
from .schedule import (AngleSchedule, Pairing, Parity, Stage, chebyshev, gamma, min_steps,
                       predicted_stage_fidelity, quasi_chebyshev, stage1_schedule,
                       stage2_diff_schedule, stage2_same_schedule)
from .subspace import NotInvariant, ReducedBasis, reduced_evolve
from .sweep import SweepSpec, run_sweep
from .transfer import (Backend, Case, FidelityReport, TransferConfig, end_to_end_fidelity,
                       fidelity_lower_bound, run_transfer)
from .walk import StateVector, evolve, fidelity, initial_state, target_state

__version__ = "0.1.0"
