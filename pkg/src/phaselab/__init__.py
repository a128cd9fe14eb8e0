"""Aharonov-Anandan, Berry and Wilczek-Zee geometric phases of rotating-frame spin models."""

from .adiabatic import (
    EnergyGroup,
    adiabaticity_metric,
    adiabaticity_metric_squared_gap,
    berry_connection,
    berry_phase,
    energy_groups,
    single_valued_frame,
    wilczek_zee_holonomy,
)
from .errors import ConvergenceError, CyclicityError, DegenerateFormulaError, PhaseLabError, ValidationError
from .holonomy import (
    CyclicGroup,
    Holonomy,
    PhaseBreakdown,
    aa_holonomy,
    aa_phase,
    cyclic_states,
    degenerate_connection,
    degenerate_dynamical,
    floquet_split,
)
from .linalg import hermitian_eig, ordered_exp, spectral_exp
from .oracle import evolution_operator, geometric_phase_oracle, oracle_phases, propagate_state
from .records import SweepRecord, emit, parse
from .spin import ModelParams, RotatingModel, lmg_hamiltonian, make_model, rotating_model

__version__ = "0.1.0"
