"""Lackadaisical quantum-walk search on rings and tori.

State-vector simulation of coined discrete-time walks with weighted
self-loops, plus an experiment harness for success-probability curves,
running-time scalings and fitted scaling constants.
"""

from .dense import DenseOperator, EquivalenceReport, build_dense_unitary, verify_equivalence
from .driver import (
    AmplifiedComplexity,
    PeakReport,
    ProbabilitySeries,
    amplified_complexity,
    default_t_max,
    first_peak,
    first_threshold_crossing,
    run_search,
    run_search_until,
)
from .engine import (
    CoinSpec,
    GroverLoopCoin,
    HadamardCoin,
    OracleSpec,
    WalkState,
    apply_oracle_coin,
    apply_shift,
    grover_coin_matrix,
    hadamard_coin_matrix,
    initial_state,
    success_probability,
    walk_step,
)
from .harness import (
    FitResult,
    SweepSpec,
    emit_table,
    eval_rule,
    fit_power_law,
    fit_scaled_sqrt_log,
    place_targets,
    run_sweep,
    sweep_self_loop,
)
from .lattice import (
    Direction,
    LatticeGeometry,
    SELF_LOOP,
    coin_directions,
    make_geometry,
    neighbor,
    vertex_coords,
    vertex_index,
)
from .presets import PRESET_NAMES, run_preset

__version__ = "0.1.0"
