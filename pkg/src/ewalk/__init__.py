"""
Quantum walks in rational electric fields.

The package is organised in layers: :mod:`ewalk.core` (states, coins, walk
operators and their matrices), :mod:`ewalk.floquet` (momentum-space symbols,
dispersion, velocities, revivals and bands), :mod:`ewalk.sieve` (even/odd
decomposition), :mod:`ewalk.cmv` (CMV matrices) and :mod:`ewalk.dynamics`
(time evolution).  :mod:`ewalk.cli` exposes them on the command line.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    BandedUnitary,
    Coin,
    CoinSequence,
    Field,
    FullShift,
    GlobalPhase,
    OpenWindow,
    RationalField,
    Ring,
    ShiftMinus,
    ShiftPlus,
    SU2Coin,
    WalkSpec,
    WaveFunction,
    build_matrix,
    evolve,
    position_moments,
    step,
)
from .exceptions import (
    EwalkError,
    IncompatibleRing,
    NotNormalized,
    NotRepresentable,
    NotTranslationInvariant,
)
from .floquet import (
    BandSet,
    DispersionProfile,
    FloquetSymbol,
    max_velocity,
    regrouped_symbol,
    revival_defect,
    spectrum_bands,
    symbol_of_spec,
)
from .sieve import ParityReindex, electric_sieve_check, sieve_coins, verify_sieving
from .cmv import (
    PairSequence,
    VerblunskyPair,
    build_LM,
    cmv_to_walk,
    gecmv_matrix,
    theta_matrix,
    walk_to_cmv,
)
from .dynamics import ContinuedFraction, Trajectory, continued_fraction, evolve_trace, figure1_dataset

__all__ = [name for name in dir() if not name.startswith("_")]
