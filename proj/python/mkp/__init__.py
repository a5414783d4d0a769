"""Mean King's Problem optics simulator and phase optimizer."""

from ._mkp import (
    MkpError,
    MubFamily,
    SetupModel,
    SuccessEvaluator,
    VaaBasis,
    bell_state,
    build_mub,
    build_setup,
    build_vaa_basis,
    collapsed_state,
    is_odd_prime,
    mapping_function,
    optimize,
    simulate,
)

__all__ = [
    "MkpError",
    "MubFamily",
    "SetupModel",
    "SuccessEvaluator",
    "VaaBasis",
    "bell_state",
    "build_mub",
    "build_setup",
    "build_vaa_basis",
    "collapsed_state",
    "is_odd_prime",
    "mapping_function",
    "optimize",
    "simulate",
]
