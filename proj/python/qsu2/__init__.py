"""Numerics on the quantum group SU_q(2).

Spins cross the boundary as doubled integers (``lmax_doubled=24`` is Lmax = 12).
Polynomials are written either as one word, such as ``"a g*"``, or as a list of
``(word, coefficient)`` pairs; the letters are ``a``, ``a*``, ``g`` and ``g*``.
"""

from ._core import (
    ConfigError,
    Error,
    InvalidParameter,
    __version__,
    absD_commutator_series,
    asymptotic_band,
    cg_half,
    haar_state,
    haar_via_heat,
    heat_exponent,
    heat_trace,
    laplace_peak,
    make_grid,
    modular_check,
    normal_order,
    oracle_haar,
    q_number,
    q_relation_check,
    relation_residuals,
    run_cli,
    trueD_growth,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidParameter",
    "__version__",
    "absD_commutator_series",
    "asymptotic_band",
    "cg_half",
    "haar_state",
    "haar_via_heat",
    "heat_exponent",
    "heat_trace",
    "laplace_peak",
    "make_grid",
    "modular_check",
    "normal_order",
    "oracle_haar",
    "q_number",
    "q_relation_check",
    "relation_residuals",
    "run_cli",
    "trueD_growth",
]
