"""Toeplitz determinant and trace asymptotics for matrix-valued symbols."""

from ._widom import (
    Factors,
    Symbol,
    WidomError,
    E_f,
    G_f,
    b_c,
    bs_expansion,
    canonical_wh,
    geometric_mean,
    jackson_decay_check,
    log_det,
    near_best,
    read_symbol,
    remainder_scan,
    sup_distance,
    szego_constant,
    trace_asymptotic,
    trace_direct,
    write_symbol,
    zygmund_test_symbol,
)

__all__ = [
    "Factors",
    "Symbol",
    "WidomError",
    "E_f",
    "G_f",
    "b_c",
    "bs_expansion",
    "canonical_wh",
    "geometric_mean",
    "jackson_decay_check",
    "log_det",
    "near_best",
    "read_symbol",
    "remainder_scan",
    "sup_distance",
    "szego_constant",
    "trace_asymptotic",
    "trace_direct",
    "write_symbol",
    "zygmund_test_symbol",
]
