"""Entropic mirror descent on spectrahedra."""

from ._core import (
    MimoNetwork,
    conjugate,
    divergence,
    eig,
    entropy,
    fenchel_coupling,
    gap,
    gibbs,
    hex_cell_distances,
    mdis_linear,
    rate_bound_csvi,
    rate_bound_mdis,
    run_experiment,
    solve_vi,
)

__all__ = [
    "MimoNetwork",
    "conjugate",
    "divergence",
    "eig",
    "entropy",
    "fenchel_coupling",
    "gap",
    "gibbs",
    "hex_cell_distances",
    "mdis_linear",
    "rate_bound_csvi",
    "rate_bound_mdis",
    "run_experiment",
    "solve_vi",
]
