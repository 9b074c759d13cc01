"""Reconstruction of band-limited fields on the sphere from masked data."""

from ._core import (
    ConfigError,
    ContractError,
    DomainError,
    IoError,
    RankError,
    SolverError,
    analyze,
    axial_block,
    coeff_l2_error,
    gaunt,
    make_grid,
    mask_coeffs,
    mask_extrema,
    masked_data,
    paper_spectrum,
    reconstruct,
    run_experiment,
    sample_field,
    synthesize,
    wigner3j,
)


def index(l, m):
    """Position of a_{l,m} (m >= 0) in a packed coefficient array."""
    return l * (l + 1) // 2 + m
