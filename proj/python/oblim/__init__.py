"""Compressible Oldroyd-B solver and its incompressible limit.

Fields are NumPy arrays of shape (n,) * dim; velocities stack the components
on a leading axis and stresses stack the packed symmetric slots (00, 01, 11
in 2D; 00, 01, 02, 11, 12, 22 in 3D).
"""

from ._core import (
    CompressibleState,
    ConfigError,
    DomainError,
    GridSpec,
    ImexConfig,
    IncompressibleState,
    IoError,
    PhysicalParams,
    StateError,
    StepError,
    convergence_gap,
    dealias,
    dissipation,
    divergence,
    energy,
    fit_rate,
    gradient,
    imex_step,
    laplacian,
    leray_project,
    load_snapshot,
    make_grid,
    matched_incompressible_init,
    parse_config,
    projection_step,
    recover_pressure,
    relative_entropy,
    run,
    run_incompressible,
    run_study,
    save_snapshot,
    sobolev_norm,
    spectral_derivative,
    sqrt_density_lemma_check,
    well_prepared_init,
)

__all__ = [name for name in dir() if not name.startswith("_")]
