"""Spectral toolkit for the degenerate Schrodinger equation
i du/dt + (d^2/dx^2 + x^2 d^2/dy^2) u = 0 on (-1,1) x T with Dirichlet walls.

The y-Fourier decomposition reduces the flow to the family of quartic-free
oscillators L_n = -d^2/dx^2 + n^2 x^2 on the interval, solved here by a
tridiagonal finite-difference discretization with Richardson extrapolation.
On top sit exact-in-time spectral evolution, horizontal-strip observability
measurements, wave-packet constructions riding the x = 0 axis, large-n
eigenvalue asymptotics, and an averaging normal form for the flow.
"""

from .grids import DirichletGrid, MIN_INTERIOR_NODES
from .oscillator import (
    DEFAULT_M,
    DEFAULT_TOL,
    OscillatorEigenpair,
    SpectrumTable,
    assemble_operator,
    build_spectrum_table,
    eigen_below,
    eigen_lowest,
    verify_comparison,
    verify_weyl,
    weyl_count,
    whole_line_levels,
)
from .field import (
    GridField,
    ModalField,
    SpectralBasis,
    analyze,
    build_basis,
    coercivity_gap,
    energy_grushin,
    evolve,
    grid_csv_rows,
    mass,
    modal_csv_rows,
    random_field,
    synthesize,
)
from .observability import (
    ControlRegion,
    ObservabilityReport,
    arc_fourier,
    gap_length,
    observed_fraction,
    region_mass,
    threshold_sweep,
)
from .beams import (
    GroundStateRecord,
    band_basis,
    band_frequencies,
    beam_center,
    build_beam,
    build_ground_band,
    bump_chi,
    gaussian_weight,
    make_beam,
    required_interior_nodes,
)
from .asymptotics import (
    EstimateReport,
    EstimateRow,
    NuSolution,
    R2Profile,
    check_eigen_estimates,
    erf_scaled,
    f1,
    g1,
    mu_of_w,
    nu_fixed_point,
    phase_derivatives,
    solve_R2,
)
from .normal_form import (
    ExtendedField,
    MultiplierSpec,
    NormalFormResult,
    apply_Pa,
    apply_Q,
    default_multipliers,
    odd_extend,
    odd_extend_arrays,
    random_band_field,
    residual_ratio,
    restrict,
    tent_profile,
)

__version__ = "0.1.0"

__all__ = [
    "DirichletGrid",
    "MIN_INTERIOR_NODES",
    "DEFAULT_M",
    "DEFAULT_TOL",
    "OscillatorEigenpair",
    "SpectrumTable",
    "assemble_operator",
    "build_spectrum_table",
    "eigen_below",
    "eigen_lowest",
    "verify_comparison",
    "verify_weyl",
    "weyl_count",
    "whole_line_levels",
    "GridField",
    "ModalField",
    "SpectralBasis",
    "analyze",
    "build_basis",
    "coercivity_gap",
    "energy_grushin",
    "evolve",
    "grid_csv_rows",
    "mass",
    "modal_csv_rows",
    "random_field",
    "synthesize",
    "ControlRegion",
    "ObservabilityReport",
    "arc_fourier",
    "gap_length",
    "observed_fraction",
    "region_mass",
    "threshold_sweep",
    "GroundStateRecord",
    "band_basis",
    "band_frequencies",
    "beam_center",
    "build_beam",
    "build_ground_band",
    "bump_chi",
    "gaussian_weight",
    "make_beam",
    "required_interior_nodes",
    "EstimateReport",
    "EstimateRow",
    "NuSolution",
    "R2Profile",
    "check_eigen_estimates",
    "erf_scaled",
    "f1",
    "g1",
    "mu_of_w",
    "nu_fixed_point",
    "phase_derivatives",
    "solve_R2",
    "ExtendedField",
    "MultiplierSpec",
    "NormalFormResult",
    "apply_Pa",
    "apply_Q",
    "default_multipliers",
    "odd_extend",
    "odd_extend_arrays",
    "random_band_field",
    "residual_ratio",
    "restrict",
    "tent_profile",
    "__version__",
]
