"""Periodically perturbed Harper model: classical and discrete quantum dynamics.

Phase-space diagnostics for the doubly periodic Hamiltonian
a(1 - cos p) - eps*cos(phi) under a sinusoidal traveling-wave drive:
Poincare sections, one-period (Floquet) propagators and their eigenstate
energy dispersions, Husimi distributions from discrete coherent states,
interaction-picture width estimates and quasi-energy spacing statistics.
"""

__version__ = "0.1.0"

from .classical import (
    ModelParams,
    OrbitRecord,
    PhasePoint,
    advance_orbit,
    chaotic_halfwidth_harper,
    chaotic_halfwidth_pendulum,
    h0_classical,
    integrate_orbit,
    measured_chaotic_widths,
    melnikov_a1,
    melnikov_a2,
    melnikov_quadrature,
    params_from_physical,
    poincare_section,
    separatrix_curve,
    separatrix_energies,
    separatrix_trajectory,
)
from .floquet import (
    FloquetRecord,
    exact_unperturbed_propagator,
    floquet_eigensystem,
    floquet_propagator,
    partial_propagator,
    state_energy_stats,
    subspace_split,
    trotter_propagator,
)
from .husimi import HusimiGrid, coherent_state, fiducial_state, husimi_grid
from .magnus import (
    EigenBasis,
    average_interaction_drive,
    dispersion_estimate,
    eigenbasis,
    ergodic_width_estimate,
    interaction_h1,
    magnus_convergence_report,
    magnus_omega1_series,
    perturbative_dispersion_check,
    v_matrix,
)
from .qspace import (
    QuantumSpace,
    angle_operator,
    build_h0,
    build_h1,
    clock_shift,
    dft_matrix,
    displacement,
    momentum_operator,
    parity_operator,
    point_operator,
    weyl_quantize,
)
from .spacing import (
    GOE,
    POISSON,
    SpacingSample,
    berry_robnik_mixture,
    berry_robnik_reference,
    brody_pdf,
    brody_reference,
    ks_statistic,
    poisson_pdf,
    quasi_energy_spacings,
    wigner_dyson_pdf,
)
