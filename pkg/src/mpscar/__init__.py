"""Embedding parameterized matrix product states as exact eigenstates of
local parent Hamiltonians and probing their scar-state phase transitions."""

__version__ = "0.1.0"

from .mps_core import (
    FAMILIES,
    IDENTITY,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    MPSDefinition,
    StateVector,
    TransferMatrix,
    build_model,
    correlation,
    detect_transition,
    fidelity,
    materialize,
    sigma_x_closed_form,
    site_matrix_products,
    thermodynamic_correlation,
    transfer_matrix,
)
