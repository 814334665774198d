"""Closed-form BCH maps for contact and symplectic Hamiltonian algebras.

The public surface re-exports the most used names; submodules hold the rest.
"""

from .algebra import (
    CHA,
    HEISENBERG,
    QCA,
    QSA,
    SU2C,
    AlgebraElement,
    AlgebraId,
    adjoint_matrix,
    bracket,
    element,
    killing_form,
    structure_table,
    trace_distance,
)
from .bch import (
    bch,
    bch_contact_heisenberg,
    bch_heisenberg,
    bch_quadratic_contact,
    bch_quadratic_symplectic,
    bch_su2c,
    branch_g,
    entire_C,
    entire_S,
)
from .errors import (
    AlgebraMismatchError,
    BranchError,
    FlowBCHError,
    NotContactElementError,
    NumericDomainError,
)
from .flows import (
    ContactState,
    SpinorState,
    SymplecticState,
    TangentVector,
    contact_vector_field,
    exact_flow,
    jacobi_bracket_at,
    rk4_flow,
)
from .oracle import bch_matrix_oracle, dynkin_series, generator_extraction_oracle
from .splitting import (
    IntegratorSpec,
    OscillatorParams,
    distance_sweep,
    ho_modified_hamiltonian_symplectic,
    modified_hamiltonian,
    splitting_map,
)

__version__ = "0.1.0"
