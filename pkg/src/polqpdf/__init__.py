"""Phase-space distributions of polarized two-mode quantum light.

The package is organized around four layers:

* `poincare`: polarization bookkeeping, Poincare-sphere angles, Jones
  vectors, bases, and the complex polarization index p;
* `fock`: truncated Fock-space operators, displacements, the s-ordered
  kernel family, two-mode transiting operators, states;
* `qpdf`: distribution values via the analytic coherent closed form
  and the brute-force trace route, sweeps, normalization integrals;
* `coherence`: normally ordered correlation functions, the
  polarization condition residual, and the factorization law it implies.

`cli` exposes all of it as the `polqpdf` command.
"""

from .coherence import (
    CoherenceOrder,
    FactorizationCheck,
    coherence_function,
    factorization_check,
    polarization_residual,
)
from .errors import (
    DegenerateInputError,
    PoleError,
    SingularOrderError,
    TruncationError,
    ValidationError,
)
from .fock import (
    OrderParameter,
    TruncatedOperator,
    TwoModeOperator,
    TwoModeState,
    annihilation,
    coherent_vector,
    creation,
    displacement,
    expectation,
    fock_vector,
    kernel,
    number_operator,
    reduced_modes,
    required_dim,
    sordered_displacement,
    state_components,
    transiting,
    transiting_restricted,
    two_mode_coherent_density,
)
from .poincare import (
    BasisPair,
    JonesVector,
    PoincareParams,
    PolarizationIndex,
    amplitudes_to_poincare,
    index_of_polarization,
    iop_in_basis,
    poincare_to_amplitudes,
    transform_amplitudes,
)
from .qpdf import (
    AxisKind,
    GridMeta,
    Method,
    NormalizationResult,
    PlaneQuadrature,
    QpdfGrid,
    RadialQuadrature,
    normalization_check,
    plane_grid_qpdf,
    poincare_sphere_qpdf,
    qpdf_coherent_closed,
    qpdf_polarization_section,
    qpdf_trace,
    qpdf_trace_single,
    sweep_modulus,
    sweep_phase,
)

__version__ = "0.1.0"
