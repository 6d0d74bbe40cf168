"""randtomo: robustness of random-control quantum-state tomography.

Simulates state tomography in which a single observable is rotated by
random unitaries (Haar draws, or evolutions under a random control field)
and quantifies the robustness of the linear reconstruction through the
condition number of the tomography matrix.
"""

__version__ = "0.1.0"

from .bases import (
    GELL_MANN,
    PAULI_PRODUCT,
    OperatorBasis,
    bloch_to_density,
    density_to_bloch,
    gellmann_basis,
    pauli_basis,
)
from .controllability import LieClosureResult, lie_closure_dimension
from .distributions import (
    EDELMAN_LOG_KAPPA,
    case1_density,
    case2_density,
    edelman_density,
    expected_logkappa_haar,
    ks_statistic,
)
from .dynamics import (
    ControlSystem,
    PiecewiseConstantField,
    PropagatorTrace,
    TruncatedFourierField,
    ising_system,
    multilevel_system,
    propagate,
    sample_fourier_field,
    sample_piecewise_field,
)
from .ensembles import (
    DistCheckCase,
    EnsembleResult,
    PlateauEstimate,
    TimeTraceSpec,
    plateau_estimate,
    run_distribution_check,
    run_haar_scaling,
    run_reconstruct_demo,
    run_time_trace,
)
from .haar import RngSeed, sample_haar
from .tomography import (
    TomographySystem,
    add_measurement_noise,
    assemble_A,
    condition_number,
    log_kappa,
    measurement_vector,
    reconstruct,
)

__all__ = [name for name in dir() if not name.startswith("_")]
