"""Statevector simulation of a quantum partial eigenpair solver and its classical baselines."""
from .amplification import AAPlan, PESResult, plan_iterations, reflect_state, run_aa, run_pes, worst_case_p0
from .classical import lanczos_extremal, power_method_topk, qr_eigensolver
from .complexity import (
    CostParams,
    cost_ces,
    cost_lanczos,
    cost_pes,
    cost_power,
    cost_qr,
    scaling_study,
    worst_case,
)
from .estimator import EigenpairEstimate, SampleBudget, budget_ces, budget_pes, estimate_eigenpairs
from .matrix_core import (
    MatrixError,
    SparseHermitian,
    Spectrum,
    eig_oracle,
    from_dense,
    from_triples,
    load_matrix,
    save_matrix,
    synthesize_on_grid,
)
from .spectral import CES, PhaseMap, apply_qpe, build_ces, build_phase_map, build_spectral_unitary, run_ces
from .statevector import (
    QuantumState,
    RegisterLayout,
    apply_unitary,
    prepare_basis_u,
    reflect_about_zero,
    register_distribution,
    sample,
)
from .window import (
    GoodSet,
    PhaseWindow,
    good_probability,
    lambda_to_phase_window,
    lambda_to_phase_windows,
    qc_add_const,
    qc_sub_const,
    reflect_good,
)

__version__ = "0.1.0"
