"""Joint spectra of commuting matrix tuples and relative perturbation bounds."""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    brute_force_matching,
    diag_bound_rhs,
    lemma_sigma_check,
    normal_bound_rhs,
    optimal_matching,
    relative_cost_matrix,
    remark_bound_rhs,
    verify_bound,
)
from .clifford import (
    BasisBlade,
    CliffordElement,
    CliffordOperator,
    CliffordVector,
    blade_product,
    cliff,
    clifford_frobenius_norm,
    clifford_trace,
    element_inner_product,
    materialize,
    operator_apply,
)
from .generators import (
    GeneratorConfig,
    extremal_shift_example,
    perturb_within_class,
    random_commuting_diagonalizable_tuple,
    random_commuting_normal_tuple,
)
from .joint_spectrum import (
    JointSpectrum,
    MatrixTuple,
    OverlapMatrix,
    Tolerances,
    birkhoff_decompose,
    check_hypotheses,
    common_schur,
    diagonalize_general,
    overlap_matrix,
    simultaneous_diagonalize,
)
from .kernels import BACKEND
from .matrix_core import (
    commutator_norm,
    condition_number,
    frobenius_norm,
    normality_defect,
    operator_norm,
)
