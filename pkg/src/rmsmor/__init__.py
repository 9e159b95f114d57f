"""Interpolatory model order reduction for systems with root-mean-squared output.

The quantity of interest is the quadratic output ``y(s)**2 = x(s)^H Q x(s)``
of a frequency-domain linear system ``(sE - A) x(s) = b u(s)``.  The package
provides the system classes, transfer-function evaluation, projection,
five interpolation-based reduction methods, error metrics and a CLI.
"""

from rmsmor.system import (
    LinearOutputSystem,
    QuadraticOutputSystem,
    RmsWeights,
    SecondOrderSystem,
    c_from_weights,
    lift_second_order,
    q_from_output_matrix,
    q_from_weights,
    rms_from_state,
)
from rmsmor.transfer import (
    PencilError,
    ShiftedSolver,
    SweepResult,
    eval_bivariate_tf,
    eval_linear_tf,
    eval_qo_tf,
    eval_qo_tf_deriv_imag,
    eval_qo_tf_imag,
    solve_state,
    sweep,
)
from rmsmor.projection import (
    BasisMatrix,
    ReducedModel,
    eval_reduced_bivariate_tf,
    eval_reduced_tf,
    eval_reduced_tf_deriv_imag,
    normalize,
    reduce,
    reduced_poles,
)
from rmsmor.interpolation import (
    GreedyTrace,
    IrkaState,
    SampleBasis,
    Theorem1Report,
    averaged_basis,
    check_theorem1,
    default_irka_poles,
    default_presample_omegas,
    greedy_select,
    krylov_irka_poles,
    lqo_irka,
    presample,
)
from rmsmor.metrics import ErrorReport, error_report, h2_relerr, hinf_relerr, pointwise_relerr

__version__ = "0.1.0"

__all__ = [
    "BasisMatrix",
    "ErrorReport",
    "GreedyTrace",
    "IrkaState",
    "LinearOutputSystem",
    "PencilError",
    "QuadraticOutputSystem",
    "ReducedModel",
    "RmsWeights",
    "SampleBasis",
    "SecondOrderSystem",
    "ShiftedSolver",
    "SweepResult",
    "Theorem1Report",
    "averaged_basis",
    "c_from_weights",
    "check_theorem1",
    "default_irka_poles",
    "default_presample_omegas",
    "error_report",
    "eval_bivariate_tf",
    "eval_linear_tf",
    "eval_qo_tf",
    "eval_qo_tf_deriv_imag",
    "eval_qo_tf_imag",
    "eval_reduced_bivariate_tf",
    "eval_reduced_tf",
    "eval_reduced_tf_deriv_imag",
    "greedy_select",
    "h2_relerr",
    "hinf_relerr",
    "krylov_irka_poles",
    "lift_second_order",
    "lqo_irka",
    "normalize",
    "pointwise_relerr",
    "presample",
    "q_from_output_matrix",
    "q_from_weights",
    "reduce",
    "reduced_poles",
    "rms_from_state",
    "solve_state",
    "sweep",
]
