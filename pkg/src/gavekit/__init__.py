"""Analysis and solution of generalized absolute value equations A x - B|x| = b."""

from .analysis import (
    AnalysisOptions,
    AnalysisReport,
    Conclusion,
    HypothesisUnmet,
    MultiplicityCase,
    MultiplicityClass,
    TheoremId,
    TheoremVerdict,
    analyze,
    check_contraction_A,
    check_degenerate,
    check_known_solution,
    check_nonzero_count,
    check_signcone_A,
    check_signcone_B,
    check_submatrix_condition,
    classify_known_solution,
    classify_linear_solution,
)
from .config import Tolerances
from .feasibility import Feasible, Infeasible, feasible_nonneg, strict_on_support, verify_farkas
from .generator import GeneratorConfig, random_instance
from .linalg import numerical_rank, op_norm, pinv, solve_square, submatrix, svd
from .model import (
    GaveInstance,
    Multiplicity,
    SolutionRecord,
    Splitting,
    Target,
    parse_instance,
    residual,
    serialize_instance,
    sign_transform,
)
from .solvers import (
    enumerate_patterns,
    fixed_point_x,
    fixed_point_y,
    sample_family,
    solve_pattern,
)
