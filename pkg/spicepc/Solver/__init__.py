from spicepc.Solver.Scaling import ScalingSchedule, rho_value
from spicepc.Solver.Parameters import ParamState, compute_params, eta_lower_bound
from spicepc.Solver.SolveHistory import (
    SolveHistory, IterationRecord, ErgodicAverage, ergodic_average
)
from spicepc.Solver.ExtendedMatrices import (
    ExtendedMatrixSet, build_matrices, difference_matrix, check_contraction,
    ergodic_error_bound, quadratic_form_symmetric_part
)
from spicepc.Solver.SpiceSolver import (
    SolveConfig, SpiceSolver, predict, correct, eta_search, solve
)
