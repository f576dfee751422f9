from spicepc.Problem.DualDomain import DualDomain, project_dual
from spicepc.Problem.ProblemInstance import (
    ProblemInstance, Iterate, eval_objective, gamma_operator,
    constraint_value, jacobian_norm
)
from spicepc.Problem.Residuals import KKTResidual, kkt_residual
