from spicepc.Problem.DualDomain import DualDomain, project_dual
from spicepc.Problem.ProblemInstance import ProblemInstance, Iterate
from spicepc.Solver.Scaling import ScalingSchedule
from spicepc.Solver.SpiceSolver import SolveConfig, SpiceSolver, solve
from spicepc.Qcqp.QcqpGenerator import QcqpConfig, generate
