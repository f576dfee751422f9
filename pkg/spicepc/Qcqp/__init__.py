from spicepc.Qcqp.QcqpGenerator import (
    QcqpConfig, QcqpData, generate, generate_data, build_instance
)
from spicepc.Qcqp.QcqpPrediction import primal_prediction, dual_prediction
from spicepc.Qcqp.ReferenceSolver import ReferenceSolution, reference_solve_tiny
