import numpy as np
import pytest
from spicepc.Problem.DualDomain import DualDomain
from spicepc.Problem.ProblemInstance import Iterate, ProblemInstance
from spicepc.Qcqp.QcqpGenerator import QcqpConfig, QcqpData, build_instance, generate

def scalar_qcqp(w0=1.0, a0=10.0, w1=1.0, a1=0.0, pi=1.0):
    """min (w0 x - a0)^2 s.t. (w1 x - a1)^2 <= pi."""
    W = np.array([[[w0]], [[w1]]])
    a = np.array([[a0], [a1]])
    return QcqpData(W, a, [pi])

@pytest.fixture
def interval_data():
    # min (x - 10)^2 s.t. x^2 <= 1: x* = 1, f* = 81, lam* = 9
    return scalar_qcqp()

@pytest.fixture
def interval_instance(interval_data):
    return build_instance(interval_data)

@pytest.fixture
def interval_solution():
    return Iterate(np.array([1.0]), None, np.array([9.0])), 81.0

@pytest.fixture
def disk_data():
    # min ||x - (3, 4)||^2 s.t. ||x||^2 <= 1: x* = (0.6, 0.8), f* = 16, lam* = 4
    W = np.array([np.eye(2), np.eye(2)])
    a = np.array([[3.0, 4.0], [0.0, 0.0]])
    return QcqpData(W, a, [1.0])

@pytest.fixture
def disk_solution():
    return Iterate(np.array([0.6, 0.8]), None, np.array([4.0])), 16.0

def halfline_instance():
    """min (x - 10)^2 s.t. 2x - 1 <= 0. The constraint is linear, so R(x) = 4
    everywhere."""
    def predict_x(lam, rho, eta, r, x_prev, y):
        return (20.0*rho - 2.0*lam/eta + r*x_prev)/(2.0*rho + r)
    return ProblemInstance(
        1,
        objective=lambda x: float((x[0] - 10.0)**2),
        constraint=lambda x: np.array([2.0*x[0] - 1.0]),
        jacobian=lambda x: np.array([[2.0]]),
        dual_domain=DualDomain.nonnegative(1),
        predict_x=predict_x,
    )

@pytest.fixture
def halfline():
    return halfline_instance()

@pytest.fixture(scope='session')
def small_generated():
    return generate(QcqpConfig(n=6, q=8, p=3, seed=11))

@pytest.fixture(scope='session')
def small_separable():
    return generate(QcqpConfig(n=4, m=3, q=6, p=2, seed=5, p_eq=1))

@pytest.fixture(scope='session')
def desk_single():
    return generate(QcqpConfig(n=50, q=60, p=5, seed=0))
