"""Independent optimum of tiny single-block instances, used to check the Spice
iterates against a known solution."""
from collections import namedtuple
import logging
import numpy as np
from scipy.optimize import minimize, lsq_linear
from spicepc.Exceptions import InfeasibleProblemError
from spicepc.Numerics.SeededRng import SeededRng, gaussian_vector

logger = logging.getLogger(__name__)

ReferenceSolution = namedtuple(
    'ReferenceSolution', ['x', 'f', 'lam', 'violation']
)

MAX_N = 5
MAX_P = 3
N_STARTS = 5
START_SEED = 20240617

def _violation(data, x):
    phi = data.constraint_x(x)
    viol = np.maximum(phi[:data.p], 0.0)
    if data.p_eq:
        viol = np.concatenate([viol, np.abs(phi[data.p:])])
    return float(viol.max())

def _starts(data):
    x_ls = data.least_squares_point()[0]
    rng = SeededRng(START_SEED)
    starts = [np.zeros(data.n), 0.5*x_ls, x_ls]
    while len(starts) < N_STARTS:
        starts.append(gaussian_vector(rng, data.n, 1.0))
    return starts

def _multipliers(data, x, active_tol):
    """Multipliers from a bounded least-squares fit of the stationarity
    equation grad f(x) + J_active^T lam = 0."""
    phi = data.constraint_x(x)
    jac = data.jacobian_x(x)
    grad = data.objective_grad_x(x)
    active = np.zeros(len(phi), dtype=bool)
    active[:data.p] = phi[:data.p] >= -active_tol*(1.0 + data.pi)
    active[data.p:] = True
    lam = np.zeros(len(phi))
    if not active.any():
        return lam
    lower = np.where(np.arange(len(phi)) < data.p, 0.0, -np.inf)[active]
    fit = lsq_linear(
        jac[active].T, -grad, bounds=(lower, np.full(len(lower), np.inf)),
        method='bvls', tol=1e-14
    )
    lam[active] = fit.x
    return lam

def reference_solve_tiny(data, feas_tol=1e-9, active_tol=1e-6):
    """Solve a tiny single-block instance with SLSQP from five deterministic
    starts and return the best feasible point with its multipliers.

    Parameters
    ----------
    data : QcqpData
        Single-block instance with n <= 5 and at most 3 constraint rows.
    feas_tol : float
        Largest accepted constraint violation, relative to 1 + max(pi).
    active_tol : float
        Quadratic rows with phi_i >= -active_tol (1 + pi_i) are treated as
        active when fitting the multipliers.

    Returns
    -------
    ReferenceSolution
        x, objective value f, multipliers lam (unscaled) and the
        violation at x.

    Raises
    ------
    InfeasibleProblemError
        If no start reaches a feasible point.
    """
    if data.is_separable:
        raise ValueError('reference_solve_tiny handles single-block instances only')
    if data.n > MAX_N or data.p + data.p_eq > MAX_P:
        raise ValueError(
            f'reference_solve_tiny needs n <= {MAX_N} and p <= {MAX_P}, '
            f'got n={data.n}, p={data.p + data.p_eq}'
        )
    constraints = [{
        'type': 'ineq',
        'fun': lambda x: -data.constraint_x(x)[:data.p],
        'jac': lambda x: -data.jacobian_x(x)[:data.p]
    }]
    if data.p_eq:
        constraints.append({
            'type': 'eq',
            'fun': lambda x: data.constraint_x(x)[data.p:],
            'jac': lambda x: data.jacobian_x(x)[data.p:]
        })
    threshold = feas_tol*(1.0 + float(data.pi.max()))
    best = None
    for i, x_start in enumerate(_starts(data)):
        result = minimize(
            data.objective_x, x_start, jac=data.objective_grad_x,
            method='SLSQP', constraints=constraints,
            options={'ftol': 1e-15, 'maxiter': 1000}
        )
        x = result.x
        if not np.all(np.isfinite(x)):
            continue
        violation = _violation(data, x)
        f = data.objective_x(x)
        logger.debug(
            'start %d: f=%.12e violation=%.3e (%s)', i, f, violation,
            result.message
        )
        if violation > threshold:
            continue
        if best is None or f < best[1]:
            best = (x, f, violation)
    if best is None:
        raise InfeasibleProblemError(
            f'No feasible point found from {N_STARTS} starts'
        )
    x, f, violation = best
    lam = _multipliers(data, x, active_tol)
    return ReferenceSolution(x, f, lam, violation)
