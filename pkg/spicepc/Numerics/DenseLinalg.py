"""Dense linear algebra used by the solver: SPD solves for the prediction
subproblems and the squared operator norm R(.) of constraint Jacobians."""
import logging
import warnings
import numpy as np
from numpy.linalg import norm
from scipy.linalg import cho_factor, cho_solve, eigvalsh, LinAlgError
from spicepc.Data.constants import POWER_MAX_ITER, POWER_TOL, POWER_STALL_TOL
from spicepc.Exceptions import DimensionError, FactorizationError

logger = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-10

def solve_spd(A, b):
    """Solve A x = b for a symmetric positive-definite A by Cholesky
    factorization.

    Parameters
    ----------
    A : (n, n) array_like
        Symmetric positive-definite matrix. Symmetry is checked to 1e-10
        relative to the largest entry.
    b : (n,) array_like
        Right-hand side.

    Returns
    -------
    x : (n,) ndarray

    Raises
    ------
    DimensionError
        If A is not square, not symmetric, or does not match b.
    FactorizationError
        If a non-positive pivot is met during factorization.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f'A must be square, got shape {A.shape}')
    if b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise DimensionError(
            f'b has shape {b.shape}, expected ({A.shape[0]},)'
        )
    scale = np.abs(A).max(initial=0.0)
    if np.abs(A - A.T).max(initial=0.0) > SYMMETRY_RTOL*scale:
        raise DimensionError('A is not symmetric')
    try:
        factor = cho_factor(A, lower=True, check_finite=True)
    except LinAlgError as exc:
        raise FactorizationError(
            f'Cholesky factorization failed: {exc}'
        ) from exc
    return cho_solve(factor, b, check_finite=False)

def _gram(M):
    """Return the smaller of M^T M and M M^T. Both share the nonzero
    spectrum."""
    if M.shape[0] < M.shape[1]:
        return M @ M.T
    return M.T @ M

def _power_iteration(G, start, max_iter, tol):
    """Power iteration on the symmetric PSD matrix G. Returns the Rayleigh
    quotient and a flag telling whether the residual test was met."""
    v = start/norm(start)
    theta_prev = None
    for i in range(max_iter):
        w = G @ v
        theta = float(v @ w)
        w_norm = norm(w)
        if w_norm == 0.0:
            return 0.0, True
        residual = norm(w - theta*v)
        if residual <= tol*theta:
            return theta, True
        if theta_prev is not None and \
                abs(theta - theta_prev) <= POWER_STALL_TOL*theta:
            logger.warning(
                'Power iteration stalled at iteration %d '
                '(relative residual %.3e); estimate has low confidence',
                i, residual/theta
            )
            return theta, True
        theta_prev = theta
        v = w/w_norm
    return theta, False

def spectral_norm_sq(M, method='power', max_iter=POWER_MAX_ITER, tol=POWER_TOL):
    """Return the squared spectral norm of M, i.e. the largest eigenvalue of
    M^T M.

    With method='power' (default), power iteration runs on the smaller Gram
    matrix from the normalized all-ones start vector, stopping when the
    eigen-residual is below `tol` relative to the estimate. With
    method='eigh', a dense symmetric eigensolver is used instead.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.size == 0:
        raise DimensionError('M must be nonempty')
    if not np.any(M):
        return 0.0
    G = _gram(M)
    if method == 'eigh':
        return float(eigvalsh(G)[-1])
    if method != 'power':
        raise ValueError(
            f"method has to be selected from {{'power', 'eigh'}}, got {method}"
        )
    start = np.ones(G.shape[0])
    theta, converged = _power_iteration(G, start, max_iter, tol)
    if theta == 0.0:
        # all-ones start lies in the null space; use a deterministic ramp
        start = np.arange(1, G.shape[0]+1, dtype=np.float64)
        theta, converged = _power_iteration(G, start, max_iter, tol)
    if not converged:
        warnings.warn(
            f'Power iteration did not converge in {max_iter} iterations; '
            'returning the current estimate', UserWarning
        )
    return theta

def frobenius_norm_sq(M):
    """Return the squared Frobenius norm of M (an upper bound of the squared
    spectral norm)."""
    M = np.asarray(M, dtype=np.float64)
    return float(np.sum(M*M))

def jacobian_norm_sq(jacobian, mode='spectral'):
    """R(.) contribution of one Jacobian block under the chosen norm mode."""
    if mode == 'spectral':
        return spectral_norm_sq(jacobian)
    if mode == 'frobenius':
        return frobenius_norm_sq(jacobian)
    raise ValueError(
        f"norm mode has to be selected from {{'spectral', 'frobenius'}}, got {mode}"
    )
