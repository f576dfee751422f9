"""Closed-form prediction steps of the QCQP family."""
import numpy as np
from spicepc.Numerics.DenseLinalg import solve_spd
from spicepc.Problem.DualDomain import project_dual

def _block(data, block):
    if block == 'x':
        return data.WtW, data.Wta, data.A_eq
    if block == 'y':
        if not data.is_separable:
            raise ValueError('The y block only exists for separable instances')
        return data.VtV, data.Vtc, data.B_eq
    raise ValueError(f"block has to be selected from {{'x', 'y'}}, got {block!r}")

def prediction_system(data, lam, rho, eta, r, z_prev, block='x'):
    """Matrix and right-hand side of the stationarity equation

        (2 rho G_0 + (2/eta) sum_i lam_i G_i + r I) z
            = 2 rho h_0 + (2/eta) sum_i lam_i h_i + r z_prev - E^T lam_eq / eta

    with G_i = W_i^T W_i, h_i = W_i^T a_i and E = A (V, c and B for the y
    block)."""
    gram, cross, eq_rows = _block(data, block)
    lam = np.asarray(lam, dtype=np.float64)
    lam_q = lam[:data.p]
    if np.any(lam_q < 0):
        raise ValueError('Quadratic-row multipliers must be nonnegative')
    if not r > 0:
        raise ValueError(f'r must be > 0, got {r}')
    dim = gram.shape[1]
    matrix = 2.0*rho*gram[0] + (2.0/eta)*np.tensordot(lam_q, gram[1:], axes=1) \
        + r*np.eye(dim)
    rhs = 2.0*rho*cross[0] + (2.0/eta)*(lam_q @ cross[1:]) + r*z_prev
    if data.p_eq:
        rhs = rhs - (eq_rows.T @ lam[data.p:])/eta
    return matrix, rhs

def primal_prediction(data, lam, rho, eta, r, z_prev, block='x'):
    """Minimizer of rho ||W0 z - a0||^2 + lam^T Phi(z)/eta + r/2 ||z - z_prev||^2
    over the x block (or the y block with V, c).

    Examples
    --------
    With W0 = 1, a0 = 0, lam = 0, rho = eta = 1, r = 2 and z_prev = 3 the
    system reads 4 z = 6, so z = 1.5.
    """
    matrix, rhs = prediction_system(data, lam, rho, eta, r, z_prev, block)
    return solve_spd(matrix, rhs)

def dual_prediction(data, x_bar, lam, eta, s, y_bar=None):
    """lam_bar = max(lam + (Phi(x_bar) [+ Psi(y_bar)])/(eta s), 0) on the
    quadratic rows; equality rows are not clamped."""
    if not s > 0:
        raise ValueError(f's must be > 0, got {s}')
    lam_hat = np.asarray(lam, dtype=np.float64) \
        + data.constraint_value(x_bar, y_bar)/(eta*s)
    return project_dual(data.dual_domain, lam_hat)
