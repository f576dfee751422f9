"""Extended matrices of one Spice iteration and the run-level checks built on
them.

For stacked w = (x, [y,] lam) and predictor Jacobian J = [DPhi(x_bar)
[, DPsi(y_bar)]], the predictive and corrective matrices are

    Q_k = [[r I, -J^T/eta], [0, s I]]
    M_k = [[I, -J^T/(eta r)], [0, I]]

so that H_k = Q_k M_k^{-1} = diag(r I, s I) and
G_k = Q_k^T + Q_k - M_k^T H_k M_k = diag(r I, s I - J J^T/(eta^2 r)).
"""
from collections import namedtuple
import numpy as np
import pandas as pd
from numpy.linalg import norm
from spicepc.Problem.ProblemInstance import Iterate, eval_objective, gamma_operator
from spicepc.Solver.SolveHistory import ergodic_average
from spicepc.Utils.VectorUtils import diag_weighted_norm_sq, split_blocks

ExtendedMatrixSet = namedtuple('ExtendedMatrixSet', ['Q', 'M', 'H', 'G'])

def _stacked_jacobian(jac_x, jac_y=None):
    if jac_y is None:
        return np.asarray(jac_x, dtype=np.float64)
    return np.hstack([jac_x, jac_y])

def h_weights(params, n_primal, p):
    """Diagonal of H_k."""
    return np.concatenate([np.full(n_primal, params.r), np.full(p, params.s)])

def build_matrices(params, jac_x, jac_y=None):
    """Materialize Q_k, M_k, H_k and G_k for the given parameters and
    predictor Jacobian(s).

    Parameters
    ----------
    params : ParamState
    jac_x : (p, n) array_like
        DPhi at the primal predictor.
    jac_y : (p, m) array_like, optional
        DPsi at the second predictor for separable problems.

    Returns
    -------
    ExtendedMatrixSet
        Dense (n[+m]+p) square matrices.
    """
    J = _stacked_jacobian(jac_x, jac_y)
    p, n_primal = J.shape
    dim = n_primal + p
    eta, r, s = params.eta, params.r, params.s
    Q = np.zeros((dim, dim))
    Q[:n_primal, :n_primal] = r*np.eye(n_primal)
    Q[:n_primal, n_primal:] = -J.T/eta
    Q[n_primal:, n_primal:] = s*np.eye(p)
    M = np.eye(dim)
    M[:n_primal, n_primal:] = -J.T/(eta*r)
    H = np.diag(h_weights(params, n_primal, p))
    G = np.zeros((dim, dim))
    G[:n_primal, :n_primal] = r*np.eye(n_primal)
    G[n_primal:, n_primal:] = s*np.eye(p) - (J @ J.T)/(eta**2*r)
    return ExtendedMatrixSet(Q, M, H, G)

def difference_matrix(p_k, p_k1, n_primal, p):
    """D_k = H_k - H_{k+1}; diagonal and positive semidefinite whenever
    r and s are non-increasing."""
    return np.diag(h_weights(p_k, n_primal, p) - h_weights(p_k1, n_primal, p))

def gmin_proxy(params):
    """Lower bound of the smallest eigenvalue of G_k:
    min(r, s - R(x_bar)/(eta^2 r)). Equals s(1 - 1/mu) in the dual block
    whenever R is the squared spectral norm."""
    dual = params.s - params.R_xbar/(params.eta**2*params.r)
    return min(params.r, dual)

def g_norm_sq(delta_u, delta_lam, params, jac_x, jac_y=None):
    """||(delta_u, delta_lam)||^2 under G_k without forming G_k."""
    J = _stacked_jacobian(jac_x, jac_y)
    coupled = J.T @ delta_lam
    return float(
        params.r*(delta_u @ delta_u) + params.s*(delta_lam @ delta_lam)
        - (coupled @ coupled)/(params.eta**2*params.r)
    )

def quadratic_form_symmetric_part(Q, w):
    """w^T ((Q + Q^T)/2) w, which equals w^T Q w for any square Q."""
    Q = np.asarray(Q, dtype=np.float64)
    return float(w @ (0.5*(Q + Q.T)) @ w)

def scaled_reference(w_ref, rho, eta):
    """Solution of the scaled problem: the multipliers of the unscaled
    solution multiplied by rho*eta."""
    return Iterate(w_ref.x, w_ref.y, rho*eta*w_ref.lam)

def _require_diagnostics(h):
    if not h.diagnostics:
        raise ValueError('This check needs a run with diagnostics on')
    if not h.records:
        raise ValueError('History is empty')

def check_contraction(h, w_ref):
    """Largest violation over the run of

        ||w* - w^{k+1}||_H^2 + ||w^k - w_bar^k||_G^2 - ||w* - w^k||_H^2 <= 0

    where w* is `w_ref` (unscaled multipliers) with its dual rescaled by
    rho_k*eta_k for iteration k.
    """
    _require_diagnostics(h)
    inst = h.instance
    n_primal = inst.n + (inst.m or 0)
    worst = -np.inf
    for k, params in enumerate(h.params):
        w_k = h.iterates[k]
        w_k1 = h.iterates[k+1]
        w_bar = h.predictors[k]
        jac_x, jac_y = h.jacobians[k]
        weights = h_weights(params, n_primal, inst.p)
        w_star = scaled_reference(w_ref, params.rho, params.eta).stacked()
        after = diag_weighted_norm_sq(w_star - w_k1.stacked(), weights)
        before = diag_weighted_norm_sq(w_star - w_k.stacked(), weights)
        gap = g_norm_sq(
            w_k.u - w_bar.u, w_k.lam - w_bar.lam, params, jac_x, jac_y
        )
        worst = max(worst, after + gap - before)
    return float(worst)

def ergodic_error_bound(h, w_ref, f_ref):
    """Both sides of the ergodic error estimate at every recorded t.

    The left side is the objective gap at the averaged primal predictor plus
    (w_bar_t - w*)^T Gamma(w*) / (eta_t rho(t)); the right side is
    ||w* - w^0||^2 / (2 eta_0 rho(t) (t+1)) in the eta-free initial norm
    diag(eta_0 r_0 I, eta_0 s_0 I). The multipliers of w* are scaled by
    rho(t)*eta_t.

    Returns
    -------
    pandas.DataFrame
        Columns t, objective_gap, gamma_term, lhs, rhs.
    """
    _require_diagnostics(h)
    inst = h.instance
    n_primal = inst.n + (inst.m or 0)
    p0 = h.params[0]
    weights0 = h_weights(p0, n_primal, inst.p)*p0.eta
    w0 = h.initial.stacked()
    rows = []
    for t in range(h.iterations):
        avg = ergodic_average(h, t)
        rho_t = h.config.rho_at(t)
        w_star = scaled_reference(w_ref, rho_t, avg.eta)
        x_bar, y_bar = split_blocks(avg.u_bar, (inst.n, inst.m))
        gap = eval_objective(inst, Iterate(x_bar, y_bar, w_ref.lam)) - f_ref
        gamma_term = float(
            (avg.w_bar - w_star.stacked()) @ gamma_operator(inst, w_star)
        )/(avg.eta*rho_t)
        rhs = diag_weighted_norm_sq(w_star.stacked() - w0, weights0) \
            /(2*p0.eta*rho_t*(t+1))
        rows.append((t, gap, gamma_term, gap + gamma_term, rhs))
    return pd.DataFrame(
        rows, columns=['t', 'objective_gap', 'gamma_term', 'lhs', 'rhs']
    )

def prediction_gap(w_k, w_bar):
    """||w^k - w_bar^k||."""
    return float(norm(w_k.stacked() - w_bar.stacked()))
