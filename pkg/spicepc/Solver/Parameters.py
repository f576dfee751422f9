"""Proximal parameters r_k, s_k and the lower bound on the constraint scaling
eta_k that keeps both sequences non-increasing."""
from collections import namedtuple
import math
from spicepc.Exceptions import DegenerateProblemError

ParamState = namedtuple(
    'ParamState', ['k', 'rho', 'eta', 'r', 's', 'mu', 'R_x', 'R_xbar']
)

def compute_r(R_x, eta):
    """r = sqrt(R(x^k)) / eta. Only needs the current point, so it is known
    before the primal prediction."""
    if not R_x > 0:
        raise DegenerateProblemError(
            f'Constraint Jacobian vanishes at the current point (R = {R_x})'
        )
    if not eta > 0:
        raise ValueError(f'eta must be > 0, got {eta}')
    return math.sqrt(R_x)/eta

def compute_s(R_x, R_xbar, eta, mu):
    """s = mu R(x_bar) / (eta sqrt(R(x^k)))."""
    if not R_xbar > 0:
        raise DegenerateProblemError(
            f'Constraint Jacobian vanishes at the predictor (R = {R_xbar})'
        )
    return mu*R_xbar/(eta*math.sqrt(R_x))

def compute_params(R_x, R_xbar, eta, mu):
    """Return (r, s) for the given Jacobian norms and scaling.

    r*s*eta^2 equals mu*R_xbar, so r*s > R_xbar/eta^2 whenever mu > 1, which
    is the positive-definiteness condition of the dual block of G_k.

    Examples
    --------
    >>> compute_params(4.0, 4.0, 1.0, 1.5)
    (2.0, 3.0)
    """
    if not mu > 1:
        raise ValueError(f'mu must be > 1, got {mu}')
    r = compute_r(R_x, eta)
    return r, compute_s(R_x, R_xbar, eta, mu)

def eta_lower_bound(eta_prev, R_x_prev, R_x, R_xbar_prev, R_xbar):
    """Smallest eta_k for which r_k <= r_{k-1} and s_k <= s_{k-1}."""
    for name, value in (
            ('eta_prev', eta_prev), ('R_x_prev', R_x_prev), ('R_x', R_x),
            ('R_xbar_prev', R_xbar_prev), ('R_xbar', R_xbar)
        ):
        if not value > 0:
            raise ValueError(f'{name} must be > 0, got {value}')
    bound_r = eta_prev*math.sqrt(R_x/R_x_prev)
    bound_s = eta_prev*(R_xbar*math.sqrt(R_x_prev))/(R_xbar_prev*math.sqrt(R_x))
    return max(bound_r, bound_s)
