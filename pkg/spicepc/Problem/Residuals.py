"""Optimality residuals reported in place of a subgradient stationarity
measure (the objective may be nonsmooth)."""
from collections import namedtuple
import numpy as np
from numpy.linalg import norm

KKTResidual = namedtuple(
    'KKTResidual', ['feasibility', 'complementarity', 'stationarity']
)

def kkt_residual(inst, it, predictor=None):
    """Feasibility, complementarity and a stationarity proxy at `it`.

    Parameters
    ----------
    inst : ProblemInstance
    it : Iterate
        Point at which the residuals are measured.
    predictor : Iterate, optional
        The most recent predictor computed at `it`. The stationarity proxy is
        ||w - w_bar||, or 0 if no predictor is given.

    Returns
    -------
    KKTResidual
        feasibility is max(phi_i, 0) over inequality rows and |phi_i| over
        equality rows; complementarity is max |lam_i * phi_i| over inequality
        rows.

    Examples
    --------
    For phi(x) = x^2 - 1 at x = 2 with lam = 1, feasibility and
    complementarity are both 3.
    """
    phi = inst.constraint_value(it.x, it.y)
    mask = inst.dual_domain.nonneg_mask
    viol = np.where(mask, np.maximum(phi, 0.0), np.abs(phi))
    feasibility = float(viol.max(initial=0.0))
    if mask.any():
        complementarity = float(np.abs(it.lam[mask]*phi[mask]).max())
    else:
        complementarity = 0.0
    if predictor is None:
        stationarity = 0.0
    else:
        stationarity = float(norm(it.stacked() - predictor.stacked()))
    return KKTResidual(feasibility, complementarity, stationarity)
