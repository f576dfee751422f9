"""Scaling-aware prediction-correction (Spice) solver.

Each iteration k runs

1. the primal prediction x_bar = argmin rho f(x) + lam^T Phi(x)/eta
   + r/2 ||x - x^k||^2 (and y_bar after x_bar for separable problems),
2. the dual prediction lam_bar = P_Z(lam + (Phi(x_bar) [+ Psi(y_bar)])/(eta s)),
3. the correction x^{k+1} = x_bar + J^T (lam^k - lam_bar)/(eta r) with J
   taken at the predictor, and lam^{k+1} = lam_bar,

with r = sqrt(R(x^k))/eta and s = mu R(x_bar)/(eta sqrt(R(x^k))). For k >= 1
eta is raised to the lower bound that keeps r and s from increasing, with a
margin over the bound only when retrying at the bound itself fails.
"""
from collections import namedtuple
import logging
import time
import warnings
import numpy as np
from numpy.linalg import LinAlgError
from spicepc.Data.constants import (
    DEFAULT_MU, DEFAULT_ETA0, DEFAULT_TOL, DEFAULT_MAX_ITERS,
    DEFAULT_GAP_TOL, DEFAULT_STALL_PATIENCE, ETA_SEARCH_MAX_PASSES,
    ETA_SEARCH_MARGIN, RHO_RESCALE_THRESHOLD, STALL_GAP_RATIO
)
from spicepc.Exceptions import (
    SpiceError, DegenerateProblemError, DivergenceError, EtaSearchError
)
from spicepc.Problem.DualDomain import project_dual
from spicepc.Problem.ProblemInstance import Iterate, eval_objective
from spicepc.Problem.Residuals import kkt_residual
from spicepc.Solver.ExtendedMatrices import gmin_proxy, prediction_gap
from spicepc.Solver.Parameters import (
    ParamState, compute_r, compute_s, eta_lower_bound
)
from spicepc.Solver.Scaling import ScalingSchedule, rho_value
from spicepc.Solver.SolveHistory import IterationRecord, SolveHistory

logger = logging.getLogger(__name__)

EtaSearchResult = namedtuple(
    'EtaSearchResult', ['eta', 'r', 'x_bar', 'y_bar', 'R_xbar', 'passes']
)

class SolveConfig:
    """Settings of a Spice run.

    Parameters
    ----------
    schedule : ScalingSchedule, optional
        Objective scaling rho(t). Defaults to the constant schedule.
    mu : float, default 1.5
        Margin of the parameter rule, must be > 1. Also the largest relative
        margin the eta search puts over the lower bound.
    eta0 : float, default 1
        Constraint scaling of the first iteration.
    tol : float, default 1e-9
        Objective part of the stop rule: |f(x^k) - f(x^{k+1})| <= tol.
    gap_tol : float, default 1e-6
        Prediction part of the stop rule:
        ||w^k - w_bar^k|| <= gap_tol (1 + ||w^k||). A run is converged only
        when both parts hold at the same iteration.
    stall_patience : int, default 200
        Length of a window of consecutive iterations with a flat objective
        but an open prediction gap. If the gap did not shrink below
        STALL_GAP_RATIO of its value at the start of the window, the run
        ends as 'stalled'.
    max_iters : int, default 100000
    eta_max_passes : int, default 64
        Budget of the eta search per iteration.
    mode : str, default 'spice'
        'spice' or 'pc'. The 'pc' baseline fixes rho = eta = 1 and skips the
        eta search while keeping the r, s rules.
    norm : str, default 'spectral'
        Norm used in R(.): 'spectral' or 'frobenius'.
    frozen_rho_at : int, optional
        If given, rho = rho(frozen_rho_at) at every iteration instead of
        rho(k).
    diagnostics : bool, default False
        Keep full iterates, predictors and Jacobians in the history.
    rho_rescale_threshold : float, default 1e6
        Above this rho the prediction subproblem is divided by rho.
    """
    MODES = ('spice', 'pc')
    NORMS = ('spectral', 'frobenius')

    def __init__(
            self, schedule=None, mu=DEFAULT_MU, eta0=DEFAULT_ETA0,
            tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS,
            gap_tol=DEFAULT_GAP_TOL, stall_patience=DEFAULT_STALL_PATIENCE,
            eta_max_passes=ETA_SEARCH_MAX_PASSES, mode='spice',
            norm='spectral', frozen_rho_at=None, diagnostics=False,
            rho_rescale_threshold=RHO_RESCALE_THRESHOLD
        ) -> None:
        if schedule is None:
            schedule = ScalingSchedule('constant')
        if not isinstance(schedule, ScalingSchedule):
            raise TypeError(
                f'schedule must be a ScalingSchedule, got {type(schedule)}'
            )
        if mode not in self.MODES:
            raise ValueError(
                f"mode has to be selected from {set(self.MODES)}, got {mode!r}"
            )
        if norm not in self.NORMS:
            raise ValueError(
                f"norm has to be selected from {set(self.NORMS)}, got {norm!r}"
            )
        if not mu > 1:
            raise ValueError(f'mu must be > 1, got {mu}')
        if not eta0 > 0:
            raise ValueError(f'eta0 must be > 0, got {eta0}')
        if not tol > 0:
            raise ValueError(f'tol must be > 0, got {tol}')
        if not gap_tol > 0:
            raise ValueError(f'gap_tol must be > 0, got {gap_tol}')
        if stall_patience < 1:
            raise ValueError(
                f'stall_patience must be >= 1, got {stall_patience}'
            )
        if max_iters < 1:
            raise ValueError(f'max_iters must be >= 1, got {max_iters}')
        if eta_max_passes < 1:
            raise ValueError(
                f'eta_max_passes must be >= 1, got {eta_max_passes}'
            )
        if frozen_rho_at is not None and frozen_rho_at < 0:
            raise ValueError(
                f'frozen_rho_at must be >= 0, got {frozen_rho_at}'
            )
        if not rho_rescale_threshold > 0:
            raise ValueError(
                'rho_rescale_threshold must be > 0, '
                f'got {rho_rescale_threshold}'
            )
        if frozen_rho_at is not None and schedule.kind == 'constant':
            warnings.warn(
                'frozen_rho_at has no effect with a constant schedule',
                UserWarning
            )
        self.schedule = schedule
        self.mu = float(mu)
        self.eta0 = float(eta0)
        self.tol = float(tol)
        self.max_iters = int(max_iters)
        self.gap_tol = float(gap_tol)
        self.stall_patience = int(stall_patience)
        self.eta_max_passes = int(eta_max_passes)
        self.mode = mode
        self.norm = norm
        self.frozen_rho_at = frozen_rho_at
        self.diagnostics = bool(diagnostics)
        self.rho_rescale_threshold = float(rho_rescale_threshold)

    def __repr__(self):
        return (
            f"<SolveConfig mode={self.mode} schedule={self.schedule!r} "
            f"mu={self.mu} tol={self.tol} gap_tol={self.gap_tol} "
            f"max_iters={self.max_iters}>"
        )

    def rho_at(self, k):
        """rho used at iteration k."""
        if self.mode == 'pc':
            return 1.0
        if self.frozen_rho_at is not None:
            return rho_value(self.schedule, self.frozen_rho_at)
        return rho_value(self.schedule, k)

def predict_primal(inst, it, rho, eta, r, rho_rescale_threshold=RHO_RESCALE_THRESHOLD):
    """Primal predictor(s) (x_bar, y_bar). y_bar is None for single-block
    problems.

    Above the rescale threshold the subproblem is passed to the oracle as
    f(x) + lam^T Phi(x)/(eta rho) + (r/rho)/2 ||x - x^k||^2, which has the same
    minimizer.
    """
    if rho > rho_rescale_threshold:
        rho, eta, r = 1.0, eta*rho, r/rho
    x_bar = inst.predict_primal_x(it.lam, rho, eta, r, it.x, it.y)
    y_bar = None
    if inst.is_separable:
        y_bar = inst.predict_primal_y(it.lam, rho, eta, r, it.y, x_bar)
    return x_bar, y_bar

def predict_dual(inst, lam, x_bar, y_bar, eta, s):
    """lam_bar = P_Z(lam + (Phi(x_bar) [+ Psi(y_bar)])/(eta s))."""
    lam_hat = lam + inst.constraint_value(x_bar, y_bar)/(eta*s)
    return project_dual(inst.dual_domain, lam_hat)

def predict(inst, it, params, rho_rescale_threshold=RHO_RESCALE_THRESHOLD):
    """Predictor w_bar at the iterate for fully known parameters.

    Examples
    --------
    For f(x) = x^2 (W0 = 1, a0 = 0), lam = 0, rho = eta = 1, r = 2 and x = 3
    the primal predictor is (2*0 + 2*3)/(2 + 2) = 1.5.
    """
    x_bar, y_bar = predict_primal(
        inst, it, params.rho, params.eta, params.r, rho_rescale_threshold
    )
    lam_bar = predict_dual(inst, it.lam, x_bar, y_bar, params.eta, params.s)
    return Iterate(x_bar, y_bar, lam_bar)

def correct(it, w_bar, params, jac_x, jac_y=None):
    """Apply the upper-triangular correction. The dual block is copied from
    the predictor; the primal blocks move along the predictor Jacobians."""
    delta_lam = it.lam - w_bar.lam
    factor = 1.0/(params.eta*params.r)
    x_next = w_bar.x + factor*(jac_x.T @ delta_lam)
    y_next = None
    if w_bar.y is not None:
        y_next = w_bar.y + factor*(jac_y.T @ delta_lam)
    return Iterate(x_next, y_next, w_bar.lam.copy())

def eta_search(inst, it, eta_prev, R_x_prev, R_xbar_prev, config, rho=1.0, R_x=None):
    """Smallest eta found from eta_prev upward that meets the lower bound
    computed with R at the resulting predictor.

    The first pass tries eta_prev. Each failed pass retries at the bound it
    reported, exactly on the second pass and then with a relative margin
    that starts at ETA_SEARCH_MARGIN and grows by 1000 per pass up to
    mu - 1. The accepted eta therefore stays within a factor mu of the
    bound, and one jump of R does not keep eta above the bound afterwards.

    Returns
    -------
    EtaSearchResult
        Accepted eta, the r it implies, the primal predictor(s), R at the
        predictor and the number of passes used.

    Raises
    ------
    EtaSearchError
        If the bound is not met within config.eta_max_passes passes.
    """
    if R_x is None:
        R_x = inst.jacobian_norm(it.x, it.y, config.norm)
    eta = eta_prev
    margin = 0.0
    r = required = None
    x_bar = y_bar = None
    for passes in range(1, config.eta_max_passes+1):
        if passes > 2:
            margin = min(max(margin*1000, ETA_SEARCH_MARGIN), config.mu - 1)
        if passes > 1:
            # required > eta here, so eta grows on every retry
            eta = required*(1 + margin)
        r = compute_r(R_x, eta)
        x_bar, y_bar = predict_primal(
            inst, it, rho, eta, r, config.rho_rescale_threshold
        )
        R_xbar = inst.jacobian_norm(x_bar, y_bar, config.norm)
        if not R_xbar > 0:
            raise DegenerateProblemError(
                f'Constraint Jacobian vanishes at the predictor (R = {R_xbar})'
            )
        required = eta_lower_bound(eta_prev, R_x_prev, R_x, R_xbar_prev, R_xbar)
        logger.debug(
            'eta search pass %d: eta=%.6e required=%.6e', passes, eta, required
        )
        if eta >= required:
            return EtaSearchResult(eta, r, x_bar, y_bar, R_xbar, passes)
    raise EtaSearchError(
        f'eta search did not reach the required {required:.6e} within '
        f'{config.eta_max_passes} passes (last eta {eta:.6e})',
        eta=eta, r=r, required=required,
        passes=config.eta_max_passes, predictor=(x_bar, y_bar)
    )

def _check_finite(it, name):
    for block in (it.x, it.y, it.lam):
        if block is not None and not np.all(np.isfinite(block)):
            raise DivergenceError(f'{name} has non-finite entries')

class SpiceSolver:
    """Runs the Spice iteration on a ProblemInstance.

    Parameters
    ----------
    instance : ProblemInstance
    config : SolveConfig, optional

    Examples
    --------
    >>> solver = SpiceSolver(instance, SolveConfig(ScalingSchedule('constant')))
    >>> history = solver.solve(x0)
    >>> history.status
    'converged'
    """
    def __init__(self, instance, config=None) -> None:
        self.instance = instance
        self.config = config if config is not None else SolveConfig()

    def __repr__(self):
        return f"<SpiceSolver {self.instance!r} {self.config!r}>"

    def _bootstrap_prediction(self, it, rho, R_x):
        cfg = self.config
        eta = 1.0 if cfg.mode == 'pc' else cfg.eta0
        r = compute_r(R_x, eta)
        x_bar, y_bar = predict_primal(
            self.instance, it, rho, eta, r, cfg.rho_rescale_threshold
        )
        R_xbar = self.instance.jacobian_norm(x_bar, y_bar, cfg.norm)
        return EtaSearchResult(eta, r, x_bar, y_bar, R_xbar, 1)

    def predict_step(self, k, it, prev=None):
        """Parameters and predictor of iteration k. `prev` is the ParamState
        of iteration k-1 (None at k = 0)."""
        inst, cfg = self.instance, self.config
        rho = cfg.rho_at(k)
        R_x = inst.jacobian_norm(it.x, it.y, cfg.norm)
        if prev is None or cfg.mode == 'pc':
            found = self._bootstrap_prediction(it, rho, R_x)
        else:
            found = eta_search(
                inst, it, prev.eta, prev.R_x, prev.R_xbar, cfg,
                rho=rho, R_x=R_x
            )
        s = compute_s(R_x, found.R_xbar, found.eta, cfg.mu)
        params = ParamState(
            k, rho, found.eta, found.r, s, cfg.mu, R_x, found.R_xbar
        )
        lam_bar = predict_dual(
            inst, it.lam, found.x_bar, found.y_bar, found.eta, s
        )
        w_bar = Iterate(found.x_bar, found.y_bar, lam_bar)
        return params, w_bar, found.passes

    def solve(self, x0, lam0=None, y0=None):
        """Run until the stop rule holds or max_iters.

        The run is 'converged' when |f(x^k) - f(x^{k+1})| <= tol and
        ||w^k - w_bar^k|| <= gap_tol (1 + ||w^k||) hold at the same
        iteration. A flat objective alone is not enough; when it stays flat
        for stall_patience iterations in a row and the gap does not shrink
        over that window the run ends as 'stalled'.

        Algorithmic failures do not raise; they end the run with a terminal
        status ('eta_search_failed', 'diverged', 'degenerate' or
        'oracle_failed') and a message on the history.
        """
        inst, cfg = self.instance, self.config
        it = inst.make_iterate(x0, lam0, y0)
        if not inst.dual_domain.contains(it.lam):
            raise ValueError('lam0 is outside the dual domain')
        history = SolveHistory(inst, cfg)
        f_k = eval_objective(inst, it)
        history.start(it, f_k)
        logger.info(
            'Spice solve on %r: %r, initial f=%.10e', inst, cfg, f_k
        )
        t_start = time.perf_counter()
        prev = None
        flat, gap_ref, last_gap = 0, None, np.inf
        with np.errstate(over='raise'):
            for k in range(cfg.max_iters):
                try:
                    params, w_bar, passes = self.predict_step(k, it, prev)
                    jacs = inst.jacobians(w_bar.x, w_bar.y)
                    it_next = correct(it, w_bar, params, *jacs)
                    _check_finite(it_next, f'iterate {k+1}')
                    f_next = eval_objective(inst, it_next)
                    if not np.isfinite(f_next):
                        raise DivergenceError(f'objective at iterate {k+1} is {f_next}')
                except EtaSearchError as exc:
                    history.finish('eta_search_failed', str(exc))
                    break
                except DegenerateProblemError as exc:
                    history.finish('degenerate', str(exc))
                    break
                except (DivergenceError, FloatingPointError) as exc:
                    history.finish('diverged', f'iteration {k}: {exc}')
                    break
                except (SpiceError, LinAlgError, ValueError) as exc:
                    history.finish('oracle_failed', f'iteration {k}: {exc}')
                    break
                delta_f = abs(f_k - f_next)
                gap = prediction_gap(it, w_bar)
                w_norm = float(np.linalg.norm(it.stacked()))
                gap_ok = gap <= cfg.gap_tol*(1 + w_norm)
                record = IterationRecord(
                    k, f_next, delta_f, params.rho, params.eta, params.r,
                    params.s, gap,
                    kkt_residual(inst, it_next).feasibility,
                    gmin_proxy(params), params.R_x, params.R_xbar, passes
                )
                history.append(record, params, it_next, w_bar, jacs)
                logger.debug(
                    'k=%d f=%.10e delta_f=%.3e rho=%.3e eta=%.3e r=%.3e '
                    's=%.3e passes=%d', k, f_next, delta_f, params.rho,
                    params.eta, params.r, params.s, passes
                )
                it, f_k, prev = it_next, f_next, params
                if delta_f > cfg.tol:
                    flat, last_gap = 0, gap
                    continue
                if gap_ok:
                    history.finish('converged')
                    break
                if flat == 0:
                    gap_ref = last_gap
                last_gap = gap
                flat += 1
                if flat < cfg.stall_patience:
                    continue
                if gap > STALL_GAP_RATIO*gap_ref:
                    history.finish(
                        'stalled',
                        f'objective flat for {flat} iterations while the '
                        f'prediction gap went from {gap_ref:.3e} to {gap:.3e}'
                    )
                    break
                flat = 0
            else:
                history.finish(
                    'max_iters', f'no convergence within {cfg.max_iters} iterations'
                )
                warnings.warn(
                    f'Spice stopped at max_iters={cfg.max_iters} with '
                    f'delta_f={history.records[-1].delta_f:.3e}', UserWarning
                )
        history.wall_time = time.perf_counter() - t_start
        if history.converged:
            logger.info(
                'Converged in %d iterations, f=%.10e', history.iterations,
                history.final_f
            )
        else:
            logger.info(
                'Stopped with status %s after %d iterations: %s',
                history.status, history.iterations, history.message
            )
        return history

def solve(inst, config=None, x0=None, lam0=None, y0=None):
    """Run Spice from (x0, [y0,] lam0); x0 defaults to zeros and lam0 to
    zeros."""
    if x0 is None:
        x0 = np.zeros(inst.n)
    return SpiceSolver(inst, config).solve(x0, lam0, y0)
