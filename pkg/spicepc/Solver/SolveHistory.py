"""Per-iteration records of a Spice run and the ergodic averages of its
predictors."""
from collections import namedtuple
import numpy as np
import pandas as pd
from spicepc.Data.constants import HISTORY_COLUMNS

IterationRecord = namedtuple(
    'IterationRecord',
    list(HISTORY_COLUMNS) + ['R_x', 'R_xbar', 'eta_passes']
)
IterationRecord.__doc__ = """One completed iteration. `f` is the objective at
x^{k+1} and `delta_f` is |f(x^k) - f(x^{k+1})|."""

ErgodicAverage = namedtuple('ErgodicAverage', ['u_bar', 'eta', 'w_bar'])

TERMINAL_STATUSES = (
    'converged', 'max_iters', 'stalled', 'eta_search_failed', 'diverged',
    'degenerate', 'oracle_failed'
)

class SolveHistory:
    """Record of a solve.

    Scalars (one IterationRecord and one ParamState per iteration) and the
    ergodic accumulators are always kept. Full iterates, predictors and
    predictor Jacobians are kept only when the run has diagnostics enabled.
    """
    def __init__(self, instance, config) -> None:
        self.instance = instance
        self.config = config
        self.diagnostics = config.diagnostics
        self.records = []
        self.params = []
        self.iterates = []
        self.predictors = []
        self.jacobians = []
        self.initial = None
        self.initial_f = None
        self.final = None
        self.last_predictor = None
        self.status = None
        self.message = ''
        self.wall_time = None
        self._sum_u_bar = None
        self._sum_inv_eta = 0.0
        self._sum_w_bar_over_eta = None

    def __repr__(self):
        return (
            f"<SolveHistory status={self.status} iterations={self.iterations}>"
        )

    def __len__(self):
        return len(self.records)

    @property
    def iterations(self):
        return len(self.records)

    @property
    def converged(self):
        return self.status == 'converged'

    @property
    def final_f(self):
        if self.records:
            return self.records[-1].f
        return self.initial_f

    @property
    def final_feas(self):
        if self.records:
            return self.records[-1].feas
        return None

    def start(self, it, f0):
        self.initial = it.copy()
        self.final = it
        self.initial_f = f0
        if self.diagnostics:
            self.iterates.append(it.copy())

    def append(self, record, params, it_next, predictor, jacobians):
        """Add a completed iteration. `jacobians` is (DPhi(x_bar), DPsi(y_bar))
        and is only stored with diagnostics on."""
        self.records.append(record)
        self.params.append(params)
        self.final = it_next
        self.last_predictor = predictor
        u_bar = predictor.u
        w_bar = predictor.stacked()
        if self._sum_u_bar is None:
            self._sum_u_bar = np.zeros_like(u_bar)
            self._sum_w_bar_over_eta = np.zeros_like(w_bar)
        self._sum_u_bar += u_bar
        self._sum_inv_eta += 1.0/params.eta
        self._sum_w_bar_over_eta += w_bar/params.eta
        if self.diagnostics:
            self.iterates.append(it_next.copy())
            self.predictors.append(predictor.copy())
            self.jacobians.append(jacobians)

    def finish(self, status, message=''):
        if status not in TERMINAL_STATUSES:
            raise ValueError(
                f"status has to be selected from {set(TERMINAL_STATUSES)}, "
                f"got {status!r}"
            )
        self.status = status
        self.message = message

    def to_dataframe(self, extra=False):
        """Records as a DataFrame with the history CSV columns, plus R_x,
        R_xbar and eta_passes if `extra` is True."""
        columns = list(IterationRecord._fields) if extra \
            else list(HISTORY_COLUMNS)
        df = pd.DataFrame(self.records, columns=IterationRecord._fields)
        return df[columns]

    def summary(self):
        """Scalar outcome of the run."""
        return {
            'status': self.status,
            'iterations': self.iterations,
            'final_f': self.final_f,
            'final_feas': self.final_feas,
        }

def ergodic_average(h, t=None):
    """Ergodic averages over the predictors 0..t.

    u_bar is the plain mean of the primal predictors, eta is
    (t+1) / sum(1/eta_k) and w_bar is sum(w_bar^k/eta_k) / sum(1/eta_k).
    Without `t` the running accumulators of the whole run are used; a given
    `t` needs the stored predictors of a diagnostics run.
    """
    if not h.records:
        raise ValueError('ergodic_average needs a nonempty history')
    if t is None or t == h.iterations - 1:
        count = h.iterations
        return ErgodicAverage(
            h._sum_u_bar/count,
            count/h._sum_inv_eta,
            h._sum_w_bar_over_eta/h._sum_inv_eta
        )
    if not 0 <= t < h.iterations:
        raise ValueError(f't must be in [0, {h.iterations-1}], got {t}')
    if not h.diagnostics:
        raise ValueError(
            'Averages at an intermediate t need a run with diagnostics on'
        )
    inv_eta = np.array([1.0/p.eta for p in h.params[:t+1]])
    u_bars = np.array([w.u for w in h.predictors[:t+1]])
    w_bars = np.array([w.stacked() for w in h.predictors[:t+1]])
    return ErgodicAverage(
        u_bars.mean(axis=0),
        (t+1)/inv_eta.sum(),
        inv_eta @ w_bars/inv_eta.sum()
    )
