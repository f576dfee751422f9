"""Seeded generation of the least-squares QCQP experiment family.

Single-block:

    min ||W0 x - a0||^2  s.t.  ||Wi x - ai||^2 <= pi_i,  i = 1..p
                               [A x = b]

Separable:

    min ||W0 x - a0||^2 + ||V0 y - c0||^2
    s.t. ||Wi x - ai||^2 + ||Vi y - ci||^2 <= pi_i,  i = 1..p
         [A x + B y = b]
"""
import logging
import numpy as np
from numpy.linalg import lstsq
from spicepc.Data.constants import (
    SCALE_W0, SCALE_A0, SCALE_WI, SCALE_AI, PAPER_DIMS, PAPER_PI_SINGLE,
    PAPER_PI_SEPARABLE, ACTIVE_PI_FRACTION
)
from spicepc.Exceptions import DimensionError
from spicepc.Numerics.SeededRng import ALGORITHM_ID, SeededRng, gaussian_matrix, gaussian_vector
from spicepc.Problem.DualDomain import DualDomain
from spicepc.Problem.ProblemInstance import ProblemInstance
from spicepc.Qcqp.QcqpPrediction import primal_prediction

logger = logging.getLogger(__name__)

class QcqpConfig:
    """Dimensions, scales, bound and seed of one generated instance.

    Parameters
    ----------
    n : int
        Dimension of x.
    q : int
        Row count of every W_i (and V_i).
    p : int
        Number of quadratic constraints.
    m : int, optional
        Dimension of y. Makes the instance separable when given.
    pi : float, optional
        Bound applied to all quadratic constraints. If None, the standard
        values are used at paper scale and otherwise pi is set to half the
        smallest constraint value at the unconstrained least-squares point,
        which keeps every constraint active.
    seed : int, default 0
    scale_w0, scale_a0, scale_wi, scale_ai : float
        Standard deviations of the entries of W0 (and V0), a0 (and c0),
        W_i (and V_i) and a_i (and c_i).
    p_eq : int, default 0
        Number of linear equality rows appended after the quadratic rows.
    """
    def __init__(
            self, n, q, p, m=None, pi=None, seed=0, scale_w0=SCALE_W0,
            scale_a0=SCALE_A0, scale_wi=SCALE_WI, scale_ai=SCALE_AI, p_eq=0
        ) -> None:
        for name, value in (('n', n), ('q', q), ('p', p)):
            if value < 1:
                raise ValueError(f'{name} must be >= 1, got {value}')
        if m is not None and m < 1:
            raise ValueError(f'm must be >= 1, got {m}')
        if pi is not None and not pi > 0:
            raise ValueError(f'pi must be > 0, got {pi}')
        if p_eq < 0:
            raise ValueError(f'p_eq must be >= 0, got {p_eq}')
        for name, value in (
                ('scale_w0', scale_w0), ('scale_a0', scale_a0),
                ('scale_wi', scale_wi), ('scale_ai', scale_ai)
            ):
            if not np.isfinite(value):
                raise ValueError(f'{name} must be finite, got {value}')
        self.n = int(n)
        self.q = int(q)
        self.p = int(p)
        self.m = None if m is None else int(m)
        self.pi = None if pi is None else float(pi)
        self.seed = int(seed)
        self.scale_w0 = float(scale_w0)
        self.scale_a0 = float(scale_a0)
        self.scale_wi = float(scale_wi)
        self.scale_ai = float(scale_ai)
        self.p_eq = int(p_eq)

    def __repr__(self):
        dims = f"n={self.n}" + (f" m={self.m}" if self.m else '')
        return (
            f"<QcqpConfig {self.problem} {dims} q={self.q} p={self.p} "
            f"p_eq={self.p_eq} seed={self.seed}>"
        )

    @property
    def problem(self):
        return 'single' if self.m is None else 'separable'

    @property
    def is_paper_scale(self):
        n, m, q, p = PAPER_DIMS
        if (self.n, self.q, self.p) != (n, q, p):
            return False
        return self.m is None or self.m == m

    @property
    def scales(self):
        return {
            'w0': self.scale_w0, 'a0': self.scale_a0,
            'wi': self.scale_wi, 'ai': self.scale_ai
        }

class QcqpData:
    """Matrices and bounds of one instance, with the Gram products the
    prediction system needs.

    W and V are stacked as (p+1, q, n) and (p+1, q, m) arrays with index 0
    holding the objective block; a and c are (p+1, q). The bound pi is carried
    entirely by the x-part of each constraint, and the equality right-hand
    side b is split in halves between the x- and y-parts of separable
    instances.
    """
    def __init__(
            self, W, a, pi, V=None, c=None, A_eq=None, B_eq=None, b_eq=None,
            meta=None
        ) -> None:
        self.W = np.asarray(W, dtype=np.float64)
        self.a = np.asarray(a, dtype=np.float64)
        self.pi = np.asarray(pi, dtype=np.float64)
        if self.W.ndim != 3 or self.a.shape != self.W.shape[:2]:
            raise DimensionError(
                f'W has shape {self.W.shape} and a has shape {self.a.shape}'
            )
        if self.pi.shape != (self.W.shape[0]-1,):
            raise DimensionError(
                f'pi has shape {self.pi.shape}, expected ({self.W.shape[0]-1},)'
            )
        self.V = None if V is None else np.asarray(V, dtype=np.float64)
        self.c = None if c is None else np.asarray(c, dtype=np.float64)
        if (self.V is None) != (self.c is None):
            raise ValueError('V and c must be given together')
        if self.V is not None and (
                self.V.shape[:2] != self.W.shape[:2]
                or self.c.shape != self.a.shape
            ):
            raise DimensionError(
                f'V has shape {self.V.shape} and c has shape {self.c.shape}'
            )
        self.A_eq = None if A_eq is None else np.asarray(A_eq, dtype=np.float64)
        self.B_eq = None if B_eq is None else np.asarray(B_eq, dtype=np.float64)
        self.b_eq = None if b_eq is None else np.asarray(b_eq, dtype=np.float64)
        if self.A_eq is not None:
            if self.b_eq is None or self.A_eq.shape != (len(self.b_eq), self.n):
                raise DimensionError('A_eq and b_eq do not match')
            if self.is_separable and (
                    self.B_eq is None or self.B_eq.shape != (len(self.b_eq), self.m)
                ):
                raise DimensionError('B_eq and b_eq do not match')
        self.meta = dict(meta or {})
        self.WtW, self.Wta = self._gram(self.W, self.a)
        self.VtV = self.Vtc = None
        if self.is_separable:
            self.VtV, self.Vtc = self._gram(self.V, self.c)

    @staticmethod
    def _gram(mats, vecs):
        gram = np.einsum('iqj,iqk->ijk', mats, mats)
        gram = 0.5*(gram + gram.transpose(0, 2, 1))
        return gram, np.einsum('iqj,iq->ij', mats, vecs)

    def __repr__(self):
        dims = f"n={self.n}" + (f" m={self.m}" if self.is_separable else '')
        return f"<QcqpData {dims} q={self.q} p={self.p} p_eq={self.p_eq}>"

    @property
    def n(self):
        return self.W.shape[2]

    @property
    def m(self):
        return None if self.V is None else self.V.shape[2]

    @property
    def q(self):
        return self.W.shape[1]

    @property
    def p(self):
        """Number of quadratic (inequality) rows."""
        return self.W.shape[0] - 1

    @property
    def p_eq(self):
        return 0 if self.b_eq is None else len(self.b_eq)

    @property
    def is_separable(self):
        return self.V is not None

    @property
    def dual_domain(self):
        return DualDomain.mixed(self.p, self.p_eq)

    def _b_share(self):
        return 0.5*self.b_eq if self.is_separable else self.b_eq

    def objective_x(self, x):
        res = self.W[0] @ x - self.a[0]
        return float(res @ res)

    def objective_y(self, y):
        res = self.V[0] @ y - self.c[0]
        return float(res @ res)

    def objective_grad_x(self, x):
        return 2.0*(self.WtW[0] @ x - self.Wta[0])

    def objective_grad_y(self, y):
        return 2.0*(self.VtV[0] @ y - self.Vtc[0])

    def constraint_x(self, x):
        """Phi(x): ||W_i x - a_i||^2 - pi_i, then A x - b (or b/2)."""
        res = self.W[1:] @ x - self.a[1:]
        values = np.einsum('iq,iq->i', res, res) - self.pi
        if self.p_eq:
            values = np.concatenate([values, self.A_eq @ x - self._b_share()])
        return values

    def constraint_y(self, y):
        """Psi(y): ||V_i y - c_i||^2, then B y - b/2."""
        res = self.V[1:] @ y - self.c[1:]
        values = np.einsum('iq,iq->i', res, res)
        if self.p_eq:
            values = np.concatenate([values, self.B_eq @ y - 0.5*self.b_eq])
        return values

    def jacobian_x(self, x):
        """Rows 2 (W_i^T (W_i x - a_i))^T, then A."""
        rows = 2.0*(self.WtW[1:] @ x - self.Wta[1:])
        if self.p_eq:
            rows = np.vstack([rows, self.A_eq])
        return rows

    def jacobian_y(self, y):
        rows = 2.0*(self.VtV[1:] @ y - self.Vtc[1:])
        if self.p_eq:
            rows = np.vstack([rows, self.B_eq])
        return rows

    def constraint_value(self, x, y=None):
        """Phi(x) [+ Psi(y)]."""
        value = self.constraint_x(x)
        if self.is_separable:
            value = value + self.constraint_y(y)
        return value

    def objective(self, x, y=None):
        value = self.objective_x(x)
        if self.is_separable:
            value += self.objective_y(y)
        return value

    def least_squares_point(self):
        """Unconstrained minimizer of the objective, (x_ls, y_ls)."""
        x_ls = lstsq(self.W[0], self.a[0], rcond=None)[0]
        y_ls = None
        if self.is_separable:
            y_ls = lstsq(self.V[0], self.c[0], rcond=None)[0]
        return x_ls, y_ls

def _draw(cfg):
    """Draw every matrix and vector in the fixed order W0, a0, [V0, c0], then
    W_i, a_i, [V_i, c_i] for i = 1..p, then A, [B], z_x, [z_y] where the
    equality right-hand side is b = A z_x [+ B z_y]."""
    rng = SeededRng(cfg.seed)
    separable = cfg.m is not None
    W, a, V, c = [], [], [], []
    for i in range(cfg.p+1):
        w_scale, a_scale = (cfg.scale_w0, cfg.scale_a0) if i == 0 \
            else (cfg.scale_wi, cfg.scale_ai)
        W.append(gaussian_matrix(rng, cfg.q, cfg.n, w_scale))
        a.append(gaussian_vector(rng, cfg.q, a_scale))
        if separable:
            V.append(gaussian_matrix(rng, cfg.q, cfg.m, w_scale))
            c.append(gaussian_vector(rng, cfg.q, a_scale))
    A_eq = B_eq = b_eq = None
    if cfg.p_eq:
        A_eq = gaussian_matrix(rng, cfg.p_eq, cfg.n, 1.0)
        if separable:
            B_eq = gaussian_matrix(rng, cfg.p_eq, cfg.m, 1.0)
        z_x = gaussian_vector(rng, cfg.n, cfg.scale_ai)
        b_eq = A_eq @ z_x
        if separable:
            b_eq = b_eq + B_eq @ gaussian_vector(rng, cfg.m, cfg.scale_ai)
    return (
        np.array(W), np.array(a),
        np.array(V) if separable else None,
        np.array(c) if separable else None,
        A_eq, B_eq, b_eq
    )

def resolve_pi(cfg, W, a, V=None, c=None):
    """Bound used for every quadratic constraint."""
    if cfg.pi is not None:
        return cfg.pi
    if cfg.is_paper_scale:
        return PAPER_PI_SINGLE if cfg.m is None else PAPER_PI_SEPARABLE
    x_ls = lstsq(W[0], a[0], rcond=None)[0]
    res = W[1:] @ x_ls - a[1:]
    values = np.einsum('iq,iq->i', res, res)
    if V is not None:
        y_ls = lstsq(V[0], c[0], rcond=None)[0]
        res_y = V[1:] @ y_ls - c[1:]
        values = values + np.einsum('iq,iq->i', res_y, res_y)
    pi = ACTIVE_PI_FRACTION*float(values.min())
    logger.info(
        'pi set to %.6e (%.2f of the smallest constraint value at the '
        'least-squares point)', pi, ACTIVE_PI_FRACTION
    )
    return pi

def generate_data(cfg):
    """Draw the QcqpData of `cfg`."""
    W, a, V, c, A_eq, B_eq, b_eq = _draw(cfg)
    pi = resolve_pi(cfg, W, a, V, c)
    meta = {
        'seed': cfg.seed, 'scales': cfg.scales, 'rng': ALGORITHM_ID
    }
    return QcqpData(
        W, a, np.full(cfg.p, pi), V=V, c=c, A_eq=A_eq, B_eq=B_eq,
        b_eq=b_eq, meta=meta
    )

def build_instance(data, name=None):
    """Wrap QcqpData into a ProblemInstance with the closed-form prediction
    oracles attached."""
    def predict_x(lam, rho, eta, r, x_prev, y):
        return primal_prediction(data, lam, rho, eta, r, x_prev, block='x')

    kwargs = {}
    if data.is_separable:
        def predict_y(lam, rho, eta, r, y_prev, x_bar):
            return primal_prediction(data, lam, rho, eta, r, y_prev, block='y')
        kwargs = dict(
            m=data.m, objective_y=data.objective_y,
            constraint_y=data.constraint_y, jacobian_y=data.jacobian_y,
            predict_y=predict_y, objective_grad_y=data.objective_grad_y
        )
    return ProblemInstance(
        data.n, data.objective_x, data.constraint_x, data.jacobian_x,
        data.dual_domain, predict_x=predict_x,
        objective_grad=data.objective_grad_x, name=name, **kwargs
    )

def generate(cfg):
    """Generate the instance of `cfg`.

    Returns
    -------
    (ProblemInstance, QcqpData)
    """
    data = generate_data(cfg)
    logger.info('Generated %r with pi=%.6e', cfg, data.pi[0])
    return build_instance(data, name=f'qcqp-{cfg.problem}-seed{cfg.seed}'), data
