"""Problem abstraction for single-block

    min f(x)  s.t.  Phi(x) in -Z

and separable two-block

    min f(x) + g(y)  s.t.  Phi(x) + Psi(y) in -Z

problems, where Z is a DualDomain (nonnegative rows are inequalities, free rows
are equalities). The feasible sets X and Y are the whole space; an instance
that needs a set constraint enforces it inside its prediction oracle.
"""
from collections import namedtuple
import numpy as np
from scipy.optimize import minimize
from spicepc.Exceptions import DimensionError, SpiceError
from spicepc.Numerics.DenseLinalg import jacobian_norm_sq
from spicepc.Utils.VectorUtils import as_vector, stack_blocks

class Iterate(namedtuple('Iterate', ['x', 'y', 'lam'])):
    """Primal block x, optional second primal block y and dual vector lam.
    The stacked vector w = (x, [y,] lam)."""
    __slots__ = ()

    @property
    def u(self):
        """Stacked primal part (x, [y])."""
        return stack_blocks(self.x, self.y)

    def stacked(self):
        return stack_blocks(self.x, self.y, self.lam)

    def copy(self):
        return Iterate(
            self.x.copy(),
            None if self.y is None else self.y.copy(),
            self.lam.copy()
        )

class ProblemInstance:
    """Oracles describing a convex problem for the Spice solver.

    Parameters
    ----------
    n : int
        Dimension of x.
    objective : callable x -> float
        f(x).
    constraint : callable x -> (p,) array
        Phi(x).
    jacobian : callable x -> (p, n) array
        DPhi(x).
    dual_domain : DualDomain
        Kinds of the p dual coordinates.
    m : int, optional
        Dimension of y for separable problems. When given, the `_y` oracles
        are required.
    objective_y, constraint_y, jacobian_y : callable, optional
        g(y), Psi(y) and DPsi(y).
    predict_x : callable, optional
        predict_x(lam, rho, eta, r, x_prev, y) -> argmin_x of
        rho*f(x) + lam^T Phi(x)/eta + r/2 ||x - x_prev||^2.
    predict_y : callable, optional
        predict_y(lam, rho, eta, r, y_prev, x_bar) -> the same for y.
    objective_grad, objective_grad_y : callable, optional
        Gradients of f and g. Used by the L-BFGS-B fallback when no
        closed-form prediction is available (smooth objectives only).
    name : str, optional
    """
    def __init__(
            self, n, objective, constraint, jacobian, dual_domain,
            m=None, objective_y=None, constraint_y=None, jacobian_y=None,
            predict_x=None, predict_y=None,
            objective_grad=None, objective_grad_y=None, name=None
        ) -> None:
        if n < 1:
            raise ValueError(f'n must be >= 1, got {n}')
        self.n = int(n)
        self.m = None if m is None else int(m)
        self.p = len(dual_domain)
        self.dual_domain = dual_domain
        self.objective = objective
        self.constraint = constraint
        self.jacobian = jacobian
        self.objective_y = objective_y
        self.constraint_y = constraint_y
        self.jacobian_y = jacobian_y
        self.predict_x = predict_x
        self.predict_y = predict_y
        self.objective_grad = objective_grad
        self.objective_grad_y = objective_grad_y
        self.name = name
        if self.is_separable:
            if self.m < 1:
                raise ValueError(f'm must be >= 1, got {m}')
            missing = [
                name for name, oracle in (
                    ('objective_y', objective_y),
                    ('constraint_y', constraint_y),
                    ('jacobian_y', jacobian_y)
                ) if oracle is None
            ]
            if missing:
                raise ValueError(
                    f'Separable problem is missing oracles: {", ".join(missing)}'
                )
        if predict_x is None and objective_grad is None:
            raise ValueError(
                'Either a prediction oracle or an objective gradient is needed'
            )
        if self.is_separable and predict_y is None and objective_grad_y is None:
            raise ValueError(
                'Either predict_y or objective_grad_y is needed for the y-block'
            )

    def __repr__(self):
        kind = 'separable' if self.is_separable else 'single'
        dims = f"n={self.n}" + (f" m={self.m}" if self.is_separable else '')
        return f"<ProblemInstance {self.name or ''} {kind} {dims} p={self.p}>"

    @property
    def is_separable(self):
        return self.m is not None

    @property
    def dim(self):
        """Length of the stacked w."""
        return self.n + (self.m or 0) + self.p

    def check_iterate(self, it):
        """Raise DimensionError if `it` does not match the instance."""
        if np.shape(it.x) != (self.n,):
            raise DimensionError(
                f'x has shape {np.shape(it.x)}, expected ({self.n},)'
            )
        if self.is_separable:
            if it.y is None or np.shape(it.y) != (self.m,):
                raise DimensionError(
                    f'y has shape {np.shape(it.y)}, expected ({self.m},)'
                )
        elif it.y is not None:
            raise DimensionError('single-block problem got a y block')
        if np.shape(it.lam) != (self.p,):
            raise DimensionError(
                f'lam has shape {np.shape(it.lam)}, expected ({self.p},)'
            )

    def make_iterate(self, x, lam=None, y=None):
        """Build a validated Iterate; lam defaults to zeros."""
        x = as_vector(x, 'x', self.n)
        if lam is None:
            lam = np.zeros(self.p)
        lam = as_vector(lam, 'lam', self.p)
        if self.is_separable:
            y = np.zeros(self.m) if y is None else as_vector(y, 'y', self.m)
        elif y is not None:
            raise DimensionError('single-block problem got a y block')
        return Iterate(x, y, lam)

    def constraint_value(self, x, y=None):
        """Phi(x) [+ Psi(y)]."""
        value = np.asarray(self.constraint(x), dtype=np.float64)
        if self.is_separable:
            value = value + np.asarray(self.constraint_y(y), dtype=np.float64)
        return value

    def jacobians(self, x, y=None):
        """(DPhi(x), DPsi(y)) with the second entry None for single-block."""
        jac_x = np.asarray(self.jacobian(x), dtype=np.float64)
        if jac_x.shape != (self.p, self.n):
            raise DimensionError(
                f'DPhi has shape {jac_x.shape}, expected ({self.p}, {self.n})'
            )
        if not self.is_separable:
            return jac_x, None
        jac_y = np.asarray(self.jacobian_y(y), dtype=np.float64)
        if jac_y.shape != (self.p, self.m):
            raise DimensionError(
                f'DPsi has shape {jac_y.shape}, expected ({self.p}, {self.m})'
            )
        return jac_x, jac_y

    def jacobian_norm(self, x, y=None, mode='spectral'):
        """R(u) = ||DPhi(x)||^2 [+ ||DPsi(y)||^2]."""
        jac_x, jac_y = self.jacobians(x, y)
        value = jacobian_norm_sq(jac_x, mode)
        if jac_y is not None:
            value += jacobian_norm_sq(jac_y, mode)
        return value

    def predict_primal_x(self, lam, rho, eta, r, x_prev, y):
        """Solve the x prediction subproblem."""
        if self.predict_x is not None:
            return as_vector(self.predict_x(lam, rho, eta, r, x_prev, y), 'x_bar', self.n)
        return self._lbfgs_prediction(
            self.objective, self.objective_grad, self.constraint, self.jacobian,
            lam, rho, eta, r, x_prev
        )

    def predict_primal_y(self, lam, rho, eta, r, y_prev, x_bar):
        """Solve the y prediction subproblem given the new x_bar."""
        if self.predict_y is not None:
            return as_vector(self.predict_y(lam, rho, eta, r, y_prev, x_bar), 'y_bar', self.m)
        return self._lbfgs_prediction(
            self.objective_y, self.objective_grad_y, self.constraint_y,
            self.jacobian_y, lam, rho, eta, r, y_prev
        )

    @staticmethod
    def _lbfgs_prediction(func, grad, constraint, jacobian, lam, rho, eta, r, prev):
        def fun(z):
            diff = z - prev
            value = rho*func(z) + lam @ constraint(z)/eta + 0.5*r*(diff @ diff)
            gradient = rho*grad(z) + jacobian(z).T @ lam/eta + r*diff
            return value, gradient
        result = minimize(
            fun, prev, jac=True, method='L-BFGS-B',
            options={'ftol': 1e-15, 'gtol': 1e-12, 'maxiter': 10000}
        )
        if not np.all(np.isfinite(result.x)):
            raise SpiceError(f'Prediction subproblem failed: {result.message}')
        return result.x

def eval_objective(inst, it):
    """f(x) for single-block, f(x) + g(y) for separable problems."""
    inst.check_iterate(it)
    value = float(inst.objective(it.x))
    if inst.is_separable:
        value += float(inst.objective_y(it.y))
    return value

def gamma_operator(inst, it):
    """The monotone operator Gamma(w) = (DPhi^T lam; [DPsi^T lam;] -Phi [-Psi])
    stacked in iterate order."""
    inst.check_iterate(it)
    jac_x, jac_y = inst.jacobians(it.x, it.y)
    top_x = jac_x.T @ it.lam
    top_y = None if jac_y is None else jac_y.T @ it.lam
    bottom = -inst.constraint_value(it.x, it.y)
    return stack_blocks(top_x, top_y, bottom)

def constraint_value(inst, it):
    """Phi(x) [+ Psi(y)] at the iterate."""
    inst.check_iterate(it)
    return inst.constraint_value(it.x, it.y)

def jacobian_norm(inst, x, y=None, mode='spectral'):
    """R(u) = ||DPhi(x)||^2 [+ ||DPsi(y)||^2] under the chosen norm mode."""
    return inst.jacobian_norm(x, y, mode)
