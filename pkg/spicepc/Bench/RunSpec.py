"""Description of one benchmark run: instance, solver settings and output."""
from spicepc.Data.constants import (
    DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MU, DEFAULT_TOL, DEFAULT_GAP_TOL,
    DEFAULT_MAX_ITERS, DESK_DIMS, PAPER_DIMS
)
from spicepc.Qcqp.QcqpGenerator import QcqpConfig
from spicepc.Solver.Scaling import ScalingSchedule
from spicepc.Solver.SpiceSolver import SolveConfig

# command-line schedule names
RHO_KINDS = {
    'const': 'constant', 'power': 'power', 'exp': 'exp', 'powerexp': 'powerexp'
}
PROBLEMS = ('single', 'separable')

class RunSpec:
    """One QCQP benchmark run.

    Parameters
    ----------
    problem : str, default 'single'
        'single' or 'separable'.
    n, m, q, p : int, optional
        Dimensions; missing values come from the desk-scale defaults (or the
        paper-scale ones with paper_scale=True). m is ignored for single-block
        runs.
    seed : int, default 0
    rho : str, default 'const'
        Schedule name: 'const', 'power', 'exp' or 'powerexp'.
    alpha, beta, mu, tol, gap_tol, max_iters :
        Schedule and solver settings.
    mode : str, default 'spice'
        'spice' or 'pc'.
    pi : float, optional
        Constraint bound; None picks the default rule of the generator.
    out : str or Path, optional
        Output directory.
    diagnostics : bool, default False
        Keep full iterates and write them next to the history.
    p_eq : int, default 0
        Linear equality rows added to the instance.
    norm : str, default 'spectral'
    frozen_rho_at : int, optional
    timing : bool, default False
        Report wall time in the summary. Off by default so repeated runs write
        identical files.
    """
    def __init__(
            self, problem='single', n=None, m=None, q=None, p=None, seed=0,
            rho='const', alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA, mu=DEFAULT_MU,
            tol=DEFAULT_TOL, gap_tol=DEFAULT_GAP_TOL,
            max_iters=DEFAULT_MAX_ITERS, mode='spice',
            pi=None, out=None, diagnostics=False, p_eq=0, norm='spectral',
            frozen_rho_at=None, timing=False, paper_scale=False
        ) -> None:
        if problem not in PROBLEMS:
            raise ValueError(
                f"problem has to be selected from {set(PROBLEMS)}, got {problem!r}"
            )
        if rho not in RHO_KINDS:
            raise ValueError(
                f"rho has to be selected from {set(RHO_KINDS)}, got {rho!r}"
            )
        default_n, default_m, default_q, default_p = \
            PAPER_DIMS if paper_scale else DESK_DIMS
        self.problem = problem
        self.n = int(n if n is not None else default_n)
        self.m = None
        if problem == 'separable':
            self.m = int(m if m is not None else default_m)
        self.q = int(q if q is not None else default_q)
        self.p = int(p if p is not None else default_p)
        self.seed = int(seed)
        self.rho = rho
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.mu = float(mu)
        self.tol = float(tol)
        self.gap_tol = float(gap_tol)
        self.max_iters = int(max_iters)
        self.mode = mode
        self.pi = None if pi is None else float(pi)
        self.out = out
        self.diagnostics = bool(diagnostics)
        self.p_eq = int(p_eq)
        self.norm = norm
        self.frozen_rho_at = frozen_rho_at
        self.timing = bool(timing)
        # validate eagerly against the library configs
        self.qcqp_config()
        self.solve_config()

    def __repr__(self):
        return f"<RunSpec {self.label}>"

    def schedule(self):
        return ScalingSchedule(RHO_KINDS[self.rho], alpha=self.alpha, beta=self.beta)

    def qcqp_config(self):
        return QcqpConfig(
            self.n, self.q, self.p, m=self.m, pi=self.pi, seed=self.seed,
            p_eq=self.p_eq
        )

    def solve_config(self):
        return SolveConfig(
            schedule=self.schedule(), mu=self.mu, tol=self.tol,
            gap_tol=self.gap_tol,
            max_iters=self.max_iters, mode=self.mode, norm=self.norm,
            frozen_rho_at=self.frozen_rho_at, diagnostics=self.diagnostics
        )

    @property
    def solver_label(self):
        if self.mode == 'pc':
            return 'pc'
        return f'spice-{self.schedule().label}'

    @property
    def label(self):
        """File-name stem identifying the instance and solver settings."""
        dims = f'n{self.n}' + (f'-m{self.m}' if self.m else '') \
            + f'-q{self.q}-p{self.p}'
        if self.p_eq:
            dims += f'-e{self.p_eq}'
        return f'{self.problem}-{dims}-seed{self.seed}-{self.solver_label}'

    def to_dict(self):
        return {
            'problem': self.problem, 'n': self.n, 'm': self.m, 'q': self.q,
            'p': self.p, 'seed': self.seed, 'rho': self.rho,
            'alpha': self.alpha, 'beta': self.beta, 'mu': self.mu,
            'tol': self.tol, 'gap_tol': self.gap_tol,
            'max_iters': self.max_iters, 'mode': self.mode,
            'pi': self.pi, 'diagnostics': self.diagnostics,
            'p_eq': self.p_eq, 'norm': self.norm,
            'frozen_rho_at': self.frozen_rho_at, 'timing': self.timing,
        }

    def replace(self, **changes):
        """Copy of this spec with some fields changed."""
        kwargs = self.to_dict()
        kwargs['out'] = self.out
        kwargs.update(changes)
        return RunSpec(**kwargs)
