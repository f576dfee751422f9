"""Objective scaling schedules rho(t)."""
import math
from spicepc.Data.constants import DEFAULT_ALPHA, DEFAULT_BETA, RHO_CAP

class ScalingSchedule:
    """Schedule of the objective scaling factor rho(t).

    Parameters
    ----------
    kind : str, default 'constant'
        'constant' (rho = 1), 'power' ((t+1)^alpha), 'exp' (e^{beta t}) or
        'powerexp' ((t+1)^{t+1}).
    alpha : float, default 2
        Exponent of the power schedule.
    beta : float, default 2
        Rate of the exponential schedule.
    cap : float
        Values above the cap are clamped.

    Examples
    --------
    >>> ScalingSchedule('power', alpha=2).value(3)
    16.0
    """
    KINDS = ('constant', 'power', 'exp', 'powerexp')

    def __init__(
            self, kind='constant', alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA,
            cap=RHO_CAP
        ) -> None:
        if kind not in self.KINDS:
            raise ValueError(
                f"schedule kind has to be selected from {set(self.KINDS)}, "
                f"got {kind!r}"
            )
        if not alpha > 0:
            raise ValueError(f'alpha must be > 0, got {alpha}')
        if not beta > 0:
            raise ValueError(f'beta must be > 0, got {beta}')
        if not cap > 1:
            raise ValueError(f'cap must be > 1, got {cap}')
        self.kind = kind
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.cap = float(cap)
        self._log_cap = math.log(self.cap)

    def __repr__(self):
        if self.kind == 'power':
            return f"<ScalingSchedule power alpha={self.alpha}>"
        if self.kind == 'exp':
            return f"<ScalingSchedule exp beta={self.beta}>"
        return f"<ScalingSchedule {self.kind}>"

    @property
    def label(self):
        """Short label used in tables and file names."""
        if self.kind == 'power':
            return f'power{self.alpha:g}'
        if self.kind == 'exp':
            return f'exp{self.beta:g}'
        return self.kind

    def log_value(self, t):
        """log rho(t) before clamping."""
        if self.kind == 'constant':
            return 0.0
        if self.kind == 'power':
            return self.alpha*math.log(t+1)
        if self.kind == 'exp':
            return self.beta*t
        return (t+1)*math.log(t+1)

    def value(self, t):
        if t < 0:
            raise ValueError(f't must be >= 0, got {t}')
        if self.kind == 'constant':
            return 1.0
        if self.log_value(t) >= self._log_cap:
            return self.cap
        if self.kind == 'power':
            value = float(t+1)**self.alpha
        elif self.kind == 'exp':
            value = math.exp(self.beta*t)
        else:
            value = float(t+1)**(t+1)
        return min(value, self.cap)

    __call__ = value

def rho_value(schedule, t):
    """rho(t) of the schedule, clamped at its cap."""
    return schedule.value(t)
