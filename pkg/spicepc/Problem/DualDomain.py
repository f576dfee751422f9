"""Domain of the dual variable: a product of nonnegative half-lines
(inequality rows) and free lines (equality rows)."""
import numpy as np
from spicepc.Exceptions import DimensionError

class DualDomain:
    """Per-coordinate kinds of the p dual variables.

    Parameters
    ----------
    kinds : sequence of str
        One entry per dual coordinate, each 'nonneg' (inequality row) or
        'free' (equality row).
    """
    NONNEG = 'nonneg'
    FREE = 'free'

    def __init__(self, kinds) -> None:
        kinds = tuple(kinds)
        if len(kinds) < 1:
            raise ValueError('DualDomain needs at least one coordinate')
        for kind in kinds:
            if kind not in (self.NONNEG, self.FREE):
                raise ValueError(
                    "dual kinds have to be selected from "
                    f"{{'nonneg', 'free'}}, got {kind!r}"
                )
        self.kinds = kinds
        self.nonneg_mask = np.array([k == self.NONNEG for k in kinds])

    @classmethod
    def nonnegative(cls, p):
        """All p rows are inequalities."""
        return cls((cls.NONNEG,)*p)

    @classmethod
    def mixed(cls, p_ineq, p_eq):
        """p_ineq inequality rows followed by p_eq equality rows."""
        return cls((cls.NONNEG,)*p_ineq + (cls.FREE,)*p_eq)

    def __len__(self):
        return len(self.kinds)

    def __repr__(self):
        n_free = len(self) - int(self.nonneg_mask.sum())
        return f"<DualDomain p={len(self)} nonneg={len(self)-n_free} free={n_free}>"

    def __eq__(self, other):
        return isinstance(other, DualDomain) and self.kinds == other.kinds

    @property
    def n_ineq(self):
        return int(self.nonneg_mask.sum())

    @property
    def has_free(self):
        return not bool(self.nonneg_mask.all())

    def project(self, lam):
        """Euclidean projection onto the domain."""
        lam = np.asarray(lam, dtype=np.float64)
        if lam.shape != (len(self),):
            raise DimensionError(
                f'dual vector has shape {lam.shape}, expected ({len(self)},)'
            )
        return np.where(self.nonneg_mask, np.maximum(lam, 0.0), lam)

    def contains(self, lam):
        """True if every nonnegative coordinate of lam is >= 0."""
        lam = np.asarray(lam, dtype=np.float64)
        return bool(np.all(lam[self.nonneg_mask] >= 0.0))

def project_dual(domain, lam):
    """Clamp the nonnegative coordinates of lam at zero; free coordinates pass
    through unchanged."""
    return domain.project(lam)
