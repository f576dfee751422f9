"""Reproducible random streams for instance generation.

The uniform stream comes from numpy's PCG64 bit generator seeded with a 64-bit
integer. Standard normal draws are produced from that uniform stream with the
Box-Muller transform, two normals per pair of uniforms, and any unused second
normal is kept for the next request so the stream is independent of how the
draws are chunked.
"""
import numpy as np

ALGORITHM_ID = 'numpy-PCG64+box-muller'
U64_MAX = (1 << 64) - 1

class SeededRng:
    """Single-owner generator of uniform and Box-Muller normal draws.

    Parameters
    ----------
    seed : int
        Seed in [0, 2**64 - 1].

    Examples
    --------
    >>> rng_a, rng_b = SeededRng(0), SeededRng(0)
    >>> bool((rng_a.standard_normal(5) == rng_b.standard_normal(5)).all())
    True
    """
    algorithm_id = ALGORITHM_ID

    def __init__(self, seed=0) -> None:
        seed = int(seed)
        if seed < 0 or seed > U64_MAX:
            raise ValueError(f'seed must be a 64-bit unsigned integer, got {seed}')
        self.seed = seed
        self._generator = np.random.Generator(np.random.PCG64(seed))
        self._spare = None

    def __repr__(self):
        return f"<SeededRng algorithm={self.algorithm_id} seed={self.seed}>"

    def standard_normal(self, count):
        """Return `count` standard normal draws via Box-Muller."""
        count = int(count)
        out = np.empty(count)
        if count == 0:
            return out
        start = 0
        if self._spare is not None:
            out[0] = self._spare
            self._spare = None
            start = 1
        remaining = count - start
        if remaining == 0:
            return out
        n_pairs = (remaining + 1)//2
        u = self._generator.random(2*n_pairs)
        # 1 - u lies in (0, 1], keeping log finite
        radius = np.sqrt(-2.0*np.log(1.0 - u[0::2]))
        angle = 2.0*np.pi*u[1::2]
        normals = np.column_stack(
            (radius*np.cos(angle), radius*np.sin(angle))
        ).ravel()
        out[start:] = normals[:remaining]
        if 2*n_pairs > remaining:
            self._spare = normals[-1]
        return out

def gaussian_matrix(rng, rows, cols, scale=1.0):
    """Return a rows x cols matrix of i.i.d. scale*N(0, 1) entries drawn from
    `rng` in row-major order."""
    if rows < 1 or cols < 1:
        raise ValueError(f'rows and cols must be >= 1, got {rows}x{cols}')
    if not np.isfinite(scale):
        raise ValueError(f'scale must be finite, got {scale}')
    return scale*rng.standard_normal(rows*cols).reshape(rows, cols)

def gaussian_vector(rng, length, scale=1.0):
    """Return a vector of `length` i.i.d. scale*N(0, 1) draws."""
    return gaussian_matrix(rng, 1, length, scale)[0]
