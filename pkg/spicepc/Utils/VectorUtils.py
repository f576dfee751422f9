"""Small helpers for validating and stacking dense vectors and matrices."""
import numpy as np
from spicepc.Exceptions import DimensionError

def as_vector(values, name='vector', length=None):
    """Return `values` as a finite 1-d float64 array. If length is given the
    vector must have exactly that many entries."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim == 0:
        vec = vec.reshape(1)
    if vec.ndim != 1:
        raise DimensionError(f'{name} must be 1-d, got shape {vec.shape}')
    if length is not None and vec.shape[0] != length:
        raise DimensionError(
            f'{name} has length {vec.shape[0]}, expected {length}'
        )
    if not np.all(np.isfinite(vec)):
        raise ValueError(f'{name} contains non-finite entries')
    return vec

def stack_blocks(*blocks):
    """Concatenate the non-None blocks into one stacked vector."""
    return np.concatenate([np.atleast_1d(b) for b in blocks if b is not None])

def split_blocks(stacked, sizes):
    """Inverse of stack_blocks for known block sizes. A size of 0 or None
    yields None for that block."""
    out = []
    start = 0
    for size in sizes:
        if not size:
            out.append(None)
            continue
        out.append(stacked[start:start+size])
        start += size
    if start != len(stacked):
        raise DimensionError(
            f'Block sizes {sizes} do not add up to {len(stacked)}'
        )
    return out

def diag_weighted_norm_sq(vec, weights):
    """Return sum(weights * vec**2), i.e. the squared norm under a diagonal
    positive weight."""
    return float(np.dot(weights, vec*vec))
