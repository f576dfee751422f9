"""
Export and import of QCQP instances as a self-describing .npz container.

The archive holds a JSON header (format tag, dimensions, seed, scales, bound,
generator id) under the key `header` and every matrix as a float64 array in
row-major order. Arrays are stored as they are, so a round trip is bit-exact.
"""
import json
import numpy as np
from spicepc.Qcqp.QcqpGenerator import QcqpData

FORMAT_TAG = 'spicepc-qcqp'
FORMAT_VERSION = 1
_ARRAY_KEYS = ('W', 'a', 'pi', 'V', 'c', 'A_eq', 'B_eq', 'b_eq')

def qcqp_header(data):
    return {
        'format': FORMAT_TAG,
        'version': FORMAT_VERSION,
        'n': data.n,
        'm': data.m,
        'q': data.q,
        'p': data.p,
        'p_eq': data.p_eq,
        'seed': data.meta.get('seed'),
        'scales': data.meta.get('scales'),
        'rng': data.meta.get('rng'),
        'pi': [float(v) for v in data.pi],
    }

def export_qcqp(data, path):
    """Write `data` to `path` (numpy appends .npz if missing)."""
    arrays = {
        key: np.ascontiguousarray(getattr(data, key))
        for key in _ARRAY_KEYS if getattr(data, key) is not None
    }
    header = json.dumps(qcqp_header(data), sort_keys=True)
    np.savez(path, header=np.array(header), **arrays)

def import_qcqp(path):
    """Read a container written by export_qcqp."""
    with np.load(path, allow_pickle=False) as archive:
        header = json.loads(str(archive['header']))
        if header.get('format') != FORMAT_TAG:
            raise ValueError(
                f'{path} is not a {FORMAT_TAG} container '
                f'(format={header.get("format")!r})'
            )
        if header.get('version') != FORMAT_VERSION:
            raise ValueError(
                f'Unsupported container version {header.get("version")}'
            )
        arrays = {
            key: archive[key].copy() for key in _ARRAY_KEYS
            if key in archive.files
        }
    meta = {
        'seed': header['seed'], 'scales': header['scales'],
        'rng': header['rng']
    }
    data = QcqpData(meta=meta, **arrays)
    if (data.n, data.m, data.q, data.p, data.p_eq) != (
            header['n'], header['m'], header['q'], header['p'], header['p_eq']
        ):
        raise ValueError(f'Header of {path} does not match its arrays')
    return data
