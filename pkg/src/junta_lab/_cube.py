"""Index arithmetic on the hypercube.

Bit ``i`` of a table index encodes coordinate ``i``; a set bit means ``+1``.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _points(n):
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n)) & 1
    pts = (2 * bits - 1).astype(np.int8)
    pts.setflags(write=False)
    return pts


def cube_points(n):
    """All of {-1,+1}^n as a read-only ``(2**n, n)`` int8 array in index order."""
    return _points(n)


def popcount(a):
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        out += a & 1
        a = a >> 1
    return out


def bits_of(mask):
    """Coordinates present in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(coords):
    m = 0
    for c in coords:
        m |= 1 << int(c)
    return m


def point_to_index(x):
    """Map a +-1 (or 0/1) vector to its table index."""
    idx = 0
    for i, v in enumerate(x):
        if v not in (-1, 0, 1):
            raise ValueError(f"coordinate {i} has value {v!r}; expected +-1 or 0/1")
        if v == 1:
            idx |= 1 << i
    return idx


def index_to_point(idx, n):
    return tuple(1 if (idx >> i) & 1 else -1 for i in range(n))


def kron_apply(mats, vec):
    """Apply ``mats[k-1] (x) ... (x) mats[0]`` to ``vec``.

    ``mats[i]`` is a 2x2 matrix acting on coordinate ``i``: its columns are
    indexed by the input bit and its rows by the output bit. Runs in
    ``O(k 2^k)`` instead of materializing the ``2^k x 2^k`` product.
    """
    k = len(mats)
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (1 << k,):
        raise ValueError(f"vector of length {vec.shape} does not match {k} factors")
    t = vec.reshape((2,) * k) if k else vec.reshape(())
    for i, m in enumerate(mats):
        axis = k - 1 - i
        t = np.moveaxis(np.tensordot(np.asarray(m, dtype=float), t, axes=([1], [axis])), 0, axis)
    return np.ascontiguousarray(t).reshape(-1)


def subset_product_weights(values):
    """Vector w with ``w[S] = prod_{i in S} values[i]`` for every bitmask S."""
    w = np.ones(1, dtype=float)
    for v in values:
        w = np.concatenate([w, w * float(v)])
    return w
