"""Exact junta approximation under an arbitrary distribution.

For a coordinate set S the best S-junta outputs the sign of the
conditional mean of q given the restriction x_S, and its advantage is
E_D|E[q | x_S]|. Optimal r-juntas are found by scanning every set of
size at most r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from ._cube import bits_of, point_to_index, popcount
from .boolfn import TruthTable, as_prob, as_weights
from .config import MAX_JUNTA_ARITY, MAX_JUNTA_CANDIDATES, TOL
from .exceptions import CapacityError, ZeroProbabilityError


def _stats(q, D, mask):
    q = as_prob(q)
    w = as_weights(D, q.n)
    keys = np.arange(1 << q.n) & mask
    num = np.bincount(keys, weights=w * q.expectation, minlength=1 << q.n)
    den = np.bincount(keys, weights=w, minlength=1 << q.n)
    return keys, num, den


def _as_index(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    return point_to_index(x)


def conditional_mean(q, D, S, x):
    """E_{y~D}[q(y) | y_S = x_S]; ``S`` is a bitmask, ``x`` an index or point."""
    _, num, den = _stats(q, D, S)
    key = _as_index(x) & S
    if den[key] <= 0:
        raise ZeroProbabilityError(f"restriction {key:#x} on set {S:#x} has probability zero")
    return float(num[key] / den[key])


def advantage_of_set(q, D, S):
    """Advantage of the best S-junta: E_{x~D}|E[q | x_S]|."""
    _, num, _ = _stats(q, D, S)
    return float(np.abs(num).sum())


@dataclass(frozen=True, eq=False)
class JuntaApprox:
    """An S-junta: ``table[r]`` is the output on the r-th restriction of S.

    Restrictions are numbered by packing the bits of S in ascending
    coordinate order.
    """

    n: int
    coords: int
    table: np.ndarray
    advantage: float
    unreachable: np.ndarray = field(default=None, repr=False)

    @property
    def coord_list(self):
        return bits_of(self.coords)

    @property
    def size(self):
        return len(self.coord_list)

    @property
    def error(self):
        return (1.0 - self.advantage) / 2.0

    def restriction_index(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        out = np.zeros(idx.shape, dtype=np.int64)
        for j, c in enumerate(self.coord_list):
            out |= ((idx >> c) & 1) << j
        return out

    def predict_index(self, idx):
        return self.table[self.restriction_index(idx)]

    def to_truth_table(self):
        return TruthTable(self.predict_index(np.arange(1 << self.n)), self.n)


def _pack_keys(mask):
    coords = bits_of(mask)
    r = np.arange(1 << len(coords), dtype=np.int64)
    full = np.zeros_like(r)
    for j, c in enumerate(coords):
        full |= ((r >> j) & 1) << c
    return full


def best_junta_on_set(q, D, S):
    """Sign of the conditional mean on each restriction of S (sign(0) = +1).

    Restrictions of probability zero get +1 and are flagged in ``unreachable``.
    """
    q = as_prob(q)
    _, num, den = _stats(q, D, S)
    full = _pack_keys(S)
    table = np.where(num[full] >= -TOL.tie, 1, -1).astype(np.int8)
    unreachable = den[full] <= 0
    table[unreachable] = 1
    return JuntaApprox(q.n, int(S), table, float(np.abs(num).sum()), unreachable)


def _candidate_count(n, r):
    return sum(comb(n, j) for j in range(min(r, n) + 1))


def _check_capacity(n, r):
    if n > MAX_JUNTA_ARITY:
        raise CapacityError(f"arity {n} exceeds the exhaustive-search limit {MAX_JUNTA_ARITY}")
    count = _candidate_count(n, r)
    if count > MAX_JUNTA_CANDIDATES:
        raise CapacityError(f"{count} candidate sets exceed the limit {MAX_JUNTA_CANDIDATES}")


def _all_set_advantages(q, D, r):
    """Advantage of every coordinate set of size <= r, indexed by bitmask.

    Sums coordinates out one at a time along a depth-first walk, so the total
    work is about 3^n rather than 4^n. Entries for larger sets are NaN.
    """
    q = as_prob(q)
    n = q.n
    wf = as_weights(D, n) * q.expectation
    out = np.full(1 << n, np.nan)
    # leading axes are undecided coordinates, highest bit first
    stack = [(wf.reshape((2,) * n) if n else wf.reshape(()), n - 1, 0, 0)]
    while stack:
        arr, i, mask, kept = stack.pop()
        if i < 0:
            out[mask] = np.abs(arr).sum()
            continue
        stack.append((arr.sum(axis=0), i - 1, mask, kept))
        if kept < r:
            stack.append((np.moveaxis(arr, 0, -1), i - 1, mask | (1 << i), kept + 1))
    return out


def _argmax_smallest(values, masks):
    best, best_mask = -np.inf, None
    for v, m in zip(values, masks):
        if v > best + TOL.tie:
            best, best_mask = v, int(m)
    return best_mask


def optimal_junta(q, D, r):
    """Best junta on at most ``r`` coordinates; ties go to the smallest bitmask."""
    q = as_prob(q)
    if r < 0:
        raise ValueError("budget must be nonnegative")
    r = min(int(r), q.n)
    _check_capacity(q.n, r)
    adv = _all_set_advantages(q, D, r)
    masks = np.flatnonzero(~np.isnan(adv))
    best = _argmax_smallest(adv[masks], masks)
    return best_junta_on_set(q, D, best)


@dataclass(frozen=True, eq=False)
class AdvantageCurve:
    """Adv_D(f, r) for r = 0..n with the optimal coordinate sets."""

    advantages: np.ndarray
    coords: tuple

    @property
    def n(self):
        return len(self.advantages) - 1

    @property
    def errors(self):
        return (1.0 - self.advantages) / 2.0

    def __getitem__(self, r):
        return float(self.advantages[min(int(r), self.n)])

    def error(self, r):
        return (1.0 - self[r]) / 2.0

    def junta_complexity(self, eps):
        return junta_complexity(self, eps)


def advantage_curve(q, D):
    q = as_prob(q)
    _check_capacity(q.n, q.n)
    masks = np.arange(1 << q.n)
    adv = _all_set_advantages(q, D, q.n)
    sizes = popcount(masks)
    values, coords = [], []
    for r in range(q.n + 1):
        sel = sizes <= r
        m = _argmax_smallest(adv[sel], masks[sel])
        values.append(float(adv[m]))
        coords.append(m)
    return AdvantageCurve(np.array(values), tuple(coords))


def junta_complexity(curve, eps):
    """Smallest r whose optimal error is at most ``eps``."""
    for r, e in enumerate(curve.errors):
        if e <= eps + TOL.identity:
            return r
    raise ValueError(f"no budget reaches error {eps!r}; the function is randomized")


def min_conditional_mean(q, D, r):
    """Smallest E[q | x_S] over all |S| <= r and reachable restrictions.

    Returns the value and the (set, restriction index) where it occurs.
    """
    q = as_prob(q)
    r = min(int(r), q.n)
    _check_capacity(q.n, r)
    masks = np.arange(1 << q.n)
    best, where = np.inf, None
    for S in masks[popcount(masks) <= r]:
        _, num, den = _stats(q, D, int(S))
        live = np.flatnonzero(den > 0)
        vals = num[live] / den[live]
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, where = float(vals[i]), (int(S), int(live[i]))
    return best, where
