"""Boosting junta testers through composition, and the SetCover reduction.

A tester is an object with ``run(n)`` returning a generator. The generator
yields requests (:class:`Query`, :class:`Sample`, :class:`DistributionRequest`)
and receives the answers; its return value is the verdict (True for Yes).
The harness in :func:`run_tester` owns the oracle, so query counts cannot
be faked by the tester.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._cube import cube_points
from .boolfn import Distribution, TruthTable, as_prob, as_weights, make_named
from .config import MAX_JUNTA_ARITY
from .exceptions import CapacityError, ProtocolViolation
from .junta import optimal_junta


def eps_large(eps_small, k, lam):
    """(1 - (1 - 2 eps_small)^((1 - lam) k / 2)) / 2."""
    if not 0.0 <= eps_small <= 0.5:
        raise ValueError(f"eps_small = {eps_small!r} is outside [0, 1/2]")
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda = {lam!r} is outside (0, 1)")
    if k < 1:
        raise ValueError("k must be positive")
    return (1.0 - (1.0 - 2.0 * eps_small) ** ((1.0 - lam) * k / 2.0)) / 2.0


@dataclass(frozen=True)
class TesterParams:
    """Yes: eps_yes-close to an r-junta. No: eps_no-far from every r_prime-junta."""

    eps_yes: float
    eps_no: float
    r: int
    r_prime: int

    def __post_init__(self):
        if self.eps_yes < 0 or self.eps_yes > self.eps_no:
            raise ValueError("need 0 <= eps_yes <= eps_no")
        if self.r < 0 or self.r > self.r_prime:
            raise ValueError("need 0 <= r <= r_prime")


# ---------------------------------------------------------------- oracle protocol


@dataclass(frozen=True)
class Query:
    """Ask for f at one index or a batch of indices (each entry counts)."""

    x: object


@dataclass(frozen=True)
class Sample:
    count: int = 1


@dataclass(frozen=True)
class DistributionRequest:
    """White-box read of the whole distribution, for desk-scale testers."""


class OracleAccess:
    """Queries to ``f`` and labeled draws from ``D`` with exact counters."""

    def __init__(self, f, D, rng=None):
        self.f = f if isinstance(f, TruthTable) else as_prob(f)
        self.n = self.f.n
        self.D = D
        self._w = as_weights(D, self.n)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.query_count = 0
        self.sample_count = 0
        self.distribution_reads = 0

    def _values(self, idx):
        if isinstance(self.f, TruthTable):
            return self.f.values[idx].astype(np.int64)
        p = self.f.p[idx]
        return np.where(self.rng.random(p.shape) < p, 1, -1)

    def query(self, x):
        idx = np.asarray(x, dtype=np.int64)
        if np.any(idx < 0) or np.any(idx >= 1 << self.n):
            raise ProtocolViolation(f"query index out of range for arity {self.n}")
        self.query_count += int(idx.size)
        out = self._values(idx)
        return int(out) if out.ndim == 0 else out

    def sample(self, count=1):
        self.sample_count += int(count)
        idx = self.rng.choice(self._w.size, size=count, p=self._w)
        return idx, self._values(idx)

    def distribution(self):
        self.distribution_reads += 1
        return self.D


def run_tester(tester, oracle):
    """Drive a tester against an oracle; returns the verdict."""
    gen = tester.run(oracle.n)
    budget = tester.query_budget(oracle.n)
    start = oracle.query_count
    reply = None
    while True:
        try:
            req = gen.send(reply)
        except StopIteration as stop:
            return bool(stop.value)
        if isinstance(req, Query):
            reply = oracle.query(req.x)
            if budget is not None and oracle.query_count - start > budget:
                raise ProtocolViolation(
                    f"tester made {oracle.query_count - start} queries, declared budget is {budget}"
                )
        elif isinstance(req, Sample):
            reply = oracle.sample(req.count)
        elif isinstance(req, DistributionRequest):
            reply = oracle.distribution()
        else:
            raise ProtocolViolation(f"unknown request {req!r}")


# ---------------------------------------------------------------- testers


class BruteForceTester:
    """Reads the whole table and decides with exact junta distances.

    Accepts iff the distance to r-juntas is at most the midpoint of
    (eps_yes, eps_no); this is correct on every Yes and No instance.
    """

    def __init__(self, params):
        self.params = params

    def query_budget(self, n):
        return 1 << n

    def run(self, n):
        if n > MAX_JUNTA_ARITY:
            raise CapacityError(f"arity {n} is too large for exhaustive testing")
        values = yield Query(np.arange(1 << n))
        D = yield DistributionRequest()
        table = TruthTable(np.asarray(values), n)
        dist = optimal_junta(table, D, self.params.r).error
        return dist <= (self.params.eps_yes + self.params.eps_no) / 2.0


def brute_force_tester(params):
    return BruteForceTester(params)


def _split_blocks(idx, n, k):
    idx = np.asarray(idx, dtype=np.int64)
    mask = (1 << n) - 1
    return [(idx >> (i * n)) & mask for i in range(k)]


def _join_blocks(blocks, n):
    out = np.zeros_like(blocks[0])
    for i, b in enumerate(blocks):
        out |= b << (i * n)
    return out


def _product_distribution(D, n, k):
    w = as_weights(D, n)
    out = np.ones(1)
    for _ in range(k):
        out = np.kron(w, out)
    return Distribution(out / out.sum(), n * k)


class BoostedTester:
    """Runs ``weak`` on g(f(x^1), ..., f(x^k)), answering from the inner oracle.

    Each composed query costs k inner queries and each composed sample k
    inner samples. Block i of a composed index sits at bits [i n, (i+1) n).
    """

    def __init__(self, weak, k, g=None):
        if k < 1:
            raise ValueError("k must be positive")
        self.weak = weak
        self.k = int(k)
        self.g = g if g is not None else make_named("XOR", self.k)
        if self.g.n != self.k:
            raise ValueError(f"combining function has arity {self.g.n}, expected {self.k}")
        self.composed_queries = 0

    def query_budget(self, n):
        inner = self.weak.query_budget(n * self.k)
        return None if inner is None else self.k * inner

    def _combine(self, answers):
        bits = np.stack([(np.asarray(a) == 1).astype(np.int64) for a in answers])
        idx = np.zeros(bits.shape[1:], dtype=np.int64)
        for i in range(self.k):
            idx |= bits[i] << i
        return self.g.values[idx].astype(np.int64)

    def run(self, n):
        k = self.k
        self.composed_queries = 0
        gen = self.weak.run(n * k)
        budget = self.weak.query_budget(n * k)
        reply = None
        while True:
            try:
                req = gen.send(reply)
            except StopIteration as stop:
                return stop.value
            if isinstance(req, Query):
                x = np.asarray(req.x, dtype=np.int64)
                self.composed_queries += int(x.size)
                if budget is not None and self.composed_queries > budget:
                    raise ProtocolViolation(
                        f"weak tester made {self.composed_queries} queries, declared budget is {budget}"
                    )
                answers = []
                for blk in _split_blocks(x, n, k):
                    answers.append((yield Query(blk)))
                out = self._combine(answers)
                reply = int(out) if out.ndim == 0 else out
            elif isinstance(req, Sample):
                idxs, labels = [], []
                for _ in range(k):
                    i, y = yield Sample(req.count)
                    idxs.append(np.asarray(i))
                    labels.append(y)
                reply = (_join_blocks(idxs, n), self._combine(labels))
            elif isinstance(req, DistributionRequest):
                D = yield DistributionRequest()
                reply = _product_distribution(D, n, k)
            else:
                raise ProtocolViolation(f"unknown request {req!r}")


def boost(weak, k, g=None):
    return BoostedTester(weak, k, g)


# ---------------------------------------------------------------- parameter plans


@dataclass(frozen=True)
class TolerantPlan:
    k: int
    k_adjusted: bool
    composed: TesterParams
    outer: TesterParams
    outer_r_prime_real: float
    outer_eps_no_real: float


def tolerant_boost_params(eps, r=1, lam=0.5):
    """Plan for boosting a (1/4, 1/3, kr, kr) tester down to distance eps.

    k = ceil(1/(4 eps)), lowered by one when the ceiling breaks k eps <= 1/4.
    The outer regime is (eps, 5 eps/(1 - lam), r, r/lam) with r/lam rounded up.
    """
    if not 0.0 < eps <= 1.0 / 16.0:
        raise ValueError(f"eps = {eps!r} is outside (0, 1/16]")
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda = {lam!r} is outside (0, 1)")
    k = math.ceil(round(1.0 / (4.0 * eps), 9))
    adjusted = k * eps > 0.25 + 1e-12
    if adjusted:
        k = math.floor(1.0 / (4.0 * eps))
    r_prime_real = r / lam
    eps_no_real = 5.0 * eps / (1.0 - lam)
    composed = TesterParams(0.25, 1.0 / 3.0, k * r, k * r)
    outer = TesterParams(eps, max(eps, eps_no_real), r, math.ceil(round(r_prime_real, 9)))
    return TolerantPlan(k, adjusted, composed, outer, r_prime_real, eps_no_real)


def zero_error_boost_params(eps_small, k, lam, r, r_prime):
    """Composed regime (0, eps_large, kr, k r') and outer (0, eps_small, r, r'/lam)."""
    big = eps_large(eps_small, k, lam)
    composed = TesterParams(0.0, big, k * r, k * r_prime)
    outer = TesterParams(0.0, eps_small, r, math.ceil(round(r_prime / lam, 9)))
    return composed, outer


# ---------------------------------------------------------------- SetCover


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe {1..m} and a list of subsets; set i becomes coordinate i."""

    m: int
    sets: tuple

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("universe size m must be at least 1")
        sets = tuple(frozenset(int(e) for e in s) for s in self.sets)
        for i, s in enumerate(sets, start=1):
            bad = [e for e in s if not 1 <= e <= self.m]
            if bad:
                raise ValueError(f"set {i} has elements {sorted(bad)} outside 1..{self.m}")
        object.__setattr__(self, "sets", sets)

    @property
    def n(self):
        return len(self.sets)

    @classmethod
    def from_text(cls, text):
        lines = text.splitlines()
        while lines and not lines[0].strip():
            lines.pop(0)
        if not lines:
            raise ValueError("empty SetCover file")
        head = lines[0].split()
        if len(head) != 2 or not all(t.isdigit() for t in head):
            raise ValueError(f"line 1: expected 'm n', got {lines[0]!r}")
        m, n = int(head[0]), int(head[1])
        body = lines[1:]
        while len(body) > n and not body[-1].strip():
            body.pop()
        if len(body) != n:
            raise ValueError(f"expected {n} set lines after the header, found {len(body)}")
        sets = []
        for ln, line in enumerate(body, start=2):
            try:
                sets.append([int(t) for t in line.split()])
            except ValueError:
                raise ValueError(f"line {ln}: expected space-separated integers, got {line!r}") from None
            bad = [e for e in sets[-1] if not 1 <= e <= m]
            if bad:
                raise ValueError(f"line {ln}: elements {bad} outside 1..{m}")
        return cls(m, tuple(sets))

    def to_text(self):
        rows = [" ".join(str(e) for e in sorted(s)) for s in self.sets]
        return f"{self.m} {self.n}\n" + "\n".join(rows) + "\n"

    def covers(self, chosen):
        got = set()
        for i in chosen:
            got |= self.sets[i]
        return len(got) == self.m


def min_set_cover(inst):
    """A smallest cover as a sorted tuple of 0-based set indices, or None."""
    for size in range(inst.n + 1):
        for chosen in combinations(range(inst.n), size):
            if inst.covers(chosen):
                return chosen
    return None


def setcover_reduce(inst):
    """OR_n with the uniform law on {u^1, ..., u^m, all -1}.

    u^j has +1 at coordinate i exactly when element j lies in set i.
    """
    n = inst.n
    if n < 1:
        raise ValueError("need at least one set")
    if n > MAX_JUNTA_ARITY:
        raise CapacityError(f"{n} sets exceed the arity limit {MAX_JUNTA_ARITY}")
    missing = [j for j in range(1, inst.m + 1) if not any(j in s for s in inst.sets)]
    if missing:
        raise ValueError(f"elements {missing} lie in no set, so no cover exists")
    w = np.zeros(1 << n)
    for j in range(1, inst.m + 1):
        idx = sum(1 << i for i, s in enumerate(inst.sets) if j in s)
        w[idx] += 1.0
    w[0] += 1.0
    return make_named("OR", n), Distribution(w / w.sum(), n)


def cover_junta(n, chosen):
    """OR of the chosen coordinates, as a truth table on n bits."""
    pts = cube_points(n)
    if not chosen:
        return TruthTable(-np.ones(1 << n, dtype=np.int64), n)
    return TruthTable(np.where(np.any(pts[:, list(chosen)] == 1, axis=1), 1, -1), n)
