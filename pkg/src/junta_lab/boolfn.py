"""Boolean functions and distributions over the hypercube {-1,+1}^n.

All tables are dense and indexed so that bit ``i`` of the index holds
coordinate ``i`` (bit value 1 means +1). Coordinates are 0-based in the
API; the named dictator ``DICT(i)`` keeps the usual 1-based numbering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._cube import cube_points, point_to_index
from .config import MAX_ARITY, TOL
from .exceptions import ArityMismatchError, CapacityError


def _check_arity(n):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"arity must be a nonnegative integer, got {n!r}")
    if n > MAX_ARITY:
        raise CapacityError(f"arity {n} exceeds the dense-table limit {MAX_ARITY}")
    return int(n)


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _arity_from_length(length):
    n = int(length).bit_length() - 1
    if length < 1 or (1 << n) != length:
        raise ValueError(f"table length {length} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class TruthTable:
    """A +-1 valued function on {-1,+1}^n."""

    values: np.ndarray
    n: int = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values)
        n = _arity_from_length(vals.size) if self.n is None else _check_arity(self.n)
        _check_arity(n)
        if vals.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} entries for arity {n}, got {vals.shape}")
        if not np.all((vals == 1) | (vals == -1)):
            raise ValueError("truth table entries must be -1 or +1")
        object.__setattr__(self, "values", _frozen(vals, np.int8))
        object.__setattr__(self, "n", n)

    def __call__(self, x):
        return int(self.values[point_to_index(x)])

    def __eq__(self, other):
        return (
            isinstance(other, TruthTable)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self):
        return f"TruthTable(n={self.n}, values={self.to_text().splitlines()[1]!r})"

    @property
    def p(self):
        """Probability of outputting +1, as for a :class:`ProbFunction`."""
        return (self.values.astype(float) + 1.0) / 2.0

    def to_prob(self):
        return ProbFunction(self.p, self.n)

    def is_constant(self):
        return bool(np.all(self.values == self.values[0]))

    def to_text(self):
        body = "".join("+" if v == 1 else "-" for v in self.values)
        return f"n={self.n}\n{body}\n"

    @classmethod
    def from_text(cls, text):
        n, body = _split_header(text)
        chars = "".join(body.split())
        if len(chars) != 1 << n:
            raise ValueError(f"expected {1 << n} '+'/'-' characters, found {len(chars)}")
        bad = set(chars) - {"+", "-"}
        if bad:
            raise ValueError(f"unexpected characters {sorted(bad)} in truth table")
        return cls(np.array([1 if c == "+" else -1 for c in chars]), n)


@dataclass(frozen=True, eq=False)
class ProbFunction:
    """A randomized Boolean function; ``p[x]`` is Pr[output = +1]."""

    p: np.ndarray
    n: int = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        n = _arity_from_length(p.size) if self.n is None else _check_arity(self.n)
        if p.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} entries for arity {n}, got {p.shape}")
        if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "p", _frozen(p, float))
        object.__setattr__(self, "n", n)

    def __eq__(self, other):
        return isinstance(other, ProbFunction) and self.n == other.n and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash((self.n, self.p.tobytes()))

    def __repr__(self):
        return f"ProbFunction(n={self.n}, p={self.p.tolist()!r})"

    @property
    def expectation(self):
        """Pointwise expected output 2p - 1."""
        return 2.0 * self.p - 1.0

    def is_deterministic(self):
        return bool(np.all((self.p == 0) | (self.p == 1)))

    def to_truth_table(self):
        if not self.is_deterministic():
            raise ValueError("function is randomized; no truth table exists")
        return TruthTable(np.where(self.p == 1, 1, -1), self.n)

    def to_prob(self):
        return self

    def to_text(self):
        return f"n={self.n}\n" + " ".join(repr(float(v)) for v in self.p) + "\n"

    @classmethod
    def from_text(cls, text):
        n, body = _split_header(text)
        return cls(_parse_floats(body, 1 << n), n)


@dataclass(frozen=True, eq=False)
class Distribution:
    """An explicit probability vector over {-1,+1}^n."""

    weights: np.ndarray
    n: int = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        n = _arity_from_length(w.size) if self.n is None else _check_arity(self.n)
        if w.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} weights for arity {n}, got {w.shape}")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > TOL.normalization:
            raise ValueError(f"weights sum to {float(w.sum())!r}, not 1")
        object.__setattr__(self, "weights", _frozen(w, float))
        object.__setattr__(self, "n", n)

    @classmethod
    def from_unnormalized(cls, weights, n=None):
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive total mass")
        return cls(w / total, n)

    def __eq__(self, other):
        return isinstance(other, Distribution) and self.n == other.n and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.n, self.weights.tobytes()))

    def __repr__(self):
        return f"Distribution(n={self.n}, weights={self.weights.tolist()!r})"

    def to_distribution(self):
        return self

    def to_text(self):
        return f"n={self.n}\n" + " ".join(repr(float(v)) for v in self.weights) + "\n"

    @classmethod
    def from_text(cls, text):
        n, body = _split_header(text)
        return cls(_parse_floats(body, 1 << n), n)


@dataclass(frozen=True, eq=False)
class ProductDist:
    """Product distribution on {-1,+1}^n with coordinate means ``nu``."""

    nu: np.ndarray

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float).reshape(-1)
        _check_arity(nu.size)
        if np.any(~np.isfinite(nu)) or np.any(np.abs(nu) > 1):
            raise ValueError("every mean must lie in [-1, 1]")
        object.__setattr__(self, "nu", _frozen(nu, float))

    @property
    def n(self):
        return int(self.nu.size)

    @property
    def weights(self):
        pts = cube_points(self.n)
        return np.prod((1.0 + pts * self.nu) / 2.0, axis=1)

    def weight(self, x):
        return float(np.prod([(1.0 + xi * v) / 2.0 for xi, v in zip(x, self.nu)]))

    def to_distribution(self):
        return Distribution(self.weights, self.n)

    def __eq__(self, other):
        return isinstance(other, ProductDist) and np.array_equal(self.nu, other.nu)

    def __hash__(self):
        return hash(self.nu.tobytes())

    def __repr__(self):
        return f"ProductDist(nu={self.nu.tolist()!r})"


def _split_header(text):
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise ValueError("empty input")
    m = re.fullmatch(r"n\s*=\s*(\d+)", lines[0])
    if not m:
        raise ValueError(f"line 1: expected header 'n=<arity>', got {lines[0]!r}")
    return _check_arity(int(m.group(1))), "\n".join(lines[1:])


def _parse_floats(body, count):
    toks = body.split()
    if len(toks) != count:
        raise ValueError(f"expected {count} numbers, found {len(toks)}")
    try:
        return np.array([float(t) for t in toks])
    except ValueError as exc:
        raise ValueError(f"malformed number: {exc}") from None


def load(path, kind):
    """Read a file written by ``to_text``; ``kind`` is 'table', 'prob' or 'dist'."""
    cls = {"table": TruthTable, "prob": ProbFunction, "dist": Distribution}[kind]
    return cls.from_text(Path(path).read_text())


# ---------------------------------------------------------------- named functions

_NAMES = ("XOR", "MAJ", "AND", "OR", "DICT", "THRESH")


def make_named(name, arity, param=None):
    """Truth table of a named function.

    ``name`` is one of XOR, MAJ, AND, OR, DICT, THRESH (case-insensitive);
    the forms ``"dict:i"`` and ``"thresh:t"`` carry their parameter inline.
    MAJ and THRESH output +1 when the coordinate sum is >= the threshold
    (0 for MAJ), so ties go to +1.
    """
    if isinstance(name, str) and ":" in name:
        name, raw = name.split(":", 1)
        param = float(raw) if name.upper() == "THRESH" else int(raw)
    key = str(name).upper()
    if key not in _NAMES:
        raise ValueError(f"unknown function {name!r}; expected one of {', '.join(_NAMES)}")
    n = _check_arity(arity)
    if n < 1:
        raise ValueError("arity must be at least 1")
    pts = cube_points(n).astype(np.int64)
    s = pts.sum(axis=1)
    if key == "XOR":
        vals = np.prod(pts, axis=1)
    elif key == "MAJ":
        vals = np.where(s >= 0, 1, -1)
    elif key == "AND":
        vals = np.where(s == n, 1, -1)
    elif key == "OR":
        vals = np.where(s > -n, 1, -1)
    elif key == "DICT":
        if param is None or not 1 <= int(param) <= n:
            raise ValueError(f"DICT index must be in 1..{n}, got {param!r}")
        vals = pts[:, int(param) - 1]
    else:
        if param is None:
            raise ValueError("THRESH requires a threshold")
        vals = np.where(s >= float(param), 1, -1)
    return TruthTable(vals, n)


def uniform_dist(n):
    if _check_arity(n) < 1:
        raise ValueError("arity must be at least 1")
    return ProductDist(np.zeros(n))


def as_weights(D, n=None):
    """Weight vector of a Distribution or ProductDist, checking the arity."""
    if isinstance(D, (Distribution, ProductDist)):
        if n is not None and D.n != n:
            raise ArityMismatchError(f"distribution has arity {D.n}, function has arity {n}")
        return np.asarray(D.weights)
    raise TypeError(f"expected a Distribution or ProductDist, got {type(D).__name__}")


def as_prob(f):
    if isinstance(f, (TruthTable, ProbFunction)):
        return f.to_prob()
    raise TypeError(f"expected a TruthTable or ProbFunction, got {type(f).__name__}")


def mean(f, D):
    """E_{x~D}[f(x)] for a +-1 valued (possibly randomized) function."""
    q = as_prob(f)
    w = as_weights(D, q.n)
    return float(np.dot(w, q.expectation))


def random_table(n, rng, nonconstant=False):
    while True:
        t = TruthTable(rng.choice(np.array([-1, 1]), size=1 << n), n)
        if not nonconstant or not t.is_constant():
            return t


def random_distribution(n, rng, alpha=1.0):
    return Distribution.from_unnormalized(rng.dirichlet(np.full(1 << n, alpha)), n)
