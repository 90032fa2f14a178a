"""Multivariate, unbalanced and partial-noise stability of Boolean functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Optional

import numpy as np

from ._cube import cube_points, kron_apply, subset_product_weights
from .boolfn import TruthTable
from .config import MAX_SPECTRUM_ARITY, TOL
from .exceptions import (
    ArityMismatchError,
    BoundViolation,
    CapacityError,
    DegenerateStabilityError,
    NotSymmetricError,
)
from .fourier import BiasedSpectrum, biased_spectrum, check_bias


def check_rho(rho, k=None):
    """Validate a correlation vector; errors name the 1-based offending entry."""
    rho = np.asarray(rho, dtype=float).reshape(-1)
    if k is not None and rho.size != k:
        raise ArityMismatchError(f"correlation vector has {rho.size} entries, expected {k}")
    for i, r in enumerate(rho, start=1):
        if not (0.0 <= r <= 1.0):
            raise ValueError(f"rho_{i} = {float(r)!r} is outside [0, 1]")
    return rho


def _spectrum(g, mu):
    if isinstance(g, BiasedSpectrum):
        if g.mu != mu:
            return biased_spectrum(g.inverse(), mu)
        return g
    return biased_spectrum(g, mu)


def stab_fourier(g, mu, rho):
    """Stab_{mu,rho}(g) = sum_S ghat_mu(S)^2 prod_{i in S} rho_i."""
    mu = check_bias(mu)
    spec = _spectrum(g, mu)
    rho = check_rho(rho, spec.k)
    return float(np.dot(spec.coeffs**2, subset_product_weights(rho)))


def stab_xor_closed(mu, rho):
    """Closed form for parity: prod_i (rho_i + (1 - rho_i) mu^2)."""
    rho = check_rho(rho)
    return float(np.prod(rho + (1.0 - rho) * mu * mu))


class StabEstimate(NamedTuple):
    value: float
    stderr: float
    samples: int


_CHUNK = 1 << 16


def stab_sampled(g, mu, rho, samples, seed=0):
    """Monte-Carlo estimate of E[g(y) g(z)] under the correlated-pair process.

    Randomness is drawn in fixed-size chunks, each seeded by ``(seed, chunk)``,
    so the estimate depends only on ``seed`` and ``samples``.
    """
    mu = check_bias(mu)
    if not isinstance(g, TruthTable):
        raise TypeError("stab_sampled needs a TruthTable")
    k = g.n
    rho = check_rho(rho, k)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    p_plus = (1.0 + mu) / 2.0
    # Pr[z_i = +1 | y_i] for y_i = -1 and y_i = +1
    stay_lo = (1.0 - rho) * p_plus
    stay_hi = rho + (1.0 - rho) * p_plus
    weights = (1 << np.arange(k)).astype(np.int64)
    vals = g.values.astype(np.float64)
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = 0
    while done < samples:
        b = min(_CHUNK, samples - done)
        rng = np.random.default_rng([int(seed), chunk])
        y = rng.random((b, k)) < p_plus
        z = rng.random((b, k)) < np.where(y, stay_hi, stay_lo)
        prod = vals[y.astype(np.int64) @ weights] * vals[z.astype(np.int64) @ weights]
        total += prod.sum()
        total_sq += np.dot(prod, prod)
        done += b
        chunk += 1
    m = total / samples
    var = max(total_sq / samples - m * m, 0.0)
    if samples > 1:
        var *= samples / (samples - 1)
    return StabEstimate(float(m), float(math.sqrt(var / samples)), int(samples))


# ---------------------------------------------------------------- unbalanced noise


@dataclass(frozen=True)
class UnbalParams:
    """Stay-probabilities: ``a`` on -1 inputs, ``b`` on +1 inputs."""

    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v!r} is outside [0, 1]")


def unbal_joint(mu, a, b):
    """2x2 joint law of (x_i, y_i); rows index x_i, columns y_i (0 is -1)."""
    pm, pp = (1.0 - mu) / 2.0, (1.0 + mu) / 2.0
    return np.array([[pm * a, pm * (1.0 - a)], [pp * (1.0 - b), pp * b]])


def _check_joints(joints, k):
    joints = [np.asarray(j, dtype=float) for j in joints]
    if len(joints) != k:
        raise ArityMismatchError(f"{len(joints)} joint laws given for arity {k}")
    for i, j in enumerate(joints):
        if j.shape != (2, 2) or np.any(j < -TOL.normalization) or abs(j.sum() - 1) > 1e-9:
            raise ValueError(f"joint law {i} is not a 2x2 probability matrix")
    return joints


def conditional_numerators(g, joints):
    """N(y) = sum_z g(z) prod_i J_i[z_i, y_i]; equals Pr[y] E[g(z) | y]."""
    vals = g.values if isinstance(g, TruthTable) else np.asarray(g, dtype=float)
    k = int(vals.size).bit_length() - 1
    joints = _check_joints(joints, k)
    return kron_apply([j.T for j in joints], vals)


def combiner_advantage(g, h, joints):
    """E[g(z) h(y)] when the pairs (z_i, y_i) are independent with the given laws."""
    if isinstance(h, TruthTable):
        h = h.values
    return float(np.dot(np.asarray(h, dtype=float), conditional_numerators(g, joints)))


class BestCombiner(NamedTuple):
    table: TruthTable
    advantage: float
    unreachable: np.ndarray


def best_combiner(g, joints):
    """The h maximizing E[g(z) h(y)]: h(y) = sign(E[g(z) | y]), sign(0) = +1.

    Rows with Pr[y] = 0 are set to +1 and reported in ``unreachable``.
    """
    num = conditional_numerators(g, joints)
    k = g.n
    marg = np.array([np.asarray(j).sum(axis=0) for j in joints])
    py = np.prod(marg[np.arange(k), cube_points(k).clip(0)], axis=1) if k else np.ones(1)
    unreachable = py <= 0
    # treat rounding-level negatives as ties so sign(0) = +1 is stable
    h = np.where(num >= -TOL.tie, 1, -1)
    h[unreachable] = 1
    return BestCombiner(TruthTable(h, k), float(np.abs(num).sum()), unreachable)


def lower_normalized_correlations(joints, mu):
    """max(0, (E[z_i y_i]^2 - mu^2) / (1 - mu^2)) per coordinate."""
    sgn = np.array([[1.0, -1.0], [-1.0, 1.0]])
    out = []
    for j in joints:
        c = float(np.sum(np.asarray(j) * sgn))
        out.append(max(0.0, (c * c - mu * mu) / (1.0 - mu * mu)))
    return np.array(out)


def unbal_stab(g, h, mu, params):
    """UnbalStab_{mu,(a,b)}(g, h) = E[g(x) h(y)], exactly.

    Evaluated as ``g^T (J (x) ... (x) J) h`` coordinate by coordinate.
    """
    if isinstance(params, tuple):
        params = UnbalParams(*params)
    if not -1.0 <= mu <= 1.0:
        raise ValueError(f"mu = {mu!r} is outside [-1, 1]")
    if g.n != h.n:
        raise ArityMismatchError(f"arities differ: {g.n} vs {h.n}")
    joint = unbal_joint(mu, params.a, params.b)
    return combiner_advantage(g, h, [joint] * g.n)


# ---------------------------------------------------------------- partial noise


def _ceil_fraction(delta, k):
    return int(math.ceil(round(delta * k, 9)))


def vertex_stabilities(spec, c):
    """F[T] = Stab at rho with rho_i = c on T and 1 elsewhere, for every T."""
    return kron_apply([[[1.0, 1.0], [1.0, c]]] * spec.k, spec.coeffs**2)


def delta_eps_stab(g, delta, eps, mu=0.0):
    """(delta, eps)-noise stability and a maximizing correlation vector.

    The maximum sits at ceil(delta k) coordinates equal to 1 - 2 eps and the
    rest at 1; every placement is scanned, ties go to the smallest bitmask.
    """
    mu = check_bias(mu)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta = {delta!r} is outside [0, 1]")
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"eps = {eps!r} is outside [0, 1/2]")
    k = g.n
    if k > MAX_SPECTRUM_ARITY:
        raise CapacityError(f"arity {k} too large for subset enumeration")
    m = _ceil_fraction(delta, k)
    c = 1.0 - 2.0 * eps
    spec = biased_spectrum(g, mu)
    if is_symmetric(g):
        T = (1 << m) - 1
        value = float(np.dot(spec.coeffs**2, subset_product_weights([c] * m + [1.0] * (k - m))))
    else:
        F = vertex_stabilities(spec, c)
        best, T = -np.inf, 0
        for combo in combinations(range(k), m):
            mask = sum(1 << i for i in combo)
            if F[mask] > best + TOL.tie or (abs(F[mask] - best) <= TOL.tie and mask < T):
                best, T = F[mask], mask
        value = float(best)
    witness = np.array([c if (T >> i) & 1 else 1.0 for i in range(k)])
    return value, witness


def is_symmetric(g):
    """Invariance under every adjacent transposition, hence under all permutations."""
    k = g.n
    idx = np.arange(1 << k)
    for i in range(k - 1):
        bi = (idx >> i) & 1
        bj = (idx >> (i + 1)) & 1
        swapped = idx ^ ((bi ^ bj) << i) ^ ((bi ^ bj) << (i + 1))
        if not np.array_equal(g.values, g.values[swapped]):
            return False
    return True


class AmGmSandwich(NamedTuple):
    gm_lower: float
    exact: float
    am_upper: Optional[float]


def am_gm_sandwich(g, mu, rho, assume_transitive=False):
    """Stability at the geometric mean, at rho itself, and at the arithmetic mean.

    The upper bound needs a symmetric ``g``. A caller who knows ``g`` is
    transitive may pass ``assume_transitive=True`` to get the lower bound alone.
    """
    mu = check_bias(mu)
    k = g.n
    rho = check_rho(rho, k)
    symmetric = is_symmetric(g)
    if not symmetric and not assume_transitive:
        raise NotSymmetricError("g is not invariant under coordinate transpositions")
    spec = biased_spectrum(g, mu)
    gm = float(np.prod(rho) ** (1.0 / k))
    am = float(np.mean(rho))
    exact = stab_fourier(spec, mu, rho)
    lower = stab_fourier(spec, mu, np.full(k, gm))
    upper = stab_fourier(spec, mu, np.full(k, am)) if symmetric else None
    if lower > exact + TOL.identity:
        raise BoundViolation(f"GM bound {lower!r} exceeds exact {exact!r}")
    if upper is not None and exact > upper + TOL.identity:
        raise BoundViolation(f"exact {exact!r} exceeds AM bound {upper!r}")
    return AmGmSandwich(lower, exact, upper)


def univariate_stab(spec, rho):
    """Stab at the constant vector (rho, ..., rho)."""
    lw = spec.level_weights()
    return float(np.dot(lw, float(rho) ** np.arange(spec.k + 1)))


class RhoStar(NamedTuple):
    rho_star: float
    lo: float
    hi: float
    value: float


def rho_star_bracket(g, delta, eps, mu=0.0):
    """Scalar rho* whose univariate stability equals the (delta, eps)-stability.

    Returns rho* with the interval [1 - 2 d' eps - 4 eps^2, 1 - 2 d' eps],
    d' = ceil(k delta)/k, and checks that rho* lies inside it.
    """
    if not is_symmetric(g):
        raise NotSymmetricError("rho* bracket requires a symmetric g")
    mu = check_bias(mu)
    spec = biased_spectrum(g, mu)
    lw = spec.level_weights()
    if lw[1:].sum() <= TOL.identity:
        raise DegenerateStabilityError("g is constant; stability does not depend on rho")
    value, _ = delta_eps_stab(g, delta, eps, mu)
    lo_r, hi_r = 0.0, 1.0
    for _ in range(TOL.bisection_max_iter):
        mid = 0.5 * (lo_r + hi_r)
        if univariate_stab(spec, mid) < value:
            lo_r = mid
        else:
            hi_r = mid
        if hi_r - lo_r < TOL.bisection:
            break
    rho_star = 0.5 * (lo_r + hi_r)
    d_prime = _ceil_fraction(delta, g.n) / g.n
    hi = 1.0 - 2.0 * d_prime * eps
    lo = hi - 4.0 * eps * eps
    # bisection tolerance plus identity slack
    slack = TOL.bisection + TOL.identity
    if not (lo - slack <= rho_star <= hi + slack):
        raise BoundViolation(f"rho*={rho_star!r} outside [{lo!r}, {hi!r}]")
    return RhoStar(rho_star, lo, hi, value)


def qc(c, x):
    """(1-x)^c - 1 + c x + (1-c) x^2, nonnegative on [0,1]^2."""
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    return (1.0 - x) ** c - 1.0 + c * x + (1.0 - c) * x * x
