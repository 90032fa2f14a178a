"""Composed functions g(f(x^1), ..., f(x^k)) and their junta approximations.

Blocks are independent under D^k, so every composed-space expectation is
assembled from k per-block 2x2 joint laws of (f(x), approx(x)). The full
2^(nk) table is only built for small cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ._cube import cube_points
from .boolfn import Distribution, ProbFunction, TruthTable, as_prob, as_weights, mean
from .config import MAX_MATERIALIZED_COMPOSED, TOL
from .exceptions import ArityMismatchError, BoundViolation, CapacityError
from .fourier import biased_spectrum, check_bias
from .junta import JuntaApprox, advantage_curve, optimal_junta
from .stability import best_combiner, combiner_advantage, stab_fourier


@dataclass(frozen=True, eq=False)
class ComposedInstance:
    """Outer function ``g`` on k bits, inner ``f`` on n bits, block law ``D``."""

    g: TruthTable
    f: ProbFunction
    D: object
    mu: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.g, TruthTable):
            raise TypeError("outer function must be a TruthTable")
        f = as_prob(self.f)
        object.__setattr__(self, "f", f)
        as_weights(self.D, f.n)
        object.__setattr__(self, "mu", mean(f, self.D))

    @property
    def k(self):
        return self.g.n

    @property
    def n(self):
        return self.f.n

    @property
    def weights(self):
        return as_weights(self.D, self.n)

    def curve(self):
        cached = self.__dict__.get("_curve")
        if cached is None:
            cached = advantage_curve(self.f, self.D)
            object.__setattr__(self, "_curve", cached)
        return cached


def _blocks(inst, x):
    x = np.asarray(x)
    if x.size != inst.k * inst.n:
        raise ArityMismatchError(f"expected {inst.k} blocks of {inst.n} bits, got {x.size} entries")
    x = x.reshape(inst.k, inst.n)
    if not np.all((x == 1) | (x == -1)):
        raise ValueError("composed input entries must be -1 or +1")
    return [int(np.dot((blk == 1).astype(np.int64), 1 << np.arange(inst.n))) for blk in x]


def _mean_of_g(g, p):
    """E[g(z)] when z_i = +1 independently with probability p[i]."""
    w = np.prod(np.where(cube_points(g.n) == 1, p, 1.0 - np.asarray(p)), axis=1)
    return float(np.dot(g.values, w))


def compose_eval(inst, x):
    """(g o f)(x) for deterministic f, otherwise Pr[(g o f)(x) = +1]."""
    p = inst.f.p[_blocks(inst, x)]
    if inst.f.is_deterministic():
        return int(inst.g.values[int(np.dot((p == 1).astype(np.int64), 1 << np.arange(inst.k)))])
    return (1.0 + _mean_of_g(inst.g, p)) / 2.0


def composed_table(inst):
    """(g o f) and D^k on nk bits; block i occupies bits [i n, (i+1) n)."""
    n, k = inst.n, inst.k
    if n * k > MAX_MATERIALIZED_COMPOSED:
        raise CapacityError(f"composed arity {n * k} exceeds {MAX_MATERIALIZED_COMPOSED}")
    p = inst.f.p
    w = np.ones(1)
    for _ in range(k):
        w = np.kron(inst.weights, w)
    expect = np.zeros(1 << (n * k))
    for zi, z in enumerate(cube_points(k)):
        term = np.ones(1)
        for i in range(k):
            term = np.kron(p if z[i] == 1 else 1.0 - p, term)
        expect += inst.g.values[zi] * term
    prob = np.clip((1.0 + expect) / 2.0, 0.0, 1.0)
    func = ProbFunction(prob, n * k)
    if inst.f.is_deterministic():
        func = func.to_truth_table()
    return func, Distribution(w / w.sum(), n * k)


# ---------------------------------------------------------------- per-block statistics


def _approx_values(approx, n):
    if isinstance(approx, JuntaApprox):
        approx = approx.to_truth_table()
    if isinstance(approx, TruthTable):
        if approx.n != n:
            raise ArityMismatchError(f"approximator has arity {approx.n}, blocks have {n}")
        return approx.values
    vals = np.asarray(approx)
    if vals.shape != (1 << n,):
        raise ArityMismatchError(f"approximator table must have {1 << n} entries")
    return vals


def block_joint(inst, approx):
    """J[z, y] = Pr_D[f(x) = z, approx(x) = y]; index 0 means -1."""
    y = _approx_values(approx, inst.n) == 1
    w = inst.weights
    p = inst.f.p
    J = np.empty((2, 2))
    for zi, pz in enumerate((1.0 - p, p)):
        J[zi, 0] = np.sum(w * pz * ~y)
        J[zi, 1] = np.sum(w * pz * y)
    return J


def _check_partition(inst, parts):
    parts = tuple(int(r) for r in parts)
    if len(parts) != inst.k:
        raise ArityMismatchError(f"partition has {len(parts)} parts, expected {inst.k}")
    if any(r < 0 for r in parts):
        raise ValueError("budget parts must be nonnegative")
    return parts


def block_approximators(inst, parts):
    """The optimal junta of each block's budget, shared between equal budgets."""
    parts = _check_partition(inst, parts)
    memo = {}
    for r in parts:
        if r not in memo:
            memo[r] = optimal_junta(inst.f, inst.D, r)
    return [memo[r] for r in parts]


class CorrelationReport(NamedTuple):
    alpha: np.ndarray
    beta: np.ndarray


def normalized_correlations(advantages, mu):
    """Lower (squared) and upper (linear) normalized correlations, clamped at 0."""
    a = np.asarray(advantages, dtype=float)
    s = 1.0 - mu * mu
    alpha = np.maximum(0.0, (a * a - mu * mu) / s)
    beta = np.maximum(0.0, (a - mu * mu) / s)
    return CorrelationReport(np.minimum(alpha, 1.0), np.minimum(beta, 1.0))


def correlations(inst, parts):
    parts = _check_partition(inst, parts)
    check_bias(inst.mu)
    curve = inst.curve()
    return normalized_correlations([curve[r] for r in parts], inst.mu)


def _spectrum(inst):
    cached = inst.__dict__.get("_spec")
    if cached is None:
        cached = biased_spectrum(inst.g, check_bias(inst.mu))
        object.__setattr__(inst, "_spec", cached)
    return cached


def stab_pair(inst, parts):
    """(Stab at alpha, Stab at beta) for the given budget partition."""
    corr = correlations(inst, parts)
    spec = _spectrum(inst)
    return stab_fourier(spec, inst.mu, corr.alpha), stab_fourier(spec, inst.mu, corr.beta)


class CanonicalForm(NamedTuple):
    parts: tuple
    h: TruthTable
    advantage: float
    unreachable: np.ndarray
    approximators: list


def canonical_form(inst, approximators):
    """Best combiner h for arbitrary block approximators, and its advantage."""
    if len(approximators) != inst.k:
        raise ArityMismatchError(f"{len(approximators)} approximators for {inst.k} blocks")
    joints = [block_joint(inst, q) for q in approximators]
    best = best_combiner(inst.g, joints)
    return best.table, best.advantage, best.unreachable


def composed_form_advantage(inst, approximators, h):
    """Advantage of h(q_1(x^1), ..., q_k(x^k)) against g o f under D^k."""
    joints = [block_joint(inst, q) for q in approximators]
    return combiner_advantage(inst.g, h, joints)


def canonical_h(inst, parts):
    parts = _check_partition(inst, parts)
    approx = block_approximators(inst, parts)
    h, adv, unreachable = canonical_form(inst, approx)
    return CanonicalForm(parts, h, adv, unreachable, approx)


def canonical_advantage(inst, parts, check=True):
    """Exact advantage of the canonical composed form.

    With ``check`` the lower bound Stab at alpha is enforced.
    """
    form = canonical_h(inst, parts)
    if check:
        stab_alpha, _ = stab_pair(inst, form.parts)
        if form.advantage < stab_alpha - TOL.identity:
            raise BoundViolation(
                f"canonical advantage {form.advantage!r} is below Stab at alpha {stab_alpha!r}"
            )
    return form.advantage


def opt_upper_bound(inst, parts):
    _, stab_beta = stab_pair(inst, parts)
    return math.sqrt(max(stab_beta, 0.0))


# ---------------------------------------------------------------- budget partitions


def partitions(total, k, cap):
    """All tuples of k integers in [0, cap] summing to ``total``, lexicographic."""
    if k == 0:
        if total == 0:
            yield ()
        return
    lo = max(0, total - cap * (k - 1))
    for r in range(lo, min(cap, total) + 1):
        for rest in partitions(total - r, k - 1, cap):
            yield (r,) + rest


def _budget_total(inst, R):
    if R < 0:
        raise ValueError("budget must be nonnegative")
    return min(int(R), inst.k * inst.n)


class PartitionChoice(NamedTuple):
    parts: tuple
    value: float
    ties: tuple


def best_partition(inst, R):
    """Budget split maximizing Stab at beta.

    Parts lie in [0, n] and sum to min(R, kn); extra budget past n is
    useless to a block. Ties go to the lexicographically largest split,
    which front-loads budget; all tied splits are returned in ``ties``.
    """
    total = _budget_total(inst, R)
    check_bias(inst.mu)
    curve = inst.curve()
    spec = _spectrum(inst)
    cache = {}
    scored = []
    for parts in partitions(total, inst.k, inst.n):
        key = tuple(sorted(parts)) if _symmetric(inst) else parts
        if key not in cache:
            beta = normalized_correlations([curve[r] for r in parts], inst.mu).beta
            cache[key] = stab_fourier(spec, inst.mu, beta)
        scored.append((cache[key], parts))
    top = max(v for v, _ in scored)
    ties = tuple(p for v, p in scored if v >= top - TOL.tie)
    return PartitionChoice(max(ties), float(top), ties)


def _symmetric(inst):
    cached = inst.__dict__.get("_sym")
    if cached is None:
        from .stability import is_symmetric

        cached = is_symmetric(inst.g)
        object.__setattr__(inst, "_sym", cached)
    return cached


def best_canonical(inst, R):
    """The canonical composed form with the largest advantage over all splits."""
    total = _budget_total(inst, R)
    best = None
    for parts in partitions(total, inst.k, inst.n):
        form = canonical_h(inst, parts)
        if best is None or form.advantage > best.advantage + TOL.tie:
            best = form
    return best


# ---------------------------------------------------------------- theorem checks


@dataclass
class BoundsReport:
    partition: tuple
    alpha: list
    beta: list
    stab_alpha: float
    stab_beta: float
    canonical_adv: float
    opt_adv: Optional[float]
    checks: list
    ties: list = field(default_factory=list)

    @property
    def bounds_ok(self):
        return all(ok for _, _, ok in self.checks)

    def to_json(self):
        return {
            "partition": list(self.partition),
            "alpha": [float(a) for a in self.alpha],
            "beta": [float(b) for b in self.beta],
            "stab_alpha": self.stab_alpha,
            "stab_beta": self.stab_beta,
            "canonical_adv": self.canonical_adv,
            "opt_adv": self.opt_adv,
            "ties": [list(t) for t in self.ties],
            "checks": [{"name": n, "detail": d, "pass": ok} for n, d, ok in self.checks],
            "bounds_ok": self.bounds_ok,
        }


def optimal_composed_advantage(inst, R):
    """Best advantage of any R-junta on the composed domain, by exhaustive search."""
    func, Dk = composed_table(inst)
    return optimal_junta(func, Dk, min(int(R), inst.n * inst.k)).advantage


def _le(name, lhs, rhs):
    return (name, f"{lhs!r} <= {rhs!r}", bool(lhs <= rhs + TOL.identity))


def sandwich_check(inst, R, exhaustive=True):
    """Stab_alpha <= best canonical <= optimal R-junta <= sqrt(Stab_beta).

    Alpha and beta are taken at the best split. For balanced f (mu = 0) the
    left end is also checked in the squared form Stab_beta^2. The optimal R-junta ranges over
    all coordinate sets of the composed domain, not only block-aligned ones.
    """
    choice = best_partition(inst, R)
    corr = correlations(inst, choice.parts)
    stab_alpha, stab_beta = stab_pair(inst, choice.parts)
    at_choice = canonical_h(inst, choice.parts).advantage
    best = best_canonical(inst, R)
    checks = [_le("stab_alpha <= canonical(best split)", stab_alpha, at_choice)]
    if abs(inst.mu) <= TOL.identity:
        # the squared form needs alpha_i = beta_i^2, which only holds for balanced f
        checks.append(_le("stab_beta^2 <= canonical", stab_beta**2, best.advantage))
    opt = None
    if exhaustive:
        opt = optimal_composed_advantage(inst, R)
        checks.append(_le("canonical <= optimal", best.advantage, opt))
        checks.append(_le("optimal <= sqrt(stab_beta)", opt, math.sqrt(max(stab_beta, 0.0))))
    else:
        checks.append(_le("canonical <= sqrt(stab_beta)", best.advantage, math.sqrt(max(stab_beta, 0.0))))
    return BoundsReport(
        choice.parts, corr.alpha.tolist(), corr.beta.tolist(), stab_alpha, stab_beta,
        best.advantage, opt, checks, list(choice.ties),
    )


def error4_check(inst, R, exhaustive=True):
    """Canonical error at most 4 times the optimal R-junta error."""
    report = sandwich_check(inst, R, exhaustive)
    canon_err = (1.0 - report.canonical_adv) / 2.0
    checks = list(report.checks)
    if exhaustive:
        opt_err = (1.0 - report.opt_adv) / 2.0
        checks.append(_le("canonical_error <= 4 optimal_error", canon_err, 4.0 * opt_err))
    lo = (1.0 - math.sqrt(max(report.stab_beta, 0.0))) / 2.0
    checks.append(_le("canonical_error <= 4 lower bound", canon_err, 4.0 * lo))
    report.checks = checks
    return report


def prod_iq_holds(alpha, beta):
    """1 - prod(alpha) <= 2 (1 - prod(beta)), given 1 - alpha_i <= 2 (1 - beta_i)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(1.0 - alpha > 2.0 * (1.0 - beta) + TOL.identity):
        raise ValueError("hypothesis 1 - alpha_i <= 2 (1 - beta_i) fails")
    return bool(1.0 - np.prod(alpha) <= 2.0 * (1.0 - np.prod(beta)) + TOL.identity)


def xor_error_bound(f, D, R, k):
    """min over splits of (1 - sqrt(prod_i (1 - 2 error_i))) / 2 for XOR_k o f.

    The product is maximized by dynamic programming over blocks.
    """
    q = as_prob(f)
    curve = advantage_curve(q, D)
    n = q.n
    total = min(int(R), n * k)
    best = np.full(total + 1, -np.inf)
    best[0] = 1.0
    for _ in range(k):
        nxt = np.full(total + 1, -np.inf)
        for b in range(total + 1):
            for r in range(min(n, b) + 1):
                if best[b - r] > -np.inf:
                    nxt[b] = max(nxt[b], best[b - r] * curve[r])
        best = nxt
    prod = max(float(best[total]), 0.0)
    return (1.0 - math.sqrt(prod)) / 2.0
