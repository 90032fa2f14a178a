"""Scripted counterexamples for natural composition conjectures."""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field

import numpy as np

from ._cube import popcount
from .boolfn import ProbFunction, TruthTable, make_named, mean, uniform_dist
from .composition import (
    ComposedInstance,
    best_canonical,
    best_partition,
    block_joint,
    canonical_h,
    composed_form_advantage,
    composed_table,
)
from .junta import min_conditional_mean, optimal_junta
from .stability import conditional_numerators

_OPS = {
    "==": operator.eq,
    "<=": operator.le,
    ">=": operator.ge,
    "<": operator.lt,
    ">": operator.gt,
}


@dataclass
class Assertion:
    name: str
    lhs: str
    op: str
    rhs: object
    tol: float = 0.0
    passed: bool = False

    def evaluate(self, quantities):
        a = quantities[self.lhs]
        b = quantities[self.rhs] if isinstance(self.rhs, str) else self.rhs
        if self.op == "==":
            return abs(a - b) <= self.tol
        if self.op in ("<=", "<"):
            return _OPS[self.op](a, b + self.tol)
        return _OPS[self.op](a, b - self.tol)


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    quantities: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def record(self, **values):
        for key, v in values.items():
            self.quantities[key] = float(v)

    def check(self, name, lhs, op, rhs, tol=0.0):
        a = Assertion(name, lhs, op, rhs, tol)
        a.passed = bool(a.evaluate(self.quantities))
        self.assertions.append(a)
        return a.passed

    @property
    def passed(self):
        return all(a.passed for a in self.assertions)

    def recompute(self):
        """Re-evaluate every assertion from the stored quantities."""
        return [bool(a.evaluate(self.quantities)) for a in self.assertions]

    def to_json(self):
        return {
            "name": self.name,
            "parameters": self.parameters,
            "quantities": self.quantities,
            "assertions": [
                {"name": a.name, "lhs": a.lhs, "op": a.op, "rhs": a.rhs, "tol": a.tol, "pass": a.passed}
                for a in self.assertions
            ],
            "notes": list(self.notes),
            "passed": self.passed,
        }

    def to_text(self):
        lines = [f"{self.name} {self.parameters}"]
        lines += [f"  {k} = {v!r}" for k, v in self.quantities.items()]
        for a in self.assertions:
            mark = "PASS" if a.passed else "FAIL"
            lines.append(f"  [{mark}] {a.name}: {a.lhs} {a.op} {a.rhs} (tol {a.tol})")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _constant(n, value=1):
    return TruthTable(np.full(1 << n, value), n)


# ---------------------------------------------------------------- majority of parities


def majority_minus_one(k):
    """Majority of the first k-1 inputs (ties to +1), ignoring the last one."""
    if k == 1:
        return _constant(1)
    maj = make_named("MAJ", k - 1)
    return TruthTable(np.tile(maj.values, 2), k)


def counterexample_majority_parity(k=3, n=3):
    """MAJ_k of XOR_n blocks under the uniform law with budget R = (n - 1) k."""
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k = {k} must be a positive odd integer")
    if n < k:
        raise ValueError(f"n = {n} must be at least k = {k}")
    R = (n - 1) * k
    g, f = make_named("MAJ", k), make_named("XOR", n)
    inst = ComposedInstance(g, f, uniform_dist(n))
    report = ExperimentReport("majority_parity", {"k": k, "n": n, "R": R})

    equal = canonical_h(inst, (n - 1,) * k).approximators
    equal_adv = composed_form_advantage(inst, equal, g)
    approx = [f] * (k - 1) + [_constant(n)]
    drop_adv = composed_form_advantage(inst, approx, majority_minus_one(k))
    choice = best_partition(inst, R)
    canon = canonical_h(inst, choice.parts)
    overall = best_canonical(inst, R)

    report.record(
        equal_split_error=(1 - equal_adv) / 2,
        drop_last_error=(1 - drop_adv) / 2,
        drop_last_bound=2 / math.sqrt(k),
        best_partition_error=(1 - canon.advantage) / 2,
        best_canonical_error=(1 - overall.advantage) / 2,
    )
    report.parameters["best_partition"] = list(choice.parts)
    report.parameters["best_partition_ties"] = [list(t) for t in choice.ties]
    report.check("equal split has error 1/2", "equal_split_error", "==", 0.5)
    report.check("dropping one block is O(1/sqrt k)", "drop_last_error", "<=", "drop_last_bound")
    report.check("best partition beats equal split", "best_partition_error", "<=", "equal_split_error")
    return report


# ---------------------------------------------------------------- AND of a skewed function


def random_parity_pair(n, rng, min_support=None):
    """f = -1 exactly when two parities both equal -1.

    The supports T1, T2 and their symmetric difference all exceed n/2, so
    every conditional mean on at most n/2 coordinates is exactly 1/2.
    """
    min_support = n // 2 + 1 if min_support is None else min_support
    # |T1| + |T2| + |T1 ^ T2| <= 2 |T1 | T2| <= 2n
    if 3 * min_support > 2 * n:
        raise ValueError(f"no parity pair with supports >= {min_support} on {n} bits")
    idx = np.arange(1 << n)
    while True:
        t1, t2 = (int(t) for t in rng.integers(1, 1 << n, size=2))
        sizes = popcount(np.array([t1, t2, t1 ^ t2]))
        if np.all(sizes >= min_support):
            break
    chi1 = popcount(idx & t1) % 2 == 1
    chi2 = popcount(idx & t2) % 2 == 1
    return TruthTable(np.where(chi1 & chi2, -1, 1), n), (t1, t2)


def random_iid(n, rng, plus_prob=0.625):
    return TruthTable(np.where(rng.random(1 << n) < plus_prob, 1, -1), n)


def _and_error_all_plus(f, D, k):
    """Error of the constant +1 composed approximator against AND_k o f."""
    inst = ComposedInstance(make_named("AND", k), f, D)
    adv = composed_form_advantage(inst, [_constant(inst.n)] * k, _constant(k))
    return (1 - adv) / 2


def counterexample_random_and(n=12, k=5, seed=0, sampler="parity-pair", max_tries=200):
    """AND_k of a function whose small-set conditional means are all positive.

    ``sampler`` is 'parity-pair' (always succeeds) or 'iid' (values drawn
    independently with Pr[+1] = 5/8, retried up to ``max_tries`` times).
    """
    if not 2 <= n <= 16:
        raise ValueError(f"n = {n} is outside the exhaustive range 2..16")
    if k < 1:
        raise ValueError("k must be positive")
    rng = np.random.default_rng(seed)
    D = uniform_dist(n)
    half = n // 2
    report = ExperimentReport("random_and", {"n": n, "k": k, "seed": seed, "sampler": sampler})
    report.notes.append("randomized-function model: q is exact, no large-n derandomization")

    f, tries, low = None, 0, -np.inf
    while tries < max_tries:
        tries += 1
        if sampler == "parity-pair":
            cand, supports = random_parity_pair(n, rng)
            report.parameters["supports"] = list(supports)
        elif sampler == "iid":
            cand = random_iid(n, rng)
        else:
            raise ValueError(f"unknown sampler {sampler!r}")
        low, _ = min_conditional_mean(cand, D, half)
        if mean(cand, D) <= 0.5 and low > 0:
            f = cand
            break
    report.record(tries=tries, min_conditional_mean=low)
    if f is None:
        report.notes.append(f"no sample passed within {max_tries} tries")
        report.check("sampled f has the required properties", "tries", "<", max_tries)
        return report

    q = float(np.mean(f.values == 1))
    constant = all(
        np.all(optimal_junta(f, D, r).to_truth_table().values == 1) for r in range(half + 1)
    )
    err = _and_error_all_plus(f, D, k)
    report.record(
        mean_f=mean(f, D),
        q=q,
        approximators_constant=float(constant),
        composed_error=err,
        predicted_error=1 - q**k,
    )
    report.check("E[f] <= 1/2", "mean_f", "<=", 0.5)
    report.check("conditional means positive", "min_conditional_mean", ">", 0.0)
    report.check("every small-budget approximator is +1", "approximators_constant", "==", 1.0)
    report.check("Pr[AND o f = +1] = q^k", "composed_error", "==", "predicted_error", 1e-12)
    return report


def ideal_and_error(k, q=0.75):
    """Composed error of the all-+1 approximator when f = +1 with probability q."""
    return _and_error_all_plus(ProbFunction(np.array([q, q]), 1), uniform_dist(1), k)


# ---------------------------------------------------------------- no composed form is optimal


NONCOMPOSED_P = (0.6, 0.75, 0.75, 1.0)
# exact value 1/80 from an independent rational-arithmetic enumeration (571/1600 vs 591/1600)
NONCOMPOSED_GAP = 0.0125


def _levels():
    # table index -> p level: 0 is 3/5, 1 is 3/4, 2 is 1
    return np.array([0, 1, 1, 2])


def _branches(q):
    """Which pairs of p levels the block approximator q fails to separate."""
    v = q.values
    lv = _levels()
    out = set()
    for a in range(4):
        for b in range(4):
            if lv[a] < lv[b] and v[a] == v[b]:
                out.add((int(lv[a]), int(lv[b])))
    return out


def counterexample_noncomposed():
    """AND_2 of a randomized 2-bit f: every composed 4-junta is suboptimal."""
    f = ProbFunction(np.array(NONCOMPOSED_P), 2)
    g = make_named("AND", 2)
    inst = ComposedInstance(g, f, uniform_dist(2))
    report = ExperimentReport("noncomposed", {"k": 2, "n": 2, "R": 4, "p": list(NONCOMPOSED_P)})
    report.notes.append("randomized-function model: f is a ProbFunction, no large-n derandomization")

    func, Dk = composed_table(inst)
    opt = optimal_junta(func, Dk, 4)
    # the explicit rule: accept iff p1 p2 >= 1/2
    p = np.array(NONCOMPOSED_P)
    prod = np.outer(p, p)  # [x2 block, x1 block]
    rule = np.where(prod >= 0.5, 1.0, -1.0)
    rule_adv = float(np.sum(rule * (2 * prod - 1)) / 16)

    tables = [TruthTable(np.array([1 if (t >> i) & 1 else -1 for i in range(4)]), 2) for t in range(16)]
    joints = [block_joint(inst, q) for q in tables]
    best_adv, best = -np.inf, None
    branch_counts = {(0, 1): 0, (0, 2): 0, (1, 2): 0}
    unbranched = 0
    for i1, q1 in enumerate(tables):
        br = _branches(q1)
        for i2, q2 in enumerate(tables):
            num = conditional_numerators(g, [joints[i1], joints[i2]])
            for h in tables:
                adv = float(np.dot(h.values, num))
                for key in br:
                    branch_counts[key] += 1
                unbranched += not br
                if adv > best_adv + 1e-12:
                    best_adv, best = adv, (q1, q2, h)
    candidates = len(tables) ** 3

    report.record(
        optimal_error=opt.error,
        rule_error=(1 - rule_adv) / 2,
        composed_error=(1 - best_adv) / 2,
        candidates=candidates,
        branch_34_1=branch_counts[(1, 2)],
        branch_35_34=branch_counts[(0, 1)],
        branch_35_1=branch_counts[(0, 2)],
        unbranched=unbranched,
    )
    report.record(gap=report.quantities["composed_error"] - report.quantities["optimal_error"])
    report.parameters["best_composed"] = {
        "q1": best[0].to_text().split()[1],
        "q2": best[1].to_text().split()[1],
        "h": best[2].to_text().split()[1],
    }
    report.check("explicit rule is optimal", "rule_error", "==", "optimal_error", 1e-12)
    report.check("all candidates scanned", "candidates", "==", 4096)
    report.check("composed forms are strictly worse", "gap", ">", 1e-4)
    report.check("gap matches the enumeration constant", "gap", "==", NONCOMPOSED_GAP, 1e-12)
    report.check("every candidate merges two p levels", "unbranched", "==", 0)
    for key in ("branch_34_1", "branch_35_34", "branch_35_1"):
        report.check(f"case {key} is witnessed", key, ">", 0)
    return report
