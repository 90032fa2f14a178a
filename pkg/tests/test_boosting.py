
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from junta_lab.boolfn import (
    TruthTable,
    make_named,
    random_distribution,
    random_table,
    uniform_dist,
)
from junta_lab.boosting import (
    BoostedTester,
    DistributionRequest,
    OracleAccess,
    Query,
    Sample,
    SetCoverInstance,
    TesterParams as Params,
    boost,
    brute_force_tester,
    cover_junta,
    eps_large,
    min_set_cover,
    run_tester,
    setcover_reduce,
    tolerant_boost_params,
    zero_error_boost_params,
)
from junta_lab.composition import ComposedInstance, composed_form_advantage, composed_table
from junta_lab.exceptions import ProtocolViolation
from junta_lab.junta import optimal_junta

seeds = st.integers(0, 2**31 - 1)


# ---------------------------------------------------------------- eps_large


def test_eps_large_reference_value():
    assert eps_large(0.1, 20, 0.5) == pytest.approx((1 - 0.8**5) / 2, abs=1e-15)
    assert eps_large(0.1, 20, 0.5) == pytest.approx(0.33616, abs=1e-5)


def test_eps_large_boundaries():
    assert eps_large(0.0, 7, 0.3) == 0.0
    assert eps_large(0.5, 7, 0.3) == 0.5


def test_eps_large_grid_monotone():
    eps = np.linspace(0.0, 0.5, 11)
    ks = range(1, 30)
    lams = np.linspace(0.05, 0.95, 19)
    for k in ks:
        for lam in lams:
            vals = [eps_large(e, k, lam) for e in eps]
            assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
    for e in eps[1:-1]:
        for lam in lams:
            vals = [eps_large(e, k, lam) for k in ks]
            assert all(a < b for a, b in zip(vals, vals[1:]))
        for k in ks:
            vals = [eps_large(e, k, lam) for lam in lams]
            assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("args", [(-0.1, 3, 0.5), (0.6, 3, 0.5), (0.1, 0, 0.5), (0.1, 3, 0.0), (0.1, 3, 1.0)])
def test_eps_large_domain(args):
    with pytest.raises(ValueError):
        eps_large(*args)


def test_tester_params_validation():
    with pytest.raises(ValueError):
        Params(0.3, 0.2, 1, 1)
    with pytest.raises(ValueError):
        Params(0.0, 0.2, 2, 1)


# ---------------------------------------------------------------- protocol


class Greedy:
    """Queries more than it declares."""

    def query_budget(self, n):
        return 2

    def run(self, n):
        yield Query(np.arange(3))
        return True


class Sampler:
    """Draws labeled samples and answers whether all labels are consistent with D."""

    def __init__(self, count):
        self.count = count
        self.seen = None

    def query_budget(self, n):
        return 0

    def run(self, n):
        idx, labels = yield Sample(self.count)
        D = yield DistributionRequest()
        self.seen = (np.asarray(idx), np.asarray(labels), D)
        return True


def test_budget_is_enforced():
    oracle = OracleAccess(make_named("XOR", 2), uniform_dist(2))
    with pytest.raises(ProtocolViolation):
        run_tester(Greedy(), oracle)


def test_out_of_range_query():
    oracle = OracleAccess(make_named("XOR", 2), uniform_dist(2))
    with pytest.raises(ProtocolViolation):
        oracle.query([4])


def test_oracle_counters():
    oracle = OracleAccess(make_named("XOR", 3), uniform_dist(3))
    assert oracle.query(5) == make_named("XOR", 3).values[5]
    oracle.query([0, 1, 2])
    oracle.sample(7)
    oracle.distribution()
    assert (oracle.query_count, oracle.sample_count, oracle.distribution_reads) == (4, 7, 1)


def test_brute_force_exact_junta_is_yes():
    rng = np.random.default_rng(0)
    f = make_named("DICT", 4, 3)
    oracle = OracleAccess(f, random_distribution(4, rng))
    assert run_tester(brute_force_tester(Params(0.0, 0.1, 1, 1)), oracle)
    assert oracle.query_count == 16 and oracle.distribution_reads == 1


def test_brute_force_parity_is_no():
    oracle = OracleAccess(make_named("XOR", 4), uniform_dist(4))
    assert not run_tester(brute_force_tester(Params(0.0, 0.4, 3, 3)), oracle)


def test_brute_force_constant_distance():
    # f = +1 on 3/4 of the points; the best constant errs 1/4
    f = TruthTable(np.array([1, 1, 1, -1]), 2)
    D = uniform_dist(2)
    assert optimal_junta(f, D, 0).error == pytest.approx(0.25)
    assert run_tester(brute_force_tester(Params(0.25, 0.4, 0, 0)), OracleAccess(f, D))
    assert not run_tester(brute_force_tester(Params(0.0, 0.2, 0, 0)), OracleAccess(f, D))


def test_boost_accounting():
    f = make_named("MAJ", 3)
    weak = brute_force_tester(Params(0.0, 0.1, 2, 2))
    booster = boost(weak, 3)
    oracle = OracleAccess(f, uniform_dist(3))
    run_tester(booster, oracle)
    assert booster.composed_queries == 1 << 9
    assert oracle.query_count == 3 * booster.composed_queries


def test_boost_k1_is_identity():
    rng = np.random.default_rng(4)
    for _ in range(10):
        f, D = random_table(3, rng), random_distribution(3, rng)
        params = Params(0.0, 0.2, 1, 1)
        plain = OracleAccess(f, D)
        boosted = OracleAccess(f, D)
        booster = boost(brute_force_tester(params), 1)
        assert run_tester(brute_force_tester(params), plain) == run_tester(booster, boosted)
        assert plain.query_count == boosted.query_count


def test_boost_samples_cost_k_inner_samples():
    f, D = make_named("MAJ", 3), random_distribution(3, np.random.default_rng(2))
    inner = Sampler(50)
    booster = BoostedTester(inner, 2)
    oracle = OracleAccess(f, D, np.random.default_rng(9))
    run_tester(booster, oracle)
    assert oracle.sample_count == 100
    idx, labels, Dk = inner.seen
    inst = ComposedInstance(make_named("XOR", 2), f, D)
    func, expected_D = composed_table(inst)
    assert np.array_equal(func.values[idx], labels)
    assert np.allclose(Dk.weights, expected_D.weights)


def test_boost_rejects_arity_mismatch():
    with pytest.raises(ValueError):
        BoostedTester(brute_force_tester(Params(0, 0.1, 1, 1)), 3, make_named("XOR", 2))


def test_boost_weak_budget_enforced():
    booster = boost(Greedy(), 2)
    with pytest.raises(ProtocolViolation):
        run_tester(booster, OracleAccess(make_named("XOR", 2), uniform_dist(2)))


@pytest.mark.parametrize("seed", range(5))
def test_boost_end_to_end_small(seed):
    rng = np.random.default_rng(seed)
    composed, outer = zero_error_boost_params(0.05, 4, 0.5, 1, 1)
    weak = brute_force_tester(composed)
    coord = int(rng.integers(1, 4))
    f = make_named("DICT", 3, coord)
    f = TruthTable(f.values * int(rng.choice([-1, 1])), 3)
    D = random_distribution(3, rng, alpha=2.0)
    assert run_tester(boost(weak, 4), OracleAccess(f, D))


def test_composition_behaves_linearly():
    rng = np.random.default_rng(1)
    for n, k, r in [(3, 2, 1), (4, 3, 1), (3, 4, 2), (6, 2, 2)]:
        coords = rng.choice(n, size=r, replace=False)
        inner = random_table(r, rng)
        idx = np.arange(1 << n)
        key = np.zeros_like(idx)
        for j, c in enumerate(coords):
            key |= ((idx >> c) & 1) << j
        f = TruthTable(inner.values[key], n)
        D = random_distribution(n, rng)
        assert optimal_junta(f, D, r).error == pytest.approx(0.0, abs=1e-12)
        func, Dk = composed_table(ComposedInstance(random_table(k, rng), f, D))
        assert optimal_junta(func, Dk, k * r).error == pytest.approx(0.0, abs=1e-12)


def test_union_bound_on_parity_compositions():
    rng = np.random.default_rng(8)
    for _ in range(30):
        f, D = random_table(3, rng), random_distribution(3, rng)
        approx = random_table(3, rng)
        err = float(np.dot(D.weights, f.values != approx.values))
        inst = ComposedInstance(make_named("XOR", 3), f, D)
        adv = composed_form_advantage(inst, [approx] * 3, make_named("XOR", 3))
        assert (1 - adv) / 2 <= 3 * err + 1e-12


# ---------------------------------------------------------------- parameter plans


def test_tolerant_boundary():
    plan = tolerant_boost_params(1 / 16)
    assert plan.k == 4 and plan.k * (1 / 16) == 0.25 and not plan.k_adjusted


def test_tolerant_ceiling():
    assert tolerant_boost_params(1 / 40).k == 10


def test_tolerant_adjusted_floor():
    plan = tolerant_boost_params(0.03)
    assert plan.k == 8 and plan.k_adjusted
    assert plan.k * 0.03 <= 0.25


def test_tolerant_regimes():
    plan = tolerant_boost_params(0.05, r=3, lam=0.4)
    assert plan.composed == Params(0.25, 1 / 3, 15, 15)
    assert plan.outer.r == 3 and plan.outer.r_prime == 8
    assert plan.outer_r_prime_real == pytest.approx(7.5)
    assert plan.outer.eps_no == pytest.approx(0.05 * 5 / 0.6)


def test_zero_error_params():
    composed, outer = zero_error_boost_params(0.1, 20, 0.5, 2, 3)
    assert composed.eps_yes == 0 and composed.eps_no == pytest.approx(eps_large(0.1, 20, 0.5))
    assert (composed.r, composed.r_prime) == (40, 60)
    assert outer == Params(0.0, 0.1, 2, 6)


# ---------------------------------------------------------------- SetCover


def brute_min_junta_error(f, D, r):
    return optimal_junta(f, D, r).error


def test_setcover_two_singletons():
    inst = SetCoverInstance(2, ({1}, {2}))
    f, D = setcover_reduce(inst)
    assert min_set_cover(inst) == (0, 1)
    t = cover_junta(2, (0, 1))
    assert float(np.dot(D.weights, f.values != t.values)) == 0.0


def test_setcover_single_set():
    inst = SetCoverInstance(2, ({1, 2},))
    f, D = setcover_reduce(inst)
    assert np.count_nonzero(D.weights) == 2
    assert brute_min_junta_error(f, D, 1) <= 1e-12


def test_setcover_missing_element_rejected():
    with pytest.raises(ValueError):
        setcover_reduce(SetCoverInstance(3, ({1}, {2})))


def test_setcover_text_round_trip():
    inst = SetCoverInstance(4, ({1, 3}, {2}, {2, 4}))
    assert SetCoverInstance.from_text(inst.to_text()) == inst
    with pytest.raises(ValueError):
        SetCoverInstance.from_text("3 2\n1 2\n")
    with pytest.raises(ValueError):
        SetCoverInstance.from_text("3 1\n1 5\n")


def random_setcover(rng, m, n):
    while True:
        sets = []
        for _ in range(n):
            size = int(rng.integers(1, m + 1))
            sets.append(set(int(e) for e in rng.choice(np.arange(1, m + 1), size=size, replace=False)))
        if set().union(*sets) == set(range(1, m + 1)):
            return SetCoverInstance(m, tuple(sets))


@given(st.integers(1, 6), st.integers(1, 7), seeds)
def test_setcover_soundness_and_completeness(m, n, seed):
    inst = random_setcover(np.random.default_rng(seed), m, n)
    f, D = setcover_reduce(inst)
    cover = min_set_cover(inst)
    c = len(cover)
    t = cover_junta(n, cover)
    assert float(np.dot(D.weights, f.values != t.values)) == 0.0
    assert brute_min_junta_error(f, D, c) <= 1e-12
    if c > 1:
        assert brute_min_junta_error(f, D, c - 1) >= 1 / (m + 1) - 1e-12


def test_min_set_cover_brute():
    inst = SetCoverInstance(5, ({1, 2, 3}, {3, 4}, {4, 5}, {1}, {5}))
    assert min_set_cover(inst) == (0, 2)
    assert min_set_cover(SetCoverInstance(2, ({1},))) is None
