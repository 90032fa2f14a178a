import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from junta_lab.boolfn import (
    Distribution,
    ProbFunction,
    ProductDist,
    TruthTable,
    load,
    make_named,
    mean,
    random_distribution,
    random_table,
    uniform_dist,
)
from junta_lab.exceptions import ArityMismatchError, CapacityError


def test_xor2_table():
    assert make_named("XOR", 2).values.tolist() == [1, -1, -1, 1]


def test_and2_table():
    assert make_named("AND", 2).values.tolist() == [-1, -1, -1, 1]


def test_or2_table():
    assert make_named("OR", 2).values.tolist() == [-1, 1, 1, 1]


def test_maj3_two_of_three():
    assert make_named("MAJ", 3)((1, -1, 1)) == 1
    assert make_named("MAJ", 3)((-1, -1, 1)) == -1


def test_maj_even_tie_goes_plus():
    maj = make_named("MAJ", 2)
    assert maj((1, -1)) == 1 and maj((-1, 1)) == 1 and maj((-1, -1)) == -1


def test_dict_is_one_based():
    d = make_named("DICT", 3, 2)
    for x in [(1, -1, 1), (-1, 1, -1), (1, 1, -1)]:
        assert d(x) == x[1]


@pytest.mark.parametrize("spec", ["dict:2", "DICT:2"])
def test_dict_inline_name(spec):
    assert make_named(spec, 3) == make_named("DICT", 3, 2)


def test_thresh_compares_coordinate_sum():
    t = make_named("thresh:0.5", 4)
    assert t((1, 1, 1, -1)) == 1
    assert t((1, 1, -1, -1)) == -1
    # threshold exactly hit resolves to +1
    assert make_named("THRESH", 4, 0)((1, 1, -1, -1)) == 1


def test_make_named_errors():
    with pytest.raises(ValueError):
        make_named("NAND", 2)
    with pytest.raises(ValueError):
        make_named("DICT", 3, 4)
    with pytest.raises(CapacityError):
        make_named("XOR", 29)
    with pytest.raises(ValueError):
        make_named("XOR", 0)


def test_truth_table_rejects_bad_entries():
    with pytest.raises(ValueError):
        TruthTable(np.array([1, 0, 1, 1]), 2)
    with pytest.raises(ValueError):
        TruthTable(np.array([1, 1, 1]), 2)


def test_uniform_dist():
    u = uniform_dist(2)
    assert u.nu.tolist() == [0.0, 0.0]
    assert np.allclose(uniform_dist(3).weights, 1 / 8)


def test_product_dist_weight_formula():
    nu = np.array([0.5, -0.2, 0.0])
    P = ProductDist(nu)
    x = (1, -1, 1)
    expected = np.prod([(1 + xi * v) / 2 for xi, v in zip(x, nu)])
    assert P.weight(x) == pytest.approx(expected, abs=1e-15)


def test_mean_examples():
    assert mean(make_named("XOR", 2), uniform_dist(2)) == 0
    assert mean(make_named("XOR", 3), uniform_dist(3)) == 0
    assert mean(make_named("AND", 2), uniform_dist(2)) == pytest.approx(-0.5, abs=1e-15)
    p = ProbFunction(np.array([0.6, 0.75, 0.75, 1.0]), 2)
    assert mean(p, uniform_dist(2)) == pytest.approx(11 / 20, abs=1e-15)


def test_mean_arity_mismatch():
    with pytest.raises(ArityMismatchError):
        mean(make_named("XOR", 3), uniform_dist(2))


@pytest.mark.parametrize("n", range(1, 11))
def test_xor_balanced_uniform(n):
    assert abs(mean(make_named("XOR", n), uniform_dist(n))) <= 1e-12


def test_distribution_normalization():
    with pytest.raises(ValueError):
        Distribution(np.array([0.5, 0.6]), 1)
    with pytest.raises(ValueError):
        Distribution(np.array([1.5, -0.5]), 1)


@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_truth_table_round_trip(n, seed):
    t = random_table(n, np.random.default_rng(seed))
    assert TruthTable.from_text(t.to_text()) == t


@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_distribution_round_trip(n, seed):
    D = random_distribution(n, np.random.default_rng(seed))
    back = Distribution.from_text(D.to_text())
    assert np.array_equal(back.weights, D.weights)


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_prob_function_round_trip(n, seed):
    p = ProbFunction(np.random.default_rng(seed).random(1 << n), n)
    assert np.array_equal(ProbFunction.from_text(p.to_text()).p, p.p)


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=10))
def test_product_dist_weights_normalized(nu):
    w = ProductDist(np.array(nu)).weights
    assert np.all(w >= 0)
    assert abs(w.sum() - 1) <= 1e-12


def test_truth_table_embeds_as_prob():
    t = make_named("AND", 2)
    assert t.to_prob().p.tolist() == [0, 0, 0, 1]
    assert t.to_prob().is_deterministic()


def test_load_files(tmp_path):
    t = make_named("MAJ", 3)
    path = tmp_path / "maj.txt"
    path.write_text(t.to_text())
    assert load(path, "table") == t
    D = uniform_dist(3).to_distribution()
    dpath = tmp_path / "d.txt"
    dpath.write_text(D.to_text())
    assert np.array_equal(load(dpath, "dist").weights, D.weights)


def test_from_text_errors():
    with pytest.raises(ValueError):
        TruthTable.from_text("n=2\n+-+\n")
    with pytest.raises(ValueError):
        TruthTable.from_text("2\n+-+-\n")
    with pytest.raises(ValueError):
        Distribution.from_text("n=1\n0.5 abc\n")
