import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from discrete_bvp4.grid import ValidationError
from discrete_bvp4.harness import (
    BudgetError,
    brute_force_oracle,
    difference_energies,
    eigenvector_ratios,
    gradient_fd_suite,
    lemma4_suite,
    lemma5_suite,
    lemma6_suite,
    numerical_rank,
    oracle_node_count,
)
from discrete_bvp4.spectra import build_V, build_W, gram

from conftest import CUBIC, uniform

R48 = math.sqrt(48)


def test_oracle_n1_cubic(cubic1):
    res = brute_force_oracle(cubic1, 10.0, 0.01)
    np.testing.assert_allclose([p[0] for p in res.critical_points], [-R48, 0.0, R48], atol=1e-9)
    assert res.refined


def test_oracle_monotone_example(example2):
    res = brute_force_oracle(example2, 10.0, 0.05)
    assert len(res.critical_points) == 1
    np.testing.assert_allclose(res.critical_points[0], [0, 0], atol=1e-9)


def test_oracle_linear(linear1):
    res = brute_force_oracle(linear1, 5.0, 0.01)
    assert len(res.critical_points) == 1
    assert abs(res.critical_points[0][0]) <= 1e-9


def test_oracle_n2_cubic_full_set(cubic2):
    pts = brute_force_oracle(cubic2, 12.0, 0.05).critical_points
    assert len(pts) == 9
    # the nine critical points come in +/- pairs around theta
    arr = np.array(pts)
    for p in arr:
        assert np.min(np.max(np.abs(arr + p), axis=1)) <= 1e-8


def test_oracle_dimension_guard():
    with pytest.raises(ValidationError, match="N <= 3"):
        brute_force_oracle(uniform(4, CUBIC))


def test_oracle_budget_guard():
    pr = uniform(3, CUBIC)
    need = oracle_node_count(3, 10.0, 1e-3)
    with pytest.raises(BudgetError, match=str(need)):
        brute_force_oracle(pr, 10.0, 1e-3)


def test_difference_energies_unit_vector():
    s1, s2 = difference_energies(np.array([[1.0]]))
    assert (s1[0], s2[0]) == (2.0, 6.0)


@given(arrays(float, st.integers(1, 12), elements=st.floats(-10, 10)).filter(lambda y: np.any(y != 0)))
def test_rayleigh_ratios_lie_in_gram_spectrum(y):
    n = y.size
    s1, s2 = difference_energies(y[None, :])
    nn = float(y @ y)
    for s, M in ((s1[0], gram(build_V(n))), (s2[0], gram(build_W(n)))):
        lam = np.linalg.eigvalsh(M)
        assert lam[0] * nn - 1e-9 <= s <= lam[-1] * nn + 1e-9
    assert s1[0] <= 4 * nn + 1e-9 and s2[0] <= 16 * nn + 1e-9


def test_lemma4_suite_small():
    rep = lemma4_suite(12, 500, 3)
    assert rep.passed
    assert rep.stats["max_ratio_first"] < 4
    assert rep.stats["max_ratio_second"] < 16
    assert rep.summary().startswith("PASS lemma4")


def test_lemma6_suite_small():
    rep = lemma6_suite(12, 500, 3)
    assert rep.passed
    assert rep.stats["max_eigvec_ratio_error"] <= 1e-9


def test_eigenvector_witnesses_n2():
    a, r1, b, r2 = eigenvector_ratios(2)
    assert r1 == pytest.approx(1.0, abs=1e-9)
    assert r2 == pytest.approx(2.0, abs=1e-9)
    np.testing.assert_allclose(np.abs(a), [1 / math.sqrt(2)] * 2, atol=1e-12)
    np.testing.assert_allclose(np.abs(b), [1 / math.sqrt(2)] * 2, atol=1e-12)
    assert a[0] * a[1] > 0 and b[0] * b[1] > 0


@pytest.mark.parametrize(
    "B, rank",
    [(np.eye(3), 3), (np.zeros((2, 2)), 0), (np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]]), 1),
     (build_V(5), 5), (build_W(5), 5)],
)
def test_numerical_rank(B, rank):
    assert numerical_rank(B) == rank


def test_lemma5_suite_small():
    rep = lemma5_suite(200, 11)
    assert rep.passed
    assert rep.stats["rank_deficient"] > 0


def test_gradient_fd_suite_small():
    rep = gradient_fd_suite(200, 5)
    assert rep.passed
    assert rep.stats["max_fd_error"] <= 1e-6
