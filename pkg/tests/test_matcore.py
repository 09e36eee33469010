import itertools
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from overshoot.errors import DuplicateNodeError, SingularMatrixError
from overshoot.fixtures import EXAMPLE_A, PRINTED
from overshoot.matcore import (
    CharPoly,
    as_mat,
    char_poly,
    determinant,
    expm_batch,
    inverse,
    matrix_exponential,
    operator_norm,
    rank,
    solve,
    solve_extended,
    vandermonde,
)

T1 = PRINTED["T"]
# squared singular values of T1 are the roots of s^3 - 5 s^2 + 6 s - 1
T1_NORM_EXACT = 2 * np.cos(np.pi / 7)


def _power_iteration_norm(m, iters=2000):
    """Independent oracle: sqrt of the dominant eigenvalue of m^T m."""
    g = m.T @ m
    x = np.ones(g.shape[0]) / np.sqrt(g.shape[0])
    for _ in range(iters):
        y = g @ x
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
    return float(np.sqrt(x @ g @ x))


def test_as_mat_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_mat([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_mat([[np.inf]])


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == 1.0
    assert operator_norm(np.diag([2.0, -3.0])) == pytest.approx(3.0, rel=1e-12)


def test_operator_norm_t1_exact():
    sym = sympy.Matrix(T1.astype(int).tolist())
    s = sympy.symbols("s")
    roots = sympy.Poly((sym.T * sym).charpoly(s).as_expr(), s).nroots(n=30)
    exact = float(sympy.sqrt(max(roots)))
    assert exact == pytest.approx(T1_NORM_EXACT, rel=1e-15)
    assert operator_norm(T1) == pytest.approx(exact, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_operator_norm_against_sampling_and_transpose(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    nrm = operator_norm(m)
    v = rng.normal(size=(n, 10_000))
    v /= np.linalg.norm(v, axis=0)
    sampled = np.linalg.norm(m @ v, axis=0).max()
    assert sampled <= nrm * (1 + 1e-12)
    assert _power_iteration_norm(m) == pytest.approx(nrm, rel=1e-6)
    assert operator_norm(m.T) == pytest.approx(nrm, rel=1e-12)


def test_rank_examples():
    assert rank(np.eye(4), 1e-9) == 4
    assert rank(np.zeros((3, 2)), 1e-9) == 0
    assert rank(np.array([[1.0, 2.0], [2.0, 4.0]]), 1e-9) == 1


def test_solve_examples():
    v = np.array([[3.0], [-1.0], [2.0]])
    np.testing.assert_array_equal(solve(np.eye(3), v), v)
    np.testing.assert_allclose(solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1.0, 1.0])
    t1_inv = solve(T1, np.eye(3))
    np.testing.assert_allclose(T1 @ t1_inv, np.eye(3), atol=1e-14)
    # exact value 1 / sigma_min(T1); the printed 2.24697960199992 is off by 1.7e-9
    assert operator_norm(t1_inv) == pytest.approx(2.246979603717467, rel=1e-12)


def test_solve_singular():
    with pytest.raises(SingularMatrixError):
        solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.eye(2))
    with pytest.raises(SingularMatrixError):
        solve(np.zeros((2, 2)), np.eye(2))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_solve_residual(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + n * np.eye(n)
    rhs = rng.normal(size=(n, 2))
    x = solve(a, rhs)
    cond = np.linalg.cond(a)
    assert np.linalg.norm(a @ x - rhs, 2) <= 1e-10 * np.linalg.norm(rhs, 2) * cond


def test_solve_extended_matches_exact_rational():
    v = vandermonde([-100.0 - i for i in range(6)])
    rhs = np.arange(6.0)
    x = solve_extended(v, rhs).ravel()
    exact = sympy.Matrix([[sympy.Rational(int(e)) for e in row] for row in v.tolist()]).LUsolve(
        sympy.Matrix([sympy.Rational(int(r)) for r in rhs])
    )
    np.testing.assert_allclose(x, [float(e) for e in exact], rtol=1e-14)


def test_matrix_exponential_examples():
    for n in (1, 3):
        np.testing.assert_array_equal(matrix_exponential(np.zeros((n, n)), 7.0), np.eye(n))
    np.testing.assert_allclose(
        matrix_exponential(np.diag([-1.0, -2.0]), 1.0), np.diag([np.exp(-1), np.exp(-2)]), rtol=1e-14
    )
    np.testing.assert_allclose(
        matrix_exponential(np.array([[0.0, 1.0], [0.0, 0.0]]), 3.0), [[1.0, 3.0], [0.0, 1.0]], atol=1e-15
    )


def test_matrix_exponential_overflow():
    with pytest.raises(OverflowError):
        matrix_exponential(np.array([[1000.0]]), 10.0)


def test_expm_batch_matches_single():
    rng = np.random.default_rng(3)
    f = rng.normal(size=(4, 4))
    ts = [0.0, 0.3, 2.0]
    batch = expm_batch(f, ts)
    for t, e in zip(ts, batch):
        np.testing.assert_allclose(e, matrix_exponential(f, t), rtol=1e-14, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 6),
    seed=st.integers(0, 2**32 - 1),
    t=st.floats(0, 5),
    s=st.floats(0, 5),
)
def test_matrix_exponential_semigroup(n, seed, t, s):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(n, n))
    f -= (np.max(np.linalg.eigvals(f).real) + 0.5) * np.eye(n)
    lhs = matrix_exponential(f, t + s)
    rhs = matrix_exponential(f, t) @ matrix_exponential(f, s)
    np.testing.assert_allclose(lhs, rhs, atol=1e-8, rtol=1e-8)


def _cofactor_det_poly(a):
    """Brute-force oracle: det(sI - a) by permutation expansion over sympy."""
    s = sympy.symbols("s")
    n = a.shape[0]
    m = sympy.eye(n) * s - sympy.Matrix([[sympy.nsimplify(x) for x in row] for row in a.tolist()])
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = sympy.combinatorics.Permutation(list(perm)).signature()
        term = sign
        for i, j in enumerate(perm):
            term *= m[i, j]
        total += term
    coeffs = sympy.Poly(sympy.expand(total), s).all_coeffs()
    return [float(c) for c in coeffs[1:]]


def test_char_poly_examples():
    assert char_poly(np.diag([-1.0, -2.0])).coeffs == pytest.approx((3.0, 2.0))
    assert char_poly(np.array([[5.0]])).coeffs == (-5.0,)
    oracle = _cofactor_det_poly(EXAMPLE_A)
    assert oracle == [-2.0, 0.0, 1.0]
    assert char_poly(EXAMPLE_A).coeffs == pytest.approx(oracle, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=8))
def test_char_poly_diagonal_matches_convolution(mus):
    exact = [Fraction(1)]
    for mu in mus:
        exact = [c - mu * p for c, p in zip(exact + [Fraction(0)], [Fraction(0)] + exact)]
    got = char_poly(np.diag(np.array(mus, dtype=float))).coeffs
    for g, e in zip(got, exact[1:]):
        assert g == pytest.approx(float(e), rel=1e-10, abs=1e-10)


def test_char_poly_random_against_numpy():
    rng = np.random.default_rng(11)
    for n in range(1, 9):
        a = rng.uniform(-2, 2, (n, n))
        np.testing.assert_allclose(char_poly(a).full(), np.poly(a), rtol=1e-9, atol=1e-9)


def test_charpoly_type():
    cp = CharPoly((3, 2))
    assert cp.degree == 2
    np.testing.assert_array_equal(cp.full(), [1.0, 3.0, 2.0])


def test_vandermonde_examples():
    np.testing.assert_array_equal(vandermonde([-7.0]), [[1.0]])
    v = vandermonde([-1.0, -2.0])
    np.testing.assert_array_equal(v, [[1.0, 1.0], [-1.0, -2.0]])
    assert determinant(v) == pytest.approx(-1.0, rel=1e-15)
    v3 = vandermonde([-49.894, -50.894, -51.894])
    assert determinant(v3) == pytest.approx(-2.0, rel=1e-12)


def test_vandermonde_duplicate():
    with pytest.raises(DuplicateNodeError):
        vandermonde([-1.0, -2.0, -1.0])


def _product_det(nodes):
    prod = Fraction(1)
    fr = [Fraction(x) for x in nodes]
    for i in range(len(fr)):
        for j in range(i + 1, len(fr)):
            prod *= fr[j] - fr[i]
    return float(prod)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, -1), min_size=1, max_size=6, unique=True))
def test_vandermonde_det_product_formula(nodes):
    nodes = sorted(nodes, reverse=True)
    assume(max(np.diff(nodes), default=-1) < -1e-3)
    assert determinant(vandermonde(nodes)) == pytest.approx(_product_det(nodes), rel=1e-9)


def test_inverse_matches_scipy():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(5, 5))
    np.testing.assert_allclose(inverse(a), scipy.linalg.inv(a), rtol=1e-10, atol=1e-12)
