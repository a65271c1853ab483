import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gavekit.errors import InputError, SingularMatrixError
from gavekit.linalg import (
    as_matrix,
    nonsingular_block,
    numerical_rank,
    op_norm,
    pinv,
    solve_square,
    submatrix,
    svd,
)

from conftest import load, load_split

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def matrices(draw, max_rows=8, max_cols=12):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    M = draw(arrays(np.float64, (m, n), elements=finite))
    # mix in exact low rank now and then
    if draw(st.booleans()):
        r = draw(st.integers(0, min(m, n)))
        M = M[:, :r] @ draw(arrays(np.float64, (r, n), elements=finite)) if r else np.zeros((m, n))
    return M


def test_svd_known():
    res = svd(np.eye(2))
    assert res.rank == 2
    np.testing.assert_allclose(res.singular_values, [1, 1])
    np.testing.assert_allclose(svd([[3, 1], [1, 3]]).singular_values, [4, 2], atol=1e-12)
    assert svd(np.zeros((2, 3))).rank == 0
    assert svd(np.zeros((2, 3))).singular_values.size == 0


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_svd_factors(M):
    res = svd(M)
    r = res.rank
    assert np.all(res.singular_values > 0)
    assert np.all(np.diff(res.singular_values) <= 0)
    np.testing.assert_allclose(res.U.T @ res.U, np.eye(r), atol=1e-10)
    np.testing.assert_allclose(res.V.T @ res.V, np.eye(r), atol=1e-10)
    back = (res.U * res.singular_values) @ res.V.T
    assert np.linalg.norm(back - M) <= 1e-8 * max(np.linalg.norm(M), 1e-300) + 1e-300


@st.composite
def gaussian_matrices(draw, max_rows=8, max_cols=12):
    """Random M as in the Penrose invariant: Gaussian, optionally of exact low rank."""
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    r = draw(st.integers(0, min(m, n)))
    g = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return g.standard_normal((m, r)) @ g.standard_normal((r, n))


@settings(max_examples=100, deadline=None)
@given(gaussian_matrices())
def test_penrose_identities(M):
    P = pinv(M)
    fro = np.linalg.norm
    assert fro(M @ P @ M - M) <= 1e-8 * fro(M) + 1e-12
    assert fro(P @ M @ P - P) <= 1e-8 * fro(P) + 1e-12
    MP, PM = M @ P, P @ M
    assert fro(MP - MP.T) <= 1e-8 * max(1.0, fro(MP))
    assert fro(PM - PM.T) <= 1e-8 * max(1.0, fro(PM))


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rank_transpose(M):
    assert numerical_rank(M) == numerical_rank(M.T)


def test_pinv_full_row_rank_right_inverse(rng):
    M = rng.standard_normal((3, 5))
    np.testing.assert_allclose(M @ pinv(M), np.eye(3), atol=1e-12)


def test_pinv_worked_products():
    MB = [[0.5, 0.1, 0.1], [0, 0.1, 0.1]]
    np.testing.assert_allclose(pinv(MB) @ [-0.5, -0.25], [-0.5, -1.25, -1.25], atol=1e-12)
    B = load("egs5").B
    np.testing.assert_allclose(pinv(B) @ [-1, -1], [-1, -1, 0], atol=1e-12)
    M = np.array([[2.0, 1], [1, 1]])
    np.testing.assert_allclose(pinv(M), np.linalg.inv(M), atol=1e-10)


def test_numerical_rank_examples():
    assert numerical_rank([[2, 0, 0], [2, 0, 0]]) == 1
    egs4 = load("egs4")
    assert numerical_rank(load_split("egs4", egs4).M) == 3
    assert numerical_rank(np.zeros((3, 3))) == 0


@pytest.mark.parametrize("p", [1, 2, np.inf])
def test_op_norm_bounds_vectors(p, rng):
    for _ in range(10):
        M = rng.standard_normal((rng.integers(1, 6), rng.integers(1, 6)))
        nrm = op_norm(M, p)
        X = rng.standard_normal((M.shape[1], 100))
        lhs = np.linalg.norm(M @ X, p, axis=0)
        assert np.all(lhs <= nrm * np.linalg.norm(X, p, axis=0) * (1 + 1e-12))


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_holder_bound(M):
    assert op_norm(M, 2) <= np.sqrt(op_norm(M, 1) * op_norm(M, np.inf)) * (1 + 1e-10) + 1e-12


def test_op_norm_values():
    M = np.array([[1, -2], [3, 4]])
    assert op_norm(M, 1) == 6
    assert op_norm(M, "inf") == 7
    assert op_norm(np.zeros((2, 2)), 2) == 0
    inst = load("thmmp_remark")
    assert op_norm(pinv(inst.A) @ inst.B, 2) == pytest.approx(0.7071, abs=1e-3)
    with pytest.raises(InputError):
        op_norm(M, 3)


def test_submatrix():
    inst = load("exam_inf")
    np.testing.assert_array_equal(submatrix(inst.A, [0, 1], [0, 1]), [[3, 1], [1, 3]])
    np.testing.assert_array_equal(submatrix(inst.B, [0, 1], [0, 1]), np.eye(2))
    np.testing.assert_array_equal(submatrix(inst.A, [0, 1], [0, 1, 2]), inst.A)
    with pytest.raises(InputError):
        submatrix(inst.A, [0, 0], [1])
    with pytest.raises(InputError):
        submatrix(inst.A, [0], [3])


def test_solve_square():
    np.testing.assert_allclose(solve_square([[3, 1], [1, 3]], [4, 0]), [1.5, -0.5])
    np.testing.assert_allclose(solve_square(np.eye(3), [1, 2, 3]), [1, 2, 3])
    with pytest.raises(SingularMatrixError):
        solve_square([[1, 1], [1, 1]], [1, 2])


def test_as_matrix_rejects():
    with pytest.raises(InputError):
        as_matrix([[1, np.nan]])
    with pytest.raises(InputError):
        as_matrix([1, 2])


def test_nonsingular_block_respects_allowed_columns():
    M = np.array([[1.0, 0, 1], [0, 1, 1]])
    I, J = nonsingular_block(M, 2, [1, 2])
    assert set(J) <= {1, 2}
    assert numerical_rank(M[np.ix_(I, J)]) == 2
    assert nonsingular_block(M, 2, [2]) is None
