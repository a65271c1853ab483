"""Dense real linear algebra used by every checker and solver.

Matrices and vectors are plain float64 numpy arrays. ``as_matrix`` and
``as_vector`` validate shape and finiteness and return read-only copies so
values can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence, Union

import numpy as np
from scipy.linalg import qr

from .errors import InputError, SingularMatrixError, SvdConvergenceError

NormKind = Union[int, float, str]

EPS = np.finfo(np.float64).eps


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    a = np.asarray(data, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InputError(f"expected a non-empty 2-D array, got shape {a.shape}", "E_DIM", name)
    if not np.all(np.isfinite(a)):
        raise InputError("entries must be finite", "E_NONFINITE", name)
    return _frozen(a)


def as_vector(data, name: str = "vector") -> np.ndarray:
    a = np.asarray(data, dtype=np.float64)
    if a.ndim != 1:
        raise InputError(f"expected a 1-D array, got shape {a.shape}", "E_DIM", name)
    if not np.all(np.isfinite(a)):
        raise InputError("entries must be finite", "E_NONFINITE", name)
    return _frozen(a)


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD ``M ~= U @ diag(singular_values) @ V.T``."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray
    tolerance_used: float

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)


def rank_tolerance(sigma_max: float, shape: tuple[int, int], rtol: float | None = None) -> float:
    if rtol is None:
        rtol = max(shape) * EPS
    return float(rtol * sigma_max)


def svd(M, rtol: float | None = None) -> SvdResult:
    """Truncated singular value decomposition.

    Parameters
    ----------
    M : (m, n) array_like
        Finite real matrix.
    rtol : float, optional
        Relative cutoff. Singular values ``<= rtol * sigma_max`` are dropped.
        Defaults to ``max(m, n) * eps``.

    Returns
    -------
    SvdResult
        Factors restricted to the numerical rank ``r``.

    Raises
    ------
    SvdConvergenceError
        If LAPACK fails to converge.
    """
    M = as_matrix(M, "M")
    try:
        u, s, vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(f"SVD did not converge: {exc}") from exc
    tau = rank_tolerance(s[0] if s.size else 0.0, M.shape, rtol)
    r = int(np.count_nonzero(s > tau))
    return SvdResult(_frozen(u[:, :r]), _frozen(s[:r]), _frozen(vh[:r].T), tau)


def pinv(M, rtol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse ``V diag(1/sigma) U^T`` from the truncated SVD."""
    res = svd(M, rtol)
    return _frozen((res.V / res.singular_values) @ res.U.T)


def numerical_rank(M, rtol: float | None = None) -> int:
    return svd(M, rtol).rank


def _norm_kind(p: NormKind) -> str:
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("1", "2"):
            return key
        if key in ("inf", "infinity", "oo"):
            return "inf"
    elif p == 1:
        return "1"
    elif p == 2:
        return "2"
    elif p == np.inf:
        return "inf"
    raise InputError(f"unsupported norm kind {p!r}; expected 1, 2 or inf", "E_NORM", "p")


def parse_norm(p: NormKind) -> float:
    """Normalize a norm argument to one of 1.0, 2.0, inf."""
    return {"1": 1.0, "2": 2.0, "inf": np.inf}[_norm_kind(p)]


def norm_label(p: NormKind) -> str:
    return _norm_kind(p)


def op_norm(M, p: NormKind = 2) -> float:
    """Induced operator norm for p in {1, 2, inf}."""
    kind = _norm_kind(p)
    M = as_matrix(M, "M")
    if kind == "1":
        return float(np.abs(M).sum(axis=0).max())
    if kind == "inf":
        return float(np.abs(M).sum(axis=1).max())
    try:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(f"SVD did not converge: {exc}") from exc


def vec_norm(x, p: NormKind = np.inf) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=float), parse_norm(p)))


def _check_indices(idx: Sequence[int], bound: int, field: str) -> list[int]:
    out = [int(i) for i in idx]
    if len(set(out)) != len(out):
        raise InputError(f"duplicate index in {out}", "E_INDEX", field)
    for i in out:
        if not 0 <= i < bound:
            raise InputError(f"index {i} out of range [0, {bound})", "E_INDEX", field)
    return out


def submatrix(M, row_idx: Sequence[int], col_idx: Sequence[int]) -> np.ndarray:
    """``M[row_idx][:, col_idx]`` with range and duplicate checks (0-based)."""
    M = np.asarray(M, dtype=np.float64)
    rows = _check_indices(row_idx, M.shape[0], "row_idx")
    cols = _check_indices(col_idx, M.shape[1], "col_idx")
    return _frozen(M[np.ix_(rows, cols)])


def solve_square(M, rhs, rtol: float | None = None) -> np.ndarray:
    """Solve ``M x = rhs`` for square M, refusing numerically singular M."""
    M = as_matrix(M, "M")
    rhs = as_vector(rhs, "rhs")
    if M.shape[0] != M.shape[1]:
        raise InputError(f"matrix must be square, got {M.shape}", "E_DIM", "M")
    if rhs.size != M.shape[0]:
        raise InputError(f"rhs length {rhs.size} != {M.shape[0]}", "E_DIM", "rhs")
    if numerical_rank(M, rtol) < M.shape[0]:
        raise SingularMatrixError(f"matrix of order {M.shape[0]} is singular to tolerance")
    return _frozen(np.linalg.solve(M, rhs))


def nonsingular_block(M, r: int, allowed_cols: Sequence[int] | None = None,
                      rtol: float | None = None, exhaustive_limit: int = 20_000):
    """Find rows I1 and columns I2 (within ``allowed_cols``) with ``M[I1, I2]``
    an invertible r-by-r block.

    Column-pivoted QR proposes a candidate; if it fails the check, column and
    row subsets are enumerated in lexicographic order up to
    ``exhaustive_limit`` pairs. Returns ``None`` when no block is found.
    """
    M = np.asarray(M, dtype=np.float64)
    m, n = M.shape
    cols = list(range(n)) if allowed_cols is None else sorted(int(j) for j in allowed_cols)
    if r == 0:
        return [], []
    if r > min(m, len(cols)):
        return None

    def rows_for(J):
        sub = M[:, J]
        _, _, piv = qr(sub.T, pivoting=True, mode="economic")
        I = sorted(int(i) for i in piv[:r])
        if numerical_rank(M[np.ix_(I, J)], rtol) == r:
            return I
        return None

    _, _, piv = qr(M[:, cols], pivoting=True, mode="economic")
    J = sorted(cols[int(j)] for j in piv[:r])
    I = rows_for(J)
    if I is not None:
        return I, J

    if comb(len(cols), r) * comb(m, r) > exhaustive_limit:
        return None
    for J in combinations(cols, r):
        if numerical_rank(M[:, list(J)], rtol) < r:
            continue
        for I in combinations(range(m), r):
            if numerical_rank(M[np.ix_(I, J)], rtol) == r:
                return list(I), list(J)
    return None
