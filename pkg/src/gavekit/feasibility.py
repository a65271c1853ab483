"""Nonnegative feasibility of ``C y = b`` with Farkas certificates.

A dense-tableau simplex with Bland's rule. Instances are small (tens of
columns), so the tableau is rebuilt per call and every verdict is
re-verified before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InputError, SimplexStallError

PIVOT_TOL = 1e-11


@dataclass(frozen=True)
class Feasible:
    y: np.ndarray

    feasible = True


@dataclass(frozen=True)
class Infeasible:
    """``certificate`` u has ``C^T u <= 0`` and ``b^T u > 0`` (scaled to max |u_i| = 1)."""

    certificate: np.ndarray

    feasible = False


@dataclass(frozen=True)
class StrictSupportResult:
    """Solution of ``C y = b`` with ``y_i >= margin`` on the support and zero elsewhere.

    ``unbounded`` is set when the margin can grow without limit; ``margin``
    is then ``inf`` and ``y`` is some feasible point with positive support.
    """

    y: np.ndarray
    margin: float
    unbounded: bool = False

    feasible = True

    def is_strict(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.margin > tol.strict


FeasibilityOutcome = Feasible | Infeasible


# --------------------------------------------------------------------------
# tableau machinery

class _Tableau:
    """Rows ``[A | rhs]`` with an objective row of reduced costs appended."""

    def __init__(self, A: np.ndarray, rhs: np.ndarray):
        m, k = A.shape
        self.m, self.k = m, k
        self.T = np.zeros((m + 1, k + 1))
        self.T[:m, :k] = A
        self.T[:m, k] = rhs
        self.basis = [-1] * m

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        nz = np.nonzero(col)[0]
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
        T[:, c] = 0.0
        T[r, c] = 1.0
        self.basis[r] = c

    def set_objective(self, cost: np.ndarray) -> None:
        """Install reduced costs ``c - c_B^T T`` for a cost vector over columns."""
        T = self.T
        T[-1, :] = 0.0
        T[-1, : self.k] = cost
        for r, j in enumerate(self.basis):
            if j >= 0 and cost[j] != 0:
                T[-1] -= cost[j] * T[r]

    def run(self, eligible: Sequence[int], max_pivots: int) -> str:
        """Minimize with Bland's rule; returns "optimal" or "unbounded"."""
        T = self.T
        eligible = sorted(eligible)
        for _ in range(max_pivots):
            red = T[-1]
            entering = next((j for j in eligible if red[j] < -PIVOT_TOL), None)
            if entering is None:
                return "optimal"
            col = T[:-1, entering]
            rows = np.nonzero(col > PIVOT_TOL)[0]
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            leave = min(ties, key=lambda r: self.basis[r])
            self.pivot(int(leave), entering)
        raise SimplexStallError(f"simplex exceeded {max_pivots} pivots")

    def basic_solution(self, ncols: int) -> np.ndarray:
        y = np.zeros(ncols)
        for r, j in enumerate(self.basis):
            if 0 <= j < ncols:
                y[j] = self.T[r, -1]
        return y


def _pivot_budget(m: int, k: int) -> int:
    return 50 * (m + k) + 1000


def _phase_one(C: np.ndarray, b: np.ndarray):
    """Phase 1 on ``D C y + a = D b`` with D flipping rows so the rhs is >= 0.

    Returns the tableau (artificial columns are ``k .. k+m-1``), the flip
    vector and the optimal artificial sum.
    """
    m, k = C.shape
    flip = np.where(b < 0, -1.0, 1.0)
    A = np.hstack([C * flip[:, None], np.eye(m)])
    tab = _Tableau(A, b * flip)
    tab.basis = list(range(k, k + m))
    cost = np.concatenate([np.zeros(k), np.ones(m)])
    tab.set_objective(cost)
    tab.run(range(k + m), _pivot_budget(m, k))
    return tab, flip, -tab.T[-1, -1]


def _certificate_from(tab: _Tableau, flip: np.ndarray) -> np.ndarray:
    k, m = tab.k - tab.m, tab.m
    # artificial reduced cost is 1 - w_i
    w = 1.0 - tab.T[-1, k : k + m]
    u = flip * w
    scale = np.abs(u).max()
    return u / scale if scale > 0 else u


def _check_system(C, b) -> tuple[np.ndarray, np.ndarray]:
    C = np.asarray(C, dtype=float)
    b = np.asarray(b, dtype=float)
    if C.ndim != 2 or b.ndim != 1 or C.shape[0] != b.size:
        raise InputError(f"incompatible shapes C{C.shape}, b{b.shape}", "E_DIM", "C")
    if not (np.all(np.isfinite(C)) and np.all(np.isfinite(b))):
        raise InputError("entries must be finite", "E_NONFINITE", "C")
    return C, b


def _trivial_certificate(b: np.ndarray) -> np.ndarray:
    return b / np.abs(b).max()


def verify_farkas(C, b, u, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``C^T u <= feas`` entrywise and ``b^T u > strict``."""
    C, b = _check_system(C, b)
    u = np.asarray(u, dtype=float)
    if u.shape != b.shape:
        raise InputError(f"certificate has length {u.size}, expected {b.size}", "E_DIM", "certificate")
    return bool(np.all(C.T @ u <= tol.feas) and b @ u > tol.strict)


def _verified_feasible(C, b, y, tol) -> Feasible:
    if C.shape[1] and (np.abs(C @ y - b).max() > tol.feas or y.min() < -tol.feas):
        raise SimplexStallError("phase-1 point failed re-verification")
    if not C.shape[1] and np.abs(b).max() > tol.feas:
        raise SimplexStallError("empty system reported feasible with b != 0")
    return Feasible(np.maximum(y, 0.0))


def _verified_infeasible(C, b, u, tol) -> Infeasible:
    if not verify_farkas(C, b, u, tol):
        raise SimplexStallError("Farkas certificate failed re-verification")
    return Infeasible(u)


def feasible_nonneg(C, b, tol: Tolerances = DEFAULT_TOL) -> FeasibilityOutcome:
    """Decide whether ``C y = b`` has a solution ``y >= 0``.

    Returns ``Feasible(y)`` with a basic solution, or ``Infeasible(u)`` with a
    verified Farkas certificate read off the phase-1 dual.

    Raises
    ------
    SimplexStallError
        If the pivot budget is exhausted or the verdict does not re-verify.
    """
    C, b = _check_system(C, b)
    m, k = C.shape
    if not np.any(b):
        return Feasible(np.zeros(k))
    if k == 0:
        return _verified_infeasible(C, b, _trivial_certificate(b), tol)
    tab, flip, value = _phase_one(C, b)
    if value <= tol.feas:
        return _verified_feasible(C, b, tab.basic_solution(k), tol)
    return _verified_infeasible(C, b, _certificate_from(tab, flip), tol)


def _drive_out_artificials(tab: _Tableau, k: int) -> None:
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    keep = []
    for r in range(tab.m):
        if tab.basis[r] >= k:
            row = tab.T[r, :k]
            cand = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
            if cand.size:
                tab.pivot(r, int(cand[0]))
                keep.append(r)
        else:
            keep.append(r)
    if len(keep) < tab.m:
        rows = keep + [tab.m]
        tab.T = tab.T[rows]
        tab.basis = [tab.basis[r] for r in keep]
        tab.m = len(keep)


def strict_on_support(C, b, support: Sequence[int], tol: Tolerances = DEFAULT_TOL):
    """Maximize the smallest support entry of a nonnegative solution.

    Columns off ``support`` are fixed to zero. Writing the support block as
    ``y_S = z + t * 1`` with ``z, t >= 0`` turns the problem into the LP
    ``max t`` s.t. ``C_S z + (C_S 1) t = b``.

    Returns
    -------
    StrictSupportResult or Infeasible
        ``Infeasible`` carries a certificate for the zero-fixed system.
    """
    C, b = _check_system(C, b)
    m, k = C.shape
    S = sorted(int(i) for i in support)
    if len(set(S)) != len(S) or any(not 0 <= i < k for i in S):
        raise InputError(f"bad support {list(support)} for {k} columns", "E_INDEX", "support")
    CS = C[:, S]
    ns = len(S)
    if ns == 0:
        if np.abs(b).max() <= tol.feas:
            return StrictSupportResult(np.zeros(k), math.inf, True)
        return _verified_infeasible(CS, b, _trivial_certificate(b), tol)

    ext = np.hstack([CS, CS.sum(axis=1, keepdims=True)])
    tab, flip, value = _phase_one(ext, b)
    if value > tol.feas:
        u = _certificate_from(tab, flip)
        return _verified_infeasible(CS, b, u, tol)

    status, zt = _maximize_margin(tab, ns)
    unbounded = status == "unbounded"
    if unbounded:
        # any margin is attainable; re-solve with t capped for a concrete point
        cap = max(1.0, 2.0 * float(zt[ns]))
        capped = np.zeros((m, 1))
        rows = np.vstack([np.hstack([ext, capped]), np.append(np.eye(1, ns + 1, ns), 1.0)])
        tab, flip, value = _phase_one(rows, np.append(b, cap))
        if value > tol.feas:
            raise SimplexStallError("capped margin LP lost feasibility")
        status, zt = _maximize_margin(tab, ns + 1, objective_col=ns)
        if status != "optimal":
            raise SimplexStallError("capped margin LP is unbounded")
        zt = zt[: ns + 1]
    y_s = zt[:ns] + zt[ns]
    margin = math.inf if unbounded else float(zt[ns])
    y = np.zeros(k)
    y[S] = y_s
    if np.abs(C @ y - b).max() > tol.feas * max(1.0, np.abs(y).max()) or y_s.min() < -tol.feas:
        raise SimplexStallError("support LP point failed re-verification")
    return StrictSupportResult(np.maximum(y, 0.0), margin, unbounded)


def _maximize_margin(tab: _Tableau, nvars: int, objective_col: int | None = None):
    """Phase 2 after a feasible phase 1: maximize column ``objective_col``."""
    if objective_col is None:
        objective_col = nvars
    nstruct = nvars + 1
    _drive_out_artificials(tab, nstruct)
    cost = np.zeros(tab.k)
    cost[objective_col] = -1.0
    tab.set_objective(cost)
    status = tab.run(range(nstruct), _pivot_budget(tab.m, nstruct))
    return status, tab.basic_solution(nstruct)
