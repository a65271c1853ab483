"""Constructive solvers: fixed-point iterations, pattern LPs, family sampling
and the exhaustive sign-pattern enumerator used as an oracle.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import BudgetExceededError, InputError, NumericalError
from .feasibility import Infeasible, strict_on_support
from .linalg import NormKind, as_vector, nonsingular_block, numerical_rank, parse_norm, solve_square
from .model import (
    GaveInstance,
    Multiplicity,
    SignPattern,
    SolutionRecord,
    Splitting,
    Target,
    as_pattern,
    residual_bound,
    sign_transform,
    support,
)

DEFAULT_ENUM_BUDGET = 3**12


@dataclass(frozen=True)
class IterationTrace:
    """Diagnostics of a fixed-point run.

    ``step_norms[k]`` is the p-norm of ``v^{k+1} - v^k``; ``min_entry`` is the
    smallest entry seen over all y-iterates (``None`` for the x-iteration).
    """

    iterates_kept: tuple
    step_norms: tuple
    converged: bool
    iterations: int
    residual_inf: float
    p: float = math.inf
    min_entry: float | None = None

    def rate_estimate(self, floor: float = 1e-13) -> float | None:
        """Largest observed ratio step[k+1] / step[k] above the noise floor."""
        s = np.asarray(self.step_norms)
        if s.size < 2:
            return None
        scale = floor * max(1.0, float(s.max()))
        ok = (s[:-1] > scale) & (s[1:] > scale)
        if not ok.any():
            return None
        return float((s[1:][ok] / s[:-1][ok]).max())


def _iterate(G, H, c, v0, tol: Tolerances, p: float, keep: int, track_min: bool):
    """Run ``v <- G v + H |v| + c`` until the inf-norm step is below tol.step."""
    v = np.array(v0, dtype=float)
    kept = deque([v.copy()], maxlen=keep)
    steps = []
    lowest = float(v.min()) if track_min else None
    converged = False
    for it in range(1, tol.maxit + 1):
        # divergence is reported below, not through floating-point warnings
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = G @ v + c
            if H is not None:
                nxt = nxt + H @ np.abs(v)
            diff = nxt - v
        steps.append(float(np.linalg.norm(diff, p)))
        v = nxt
        kept.append(v.copy())
        if track_min:
            lowest = min(lowest, float(v.min()))
        if not np.all(np.isfinite(v)):
            raise NumericalError(f"fixed-point iteration diverged at step {it}")
        if np.abs(diff).max() <= tol.step * (1.0 + np.abs(v).max()):
            converged = True
            break
    return v, tuple(kept), tuple(steps), converged, it, lowest


def fixed_point_x(inst: GaveInstance, split: Splitting | None = None, x0=None,
                  tol: Tolerances = DEFAULT_TOL, p: NormKind = math.inf, keep: int = 5):
    """Iterate ``x <- M_A^+ (N_A x + B|x| + b)``.

    Parameters
    ----------
    split : Splitting, optional
        Splitting of A; the trivial one (M = A, N = 0) by default.
    x0 : array_like, optional
        Starting point, zero by default.
    p : {1, 2, inf}
        Norm used for the recorded step lengths.

    Returns
    -------
    x : ndarray
        Final iterate.
    trace : IterationTrace
        ``trace.residual_inf`` is the GAVE residual of ``x``. When M_A lacks
        full row rank a fixed point need not solve the GAVE; check it.
    """
    split = split if split is not None else Splitting.trivial(inst, Target.A)
    if split.target is not Target.A:
        raise InputError("x-iteration needs a splitting of A", "E_SPLITTING", "target")
    split.validate(inst)
    Mp = split.M_pinv
    x0 = np.zeros(inst.n) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (inst.n,):
        raise InputError(f"x0 has shape {x0.shape}, expected ({inst.n},)", "E_DIM", "x0")
    pv = parse_norm(p)
    x, kept, steps, conv, its, _ = _iterate(
        Mp @ split.N, Mp @ inst.B, Mp @ inst.b, x0, tol, pv, keep, False
    )
    r = float(np.abs(inst.A @ x - inst.B @ np.abs(x) - inst.b).max())
    return x, IterationTrace(kept, steps, conv, its, r, pv)


def _require_full_signs(s: SignPattern) -> None:
    if 0 in s:
        raise InputError("y-iteration needs a pattern without zero entries", "E_PATTERN", "pattern")


def fixed_point_y(inst: GaveInstance, split: Splitting, s, tol: Tolerances = DEFAULT_TOL,
                  p: NormKind = math.inf, keep: int = 5):
    """Fixed-point iteration on the sign-transformed system ``[A diag(s) - B] y = b``.

    With a splitting of B:  ``y0 = -M^+ b``,
    ``y <- M^+ ([N + A diag(s)] y - b)``.

    With a splitting of A (rearranging ``M diag(s) y = (N diag(s) + B) y + b``):
    ``y0 = diag(s) M^+ b``, ``y <- diag(s) M^+ ([N diag(s) + B] y + b)``.

    Returns ``(record, trace)`` where ``record.x = diag(s) y``.
    ``trace.min_entry`` reports whether every iterate stayed nonnegative.
    """
    s = as_pattern(s, inst.n)
    _require_full_signs(s)
    split.validate(inst)
    D = np.asarray(s, dtype=float)
    Mp = split.M_pinv
    if split.target is Target.B:
        G = Mp @ (split.N + inst.A * D)
        c = -(Mp @ inst.b)
    else:
        G = D[:, None] * (Mp @ (split.N * D + inst.B))
        c = D * (Mp @ inst.b)
    pv = parse_norm(p)
    y, kept, steps, conv, its, lowest = _iterate(G, None, c, c, tol, pv, keep, True)
    rec = SolutionRecord.build(inst, D * y, tol=tol)
    trace = IterationTrace(kept, steps, conv, its, rec.residual_inf, pv, lowest)
    return rec, trace


# --------------------------------------------------------------------------
# sign patterns

@dataclass(frozen=True)
class PatternInfeasible:
    """No solution with exactly pattern s.

    ``certificate`` is a Farkas vector for the zero-fixed system when one
    exists. ``boundary`` marks the degenerate case where nonnegative
    solutions exist but none is strictly positive on the support.
    """

    pattern: SignPattern
    certificate: np.ndarray | None
    boundary: bool = False
    margin: float | None = None

    feasible = False


def solve_pattern(inst: GaveInstance, s, tol: Tolerances = DEFAULT_TOL):
    """Find a solution with sign pattern exactly ``s``.

    Returns a :class:`SolutionRecord` (multiplicity decided by the column rank
    of the support block of ``A diag(s) - B``) or :class:`PatternInfeasible`.
    """
    s = as_pattern(s, inst.n)
    C = sign_transform(inst, s)
    S = support(s)
    res = strict_on_support(C, inst.b, S, tol)
    if isinstance(res, Infeasible):
        return PatternInfeasible(s, res.certificate)
    if not res.is_strict(tol):
        return PatternInfeasible(s, None, True, res.margin)
    D = np.asarray(s, dtype=float)
    if S and (res.unbounded or numerical_rank(C[:, S]) < len(S)):
        mult = Multiplicity.INFINITE_IN_PATTERN
    else:
        mult = Multiplicity.UNIQUE_IN_PATTERN
    rec = SolutionRecord.build(inst, D * res.y, mult, tol)
    if rec.pattern != s or not rec.is_solution(inst, tol):
        return PatternInfeasible(s, None, True, res.margin)
    return rec


POLISH_LEVELS = (None, 1e-9, 1e-8, 1e-7, 1e-6)


def polish(inst: GaveInstance, x, tol: Tolerances = DEFAULT_TOL) -> SolutionRecord | None:
    """Turn an approximate solution (e.g. a fixed-point limit) into an exact-pattern one.

    Entries below a growing threshold are snapped to zero and the resulting
    pattern is re-solved by LP. The snapped x itself is kept when it still
    solves the equation; otherwise the LP point is returned. ``None`` if no
    snapping level yields a feasible pattern.
    """
    x = as_vector(x, "x")
    scale = 1.0 + (np.abs(x).max() if x.size else 0.0)
    for level in POLISH_LEVELS:
        thr = (tol.zero if level is None else level) * scale
        snapped = np.where(np.abs(x) <= thr, 0.0, x)
        s = tuple(int(v) for v in np.sign(snapped))
        out = solve_pattern(inst, s, tol)
        if isinstance(out, PatternInfeasible):
            continue
        rec = SolutionRecord.build(inst, snapped, out.multiplicity, tol)
        if rec.pattern == s and rec.is_solution(inst, tol):
            return rec
        return out
    return None


@dataclass(frozen=True)
class FamilySample:
    members: tuple
    pattern: SignPattern
    complete: bool = True
    diagnostic: str | None = None


def sample_family(inst: GaveInstance, x_star, k: int, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOL, attempts: int = 200) -> FamilySample:
    """Draw ``k`` distinct solutions sharing the sign pattern of ``x_star``.

    Free nonzeros (those outside an invertible block of the support columns)
    are scaled by ``1 + eta`` with ``eta`` shrunk until the pivot entries keep
    their signs; the pivot entries are then solved for.
    """
    if not isinstance(x_star, SolutionRecord):
        x_star = SolutionRecord.build(inst, x_star, tol=tol)
    if not x_star.is_solution(inst, tol):
        raise InputError(f"x* has residual {x_star.residual_inf:.3g}", "E_NOT_SOLUTION", "x")
    s = x_star.pattern
    members = [x_star]
    if k <= 1:
        return FamilySample(tuple(members), s)

    S = support(s)
    D = np.asarray(s, dtype=float)
    C = sign_transform(inst, s)
    y = np.abs(x_star.x)
    r = numerical_rank(C[:, S]) if S else 0
    blk = nonsingular_block(C[:, S], r) if S else ([], [])
    if blk is None:
        raise NumericalError("no invertible block among the support columns")
    I1, J = blk
    I2 = [S[j] for j in J]
    free = [i for i in S if i not in I2]
    if not free:
        return FamilySample(tuple(members), s, False, "pattern admits a single solution")

    rng = np.random.default_rng(seed)
    bound = residual_bound(inst, tol)
    for _ in range(attempts):
        if len(members) >= k:
            break
        eta = rng.uniform(-0.9, 0.9, len(free))
        for _shrink in range(40):
            yf = y[free] * (1.0 + eta)
            if I2:
                rhs = inst.b[I1] - C[np.ix_(I1, free)] @ yf
                yp = solve_square(C[np.ix_(I1, I2)], rhs)
            else:
                yp = np.zeros(0)
            if yp.size == 0 or yp.min() > 0:
                break
            eta = eta / 2
        cand = np.zeros(inst.n)
        cand[I2] = yp
        cand[free] = yf
        rec = SolutionRecord.build(inst, D * cand, Multiplicity.INFINITE_IN_PATTERN, tol)
        if rec.pattern != s or rec.residual_inf > bound:
            continue
        if all(np.abs(rec.x - m.x).max() >= 1e-6 for m in members):
            members.append(rec)
    complete = len(members) >= k
    diag = None if complete else f"only {len(members)} of {k} members found"
    return FamilySample(tuple(members), s, complete, diag)


@dataclass(frozen=True)
class PatternEntry:
    s: SignPattern
    status: str  # "infeasible" | "unique" | "infinite"
    x: np.ndarray | None = None
    certificate: np.ndarray | None = None
    boundary: bool = False

    def to_json(self) -> dict:
        out = {"s": list(self.s), "status": self.status}
        if self.x is not None:
            out["x"] = [float(v) for v in self.x]
        if self.certificate is not None:
            out["certificate"] = [float(v) for v in self.certificate]
        if self.boundary:
            out["boundary"] = True
        return out


def classify_pattern(inst: GaveInstance, s, tol: Tolerances = DEFAULT_TOL) -> PatternEntry:
    out = solve_pattern(inst, s, tol)
    if isinstance(out, PatternInfeasible):
        return PatternEntry(out.pattern, "infeasible", certificate=out.certificate,
                            boundary=out.boundary)
    status = "unique" if out.multiplicity is Multiplicity.UNIQUE_IN_PATTERN else "infinite"
    return PatternEntry(out.pattern, status, x=out.x)


@dataclass(frozen=True)
class EnumerationReport:
    total: str  # "0" | "finite" | "infinite"
    count_if_finite: int | None
    patterns: tuple

    def feasible(self):
        return [e for e in self.patterns if e.status != "infeasible"]

    def entry(self, s) -> PatternEntry:
        s = tuple(int(v) for v in s)
        for e in self.patterns:
            if e.s == s:
                return e
        raise KeyError(s)

    def nonnegative(self) -> tuple[str, int | None]:
        """Count of solutions x >= 0, in the same "0"/"finite"/"infinite" terms."""
        return _summarize([e for e in self.patterns if min(e.s) >= 0])

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "count_if_finite": self.count_if_finite,
            "patterns": [e.to_json() for e in self.patterns],
        }


def _summarize(entries) -> tuple[str, int | None]:
    feas = [e for e in entries if e.status != "infeasible"]
    if any(e.status == "infinite" for e in feas):
        return "infinite", None
    if not feas:
        return "0", 0
    return "finite", len(feas)


def enumerate_patterns(inst: GaveInstance, budget: int = DEFAULT_ENUM_BUDGET,
                       tol: Tolerances = DEFAULT_TOL) -> EnumerationReport:
    """Decide every sign pattern in {-1, 0, 1}^n.

    Each pattern contributes no solution, exactly one, or infinitely many;
    since patterns partition R^n the totals are exact.

    Raises
    ------
    BudgetExceededError
        If ``3**n`` exceeds ``budget``.
    """
    count = 3**inst.n
    if count > budget:
        raise BudgetExceededError(f"3^{inst.n} = {count} patterns exceeds budget {budget}")
    entries = tuple(
        classify_pattern(inst, s, tol) for s in itertools.product((-1, 0, 1), repeat=inst.n)
    )
    total, cnt = _summarize(entries)
    return EnumerationReport(total, cnt, entries)
