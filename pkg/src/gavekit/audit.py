"""Cross-check analysis verdicts against the pattern enumerator.

Every conclusion a checker draws is a claim about the solution set, and the
enumerator decides the solution set exactly at desk scale. ``audit`` lists
the disagreements; an empty list means every verdict was sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .analysis import AnalysisOptions, AnalysisReport, Conclusion, TheoremId, analyze
from .config import DEFAULT_TOL, Tolerances
from .model import GaveInstance, residual, residual_bound
from .solvers import EnumerationReport, enumerate_patterns


@dataclass(frozen=True)
class AuditResult:
    report: AnalysisReport
    enumeration: EnumerationReport
    violations: tuple

    @property
    def sound(self) -> bool:
        return not self.violations


def _status(enum: EnumerationReport, s) -> str:
    return enum.entry(tuple(int(v) for v in s)).status


def _violation(v, enum, inst, tol, rng) -> str | None:
    c = v.conclusion
    w = v.witness
    tag = f"{v.theorem.value}:{c.value}"
    feasible = [e.s for e in enum.feasible()]

    if c is Conclusion.EXISTS_ANY_B and not feasible:
        return f"{tag} but no solution exists"
    if c is Conclusion.INFINITE_ANY_B and enum.total != "infinite":
        return f"{tag} but total is {enum.total}"
    if c is Conclusion.EXISTS_FOR_THIS_B:
        # x = diag(s) y with y >= 0: any pattern t with t_i in {0, s_i}
        s = w["pattern"]
        if not any(all(t in (0, si) for t, si in zip(f, s)) for f in feasible):
            return f"{tag} but no solution of the form diag({s}) y, y >= 0"
    if c is Conclusion.NONNEG_EXISTS and not any(min(s) >= 0 for s in feasible):
        return f"{tag} but no nonnegative solution exists"
    if c is Conclusion.INFINITE_IN_PATTERN:
        patterns = [w["pattern"]]
        if v.theorem is TheoremId.CorZn:
            patterns = list(product((-1, 1), repeat=inst.n))
        for s in patterns:
            if _status(enum, s) != "infinite":
                return f"{tag} but pattern {list(s)} is {_status(enum, s)}"
    if c is Conclusion.UNIQUE_IN_PATTERN and _status(enum, w["pattern"]) != "unique":
        return f"{tag} but pattern {w['pattern']} is {_status(enum, w['pattern'])}"
    if c is Conclusion.ONLY_TRIVIAL:
        if feasible != [tuple([0] * inst.n)]:
            return f"{tag} but feasible patterns are {feasible}"
    if c in (Conclusion.ALL_NONNEG_SOLVE, Conclusion.ALL_NONPOS_SOLVE):
        sign = 1.0 if c is Conclusion.ALL_NONNEG_SOLVE else -1.0
        for _ in range(10):
            x = sign * rng.uniform(0.0, 10.0, inst.n)
            if np.abs(residual(inst, x)).max() > residual_bound(inst, tol) * (1 + np.abs(x).max()):
                return f"{tag} but x = {x.tolist()} is not a solution"
        for s in product((0, int(sign)), repeat=inst.n):
            if _status(enum, s) == "infeasible":
                return f"{tag} but pattern {list(s)} is infeasible"
    return None


def audit(inst: GaveInstance, options: AnalysisOptions | None = None,
          tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> AuditResult:
    report = analyze(inst, options or AnalysisOptions(tol=tol))
    enum = enumerate_patterns(inst, tol=tol)
    rng = np.random.default_rng(seed)
    bad = []
    for v in report.verdicts:
        if v.applies:
            msg = _violation(v, enum, inst, tol, rng)
            if msg:
                bad.append(msg)
    return AuditResult(report, enum, tuple(bad))


# --------------------------------------------------------------------------
# the {-1, 0, 1} grid

def grid_size(m: int, n: int) -> int:
    return 3 ** (2 * m * n + m)


def grid_instance(m: int, n: int, index: int) -> GaveInstance:
    """Decode ``index`` in base 3 into (A, B, b) with entries in {-1, 0, 1}."""
    k = 2 * m * n + m
    digits = np.empty(k, dtype=int)
    for i in range(k):
        index, digits[i] = divmod(index, 3)
    vals = digits - 1
    A = vals[: m * n].reshape(m, n)
    B = vals[m * n : 2 * m * n].reshape(m, n)
    return GaveInstance(A, B, vals[2 * m * n :])


def grid_order(m: int, n: int, stride: int = 1_000_003):
    """All grid indices in a spread-out order (``stride`` is coprime to 3)."""
    total = grid_size(m, n)
    for i in range(total):
        yield (i * stride) % total
