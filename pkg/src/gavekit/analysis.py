"""Sufficient conditions for solvability and multiplicity, one checker each.

Every checker returns :class:`TheoremVerdict` objects whose witness carries
the quantities it computed (norms, pseudoinverse products, index sets) so a
reader can re-derive the verdict from the inputs. :func:`analyze` runs them
all and picks the strongest conclusion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Sequence

import numpy as np
from scipy.linalg import qr

from .config import DEFAULT_TOL, Tolerances
from .errors import GaveError, InputError, NumericalError
from .linalg import NormKind, nonsingular_block, norm_label, numerical_rank, op_norm, parse_norm
from .model import (
    GaveInstance,
    SolutionRecord,
    Splitting,
    Target,
    all_ones,
    as_pattern,
    jacobi_splitting,
    residual_bound,
    sign_of,
    sign_transform,
    support,
    zero_threshold,
)
from .solvers import fixed_point_x, fixed_point_y, polish


class TheoremId(str, enum.Enum):
    ThmMpq = "ThmMpq"
    CorMp = "CorMp"
    ThmInfo = "ThmInfo"
    ThmInf2_2 = "ThmInf2_2"
    ThmGaveInf = "ThmGaveInf"
    CorGaveInf = "CorGaveInf"
    ThmZn1a = "ThmZn1a"
    ThmZn1b = "ThmZn1b"
    CorZn = "CorZn"
    ThmNonective = "ThmNonective"
    CorNonective = "CorNonective"
    ThmSoaA = "ThmSoaA"
    ThmSoaB = "ThmSoaB"
    ThmNonectiveA = "ThmNonectiveA"
    CorNonectiveAa = "CorNonectiveAa"
    RemTmp = "RemTmp"
    TrivialUnique = "TrivialUnique"


THEOREM_ORDER = {t: i for i, t in enumerate(TheoremId)}

DESCRIPTIONS = {
    TheoremId.ThmMpq: "contraction of x -> M_A^+(N_A x + B|x| + b) for a splitting A = M_A - N_A",
    TheoremId.CorMp: "contraction of x -> A^+(B|x| + b): rank(A) = m and ||A^+ B||_p < 1",
    TheoremId.ThmInfo: "square column block A1 of A with ||A1^-1 B1||_p < 1",
    TheoremId.ThmInf2_2: "invertible block of A diag(s) - B inside the support of a known solution",
    TheoremId.ThmGaveInf: "known solution with more nonzeros than rank(A diag(s) - B)",
    TheoremId.CorGaveInf: "known solution with more than m nonzeros",
    TheoremId.ThmZn1a: "sign cone through a splitting of B: M_B^+ b <= 0, M_B^+[N_B + A diag(s)] >= 0, norm < 1",
    TheoremId.ThmZn1b: "strict sign cone through a splitting of B: M_B^+ b < 0, inf-norm < gamma/2",
    TheoremId.CorZn: "B^+ b < 0 and ||B^+ A||_inf < gamma/2 (every pattern in {-1,1}^n)",
    TheoremId.ThmNonective: "nonnegative solution through a splitting of B",
    TheoremId.CorNonective: "B^+ b <= 0, B^+ A >= 0, ||B^+ A||_p < 1",
    TheoremId.ThmSoaA: "sign cone through a splitting of A: diag(s)M_A^+ b >= 0, diag(s)M_A^+[N_A diag(s) + B] >= 0, norm < 1",
    TheoremId.ThmSoaB: "strict sign cone through a splitting of A: diag(s)M_A^+ b > 0, inf-norm < gamma/2",
    TheoremId.ThmNonectiveA: "nonnegative solution through a splitting of A",
    TheoremId.CorNonectiveAa: "A^+ b >= 0, A^+ B >= 0, ||A^+ B||_p < 1",
    TheoremId.RemTmp: "b = 0 and A = B (or A = -B) with one-signed rows",
    TheoremId.TrivialUnique: "b = 0 with |A| < B or B < A <= 0",
}


class Conclusion(str, enum.Enum):
    NO_INFO = "no_info"
    EXISTS_ANY_B = "exists_any_b"
    INFINITE_ANY_B = "infinite_any_b"
    EXISTS_FOR_THIS_B = "exists_for_this_b"
    INFINITE_IN_PATTERN = "infinite_in_pattern"
    UNIQUE_IN_PATTERN = "unique_in_pattern"
    NONNEG_EXISTS = "nonneg_exists"
    ALL_NONNEG_SOLVE = "all_nonneg_solve"
    ALL_NONPOS_SOLVE = "all_nonpos_solve"
    ONLY_TRIVIAL = "only_trivial"


# higher is stronger; used to pick the headline conclusion
STRENGTH = {
    Conclusion.NO_INFO: 0,
    Conclusion.UNIQUE_IN_PATTERN: 1,
    Conclusion.EXISTS_FOR_THIS_B: 2,
    Conclusion.NONNEG_EXISTS: 3,
    Conclusion.EXISTS_ANY_B: 4,
    Conclusion.ONLY_TRIVIAL: 5,
    Conclusion.INFINITE_IN_PATTERN: 6,
    Conclusion.ALL_NONNEG_SOLVE: 7,
    Conclusion.ALL_NONPOS_SOLVE: 7,
    Conclusion.INFINITE_ANY_B: 8,
}


@dataclass(frozen=True)
class TheoremVerdict:
    theorem: TheoremId
    applies: bool
    conclusion: Conclusion
    witness: dict = field(default_factory=dict)
    inconclusive: bool = False
    order: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.applies and self.conclusion is not Conclusion.NO_INFO:
            raise ValueError("a verdict that does not apply must conclude no_info")

    def to_json(self) -> dict:
        out = {
            "theorem": self.theorem.value,
            "applies": self.applies,
            "conclusion": self.conclusion.value,
            "witness": self.witness,
        }
        if self.inconclusive:
            out["inconclusive"] = True
        return out


def _verdict(theorem, applies, conclusion, witness, **kw) -> TheoremVerdict:
    return TheoremVerdict(theorem, bool(applies), conclusion if applies else Conclusion.NO_INFO,
                          witness, **kw)


class HypothesisUnmet(GaveError):
    """The invertible-block hypothesis of the multiplicity classification fails."""


class MultiplicityCase(str, enum.Enum):
    INFINITE_SAME_PATTERN = "infinite_same_pattern"
    INFINITE_ON_SUBPATTERN = "infinite_on_subpattern"
    UNIQUE_IN_PATTERN = "unique_in_pattern"


@dataclass(frozen=True)
class MultiplicityClass:
    """Outcome of the block-based classification of a known solution.

    ``case`` is either INFINITE_SAME_PATTERN (a nonzero lies outside I2) or
    UNIQUE_IN_PATTERN (the solution vanishes off I2). Infinitely many
    solutions agreeing in sign with x* on I2 exist in both cases; I1 and I2
    are the witness for that.
    """

    case: MultiplicityCase
    I1: tuple
    I2: tuple
    rank: int


# --------------------------------------------------------------------------
# small numeric predicates

def _scale(M) -> float:
    M = np.asarray(M)
    return max(1.0, float(np.abs(M).max())) if M.size else 1.0


def _all_nonneg(M, tol: Tolerances) -> bool:
    return bool(np.all(np.asarray(M) >= -tol.sign_tol * _scale(M)))


def _all_nonpos(v, tol: Tolerances) -> bool:
    return bool(np.all(np.asarray(v) <= tol.sign_tol * _scale(v)))


def _less(value: float, bound: float, tol: Tolerances) -> bool:
    return value < bound - tol.margin


def gamma_ratio(v) -> float:
    """``min |v_i| / max |v_i|`` (0 for the zero vector)."""
    a = np.abs(np.asarray(v, dtype=float))
    top = a.max() if a.size else 0.0
    return float(a.min() / top) if top > 0 else 0.0


def _vec(v) -> list:
    return [float(t) for t in np.asarray(v).ravel()]


def _mat(M) -> list:
    return [[float(t) for t in row] for row in np.asarray(M)]


# --------------------------------------------------------------------------
# b-independent checks

def check_contraction_A(inst: GaveInstance, split: Splitting | None = None, p: NormKind = 2,
                        tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """``rank(M_A) = m`` and ``||M_A^+ N_A||_p + ||M_A^+ B||_p < 1``.

    With the trivial splitting this is reported under ``CorMp``.
    """
    split = split if split is not None else Splitting.trivial(inst, Target.A)
    if split.target is not Target.A:
        raise InputError("contraction check needs a splitting of A", "E_SPLITTING", "target")
    split.validate(inst)
    theorem = TheoremId.CorMp if split.is_trivial else TheoremId.ThmMpq
    Mp = split.M_pinv
    n_mn = op_norm(Mp @ split.N, p)
    n_mb = op_norm(Mp @ inst.B, p)
    q = n_mn + n_mb
    full = split.rank == inst.m
    witness = {
        "splitting": split.label,
        "p": norm_label(p),
        "rank_M": split.rank,
        "norm_Mpinv_N": n_mn,
        "norm_Mpinv_B": n_mb,
        "contraction_factor": q,
    }
    return _verdict(theorem, full and _less(q, 1.0, tol), Conclusion.EXISTS_ANY_B, witness)


def check_submatrix_condition(inst: GaveInstance, p: NormKind = 2, budget: int = 10_000,
                              tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """Search for m columns J with A[:, J] invertible and ``||A_J^-1 B_J||_p < 1``.

    A pivoted-QR guess is tried first, then every J in lexicographic order
    when ``C(n, m) <= budget``. A fruitless search beyond the budget is
    flagged ``inconclusive`` rather than refuted.
    """
    m, n = inst.m, inst.n
    witness: dict = {"p": norm_label(p)}
    rank_A = numerical_rank(inst.A)
    witness["rank_A"] = rank_A
    if m >= n or rank_A < m:
        witness["reason"] = "needs m < n" if m >= n else "A lacks full row rank"
        return _verdict(TheoremId.ThmInfo, False, None, witness)

    def norm_for(J):
        A1 = inst.A[:, list(J)]
        if numerical_rank(A1) < m:
            return None
        return op_norm(np.linalg.solve(A1, inst.B[:, list(J)]), p)

    _, _, piv = qr(inst.A, pivoting=True, mode="economic")
    guess = tuple(sorted(int(j) for j in piv[:m]))
    searched = 1
    best = norm_for(guess)
    if best is not None and _less(best, 1.0, tol):
        witness.update(columns=list(guess), norm=best, searched=searched, exhaustive=False)
        return _verdict(TheoremId.ThmInfo, True, Conclusion.INFINITE_ANY_B, witness)

    total = comb(n, m)
    if total > budget:
        witness.update(searched=searched, exhaustive=False, subsets=total,
                       reason="search budget exhausted")
        return _verdict(TheoremId.ThmInfo, False, None, witness, inconclusive=True)

    smallest = (math.inf, None)
    for J in combinations(range(n), m):
        val = norm_for(J)
        searched += 1
        if val is None:
            continue
        if val < smallest[0]:
            smallest = (val, J)
        if _less(val, 1.0, tol):
            witness.update(columns=list(J), norm=val, searched=searched, exhaustive=True)
            return _verdict(TheoremId.ThmInfo, True, Conclusion.INFINITE_ANY_B, witness)
    witness.update(searched=searched, exhaustive=True, reason="no qualifying column block")
    if smallest[1] is not None:
        witness.update(min_norm=smallest[0], min_columns=list(smallest[1]))
    return _verdict(TheoremId.ThmInfo, False, None, witness)


# --------------------------------------------------------------------------
# known-solution checks

def classify_linear_solution(C, b, y, tol: Tolerances = DEFAULT_TOL) -> MultiplicityClass:
    """Classify a solution y of the linear system ``C y = b`` by sign pattern.

    Looks for an invertible ``rank(C)``-sized block ``C[I1, I2]`` with I2
    inside the support of y. If some nonzero of y lies outside I2 there are
    infinitely many solutions with y's pattern; otherwise y is the only one.

    Raises
    ------
    HypothesisUnmet
        If y has fewer than rank(C) nonzeros or no such block exists.
    """
    C = np.asarray(C, dtype=float)
    y = np.asarray(y, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.abs(b).max()), float(np.abs(C).max()) * float(np.abs(y).max()))
    if np.abs(C @ y - b).max() > tol.residual * scale:
        raise InputError("y does not solve C y = b", "E_NOT_SOLUTION", "x")
    r = numerical_rank(C)
    thr = zero_threshold(y, tol)
    S = [i for i, v in enumerate(y) if abs(v) > thr]
    if len(S) < r:
        raise HypothesisUnmet(f"{len(S)} nonzero entries but rank is {r}")
    blk = nonsingular_block(C, r, S)
    if blk is None:
        raise HypothesisUnmet(f"no invertible {r}x{r} block within the support columns {S}")
    I1, I2 = blk
    outside = [i for i in S if i not in I2]
    case = MultiplicityCase.INFINITE_SAME_PATTERN if outside else MultiplicityCase.UNIQUE_IN_PATTERN
    return MultiplicityClass(case, tuple(I1), tuple(I2), r)


def _as_solution(inst: GaveInstance, x, tol: Tolerances) -> SolutionRecord:
    rec = x if isinstance(x, SolutionRecord) else SolutionRecord.build(inst, x, tol=tol)
    if not rec.is_solution(inst, tol):
        raise InputError(f"x has residual {rec.residual_inf:.3g}", "E_NOT_SOLUTION", "x")
    return rec


def classify_known_solution(inst: GaveInstance, x, tol: Tolerances = DEFAULT_TOL) -> MultiplicityClass:
    """Apply :func:`classify_linear_solution` to ``[A diag(s) - B] |x| = b``, s = sign(x)."""
    rec = _as_solution(inst, x, tol)
    C = sign_transform(inst, rec.pattern)
    return classify_linear_solution(C, inst.b, np.abs(rec.x), tol)


def check_known_solution(inst: GaveInstance, x, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    rec = _as_solution(inst, x, tol)
    witness = {"x": _vec(rec.x), "pattern": list(rec.pattern)}
    try:
        cls = classify_known_solution(inst, rec, tol)
    except HypothesisUnmet as exc:
        witness["reason"] = str(exc)
        return _verdict(TheoremId.ThmInf2_2, False, None, witness)
    witness.update(case=cls.case.value, rows=list(cls.I1), columns=list(cls.I2), rank=cls.rank)
    concl = (Conclusion.INFINITE_IN_PATTERN if cls.case is MultiplicityCase.INFINITE_SAME_PATTERN
             else Conclusion.UNIQUE_IN_PATTERN)
    return _verdict(TheoremId.ThmInf2_2, True, concl, witness)


def check_nonzero_count(inst: GaveInstance, x, versus_m: bool = False,
                        tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """More nonzeros than ``rank(A diag(s) - B)`` (or than m with ``versus_m``)."""
    rec = _as_solution(inst, x, tol)
    nnz = len(support(rec.pattern))
    if versus_m:
        theorem, bound, key = TheoremId.CorGaveInf, inst.m, "m"
    else:
        theorem = TheoremId.ThmGaveInf
        bound, key = numerical_rank(sign_transform(inst, rec.pattern)), "rank"
    witness = {"x": _vec(rec.x), "pattern": list(rec.pattern), "nonzeros": nnz, key: bound}
    return _verdict(theorem, nnz > bound, Conclusion.INFINITE_IN_PATTERN, witness)


# --------------------------------------------------------------------------
# sign-cone checks

def _cone_ids(target: Target, trivial: bool, ones: bool):
    if target is Target.B:
        a = (TheoremId.CorNonective if trivial else TheoremId.ThmNonective) if ones else TheoremId.ThmZn1a
        bb = TheoremId.CorZn if trivial else TheoremId.ThmZn1b
    else:
        a = (TheoremId.CorNonectiveAa if trivial else TheoremId.ThmNonectiveA) if ones else TheoremId.ThmSoaA
        bb = TheoremId.ThmSoaB
    return a, bb


def _signcone(inst, split, s, p, tol, target):
    s = as_pattern(s, inst.n)
    if split.target is not target:
        raise InputError(f"expected a splitting of {target.value}", "E_SPLITTING", "target")
    split.validate(inst)
    ones = all(v == 1 for v in s)
    id_a, id_b = _cone_ids(target, split.is_trivial, ones)
    concl_a = Conclusion.NONNEG_EXISTS if ones else Conclusion.EXISTS_FOR_THIS_B
    base = {"splitting": split.label, "pattern": list(s), "rank_M": split.rank}
    if split.rank != inst.m or 0 in s:
        reason = "M lacks full row rank" if split.rank != inst.m else "pattern has zero entries"
        w = dict(base, reason=reason)
        return [_verdict(id_a, False, None, dict(w, p=norm_label(p))),
                _verdict(id_b, False, None, dict(w, p="inf"))]

    D = np.asarray(s, dtype=float)
    Mp = split.M_pinv
    Mb = Mp @ inst.b
    if target is Target.B:
        G = Mp @ (split.N + inst.A * D)
        rhs = Mb
        sign_ok = _all_nonpos(rhs, tol)
        strict_ok = bool(np.all(rhs < -tol.strict))
    else:
        G = D[:, None] * (Mp @ (split.N * D + inst.B))
        rhs = D * Mb
        sign_ok = _all_nonneg(rhs, tol)
        strict_ok = bool(np.all(rhs > tol.strict))
    cone_ok = _all_nonneg(G, tol)
    norm_p = op_norm(G, p)
    norm_inf = op_norm(G, np.inf)
    gamma = gamma_ratio(Mb)

    wa = dict(base, p=norm_label(p), Mpinv_b=_vec(Mb), product=_mat(G), norm=norm_p,
              rhs_sign_ok=sign_ok, product_nonneg=cone_ok)
    applies_a = sign_ok and cone_ok and _less(norm_p, 1.0, tol)

    wb = dict(base, p="inf", Mpinv_b=_vec(Mb), norm=norm_inf, gamma=gamma, rhs_strict_ok=strict_ok)
    applies_b = strict_ok and _less(norm_inf, gamma / 2.0, tol)
    if inst.m >= inst.n:
        applies_b = False
        wb["reason"] = "needs m < n"
    if id_b is TheoremId.CorZn:
        wb["all_patterns"] = True
    return [_verdict(id_a, applies_a, concl_a, wa),
            _verdict(id_b, applies_b, Conclusion.INFINITE_IN_PATTERN, wb)]


def check_signcone_B(inst: GaveInstance, split: Splitting | None = None, s=None, p: NormKind = 2,
                     tol: Tolerances = DEFAULT_TOL) -> list[TheoremVerdict]:
    """Sign-cone conditions through a splitting ``B = M_B - N_B``.

    Returns two verdicts: the non-strict conditions (existence of a solution
    ``diag(s) y`` with y >= 0) and the strict ones (infinitely many
    solutions with pattern s). s defaults to all ones, which reports as a
    nonnegative-solution result.
    """
    split = split if split is not None else Splitting.trivial(inst, Target.B)
    s = all_ones(inst.n) if s is None else s
    return _signcone(inst, split, s, p, tol, Target.B)


def check_signcone_A(inst: GaveInstance, split: Splitting | None = None, s=None, p: NormKind = 2,
                     tol: Tolerances = DEFAULT_TOL) -> list[TheoremVerdict]:
    """Mirror of :func:`check_signcone_B` for a splitting ``A = M_A - N_A``."""
    split = split if split is not None else Splitting.trivial(inst, Target.A)
    s = all_ones(inst.n) if s is None else s
    return _signcone(inst, split, s, p, tol, Target.A)


# --------------------------------------------------------------------------
# structural checks for b = 0

def _rows_one_signed(A) -> bool:
    A = np.asarray(A)
    return bool(np.all(np.all(A > 0, axis=1) | np.all(A < 0, axis=1)))


def check_degenerate(inst: GaveInstance) -> list[TheoremVerdict]:
    """Exact structural tests; no tolerances on purpose."""
    A, B, b = inst.A, inst.B, inst.b
    zero_b = not np.any(b)
    one_signed = _rows_one_signed(A)
    equal = bool(np.array_equal(A, B))
    opposite = bool(np.array_equal(A, -B))
    w = {"b_zero": zero_b, "rows_one_signed": one_signed, "A_equals_B": equal,
         "A_equals_minus_B": opposite}
    if zero_b and one_signed and equal:
        tmp = _verdict(TheoremId.RemTmp, True, Conclusion.ALL_NONNEG_SOLVE, w)
    elif zero_b and one_signed and opposite:
        tmp = _verdict(TheoremId.RemTmp, True, Conclusion.ALL_NONPOS_SOLVE, w)
    else:
        tmp = _verdict(TheoremId.RemTmp, False, None, w)

    abs_less = bool(np.all(np.abs(A) < B))
    neg_side = bool(np.all(B < A) and np.all(A <= 0))
    w2 = {"b_zero": zero_b, "abs_A_less_B": abs_less, "B_less_A_nonpos": neg_side}
    triv = _verdict(TheoremId.TrivialUnique, zero_b and (abs_less or neg_side),
                    Conclusion.ONLY_TRIVIAL, w2)
    return [tmp, triv]


# --------------------------------------------------------------------------
# aggregation

P_VALUES = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class AnalysisOptions:
    p_values: tuple = P_VALUES
    splittings: tuple = ()
    auto_splittings: bool = True
    # sign-cone checks: "all" tries every s in {-1,1}^n when 2^n <= max_patterns
    patterns: str | tuple = "all"
    max_patterns: int = 256
    known_solutions: tuple = ()
    max_known: int = 16
    submatrix_budget: int = 10_000
    tol: Tolerances = DEFAULT_TOL


@dataclass(frozen=True)
class AnalysisReport:
    verdicts: tuple
    strongest: dict
    solutions: tuple
    notes: tuple = ()

    @property
    def inconclusive(self) -> bool:
        return any(v.inconclusive for v in self.verdicts)

    def applicable(self, theorem=None):
        return [v for v in self.verdicts if v.applies and (theorem is None or v.theorem == theorem)]

    def to_json(self) -> dict:
        return {
            "verdicts": [v.to_json() for v in self.verdicts],
            "strongest": self.strongest,
            "solutions": [dict(rec.to_json(), source=src) for src, rec in self.solutions],
            "notes": list(self.notes),
            "inconclusive": self.inconclusive,
        }


def _splittings_for(inst, opts, target):
    out = [Splitting.trivial(inst, target)]
    out += [s for s in opts.splittings if s.target is target]
    if opts.auto_splittings:
        jac = jacobi_splitting(inst, target)
        if not any(np.array_equal(jac.M, s.M) for s in out):
            out.append(jac)
    return out


def _patterns_for(inst, opts):
    if opts.patterns == "all" and 2**inst.n <= opts.max_patterns:
        pats = list(product((-1, 1), repeat=inst.n))
        pats.sort(key=lambda s: (s != all_ones(inst.n), s))
        return pats
    if opts.patterns in ("all", "ones"):
        return [all_ones(inst.n)]
    return [as_pattern(s, inst.n) for s in opts.patterns]


def _strongest(verdicts) -> dict:
    live = [v for v in verdicts if v.applies]
    if not live:
        return {"conclusion": Conclusion.NO_INFO.value, "theorem": None, "chain": []}
    best = max(live, key=lambda v: (STRENGTH[v.conclusion], -THEOREM_ORDER[v.theorem]))
    chain = []
    for v in sorted(live, key=lambda v: (-STRENGTH[v.conclusion], THEOREM_ORDER[v.theorem])):
        tag = f"{v.theorem.value}:{v.conclusion.value}"
        if tag not in chain:
            chain.append(tag)
    out = {"conclusion": best.conclusion.value, "theorem": best.theorem.value, "chain": chain}
    for key in ("splitting", "p", "pattern", "columns"):
        if key in best.witness:
            out[key] = best.witness[key]
    return out


def analyze(inst: GaveInstance, options: AnalysisOptions | None = None) -> AnalysisReport:
    """Run every checker and aggregate.

    Solutions produced along the way (fixed points of contracting maps,
    sign-cone iterations) and any user-supplied ones are fed to the
    known-solution checks.
    """
    opts = options or AnalysisOptions()
    tol = opts.tol
    p_values = [parse_norm(p) for p in opts.p_values]
    p_index = {p: i for i, p in enumerate(p_values)}
    A_splits = _splittings_for(inst, opts, Target.A)
    B_splits = _splittings_for(inst, opts, Target.B)
    for sp in opts.splittings:
        sp.validate(inst)

    found: list[tuple[str, SolutionRecord]] = []
    seen_patterns = set()

    def remember(source, rec):
        if rec is None:
            return
        if rec.is_solution(inst, tol) and rec.pattern not in seen_patterns and len(found) < opts.max_known:
            seen_patterns.add(rec.pattern)
            found.append((source, rec))

    for x in opts.known_solutions:
        remember("user", _as_solution(inst, x, tol))

    out: list[TheoremVerdict] = []

    def add(v: TheoremVerdict, *key):
        out.append(TheoremVerdict(v.theorem, v.applies, v.conclusion, v.witness, v.inconclusive,
                                  (THEOREM_ORDER[v.theorem],) + key))

    for si, sp in enumerate(A_splits):
        solved = False
        for p in p_values:
            v = check_contraction_A(inst, sp, p, tol)
            add(v, si, p_index[p])
            if v.applies and not solved:
                solved = True
                x, trace = fixed_point_x(inst, sp, tol=tol)
                if trace.converged:
                    remember(f"{v.theorem.value}/{sp.label}", polish(inst, x, tol))

    for p in p_values:
        add(check_submatrix_condition(inst, p, opts.submatrix_budget, tol), 0, p_index[p])

    ones = all_ones(inst.n)
    for s in _patterns_for(inst, opts):
        for target, splits in ((Target.B, B_splits), (Target.A, A_splits)):
            check = check_signcone_B if target is Target.B else check_signcone_A
            for si, sp in enumerate(splits):
                constructed = False
                for p in p_values:
                    va, vb = check(inst, sp, s, p, tol)
                    keep_b = p == math.inf
                    if s == ones or va.applies:
                        add(va, si, p_index[p], s)
                    if keep_b and (s == ones or vb.applies):
                        add(vb, si, p_index[p], s)
                    if (va.applies or (keep_b and vb.applies)) and not constructed:
                        constructed = True
                        try:
                            rec, trace = fixed_point_y(inst, sp, s, tol)
                        except NumericalError:
                            continue
                        if trace.converged:
                            remember(f"{va.theorem.value}/{sp.label}", polish(inst, rec.x, tol))

    for v in check_degenerate(inst):
        add(v, 0, 0)

    for k, (src, rec) in enumerate(found):
        for v in (check_known_solution(inst, rec, tol),
                  check_nonzero_count(inst, rec, False, tol),
                  check_nonzero_count(inst, rec, True, tol)):
            v.witness["source"] = src
            add(v, 0, 0, (k,))

    out.sort(key=lambda v: _sort_key(v.order))
    notes = []
    if opts.auto_splittings:
        notes.append("splittings labelled 'jacobi' are heuristic choices, not derived from the data")
    return AnalysisReport(tuple(out), _strongest(out), tuple(found), tuple(notes))


def _sort_key(order: tuple):
    return tuple((0, x) if not isinstance(x, tuple) else (1, x) for x in order)
