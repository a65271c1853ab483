import numpy as np
import pytest

from gavekit.analysis import check_contraction_A, check_signcone_A, check_signcone_B
from gavekit.config import Tolerances
from gavekit.errors import BudgetExceededError, InputError, NumericalError
from gavekit.generator import GeneratorConfig, random_instance
from gavekit.linalg import op_norm, pinv
from gavekit.model import (
    GaveInstance,
    Multiplicity,
    SolutionRecord,
    Splitting,
    Target,
    residual,
    sign_of,
)
from gavekit.solvers import (
    PatternInfeasible,
    classify_pattern,
    enumerate_patterns,
    fixed_point_x,
    fixed_point_y,
    polish,
    sample_family,
    solve_pattern,
)

from conftest import load, load_split

CONTRACTION_CASES = [
    GeneratorConfig(m, n, "contraction-A", p)
    for m, n in ((1, 2), (2, 3), (2, 4), (3, 5), (3, 3))
    for p in (1, 2, "inf")
]


def _generated_contractions(count):
    out = []
    for seed in range(count):
        cfg = CONTRACTION_CASES[seed % len(CONTRACTION_CASES)]
        out.append((cfg, random_instance(cfg, seed)))
    return out


# fixed-point iteration on x

def test_fixed_point_remark_instance():
    inst = load("thmmp_remark")
    x, trace = fixed_point_x(inst)
    assert trace.converged
    np.testing.assert_allclose(x, [7 / 6, 0, 0], atol=1e-8)
    assert trace.residual_inf <= 1e-8


def test_fixed_point_without_B_is_one_step(rng):
    A = rng.standard_normal((2, 4))
    inst = GaveInstance(A, np.zeros_like(A), rng.standard_normal(2))
    x, trace = fixed_point_x(inst)
    np.testing.assert_allclose(x, pinv(A) @ inst.b, atol=1e-14)
    assert trace.iterations <= 2


def test_contraction_rate_inequality():
    """Observed steps shrink at least by the contraction factor q."""
    for cfg, inst in _generated_contractions(100):
        verdict = check_contraction_A(inst, None, cfg.p)
        assert verdict.applies
        q = verdict.witness["contraction_factor"]
        x, trace = fixed_point_x(inst, p=cfg.p)
        assert trace.converged and trace.residual_inf <= 1e-8 * (1 + np.abs(inst.b).max())
        steps = np.asarray(trace.step_norms)
        # below this the steps are rounding noise, not iteration
        floor = 1e-12 * (1 + np.abs(x).max())
        for prev, nxt in zip(steps[:-1], steps[1:]):
            if prev > floor and nxt > floor:
                assert nxt <= (q + 1e-6) * prev
        rate = trace.rate_estimate()
        assert rate is None or rate < 1


def test_unique_limit_from_random_starts():
    g = np.random.default_rng(5)
    for _, inst in _generated_contractions(30):
        limits = []
        for _ in range(20):
            x0 = g.standard_normal(inst.n) * 10 ** g.uniform(-2, 2)
            x, trace = fixed_point_x(inst, x0=x0)
            assert trace.converged and trace.residual_inf <= 1e-8 * (1 + np.abs(inst.b).max())
            limits.append(x)
        limits = np.array(limits)
        assert np.abs(limits - limits[0]).max() <= 1e-6


def test_fixed_point_x_wrong_target():
    inst = load("zn1")
    with pytest.raises(InputError):
        fixed_point_x(inst, load_split("zn1", inst))


# fixed-point iteration on y

def test_fixed_point_y_zn1():
    inst = load("zn1")
    rec, trace = fixed_point_y(inst, load_split("zn1", inst), (1, -1, 1))
    assert trace.converged
    np.testing.assert_allclose(rec.x, [0.5, -1.25, 1.25], atol=1e-12)
    assert rec.residual_inf <= 1e-12
    assert trace.iterations <= 2


def test_fixed_point_y_needs_full_pattern():
    inst = load("zn1")
    with pytest.raises(InputError):
        fixed_point_y(inst, load_split("zn1", inst), (1, 0, 1))


@pytest.mark.parametrize("seed", range(20))
def test_signcone_B_iterates_stay_nonnegative(seed):
    g = np.random.default_rng(seed)
    n = int(g.integers(2, 6))
    m = int(g.integers(1, n + 1))
    s = tuple(int(v) for v in g.choice([-1, 1], n))
    cfg = GeneratorConfig(m, n, "signcone-B", (1, 2, "inf")[seed % 3], s)
    inst = random_instance(cfg, seed)
    assert check_signcone_B(inst, None, s, cfg.p)[0].applies
    rec, trace = fixed_point_y(inst, Splitting.trivial(inst, Target.B), s)
    assert trace.converged and rec.is_solution(inst)
    assert trace.min_entry >= -1e-12


@pytest.mark.parametrize("seed", range(20))
def test_signcone_A_gives_sign_consistent_solution(seed):
    g = np.random.default_rng(100 + seed)
    n = int(g.integers(2, 6))
    m = int(g.integers(1, n + 1))
    s = tuple(int(v) for v in g.choice([-1, 1], n))
    cfg = GeneratorConfig(m, n, "signcone-A", (1, 2, "inf")[seed % 3], s)
    inst = random_instance(cfg, seed)
    assert check_signcone_A(inst, None, s, cfg.p)[0].applies
    rec, trace = fixed_point_y(inst, Splitting.trivial(inst, Target.A), s)
    assert trace.converged and rec.is_solution(inst)
    assert trace.min_entry >= -1e-12
    assert np.all(rec.x * np.array(s) >= -1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_strict_signcone_B_limit_is_strictly_positive(seed):
    g = np.random.default_rng(200 + seed)
    n = int(g.integers(2, 6))
    m = int(g.integers(1, n))
    s = tuple(int(v) for v in g.choice([-1, 1], n))
    inst = random_instance(GeneratorConfig(m, n, "strict-signcone-B"), seed)
    assert check_signcone_B(inst, None, s, np.inf)[1].applies
    rec, trace = fixed_point_y(inst, Splitting.trivial(inst, Target.B), s)
    y = np.abs(rec.x)
    v = pinv(inst.B) @ inst.b
    assert y.min() > 0
    assert np.all(y > v.max() - v - 1e-8)
    assert rec.pattern == s


def test_fixed_point_y_zero_rhs():
    inst = load("egs6")
    rec, trace = fixed_point_y(inst, Splitting.trivial(inst, Target.B), (1, 1, 1))
    np.testing.assert_array_equal(rec.x, 0)


# pattern LP

def test_solve_pattern_examples():
    inst = load("sec32a")
    rec = solve_pattern(inst, (-1, 1, 0))
    np.testing.assert_allclose(rec.x, [-1 / 3, 1, 0], atol=1e-12)
    assert rec.multiplicity is Multiplicity.UNIQUE_IN_PATTERN
    bad = solve_pattern(inst, (-1, -1, -1))
    assert isinstance(bad, PatternInfeasible) and bad.certificate is not None
    zero = solve_pattern(load("remns_b00"), (0, 0, 0))
    np.testing.assert_array_equal(zero.x, 0)


def test_solve_pattern_is_exact(rng):
    for _ in range(100):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, n + 1))
        inst = GaveInstance(rng.integers(-1, 2, (m, n)), rng.integers(-1, 2, (m, n)),
                            rng.integers(-1, 2, m))
        s = tuple(int(v) for v in rng.integers(-1, 2, n))
        out = solve_pattern(inst, s)
        if isinstance(out, SolutionRecord):
            assert out.residual_inf <= 1e-8
            assert sign_of(out.x) == s


def test_polish_snaps_fixed_point_noise():
    inst = GaveInstance([[1, -1, -1, -1], [-1, 1, 1, -1]], [[1, 1, 0, 0], [0, -1, -1, 1]], [1, 0])
    rec = polish(inst, [3.1e-10, -3.1e-10, -3.1e-10, -1.0])
    assert rec.pattern == (0, 0, 0, -1)


# families

def test_sample_family_examples():
    inst = load("sec32a")
    fam = sample_family(inst, [1, 1, 1], 3, seed=1)
    assert fam.complete and len(fam.members) == 3
    for rec in fam.members:
        assert rec.pattern == (1, 1, 1)
        np.testing.assert_allclose(rec.x[:2], [1, 1], atol=1e-9)

    inst = load("gaveinf")
    fam = sample_family(inst, [0.5, 1, 0], 3, seed=2)
    assert fam.complete
    for rec in fam.members:
        assert rec.x[0] == pytest.approx(0.5) and rec.x[1] > 0 and rec.x[2] == 0

    single = sample_family(inst, [0.5, 1, 0], 1)
    assert len(single.members) == 1


def test_sample_family_unique_pattern_is_partial():
    fam = sample_family(load("sec32a"), [1, 1, 0], 3)
    assert not fam.complete and len(fam.members) == 1


# enumeration oracle

@pytest.mark.parametrize("name,total,count", [
    ("remns_b00", "finite", 1),
    ("remns_b1m1", "finite", 2),
    ("remns_b11", "infinite", None),
    ("remns_bm11", "0", 0),
    ("egs2", "finite", 1),
    ("egs4", "finite", 2),
    ("egs6", "finite", 1),
    ("egs7", "finite", 2),
    ("egs1", "infinite", None),
    ("egs3", "infinite", None),
    ("egs5", "infinite", None),
])
def test_enumeration_counts(name, total, count):
    rep = enumerate_patterns(load(name))
    assert rep.total == total
    assert rep.count_if_finite == count


def test_enumeration_budget():
    inst = GaveInstance(np.ones((1, 4)), np.zeros((1, 4)), [1])
    with pytest.raises(BudgetExceededError):
        enumerate_patterns(inst, budget=80)


def test_convex_combination_of_nonnegative_solutions():
    for name in ("egs1", "egs5", "remns_b11"):
        inst = load(name)
        rep = enumerate_patterns(inst)
        nonneg = [e for e in rep.feasible() if min(e.s) >= 0]
        xs = [e.x for e in nonneg]
        for e in nonneg:
            if e.status == "infinite":
                xs += [m.x for m in sample_family(inst, e.x, 3, seed=0).members]
        assert len(xs) >= 2
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                mid = 0.5 * (xs[i] + xs[j])
                assert np.abs(residual(inst, mid)).max() <= 1e-8


def test_other_solvers_agree_with_enumerator():
    g = np.random.default_rng(17)
    for _ in range(100):
        n = int(g.integers(1, 6))
        m = int(g.integers(1, min(3, n) + 1))
        inst = GaveInstance(g.integers(-1, 2, (m, n)), g.integers(-1, 2, (m, n)),
                            g.integers(-1, 2, m))
        rep = enumerate_patterns(inst)
        found = []
        try:
            # off the contraction regime the iteration may diverge
            x, trace = fixed_point_x(inst, tol=Tolerances(maxit=500))
        except NumericalError:
            trace = None
        if trace is not None and trace.converged and trace.residual_inf <= 1e-8:
            rec = polish(inst, x)
            if rec is not None:
                found.append(rec)
        for e in rep.feasible():
            if e.status == "infinite":
                found += list(sample_family(inst, e.x, 2, seed=0).members)
        for s in [tuple(int(v) for v in g.integers(-1, 2, n)) for _ in range(3)]:
            out = classify_pattern(inst, s)
            assert out.status == rep.entry(s).status
        for rec in found:
            assert rep.entry(rec.pattern).status != "infeasible"
            if rec.multiplicity is not Multiplicity.UNKNOWN:
                expect = "unique" if rec.multiplicity is Multiplicity.UNIQUE_IN_PATTERN else "infinite"
                assert rep.entry(rec.pattern).status == expect
