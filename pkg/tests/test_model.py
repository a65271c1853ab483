import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gavekit.errors import InputError
from gavekit.generator import PROPERTIES, GeneratorConfig, random_instance
from gavekit.analysis import check_contraction_A
from gavekit.linalg import op_norm, pinv
from gavekit.model import (
    GaveInstance,
    Splitting,
    Target,
    format_pattern,
    jacobi_splitting,
    parse_instance,
    parse_pattern,
    residual,
    serialize_instance,
    sign_of,
    sign_transform,
)

from conftest import FIXTURES, load, load_x


@pytest.mark.parametrize("name,sol", [
    ("exam_inf", "exam_inf_x1"),
    ("thmmp_remark", "thmmp_remark_x2"),
])
def test_residual_fixture_solutions(name, sol):
    inst = load(name)
    assert np.abs(residual(inst, load_x(sol))).max() <= 1e-12


def test_residual_at_zero(rng):
    inst = GaveInstance(rng.standard_normal((2, 4)), rng.standard_normal((2, 4)), rng.standard_normal(2))
    np.testing.assert_array_equal(residual(inst, np.zeros(4)), -inst.b)


def test_sign_transform_examples():
    inst = load("sec32a")
    np.testing.assert_array_equal(sign_transform(inst, (1, 1, 0)), [[-1, 0, 0], [0, 1, 0]])
    np.testing.assert_array_equal(sign_transform(inst, (-1, -1, -1)), [[-3, 0, 0], [0, -3, 0]])
    A = np.array([[1.0, 2, 3]])
    np.testing.assert_array_equal(sign_transform(GaveInstance(A, 0 * A, [1]), (1, 1, 1)), A)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 3))
def test_sign_transform_identity(seed, m, extra):
    g = np.random.default_rng(seed)
    n = m + extra
    inst = GaveInstance(g.standard_normal((m, n)), g.standard_normal((m, n)), g.standard_normal(m))
    x = g.standard_normal(n) * g.integers(0, 2, n)
    s = sign_of(x)
    D = np.asarray(s, dtype=float)
    lhs = residual(inst, x)
    rhs = sign_transform(inst, s) @ (D * x) - inst.b
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_overdetermined_rejected():
    with pytest.raises(InputError) as exc:
        GaveInstance(np.ones((3, 2)), np.ones((3, 2)), np.ones(3))
    assert exc.value.code == "E_OVERDETERMINED"


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.json")), ids=lambda p: p.stem)
def test_fixture_round_trip(path):
    inst = parse_instance(path.read_bytes())
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert again == inst
    assert serialize_instance(again) == text


def test_exam_inf_shape():
    inst = load("exam_inf")
    assert (inst.m, inst.n) == (2, 3)


@pytest.mark.parametrize("text,code", [
    ('{"A": [[1, 2], [3]], "B": [[1, 2], [3, 4]], "b": [1, 2]}', "E_RAGGED"),
    ('{"A": [[1, NaN]], "B": [[1, 2]], "b": [1]}', "E_NONFINITE"),
    ('{"A": [[1, 2]], "B": [[1, 2]], "b": [1, 2]}', "E_DIM"),
    ('{"A": [[1, 2]], "B": [[1, 2]]', "E_JSON"),
    ('{"A": [[1, 2]], "B": [[1, 2]]}', "E_SCHEMA"),
    ('{"m": 2, "A": [[1, 2]], "B": [[1, 2]], "b": [1]}', "E_DIM"),
    ('{"A": [["1/0", 2]], "B": [[1, 2]], "b": [1]}', "E_NUMBER"),
])
def test_parse_errors_are_distinct(text, code):
    with pytest.raises(InputError) as exc:
        parse_instance(text)
    assert exc.value.code == code


def test_rational_entries_are_exact():
    inst = parse_instance('{"A": [["12/7", 1]], "B": [[0, 0]], "b": ["-3/7"]}')
    assert inst.A[0, 0] == 12 / 7
    assert inst.b[0] == -3 / 7


def test_pattern_syntax():
    assert parse_pattern("+,-,0") == (1, -1, 0)
    assert format_pattern((1, -1, 0)) == "+,-,0"
    with pytest.raises(InputError):
        parse_pattern("+,x")


def test_sign_threshold():
    assert sign_of([1.0, 5e-11, -1e-9]) == (1, 0, -1)


def test_splitting_checks():
    inst = load("zn1")
    with pytest.raises(InputError):
        Splitting(Target.B, np.eye(2, 3), np.zeros((2, 3)), "bad").validate(inst)
    jac = jacobi_splitting(inst, Target.A)
    np.testing.assert_allclose(jac.M - jac.N, inst.A, atol=1e-12)
    assert jac.rank == inst.m


# generator

def test_generator_contraction_example():
    inst = random_instance(GeneratorConfig(3, 5, "contraction-A"), seed=7)
    assert op_norm(pinv(inst.A) @ inst.B, 2) < 1
    assert check_contraction_A(inst).applies


def test_generator_deterministic():
    for prop in PROPERTIES:
        cfg = GeneratorConfig(2, 4, prop)
        assert random_instance(cfg, 3) == random_instance(cfg, 3)
    assert random_instance(GeneratorConfig(2, 4), 3) != random_instance(GeneratorConfig(2, 4), 4)


def test_generator_none_is_finite():
    inst = random_instance(GeneratorConfig(2, 3), 0)
    assert np.all(np.isfinite(inst.A)) and np.all(np.isfinite(inst.B))


def test_generator_rejects_bad_config():
    with pytest.raises(InputError):
        GeneratorConfig(3, 2)
    with pytest.raises(InputError):
        GeneratorConfig(2, 2, "submatrix")
    with pytest.raises(InputError):
        GeneratorConfig(2, 3, "bogus")
