"""Problem data for ``A x - B|x| = b`` and its sign-pattern reformulation."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InputError
from .linalg import as_matrix, as_vector, numerical_rank, pinv

SignPattern = tuple  # tuple[int, ...] with entries in {-1, 0, 1}


@dataclass(frozen=True, eq=False)
class GaveInstance:
    """The triple (A, B, b) with A, B of shape (m, n) and m <= n."""

    A: np.ndarray
    B: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        b = as_vector(self.b, "b")
        if A.shape != B.shape:
            raise InputError(f"A is {A.shape} but B is {B.shape}", "E_DIM", "B")
        if b.size != A.shape[0]:
            raise InputError(f"b has length {b.size}, expected m = {A.shape[0]}", "E_DIM", "b")
        if A.shape[0] > A.shape[1]:
            raise InputError(
                f"overdetermined systems (m = {A.shape[0]} > n = {A.shape[1]}) are not supported",
                "E_OVERDETERMINED",
                "A",
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def with_b(self, b) -> "GaveInstance":
        return GaveInstance(self.A, self.B, b)

    def __eq__(self, other):
        if not isinstance(other, GaveInstance):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None


# --------------------------------------------------------------------------
# sign patterns

def as_pattern(s: Iterable, n: int | None = None) -> SignPattern:
    out = tuple(int(v) for v in s)
    if any(v not in (-1, 0, 1) for v in out):
        raise InputError(f"pattern entries must be -1, 0 or 1, got {out}", "E_PATTERN", "pattern")
    if n is not None and len(out) != n:
        raise InputError(f"pattern has length {len(out)}, expected {n}", "E_DIM", "pattern")
    return out


def parse_pattern(text: str, n: int | None = None) -> SignPattern:
    """Parse the shell-friendly form ``"+,-,0"`` (``1``/``-1`` also accepted)."""
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1, "0": 0}
    items = [t.strip() for t in text.split(",")]
    try:
        return as_pattern((table[t] for t in items), n)
    except KeyError as exc:
        raise InputError(f"bad pattern token {exc.args[0]!r} in {text!r}", "E_PATTERN", "pattern") from None


def format_pattern(s: Sequence[int]) -> str:
    return ",".join({1: "+", -1: "-", 0: "0"}[int(v)] for v in s)


def zero_threshold(x, tol: Tolerances = DEFAULT_TOL) -> float:
    x = np.asarray(x, dtype=float)
    return tol.zero * (1.0 + (np.abs(x).max() if x.size else 0.0))


def sign_of(x, tol: Tolerances = DEFAULT_TOL) -> SignPattern:
    """Entrywise sign with the relative zero threshold applied."""
    x = np.asarray(x, dtype=float)
    thr = zero_threshold(x, tol)
    return tuple(0 if abs(v) <= thr else (1 if v > 0 else -1) for v in x)


def support(s: Sequence[int]) -> list[int]:
    return [i for i, v in enumerate(s) if v != 0]


def all_ones(n: int) -> SignPattern:
    return (1,) * n


# --------------------------------------------------------------------------
# core maps

def residual(inst: GaveInstance, x) -> np.ndarray:
    """``A x - B|x| - b``."""
    x = as_vector(x, "x")
    if x.size != inst.n:
        raise InputError(f"x has length {x.size}, expected n = {inst.n}", "E_DIM", "x")
    return inst.A @ x - inst.B @ np.abs(x) - inst.b


def sign_transform(inst: GaveInstance, s: Sequence[int]) -> np.ndarray:
    """``A diag(s) - B``; nonnegative y solving ``C y = b`` give ``x = diag(s) y``."""
    s = as_pattern(s, inst.n)
    return inst.A * np.asarray(s, dtype=float) - inst.B


# --------------------------------------------------------------------------
# splittings

class Target(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True, eq=False)
class Splitting:
    """``M - N`` equal to A (target A) or B (target B)."""

    target: Target
    M: np.ndarray
    N: np.ndarray
    label: str = "user"

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        object.__setattr__(self, "M", as_matrix(self.M, "M"))
        object.__setattr__(self, "N", as_matrix(self.N, "N"))
        if self.M.shape != self.N.shape:
            raise InputError(f"M is {self.M.shape} but N is {self.N.shape}", "E_DIM", "N")

    @classmethod
    def from_M(cls, inst: GaveInstance, target, M, label: str = "user") -> "Splitting":
        target = Target(target)
        M = as_matrix(M, "M")
        T = inst.A if target is Target.A else inst.B
        if M.shape != T.shape:
            raise InputError(f"M is {M.shape}, expected {T.shape}", "E_DIM", "M")
        return cls(target, M, M - T, label)

    @classmethod
    def trivial(cls, inst: GaveInstance, target) -> "Splitting":
        target = Target(target)
        T = inst.A if target is Target.A else inst.B
        return cls(target, T, np.zeros_like(T), "trivial")

    @cached_property
    def M_pinv(self) -> np.ndarray:
        return pinv(self.M)

    @cached_property
    def rank(self) -> int:
        return numerical_rank(self.M)

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.N)

    def validate(self, inst: GaveInstance, atol: float = 1e-12) -> None:
        T = inst.A if self.target is Target.A else inst.B
        if self.M.shape != T.shape or not np.allclose(self.M - self.N, T, rtol=0.0, atol=atol):
            raise InputError(f"M - N does not reproduce {self.target.value}", "E_SPLITTING", "M")

    def to_json(self) -> dict:
        return {"target": self.target.value, "label": self.label, "M": _num_rows(self.M)}


def jacobi_splitting(inst: GaveInstance, target) -> Splitting:
    """Diagonal of the leading square block as M, zero pivots padded with 1.

    The padding keeps M at full row rank so the pseudoinverse map is well
    defined; N is whatever remains.
    """
    target = Target(target)
    T = inst.A if target is Target.A else inst.B
    M = np.zeros_like(T)
    for i in range(T.shape[0]):
        M[i, i] = T[i, i] if T[i, i] != 0 else 1.0
    return Splitting(target, M, M - T, "jacobi")


# --------------------------------------------------------------------------
# solutions

class Multiplicity(str, enum.Enum):
    UNKNOWN = "unknown"
    UNIQUE_IN_PATTERN = "unique_in_pattern"
    INFINITE_IN_PATTERN = "infinite_in_pattern"


@dataclass(frozen=True, eq=False)
class SolutionRecord:
    x: np.ndarray
    residual_inf: float
    pattern: SignPattern
    multiplicity: Multiplicity = Multiplicity.UNKNOWN

    @classmethod
    def build(cls, inst: GaveInstance, x, multiplicity=Multiplicity.UNKNOWN,
              tol: Tolerances = DEFAULT_TOL) -> "SolutionRecord":
        x = as_vector(x, "x")
        # snap sub-threshold entries so the stored pattern and x agree exactly
        thr = zero_threshold(x, tol)
        x = np.where(np.abs(x) <= thr, 0.0, x)
        r = float(np.abs(residual(inst, x)).max())
        return cls(as_vector(x, "x"), r, sign_of(x, tol), Multiplicity(multiplicity))

    def is_solution(self, inst: GaveInstance, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.residual_inf <= residual_bound(inst, tol)

    def to_json(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "residual_inf": float(self.residual_inf),
            "pattern": list(self.pattern),
            "multiplicity": self.multiplicity.value,
        }


def residual_bound(inst: GaveInstance, tol: Tolerances = DEFAULT_TOL) -> float:
    """Residual accepted as "solves the equation": tol.residual * (1 + ||b||_inf)."""
    return tol.residual * (1.0 + float(np.abs(inst.b).max()))


# --------------------------------------------------------------------------
# JSON

def parse_number(value, field_name: str) -> float:
    """Accept a JSON number or an exact-rational string such as ``"12/7"``."""
    if isinstance(value, bool):
        raise InputError(f"booleans are not numbers: {value!r}", "E_NUMBER", field_name)
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse number {value!r}", "E_NUMBER", field_name) from None
    else:
        raise InputError(f"expected a number, got {type(value).__name__}", "E_NUMBER", field_name)
    if not math.isfinite(out):
        raise InputError(f"non-finite value {value!r}", "E_NONFINITE", field_name)
    return out


def parse_vector_field(data, field_name: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise InputError("expected a non-empty list", "E_SCHEMA", field_name)
    return np.array([parse_number(v, f"{field_name}[{i}]") for i, v in enumerate(data)])


def parse_matrix_field(data, field_name: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise InputError("expected a non-empty list of rows", "E_SCHEMA", field_name)
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or not row:
            raise InputError("each row must be a non-empty list", "E_SCHEMA", f"{field_name}[{i}]")
        rows.append([parse_number(v, f"{field_name}[{i}][{j}]") for j, v in enumerate(row)])
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"ragged rows with lengths {sorted(widths)}", "E_RAGGED", field_name)
    return np.array(rows)


def load_json_bytes(text, what: str = "input"):
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            raise InputError("not valid UTF-8", "E_JSON", what) from None
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}", "E_JSON", what) from None


def _reject_constant(name):
    raise InputError(f"non-finite constant {name}", "E_NONFINITE", "json")


def parse_instance(text) -> GaveInstance:
    """Parse instance JSON (bytes or str)."""
    data = load_json_bytes(text, "instance")
    if not isinstance(data, dict):
        raise InputError("top level must be an object", "E_SCHEMA", "instance")
    for key in ("A", "B", "b"):
        if key not in data:
            raise InputError("missing required field", "E_SCHEMA", key)
    A = parse_matrix_field(data["A"], "A")
    B = parse_matrix_field(data["B"], "B")
    b = parse_vector_field(data["b"], "b")
    for key, actual in (("m", A.shape[0]), ("n", A.shape[1])):
        if key in data:
            declared = data[key]
            if isinstance(declared, bool) or not isinstance(declared, int):
                raise InputError("must be an integer", "E_SCHEMA", key)
            if declared != actual:
                raise InputError(f"declared {declared} but A implies {actual}", "E_DIM", key)
    return GaveInstance(A, B, b)


def _num(v: float):
    v = float(v)
    if v == 0.0:
        return 0
    if v.is_integer() and abs(v) < 2**53:
        return int(v)
    return v


def _num_rows(M) -> list:
    return [[_num(v) for v in row] for row in np.asarray(M)]


def instance_to_json(inst: GaveInstance) -> dict:
    return {
        "m": inst.m,
        "n": inst.n,
        "A": _num_rows(inst.A),
        "B": _num_rows(inst.B),
        "b": [_num(v) for v in inst.b],
    }


def serialize_instance(inst: GaveInstance) -> bytes:
    """Canonical JSON: fixed key order, shortest round-trip floats, integers bare."""
    d = instance_to_json(inst)
    lines = [
        "{",
        f'  "m": {d["m"]},',
        f'  "n": {d["n"]},',
        f'  "A": {_rows_text(d["A"])},',
        f'  "B": {_rows_text(d["B"])},',
        f'  "b": {json.dumps(d["b"])}',
        "}",
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _rows_text(rows) -> str:
    return "[" + ", ".join(json.dumps(r) for r in rows) + "]"


def parse_splitting(text, inst: GaveInstance) -> Splitting:
    """Splitting file: ``{"target": "A"|"B", "M": [[...]]}``; N is derived."""
    data = load_json_bytes(text, "splitting")
    if not isinstance(data, dict):
        raise InputError("top level must be an object", "E_SCHEMA", "splitting")
    target = data.get("target")
    if target not in ("A", "B"):
        raise InputError(f"must be \"A\" or \"B\", got {target!r}", "E_SCHEMA", "target")
    if "M" not in data:
        raise InputError("missing required field", "E_SCHEMA", "M")
    M = parse_matrix_field(data["M"], "M")
    label = data.get("label", "user")
    if not isinstance(label, str):
        raise InputError("must be a string", "E_SCHEMA", "label")
    return Splitting.from_M(inst, target, M, label)


def parse_solution(text, n: int | None = None) -> np.ndarray:
    """Solution file: a SolutionRecord object or a bare list; only ``x`` is read."""
    data = load_json_bytes(text, "solution")
    if isinstance(data, dict):
        if "x" not in data:
            raise InputError("missing required field", "E_SCHEMA", "x")
        data = data["x"]
    x = parse_vector_field(data, "x")
    if n is not None and x.size != n:
        raise InputError(f"x has length {x.size}, expected n = {n}", "E_DIM", "x")
    return x
