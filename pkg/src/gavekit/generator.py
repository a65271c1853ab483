"""Random instances that provably satisfy a chosen sufficient condition.

Each property has a direct construction followed by a re-check with the
matching checker from :mod:`gavekit.analysis`; draws that fail the re-check
are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import (
    check_contraction_A,
    check_signcone_A,
    check_signcone_B,
    check_submatrix_condition,
    gamma_ratio,
)
from .config import DEFAULT_TOL, Tolerances
from .errors import BudgetExceededError, InputError
from .linalg import op_norm, parse_norm, pinv
from .model import GaveInstance, all_ones, as_pattern

PROPERTIES = ("none", "contraction-A", "submatrix", "signcone-A", "signcone-B", "strict-signcone-B")


@dataclass(frozen=True)
class GeneratorConfig:
    m: int
    n: int
    property: str = "none"
    p: float | str = 2
    # sign pattern for the sign-cone properties; all ones by default
    pattern: tuple | None = None
    max_tries: int = 200

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InputError("m and n must be positive", "E_DIM", "m")
        if self.m > self.n:
            raise InputError(f"m = {self.m} exceeds n = {self.n}", "E_OVERDETERMINED", "m")
        if self.property not in PROPERTIES:
            raise InputError(f"unknown property {self.property!r}", "E_PROPERTY", "property")
        if self.property == "submatrix" and self.m == self.n:
            raise InputError("the submatrix property needs m < n", "E_PROPERTY", "n")
        if self.property == "strict-signcone-B" and self.m == self.n:
            raise InputError("the strict sign-cone property needs m < n", "E_PROPERTY", "n")
        parse_norm(self.p)


def _orthogonal(rng, m):
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def _diag_block(rng, m, n):
    """``Q [D, 0] P`` with Q orthogonal, D positive diagonal and P a permutation."""
    Q = _orthogonal(rng, m)
    d = rng.uniform(0.5, 2.0, m)
    core = np.zeros((m, n))
    core[:, :m] = np.diag(d)
    perm = rng.permutation(n)
    return Q, d, core[:, perm]


def _draw(cfg: GeneratorConfig, rng):
    m, n, p = cfg.m, cfg.n, parse_norm(cfg.p)
    q = rng.uniform(0.2, 0.9)
    s = np.asarray(cfg.pattern if cfg.pattern is not None else all_ones(n), dtype=float)
    prop = cfg.property

    if prop == "none":
        return rng.standard_normal((m, n)), rng.standard_normal((m, n)), rng.standard_normal(m)

    if prop == "contraction-A":
        A = rng.standard_normal((m, n))
        B = rng.standard_normal((m, n))
        B *= q / op_norm(pinv(A) @ B, p)
        return A, B, rng.standard_normal(m)

    if prop == "submatrix":
        A = rng.standard_normal((m, n))
        B = rng.standard_normal((m, n))
        J = np.sort(rng.choice(n, m, replace=False))
        B *= q / op_norm(np.linalg.solve(A[:, J], B[:, J]), p)
        return A, B, rng.standard_normal(m)

    if prop == "signcone-B":
        # B^+ = P^T [D^-1; 0] Q^T, so B^+ b <= 0 and B^+ A diag(s) >= 0 follow
        # from Q^T b <= 0 and Q^T A diag(s) >= 0
        Q, d, B = _diag_block(rng, m, n)
        B = Q @ B
        A0 = rng.uniform(0.0, 1.0, (m, n)) * s
        A = Q @ A0
        A *= q / op_norm(pinv(B) @ A * s, p)
        b = -Q @ (d * rng.uniform(0.1, 1.0, m))
        return A, B, b

    if prop == "signcone-A":
        # A = Q [D, 0] P diag(s): diag(s) A^+ = P^T [D^-1; 0] Q^T
        Q, d, core = _diag_block(rng, m, n)
        A = (Q @ core) * s
        B = Q @ rng.uniform(0.0, 1.0, (m, n))
        B *= q / op_norm(pinv(A) @ B, p)
        b = Q @ (d * rng.uniform(0.1, 1.0, m))
        return A, B, b

    # strict-signcone-B: choose z = B^+ b < 0 inside the row space of B,
    # then shrink A below gamma/2 in the inf-norm
    B = rng.standard_normal((m, n))
    B[0] = rng.uniform(0.5, 1.5, n)
    w = np.zeros(m)
    w[0] = -1.0
    w[1:] = 0.05 * rng.standard_normal(m - 1)
    z = B.T @ w
    b = B @ z
    gamma = gamma_ratio(z)
    A = rng.standard_normal((m, n))
    A *= 0.4 * gamma / max(op_norm(pinv(B) @ A, np.inf), 1e-300)
    return A, B, b


def _holds(cfg: GeneratorConfig, inst: GaveInstance, tol: Tolerances) -> bool:
    p = cfg.p
    s = as_pattern(cfg.pattern, inst.n) if cfg.pattern is not None else None
    prop = cfg.property
    if prop == "none":
        return True
    if prop == "contraction-A":
        return check_contraction_A(inst, None, p, tol).applies
    if prop == "submatrix":
        return check_submatrix_condition(inst, p, tol=tol).applies
    if prop == "signcone-A":
        return check_signcone_A(inst, None, s, p, tol)[0].applies
    if prop == "signcone-B":
        return check_signcone_B(inst, None, s, p, tol)[0].applies
    return check_signcone_B(inst, None, s, np.inf, tol)[1].applies


def random_instance(cfg: GeneratorConfig, seed: int, tol: Tolerances = DEFAULT_TOL) -> GaveInstance:
    """Draw an instance with ``cfg.property``, deterministic in ``seed``.

    Raises
    ------
    BudgetExceededError
        If ``cfg.max_tries`` draws all fail the re-check.
    """
    if cfg.pattern is not None:
        s = as_pattern(cfg.pattern, cfg.n)
        if 0 in s and cfg.property != "none":
            raise InputError("sign-cone properties need a pattern in {-1,1}^n", "E_PATTERN", "pattern")
    rng = np.random.default_rng(seed)
    for _ in range(cfg.max_tries):
        A, B, b = _draw(cfg, rng)
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B)) and np.all(np.isfinite(b))):
            continue
        inst = GaveInstance(A, B, b)
        if _holds(cfg, inst, tol):
            return inst
    raise BudgetExceededError(
        f"no instance with property {cfg.property!r} after {cfg.max_tries} draws "
        f"(m={cfg.m}, n={cfg.n}, p={cfg.p}, seed={seed})"
    )
