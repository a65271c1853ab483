"""Tolerance configuration.

All numerical thresholds live in one frozen dataclass so that checkers,
solvers and the CLI agree on what "zero", "strictly less than one" and
"feasible" mean.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

ENV_VAR = "GAVEKIT_TOL"


@dataclass(frozen=True)
class Tolerances:
    # relative SVD cutoff; None means max(m, n) * eps
    rank_rtol: float | None = None
    # strict "< bound" tests use value < bound - margin
    margin: float = 1e-12
    # ">= 0" tests on computed matrices accept entries >= -sign_tol
    sign_tol: float = 1e-12
    feas: float = 1e-9
    strict: float = 1e-9
    # |x_i| <= zero * (1 + ||x||_inf) counts as a zero entry
    zero: float = 1e-10
    step: float = 1e-10
    residual: float = 1e-8
    maxit: int = 10_000

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)


_ALIASES = {
    "rank": "rank_rtol",
    "feas": "feas",
    "strict": "strict",
    "margin": "margin",
    "sign": "sign_tol",
    "zero": "zero",
    "step": "step",
    "residual": "residual",
    "maxit": "maxit",
}


def parse_tolerances(text: str, base: Tolerances | None = None) -> Tolerances:
    """Parse ``"feas=1e-8,step=1e-12"`` (or a bare number) into Tolerances.

    A bare number sets both the feasibility and strictness tolerances.
    """
    base = base or Tolerances()
    text = text.strip()
    if not text:
        return base
    try:
        value = float(text)
    except ValueError:
        pass
    else:
        if not value > 0:
            raise ValueError(f"{ENV_VAR}: tolerance must be positive, got {text!r}")
        return base.replace(feas=value, strict=value)

    changes: dict[str, float | int] = {}
    for item in text.split(","):
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in _ALIASES:
            raise ValueError(f"{ENV_VAR}: unknown tolerance entry {item.strip()!r}")
        name = _ALIASES[key]
        try:
            changes[name] = int(raw) if name == "maxit" else float(raw)
        except ValueError:
            raise ValueError(f"{ENV_VAR}: bad value for {key}: {raw.strip()!r}") from None
        if not changes[name] > 0:
            raise ValueError(f"{ENV_VAR}: {key} must be positive")
    return base.replace(**changes)


def tolerances_from_env(environ=None) -> Tolerances:
    environ = os.environ if environ is None else environ
    return parse_tolerances(environ.get(ENV_VAR, ""))


DEFAULT_TOL = Tolerances()
