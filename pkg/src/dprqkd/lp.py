"""Deterministic linear-program solving for the yield-estimation bounds.

Thin, contract-stable layer over scipy's HiGHS backend: problems are plain
data, solutions report a status instead of raising, and repeated solves of
the same problem return bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

__all__ = ["LpProblem", "LpSolution", "lp_solve"]


@dataclass(frozen=True)
class LpProblem:
    """min/max c @ x  s.t.  A_ub @ x <= b_ub,  A_eq @ x == b_eq,  lb <= x <= ub.

    Constraint matrices may be dense arrays or scipy sparse matrices; either
    of the constraint blocks may be omitted.
    """

    objective: np.ndarray
    a_ub: object = None
    b_ub: np.ndarray | None = None
    a_eq: object = None
    b_eq: np.ndarray | None = None
    bounds: list[tuple[float, float]] = field(default_factory=list)
    sense: str = "min"

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        c = np.asarray(self.objective, dtype=float)
        if not np.all(np.isfinite(c)):
            raise ValueError("objective coefficients must be finite")
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError("variable bounds must satisfy lower <= upper")


@dataclass(frozen=True)
class LpSolution:
    """Outcome of one solve: status in {optimal, infeasible, unbounded}."""

    status: str
    objective: float | None
    x: np.ndarray | None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def lp_solve(problem: LpProblem) -> LpSolution:
    """Solve deterministically; infeasible/unbounded come back as statuses.

    Badly scaled problems (mixing coefficients spanning many orders of
    magnitude) can make the presolve pass misreport infeasibility, so any
    non-optimal first attempt is retried once with presolve disabled before
    the status is believed.
    """
    c = np.asarray(problem.objective, dtype=float)
    if problem.sense == "max":
        c = -c
    bounds = problem.bounds if problem.bounds else [(None, None)] * c.size
    a_ub = problem.a_ub
    if a_ub is not None and not sp.issparse(a_ub):
        a_ub = np.asarray(a_ub, dtype=float)
    a_eq = problem.a_eq
    if a_eq is not None and not sp.issparse(a_eq):
        a_eq = np.asarray(a_eq, dtype=float)

    def attempt(options):
        return linprog(
            c,
            A_ub=a_ub,
            b_ub=problem.b_ub,
            A_eq=a_eq,
            b_eq=problem.b_eq,
            bounds=bounds,
            method="highs",
            options=options,
        )

    res = attempt({})
    if res.status != 0:
        res = attempt({"presolve": False})
    if res.status == 0:
        value = float(res.fun)
        if problem.sense == "max":
            value = -value
        return LpSolution("optimal", value, np.asarray(res.x, dtype=float))
    if res.status == 2:
        return LpSolution("infeasible", None, None)
    if res.status == 3:
        return LpSolution("unbounded", None, None)
    raise RuntimeError(f"LP solver failed unexpectedly: {res.message}")
