"""LP layer tests: examples, vertex-enumeration agreement, determinism."""

import numpy as np
import pytest

from dprqkd import LpProblem, lp_solve
from helpers import vertex_enumeration_optimum


def random_feasible_problem(rng, n_vars=None):
    """Random bounded LP guaranteed feasible (an interior point is built in)."""
    n = n_vars or int(rng.integers(2, 6))
    m = int(rng.integers(2, 7))
    a = rng.normal(size=(m, n))
    x0 = rng.uniform(0.2, 0.8, size=n)
    b = a @ x0 + rng.uniform(0.05, 1.0, size=m)
    c = rng.normal(size=n)
    sense = "min" if rng.random() < 0.5 else "max"
    return LpProblem(c, a_ub=a, b_ub=b, bounds=[(0.0, 1.0)] * n, sense=sense)


class TestExamples:
    def test_min_with_lower_cut(self):
        p = LpProblem(
            np.array([1.0]),
            a_ub=np.array([[-1.0]]),
            b_ub=np.array([-3.0]),
            bounds=[(0.0, 10.0)],
        )
        sol = lp_solve(p)
        assert sol.optimal
        assert sol.objective == pytest.approx(3.0, abs=1e-9)

    def test_max_two_variables(self):
        p = LpProblem(
            np.array([1.0, 1.0]),
            a_ub=np.array([[1.0, 1.0]]),
            b_ub=np.array([1.0]),
            bounds=[(0.0, 1.0)] * 2,
            sense="max",
        )
        sol = lp_solve(p)
        assert sol.objective == pytest.approx(1.0, abs=1e-9)

    def test_infeasible_status(self):
        p = LpProblem(
            np.array([1.0]),
            a_ub=np.array([[1.0], [-1.0]]),
            b_ub=np.array([1.0, -2.0]),
            bounds=[(0.0, 10.0)],
        )
        assert lp_solve(p).status == "infeasible"

    def test_unbounded_status(self):
        p = LpProblem(np.array([1.0]), bounds=[(0.0, float("inf"))], sense="max")
        assert lp_solve(p).status == "unbounded"

    def test_equality_constraints(self):
        p = LpProblem(
            np.array([1.0, 2.0]),
            a_eq=np.array([[1.0, 1.0]]),
            b_eq=np.array([1.0]),
            bounds=[(0.0, 1.0)] * 2,
        )
        sol = lp_solve(p)
        assert sol.objective == pytest.approx(1.0, abs=1e-9)
        assert sol.x[0] == pytest.approx(1.0, abs=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            LpProblem(np.array([np.inf]), bounds=[(0.0, 1.0)])
        with pytest.raises(ValueError):
            LpProblem(np.array([1.0]), bounds=[(1.0, 0.0)])
        with pytest.raises(ValueError):
            LpProblem(np.array([1.0]), bounds=[(0.0, 1.0)], sense="argmax")


class TestVertexOracle:
    def test_agreement_on_random_problems(self, rng):
        for _ in range(60):
            p = random_feasible_problem(rng)
            want = vertex_enumeration_optimum(p)
            got = lp_solve(p)
            assert got.optimal
            assert got.objective == pytest.approx(want, abs=1e-8)

    def test_agreement_with_equalities(self, rng):
        for _ in range(20):
            n = 4
            a = rng.normal(size=(3, n))
            x0 = rng.uniform(0.2, 0.8, size=n)
            b = a @ x0 + rng.uniform(0.05, 1.0, size=3)
            aeq = rng.normal(size=(1, n))
            beq = aeq @ x0
            c = rng.normal(size=n)
            p = LpProblem(
                c, a_ub=a, b_ub=b, a_eq=aeq, b_eq=beq, bounds=[(0.0, 1.0)] * n
            )
            want = vertex_enumeration_optimum(p)
            got = lp_solve(p)
            assert got.optimal
            assert got.objective == pytest.approx(want, abs=1e-8)


class TestDeterminism:
    def test_bit_identical_repeat_solves(self, rng):
        p = random_feasible_problem(rng, n_vars=5)
        first = lp_solve(p)
        for _ in range(3):
            again = lp_solve(p)
            assert again.objective == first.objective
            assert np.array_equal(again.x, first.x)

    def test_residuals_within_tolerance(self, rng):
        for _ in range(20):
            p = random_feasible_problem(rng)
            sol = lp_solve(p)
            resid = np.asarray(p.a_ub) @ sol.x - np.asarray(p.b_ub)
            assert float(resid.max()) <= 1e-8
